"""The jammer: spectrum sensing, jam-set selection under a budget, and
NACK-based reward observation.

The attacker is black-box: it sees only which RBs were occupied during
the previous slot and whether NACKs appear on the RBs it jammed. Its
surrogate learner shares the allocator's Q-learning machinery; the state
is the sensed-free bitmask and an action jams min(budget, sensed-free)
RBs chosen from the sensed-free set, or nothing. The myopic benchmark is
the same learner with a zero discount and pure greedy selection; the
random benchmark draws its jam set uniformly from all RBs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from math import comb
from random import Random

from .errors import ConfigError
from .qlearn import GREEDY, ExplorePolicy, LearnParams, QTable, jam_prior_rule, \
    q_update, select_action

log = logging.getLogger(__name__)

KINDS = ("none", "random", "myopic", "rl")

NO_JAM = 0  # action index 0


@dataclass(frozen=True)
class AttackStrategy:
    kind: str = "none"
    budget: int = 5

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown attack kind {self.kind!r}")
        if self.budget < 0:
            raise ConfigError(f"jam budget must be >= 0, got {self.budget}")


def sense_spectrum(occupancy_mask: int, total_rbs: int) -> int:
    """Sensed availability: the complement of the previous slot's occupancy."""
    return ((1 << total_rbs) - 1) ^ occupancy_mask


def jam_action_count(sensed_free: int, budget: int) -> int:
    """C(F(t), B) + 1 when more RBs are free than the budget, else 2."""
    f = sensed_free.bit_count()
    if f > budget:
        return comb(f, budget) + 1
    return 2


class Adversary:
    """Holds the surrogate table and the per-slot sense/jam/learn cycle."""

    def __init__(self, strategy: AttackStrategy, total_rbs: int,
                 params: LearnParams, rng: Random):
        if total_rbs > 16:
            raise ConfigError(
                f"{total_rbs} RBs is infeasible for a tabular jammer; "
                "the limit is 16")
        self.strategy = strategy
        self.total_rbs = total_rbs
        budget = strategy.budget
        if budget > total_rbs and strategy.kind != "none":
            log.warning("jam budget %d exceeds %d RBs; clamping", budget, total_rbs)
            budget = total_rbs
        self.budget = budget
        if strategy.kind == "myopic":
            params = LearnParams(alpha=params.alpha, gamma=0.0, explore=GREEDY)
        self.params = params
        self.rng = rng
        self.epsilon = params.explore.epsilon
        self.table = QTable(
            1 << total_rbs,
            lambda s: jam_action_count(s, self.budget),
            jam_prior_rule(self.budget),
        )
        self._jam_sets: dict[int, list[frozenset[int]]] = {}
        self._state: int | None = None
        self._action: int | None = None

    def jam_sets_for(self, sensed_free: int) -> list[frozenset[int]]:
        """Action index -> RB set, for one sensed state. Index 0 jams nothing;
        the rest enumerate budget-sized subsets of the sensed-free RBs in
        lexicographic order (or the whole free set when it fits the budget)."""
        sets = self._jam_sets.get(sensed_free)
        if sets is None:
            free = [rb for rb in range(self.total_rbs) if sensed_free >> rb & 1]
            if len(free) > self.budget:
                sets = [frozenset()] + [
                    frozenset(c) for c in combinations(free, self.budget)]
            else:
                sets = [frozenset(), frozenset(free)]
            self._jam_sets[sensed_free] = sets
        return sets

    def choose_jam_set(self, sensed_free: int) -> frozenset[int]:
        """Commit this slot's jam set given the sensed availability."""
        kind = self.strategy.kind
        if kind == "none":
            return frozenset()
        if kind == "random":
            self._state = self._action = None
            size = min(self.budget, self.total_rbs)
            return frozenset(self.rng.sample(range(self.total_rbs), size))
        eps = self.epsilon if kind == "rl" else 0.0
        a = select_action(self.table, sensed_free, self.rng, epsilon=eps)
        self._state, self._action = sensed_free, a
        return self.jam_sets_for(sensed_free)[a]

    def observe_nacks(self, jam_set: frozenset[int],
                      nack_events: list[tuple[int, int]]) -> int:
        """NACK count detected on jammed RBs only; the attacker monitors
        nothing else."""
        return sum(count for rb, count in nack_events if rb in jam_set)

    def learn(self, reward: int, next_sensed_free: int) -> None:
        """Feed the observed reward and the follow-up sensing into the
        surrogate table (no-op for non-learning kinds)."""
        if self._state is None:
            return
        q_update(self.table, self._state, self._action, reward,
                 next_sensed_free, self.params)
        self._state = self._action = None

    def decay_epsilon(self) -> None:
        pol = self.params.explore
        self.epsilon = max(pol.floor, self.epsilon * pol.decay)
