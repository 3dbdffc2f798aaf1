"""Tabular Q-learning shared by the allocator and the jammer.

Rows are materialized lazily, one dense numpy array per visited state,
because action counts may differ per state (the jammer's action set
depends on how many RBs are sensed free). The init rule runs on first
touch so optimistic priors take part in bootstrapped targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError

InitRule = Callable[[int, int], np.ndarray]  # (state index, action count) -> row


@dataclass
class ExplorePolicy:
    """Epsilon-greedy descriptor; epsilon == 0 is pure greedy."""

    epsilon: float = 0.1
    decay: float = 0.999   # multiplicative, applied once per slot
    floor: float = 0.01

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon {self.epsilon} outside [0,1]")
        if not 0.0 < self.decay <= 1.0:
            raise ConfigError(f"epsilon decay {self.decay} outside (0,1]")
        if not 0.0 <= self.floor <= 1.0:
            raise ConfigError(f"epsilon floor {self.floor} outside [0,1]")


GREEDY = ExplorePolicy(epsilon=0.0, decay=1.0, floor=0.0)


@dataclass
class LearnParams:
    alpha: float = 0.1
    gamma: float = 0.95
    explore: ExplorePolicy = field(default_factory=ExplorePolicy)

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha {self.alpha} outside (0,1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma {self.gamma} outside [0,1]")


class QTable:
    """Action-value table over n_states, with per-state action counts."""

    def __init__(self, n_states: int, n_actions: int | Callable[[int], int],
                 rule: InitRule):
        if n_states < 1:
            raise ConfigError(f"n_states must be >= 1, got {n_states}")
        self.n_states = n_states
        if callable(n_actions):
            self._n_actions = n_actions
        else:
            if n_actions < 1:
                raise ConfigError(f"n_actions must be >= 1, got {n_actions}")
            self._n_actions = lambda s: n_actions
        self._rule = rule
        self._rows: dict[int, np.ndarray] = {}

    def n_actions(self, s: int) -> int:
        return self._n_actions(s)

    def row(self, s: int) -> np.ndarray:
        if not 0 <= s < self.n_states:
            raise IndexError(f"state index {s} outside [0, {self.n_states})")
        r = self._rows.get(s)
        if r is None:
            count = self._n_actions(s)
            if count < 1:
                raise ConfigError(f"state {s} has no actions")
            r = np.asarray(self._rule(s, count), dtype=float)
            if r.shape != (count,):
                raise ConfigError(
                    f"init rule produced shape {r.shape}, expected ({count},)")
            self._rows[s] = r
        return r

    def get(self, s: int, a: int) -> float:
        row = self.row(s)
        if not 0 <= a < len(row):
            raise IndexError(f"action index {a} outside [0, {len(row)})")
        return float(row[a])

    def touched_states(self) -> list[int]:
        return sorted(self._rows)

    def dump(self, path) -> None:
        """Write touched entries as 'state<TAB>action<TAB>value' lines."""
        with open(path, "w") as fh:
            for s in self.touched_states():
                for a, v in enumerate(self._rows[s]):
                    fh.write(f"{s}\t{a}\t{v!r}\n")


def uniform_rule(lo: float, hi: float, rng: Random) -> InitRule:
    """Row entries drawn uniformly from [lo, hi]."""
    if lo > hi:
        raise ConfigError(f"uniform init range empty: ({lo}, {hi})")
    if lo == hi:
        return lambda s, n: np.full(n, lo, dtype=float)

    def rule(s: int, n: int) -> np.ndarray:
        return np.array([rng.uniform(lo, hi) for _ in range(n)])

    return rule


def jam_prior_rule(budget: int) -> InitRule:
    """Optimistic jammer prior: the no-jam action (index 0) starts at zero,
    every jam action at the number of RBs it would jam.

    Assumes the jammer's state index is the sensed-free bitmask and all jam
    actions of a state jam min(budget, popcount(state)) RBs.
    """
    if budget < 0:
        raise ConfigError(f"jam budget must be >= 0, got {budget}")

    def rule(s: int, n: int) -> np.ndarray:
        row = np.full(n, float(min(budget, s.bit_count())))
        row[0] = 0.0
        return row

    return rule


def init_table(n_states: int, n_actions: int | Callable[[int], int],
               rule: InitRule) -> QTable:
    return QTable(n_states, n_actions, rule)


def q_update(table: QTable, s: int, a: int, r: float, s_next: int,
             params: LearnParams) -> float:
    """One value-iteration step on entry (s, a); returns the new value.

    values[s,a] += alpha * (r + gamma * max_a' values[s_next, a'] - values[s,a])
    """
    if not math.isfinite(r):
        raise ValueError(f"reward must be finite, got {r}")
    row = table.row(s)
    if not 0 <= a < len(row):
        raise IndexError(f"action index {a} outside [0, {len(row)})")
    best_next = table.row(s_next).max() if params.gamma > 0.0 else 0.0
    new = row[a] + params.alpha * (r + params.gamma * best_next - row[a])
    row[a] = new
    return float(new)


def select_action(table: QTable, s: int, rng: Random, epsilon: float = 0.0,
                  legal: Sequence[int] | None = None,
                  override=None) -> int:
    """Pick an action for state s.

    legal: optional sequence of permitted action indices (None = all).
    With probability epsilon, uniform over legal actions; otherwise greedy,
    where the override hook (defense attachment point) replaces the default
    lowest-index argmax.
    """
    row = table.row(s)
    if legal is not None and len(legal) == 0:
        raise ConfigError(f"no legal action in state {s}")
    if epsilon > 0.0 and rng.random() < epsilon:
        if legal is None:
            return rng.randrange(len(row))
        return legal[rng.randrange(len(legal))]
    if override is not None:
        if legal is None:
            legal = range(len(row))
        return override(row, legal, rng)
    if legal is None:
        return int(row.argmax())  # numpy breaks ties at the lowest index
    best = legal[0]
    best_v = row[best]
    for a in legal:
        v = row[a]
        if v > best_v:
            best, best_v = a, v
    return best
