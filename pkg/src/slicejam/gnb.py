"""The victim allocator: a tabular Q-learning agent at the gNodeB.

State = free-RB bitmask plus the candidate request's (RB need, weight);
the pair (0, 0) is the end-of-queue sentinel used only as a successor
state. Action 0 defers; action 1+k grants the k-th window of the sorted
free list, i.e. req_rbs consecutive entries starting at free position k,
giving at most F+1 actions. Rewards are the request weights of grants
that survive the slot unjammed.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .errors import SimulationError
from .qlearn import LearnParams, QTable, q_update, select_action, uniform_rule
from .slicing import ActiveService, RbPool, Request


@dataclass(frozen=True)
class GnbState:
    free_mask: int
    req_rbs: int   # 0 only in the sentinel
    req_weight: int  # 0 only in the sentinel


@dataclass(frozen=True)
class GnbAction:
    """kind 'defer' or 'allocate' with a position into the free list."""

    kind: str
    start_free_pos: int = -1


DEFER = 0  # action index 0


def action_decode(a: int) -> GnbAction:
    if a == DEFER:
        return GnbAction(kind="defer")
    return GnbAction(kind="allocate", start_free_pos=a - 1)


def state_layout(total_rbs: int, max_rbs: int) -> tuple[int, int]:
    """(n_states, n_actions) for the allocator's table."""
    n_states = (1 << total_rbs) * (max_rbs + 1) * 6
    return n_states, total_rbs + 1


def state_index(state: GnbState, max_rbs: int) -> int:
    return (state.free_mask * (max_rbs + 1) + state.req_rbs) * 6 + state.req_weight


def state_decode(index: int, max_rbs: int) -> GnbState:
    index, weight = divmod(index, 6)
    mask, rbs = divmod(index, max_rbs + 1)
    return GnbState(free_mask=mask, req_rbs=rbs, req_weight=weight)


def encode_state(pool: RbPool, req_rbs: int, req_weight: int) -> GnbState:
    return GnbState(pool.free_mask(), req_rbs, req_weight)


def legal_actions(free_count: int, req_rbs: int) -> list[int]:
    """Defer plus every placement window that fits in the free list."""
    legal = [DEFER]
    if req_rbs >= 1:
        legal.extend(range(1, free_count - req_rbs + 2))
    return legal


def placement_rb_set(pool: RbPool, start_free_pos: int, req_rbs: int) -> frozenset[int]:
    rbs = pool.free[start_free_pos:start_free_pos + req_rbs]
    if len(rbs) != req_rbs:
        raise SimulationError(
            f"placement at free position {start_free_pos} does not fit")
    return frozenset(rbs)


def book_outcome(grant: ActiveService, jam_set: frozenset[int] | set[int]) -> int:
    """Weight if no granted RB was jammed this slot, else zero."""
    if grant.rb_set & jam_set:
        return 0
    return grant.request.weight


def slot_reward(step_rewards) -> int:
    return sum(step_rewards)


@dataclass
class PendingStep:
    """One RL step: the decision taken for one request this slot."""

    state_idx: int
    action: int
    request: Request
    service: ActiveService | None  # None when deferred
    reward: int = 0


class GnbAgent:
    """Owns the allocator Q-table and its exploration state."""

    def __init__(self, total_rbs: int, max_rbs: int, params: LearnParams,
                 rng: Random, init_lo: float = 0.0, init_hi: float = 1.0):
        self.total_rbs = total_rbs
        self.max_rbs = max_rbs
        self.params = params
        self.rng = rng
        n_states, n_actions = state_layout(total_rbs, max_rbs)
        self.table = QTable(n_states, n_actions, uniform_rule(init_lo, init_hi, rng))
        self.epsilon = params.explore.epsilon
        self.select_override = None  # defense hook (RandomOpt / RandomTop)

    def decide(self, pool: RbPool, request: Request, req_rbs: int,
               t: int) -> PendingStep:
        """Pick defer or a placement for one request and apply it to the pool."""
        s = state_index(encode_state(pool, req_rbs, request.weight), self.max_rbs)
        legal = legal_actions(pool.free_count, req_rbs)
        a = select_action(self.table, s, self.rng, epsilon=self.epsilon,
                          legal=legal, override=self.select_override)
        service = None
        if a != DEFER:
            rb_set = placement_rb_set(pool, a - 1, req_rbs)
            service = pool.allocate(request, rb_set, t)
        return PendingStep(state_idx=s, action=a, request=request, service=service)

    def sentinel_index(self, pool: RbPool) -> int:
        return state_index(encode_state(pool, 0, 0), self.max_rbs)

    def apply_updates(self, steps: list[PendingStep], sentinel: int,
                      suspended: bool) -> None:
        """End-of-slot Q updates; each step's successor is the next step's
        state (the queue-empty sentinel for the last one)."""
        if suspended:
            return
        for i, step in enumerate(steps):
            s_next = steps[i + 1].state_idx if i + 1 < len(steps) else sentinel
            q_update(self.table, step.state_idx, step.action, step.reward,
                     s_next, self.params)

    def decay_epsilon(self) -> None:
        pol = self.params.explore
        self.epsilon = max(pol.floor, self.epsilon * pol.decay)
