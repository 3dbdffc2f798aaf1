"""Radio-resource domain model: slicing requests, the resource-block pool,
and the rate model that converts SNR into deliverable bits per second.

A gNodeB owns F resource blocks (RBs). User equipments (UEs) issue slicing
requests, each carrying a priority weight, a minimum rate demand, a service
lifetime and a hard deadline. A granted request occupies a set of RBs for
its whole lifetime and releases them afterwards; free plus occupied RBs
always add up to F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random

from .errors import ConfigError, SimulationError


def qpsk_ber(snr: float) -> float:
    """Gaussian-tail bit error rate for uncoded QPSK, clamped to [0, 0.5].

    Default pluggable curve; a coded BER table can be substituted via
    RateModel.ber_curve.
    """
    if snr <= 0.0:
        return 0.5
    return min(0.5, max(0.0, 0.5 * math.erfc(math.sqrt(snr))))


@dataclass(frozen=True)
class Request:
    """One UE slicing request with its QoE demands."""

    ue_id: int
    req_id: int
    weight: int          # priority, uniform in [1, 5]
    min_rate: float      # bps demand
    lifetime: int        # slots of service once granted
    deadline_slot: int   # last slot at which a grant is allowed
    arrival_slot: int
    snr: float           # linear ratio

    def __post_init__(self) -> None:
        if not 1 <= self.weight <= 5:
            raise ConfigError(f"request weight {self.weight} outside [1,5]")
        if self.lifetime < 1:
            raise ConfigError(f"request lifetime {self.lifetime} < 1")
        if self.deadline_slot < self.arrival_slot:
            raise ConfigError("request deadline precedes its arrival")

    def grantable_at(self, t: int) -> bool:
        return self.arrival_slot <= t <= self.deadline_slot


@dataclass(frozen=True)
class RateModel:
    """Downlink rate model: rate = c * carriers * (1 - BER(snr))."""

    c: float = 12.59e6
    carriers: int = 1
    ber_curve: object = qpsk_ber  # callable: linear SNR -> BER in [0, 0.5]


def achievable_rate(snr: float, model: RateModel) -> float:
    """Full-band data rate in bps at the given linear SNR."""
    if snr <= 0.0:
        raise ValueError(f"SNR must be positive, got {snr}")
    ber = model.ber_curve(snr)
    return model.c * model.carriers * (1.0 - ber)


def rbs_needed(request: Request, model: RateModel, per_rb_rate: float) -> int:
    """Smallest RB count n with n * per_rb_rate >= the request's demand."""
    if per_rb_rate <= 0.0:
        raise ValueError(f"per-RB rate must be positive, got {per_rb_rate}")
    n = math.ceil(request.min_rate / per_rb_rate)
    return max(1, n)


@dataclass
class ActiveService:
    """A granted request occupying rb_set from grant_slot to end_slot."""

    request: Request
    rb_set: frozenset[int]
    grant_slot: int
    end_slot: int  # grant_slot + lifetime - 1

    def __post_init__(self) -> None:
        if not self.rb_set:
            raise SimulationError("active service with empty RB set")
        if self.end_slot < self.grant_slot:
            raise SimulationError("active service ends before it starts")


class RbPool:
    """Availability state of the F resource blocks plus active services.

    Invariant at every slot boundary: free RBs plus RBs held by services
    equal F, and no RB belongs to two services.
    """

    def __init__(self, total_rbs: int):
        if total_rbs < 1:
            raise ConfigError(f"total_rbs must be >= 1, got {total_rbs}")
        self.total_rbs = total_rbs
        self.free: list[int] = list(range(total_rbs))  # sorted free indices
        self.services: list[ActiveService] = []

    @property
    def free_count(self) -> int:
        return len(self.free)

    def free_mask(self) -> int:
        mask = 0
        for rb in self.free:
            mask |= 1 << rb
        return mask

    def occupied_mask(self) -> int:
        return ((1 << self.total_rbs) - 1) ^ self.free_mask()

    def allocate(self, request: Request, rb_set: frozenset[int], t: int) -> ActiveService:
        for rb in rb_set:
            self.free.remove(rb)
        svc = ActiveService(
            request=request,
            rb_set=rb_set,
            grant_slot=t,
            end_slot=t + request.lifetime - 1,
        )
        self.services.append(svc)
        return svc

    def release_service(self, svc: ActiveService) -> None:
        self.services.remove(svc)
        self._return_rbs(svc.rb_set)

    def _return_rbs(self, rb_set: frozenset[int]) -> None:
        self.free.extend(rb_set)
        self.free.sort()

    def check_invariants(self) -> None:
        held = 0
        seen = 0
        for svc in self.services:
            held += len(svc.rb_set)
            for rb in svc.rb_set:
                bit = 1 << rb
                if seen & bit:
                    raise SimulationError(f"RB {rb} held by two services")
                seen |= bit
        if seen & self.free_mask():
            raise SimulationError("RB simultaneously free and in service")
        if len(self.free) + held != self.total_rbs:
            raise SimulationError(
                f"RB conservation broken: {len(self.free)} free + {held} held"
                f" != {self.total_rbs}"
            )


def step_pool(pool: RbPool, t: int) -> set[int]:
    """Release every service that ended before slot t; return the freed RBs."""
    pool.check_invariants()
    released: set[int] = set()
    kept: list[ActiveService] = []
    for svc in pool.services:
        if svc.end_slot < t:
            released |= svc.rb_set
        else:
            kept.append(svc)
    if released:
        pool.services = kept
        pool._return_rbs(frozenset(released))
    pool.check_invariants()
    return released


@dataclass(frozen=True)
class ScenarioParams:
    """Workload and radio parameters of one simulated scenario.

    Defaults model a 30-UE cell with a 10 MHz band split into 11 RBs.
    The demand range is configuration, chosen so a request needs one or
    two RBs at the default SNR range.
    """

    ue_count: int = 30
    arrival_prob: float = 0.05
    total_rbs: int = 11
    weight_range: tuple[int, int] = (1, 5)
    lifetime_range: tuple[int, int] = (1, 10)
    deadline_range: tuple[int, int] = (1, 20)  # offset from arrival, slots
    snr_range: tuple[float, float] = (1.5, 3.0)
    demand_range: tuple[float, float] = (0.25e6, 1.35e6)  # bps
    rate_model: RateModel = field(default_factory=RateModel)

    def __post_init__(self) -> None:
        if self.ue_count < 1:
            raise ConfigError(f"ue_count must be >= 1, got {self.ue_count}")
        if not 0.0 <= self.arrival_prob <= 1.0:
            raise ConfigError(f"arrival_prob {self.arrival_prob} outside [0,1]")
        if self.total_rbs < 1:
            raise ConfigError("total_rbs must be >= 1")
        for name in ("weight_range", "lifetime_range", "deadline_range",
                     "snr_range", "demand_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigError(f"{name} is empty: ({lo}, {hi})")
        if self.weight_range[0] < 1 or self.weight_range[1] > 5:
            raise ConfigError("weight_range must sit inside [1,5]")
        if self.lifetime_range[0] < 1:
            raise ConfigError("lifetime_range must start at >= 1")
        if self.snr_range[0] <= 0.0:
            raise ConfigError("snr_range must be positive")
        if self.demand_range[0] <= 0.0:
            raise ConfigError("demand_range must be positive")

    def per_rb_rate(self, snr: float) -> float:
        """Rate one RB delivers at the given SNR (even split of the band)."""
        return achievable_rate(snr, self.rate_model) / self.total_rbs

    def max_request_rbs(self) -> int:
        """Worst-case RB need over the configured demand and SNR ranges."""
        worst_per_rb = self.per_rb_rate(self.snr_range[0])
        return max(1, math.ceil(self.demand_range[1] / worst_per_rb))


def generate_arrivals(rng: Random, t: int, params: ScenarioParams) -> list[Request]:
    """Sample this slot's new requests: each UE contributes one with
    probability arrival_prob, fields drawn uniformly from the configured
    ranges. Pure in (rng state, t, params)."""
    arrivals: list[Request] = []
    p = params.arrival_prob
    for ue in range(params.ue_count):
        if rng.random() >= p:
            continue
        weight = rng.randint(*params.weight_range)
        lifetime = rng.randint(*params.lifetime_range)
        deadline = t + rng.randint(*params.deadline_range)
        snr = rng.uniform(*params.snr_range)
        demand = rng.uniform(*params.demand_range)
        arrivals.append(
            Request(
                ue_id=ue,
                req_id=t * params.ue_count + ue,
                weight=weight,
                min_rate=demand,
                lifetime=lifetime,
                deadline_slot=deadline,
                arrival_slot=t,
                snr=snr,
            )
        )
    return arrivals
