"""All-in recursive purification schedule.

At each level every available copy is grouped into ``n // r`` complete
blocks, one purification attempt runs per block, and the successes are
pooled for the next level; leftovers that cannot fill a block are
discarded. Conditioned on success the quality evolves deterministically,
so a schedule is fully described by its quality/probability trace plus
the exact distribution over surviving copy counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .protocols import MapDomainError, PurificationMap
from .werner import check_werner


class DomainExitError(ValueError):
    """The deterministic quality trace left the map's domain."""

    def __init__(self, level: int, w: float, pmap: PurificationMap):
        self.level = level
        super().__init__(
            f"trace exits domain of {pmap.name} at level {level}: w={w!r}"
        )


class ZeroProbabilityError(ValueError):
    """A level success probability is zero; the schedule can never succeed."""

    def __init__(self, level: int):
        self.level = level
        super().__init__(f"level {level} success probability is zero")


@dataclass(frozen=True)
class ScheduleTrace:
    """Deterministic per-level qualities w^(0..k) and probabilities p_1..k."""

    w_levels: tuple[float, ...]
    p_levels: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.p_levels)

    @property
    def w_out(self) -> float:
        return self.w_levels[-1]


@dataclass(frozen=True)
class ScheduleConfig:
    map: PurificationMap
    k: int
    n0: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"recursion depth k={self.k} must be >= 1")
        if self.n0 < 1:
            raise ValueError(f"copy budget n0={self.n0} must be >= 1")


@dataclass(frozen=True)
class CopyDistribution:
    """Probability mass over the number of available copies after a level."""

    q: np.ndarray
    level: int

    @property
    def support_max(self) -> int:
        return self.q.size - 1

    def prob(self, m: int) -> float:
        return float(self.q[m]) if 0 <= m < self.q.size else 0.0


def blocks(n: int, r: int) -> int:
    """Number of complete r-copy purification blocks formed from n copies."""
    if n < 0:
        raise ValueError(f"copy count n={n} must be >= 0")
    if r < 2:
        raise ValueError(f"block size r={r} must be >= 2")
    return n // r


def evolve_trace(pmap: PurificationMap, w_raw: float, k: int) -> ScheduleTrace:
    """Deterministic quality/probability trace for k purification levels.

    Raises DomainExitError if any level input leaves the map domain and
    ZeroProbabilityError if any level success probability vanishes.
    """
    if k < 1:
        raise ValueError(f"recursion depth k={k} must be >= 1")
    w = check_werner(w_raw)
    ws = [w]
    ps = []
    for level in range(1, k + 1):
        try:
            w, p = pmap.apply(ws[-1])
        except MapDomainError as exc:
            raise DomainExitError(level, ws[-1], pmap) from exc
        if p <= 0.0:
            raise ZeroProbabilityError(level)
        ws.append(w)
        ps.append(p)
    return ScheduleTrace(tuple(ws), tuple(ps))


def dp_step(q_prev: CopyDistribution, p_level: float, r: int) -> CopyDistribution:
    """Exact one-level transition of the survivor-count distribution."""
    if not 0.0 <= p_level <= 1.0:
        raise ValueError(f"level probability {p_level!r} outside [0, 1]")
    if r < 2:
        raise ValueError(f"block size r={r} must be >= 2")
    q = _kernels.dp_step_arr(np.asarray(q_prev.q, dtype=np.float64), float(p_level), int(r))
    return CopyDistribution(q, q_prev.level + 1)


def point_mass(n0: int) -> CopyDistribution:
    """Initial deterministic distribution with exactly n0 copies."""
    q = np.zeros(int(n0) + 1)
    q[int(n0)] = 1.0
    return CopyDistribution(q, 0)


def survivor_distribution(
    config: ScheduleConfig, trace: ScheduleTrace
) -> CopyDistribution:
    """Distribution of surviving copies after all k levels."""
    if trace.k != config.k:
        raise ValueError(
            f"trace depth {trace.k} does not match config depth {config.k}"
        )
    q = _kernels.dp_distribution(
        int(config.n0), np.asarray(trace.p_levels, dtype=np.float64), int(config.map.r)
    )
    return CopyDistribution(q, config.k)


def all_in_success(config: ScheduleConfig, trace: ScheduleTrace) -> float:
    """Probability that at least one copy survives all k levels."""
    if trace.k != config.k:
        raise ValueError(
            f"trace depth {trace.k} does not match config depth {config.k}"
        )
    return success_probability(config.n0, config.map.r, trace.p_levels)


def success_probability(n0: int, r: int, p_levels) -> float:
    """1 - q_k(0) for the all-in schedule; low-level array entry point."""
    ps = np.asarray(p_levels, dtype=np.float64)
    if ps.size == 0:
        raise ValueError("at least one purification level is required")
    return float(_kernels.dp_success(int(n0), ps, int(r)))
