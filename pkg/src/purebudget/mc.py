"""Monte Carlo simulation of the all-in schedule.

Serves as an independent statistical oracle for the exact dynamic
program: each episode starts from the full copy budget, draws per-block
Bernoulli successes level by level, and the success fraction over many
episodes estimates the schedule success probability.

Randomness comes from a counter-based Philox stream keyed by the seed,
so results are bit-reproducible for a fixed (spec, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schedule import ScheduleConfig, ScheduleTrace


@dataclass(frozen=True)
class TrialSpec:
    config: ScheduleConfig
    trace: ScheduleTrace
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials={self.trials} must be >= 1")
        if self.trace.k != self.config.k:
            raise ValueError(
                f"trace depth {self.trace.k} does not match config depth {self.config.k}"
            )


def simulate_counts(
    n0: int, r: int, p_levels, trials: int, seed: int
) -> np.ndarray:
    """Terminal surviving-copy counts for ``trials`` independent episodes."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    state = np.full(int(trials), int(n0), dtype=np.int64)
    for p in p_levels:
        state = rng.binomial(state // int(r), float(p))
    return state


def simulate_success(spec: TrialSpec) -> tuple[float, float]:
    """Estimate the schedule success probability.

    Returns ``(p_hat, stderr)`` where ``p_hat`` is the fraction of
    episodes ending with at least one copy and ``stderr`` the binomial
    standard error sqrt(p_hat * (1 - p_hat) / trials).
    """
    counts = simulate_counts(
        spec.config.n0,
        spec.config.map.r,
        spec.trace.p_levels,
        spec.trials,
        spec.seed,
    )
    wins = int(np.count_nonzero(counts >= 1))
    p_hat = wins / spec.trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / spec.trials)
    return p_hat, stderr
