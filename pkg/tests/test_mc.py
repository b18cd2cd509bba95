import numpy as np
import pytest

from purebudget.mc import TrialSpec, simulate_counts, simulate_success
from purebudget.schedule import (
    ScheduleConfig,
    ScheduleTrace,
    success_probability,
)


def _spec(pmap, n0, k, ps, trials, seed):
    ws = tuple([0.9] * (k + 1))
    return TrialSpec(
        ScheduleConfig(pmap, k, n0), ScheduleTrace(ws, tuple(ps)), trials, seed
    )


class TestSimulateSuccess:
    def test_certain_single_block(self, bbpssw):
        p_hat, stderr = simulate_success(_spec(bbpssw, 2, 1, [1.0], 1000, seed=42))
        assert p_hat == 1.0
        assert stderr == 0.0

    def test_impossible_below_one_block(self, bbpssw):
        p_hat, stderr = simulate_success(_spec(bbpssw, 1, 1, [0.9], 1000, seed=42))
        assert p_hat == 0.0
        assert stderr == 0.0

    def test_seed_determinism(self, bbpssw):
        a = simulate_success(_spec(bbpssw, 40, 2, [0.4, 0.6], 50_000, seed=7))
        b = simulate_success(_spec(bbpssw, 40, 2, [0.4, 0.6], 50_000, seed=7))
        assert a == b

    def test_different_seeds_differ(self, bbpssw):
        a = simulate_success(_spec(bbpssw, 40, 2, [0.4, 0.6], 50_000, seed=7))
        b = simulate_success(_spec(bbpssw, 40, 2, [0.4, 0.6], 50_000, seed=8))
        assert a != b

    def test_worked_example_within_three_sigma(self, jansen_r4):
        spec = _spec(jansen_r4, 216, 2, [0.2318, 0.4188], 200_000, seed=123)
        p_hat, stderr = simulate_success(spec)
        dp = success_probability(216, 4, [0.2318, 0.4188])
        assert abs(p_hat - dp) <= 3 * stderr

    def test_hand_enumeration_case(self, bbpssw):
        # n0=4, r=2, k=2: success iff both level-1 blocks succeed and the
        # resulting level-2 block succeeds
        spec = _spec(bbpssw, 4, 2, [0.6, 0.7], 500_000, seed=99)
        p_hat, stderr = simulate_success(spec)
        assert abs(p_hat - 0.6 * 0.6 * 0.7) <= 3 * stderr

    def test_rejects_bad_trials(self, bbpssw):
        with pytest.raises(ValueError):
            _spec(bbpssw, 4, 1, [0.5], 0, seed=1)

    def test_rejects_depth_mismatch(self, bbpssw):
        with pytest.raises(ValueError):
            TrialSpec(
                ScheduleConfig(bbpssw, 2, 4),
                ScheduleTrace((0.9, 0.9), (0.5,)),
                100,
                1,
            )


class TestSimulateCounts:
    def test_counts_bounded_by_blocks(self):
        counts = simulate_counts(20, 3, [0.9], 10_000, seed=5)
        assert counts.max() <= 20 // 3
        assert counts.min() >= 0

    def test_bit_identical_counts(self):
        a = simulate_counts(50, 2, [0.5, 0.5], 10_000, seed=31)
        b = simulate_counts(50, 2, [0.5, 0.5], 10_000, seed=31)
        assert np.array_equal(a, b)

    def test_agreement_with_dp_across_configs(self):
        rng = np.random.default_rng(2024)
        for _ in range(6):
            r = int(rng.integers(2, 5))
            k = int(rng.integers(1, 4))
            n0 = int(rng.integers(r**k, 300))
            ps = rng.uniform(0.2, 0.9, size=k)
            dp = success_probability(n0, r, ps)
            counts = simulate_counts(n0, r, ps, 100_000, seed=int(rng.integers(1 << 31)))
            p_hat = float(np.count_nonzero(counts >= 1)) / 100_000
            stderr = np.sqrt(max(p_hat * (1 - p_hat), 1e-12) / 100_000)
            assert abs(p_hat - dp) <= 4 * stderr + 1e-9
