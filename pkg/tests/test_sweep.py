import itertools

import numpy as np
import pytest

from purebudget.search import (
    STATUS_BUDGET,
    STATUS_FEASIBLE,
    STATUS_FIDELITY,
    SearchSpace,
    min_copy_search,
)
from purebudget.sweep import (
    CSV_HEADER,
    GridSpec,
    SweepPoint,
    export,
    load_points,
    run_sweep,
    summarize,
)
from purebudget.werner import boundary_w0


@pytest.fixture(scope="module")
def small_sweep(space):
    grid = GridSpec(space, (5, 6), (0.85, 1.0, 0.01), (0.5, 0.99))
    return grid, *run_sweep(grid)


class TestGridSpec:
    def test_w0_values_inclusive(self, space):
        grid = GridSpec(space, (2,), (0.5, 1.0, 0.25), (0.5,))
        assert grid.w0_values() == pytest.approx([0.5, 0.75, 1.0])

    def test_single_value_range(self, space):
        grid = GridSpec(space, (2,), (0.9327, 0.9327, 1.0), (0.5,))
        assert grid.w0_values() == [0.9327]

    def test_values_never_exceed_hi(self, space):
        grid = GridSpec(space)
        vals = grid.w0_values()
        assert vals[-1] <= 1.0
        assert len(vals) == 201

    def test_validation(self, space):
        with pytest.raises(ValueError):
            GridSpec(space, (2,), (0.9, 0.5, 0.01), (0.5,))
        with pytest.raises(ValueError):
            GridSpec(space, (2,), (0.5, 1.0, 0.01), (0.5, 1.5))


class TestRunSweep:
    def test_single_point_matches_mincopy(self, space):
        grid = GridSpec(space, (9,), (0.9327, 0.9327, 1.0), (0.75,))
        points, _ = run_sweep(grid)
        jansen = [p for p in points if p.family == "jansen"][0]
        res = min_copy_search(0.9327, 9, 0.75, space, family="jansen")
        assert jansen.status == STATUS_FEASIBLE
        assert jansen.n0_min == res.n0_min == 216
        assert (jansen.r, jansen.k) == res.selected[1:]
        assert jansen.p_succ == res.p_succ_at_min

    def test_below_boundary_all_fidelity_infeasible(self, space):
        grid = GridSpec(space, (10,), (0.40, 0.45, 0.01), (0.5,))
        points, _ = run_sweep(grid)
        assert points
        assert all(p.status == STATUS_FIDELITY for p in points)

    def test_boundary_dominance(self, small_sweep):
        _, points, _ = small_sweep
        for p in points:
            if p.status == STATUS_FEASIBLE:
                assert p.w0 > p.boundary

    def test_upper_interval_shape(self, small_sweep):
        # no feasible point may sit below a fidelity-infeasible point at the
        # same (ell, pth, family); budget-exceeded points are excluded
        _, points, _ = small_sweep
        keyfn = lambda p: (p.ell, p.pth, p.family)
        for key, group in itertools.groupby(sorted(points, key=keyfn), key=keyfn):
            group = sorted(group, key=lambda p: p.w0)
            feasible_w0 = [p.w0 for p in group if p.status == STATUS_FEASIBLE]
            infeasible_w0 = [p.w0 for p in group if p.status == STATUS_FIDELITY]
            if feasible_w0 and infeasible_w0:
                assert max(infeasible_w0) < min(feasible_w0)

    def test_threshold_nesting(self, small_sweep):
        _, points, _ = small_sweep
        strict = {
            (p.ell, p.w0, p.family)
            for p in points
            if p.pth == 0.99 and p.status == STATUS_FEASIBLE
        }
        loose = {
            (p.ell, p.w0, p.family)
            for p in points
            if p.pth == 0.5 and p.status == STATUS_FEASIBLE
        }
        assert strict <= loose

    def test_deterministic(self, space):
        grid = GridSpec(space, (4,), (0.88, 0.95, 0.01), (0.7,))
        a, _ = run_sweep(grid)
        b, _ = run_sweep(grid)
        assert a == b

    def test_parallel_matches_serial(self, space):
        grid = GridSpec(space, (4,), (0.9, 0.95, 0.01), (0.7,))
        serial, _ = run_sweep(grid, jobs=1)
        parallel, _ = run_sweep(grid, jobs=2)
        assert serial == parallel


class TestSummarize:
    def test_counts_bounded(self, small_sweep):
        grid, points, summary = small_sweep
        per_combo = len(grid.w0_values()) * len(grid.ell_values)
        for s in summary.per_family:
            assert 0 <= s.feasible_count <= per_combo
            assert s.count_n0_le_10 <= s.feasible_count

    def test_shared_fraction_in_unit_interval(self, small_sweep):
        _, _, summary = small_sweep
        for pth, (n, frac) in summary.shared_jansen_wins.items():
            assert n >= 0
            assert 0.0 <= frac <= 1.0

    def test_empty_family_stats(self):
        summary = summarize([])
        assert summary.per_family == ()

    def test_mean_boundary_gap_positive(self, small_sweep):
        _, _, summary = small_sweep
        for s in summary.per_family:
            if s.mean_boundary_gap is not None:
                assert s.mean_boundary_gap > 0.0


class TestExport:
    def test_csv_header_exact(self, tmp_path):
        out = tmp_path / "empty.csv"
        export([], None, "csv", out)
        assert out.read_bytes() == b"ell,w0,pth,family,status,n0_min,r,k,w_out,p_succ,boundary_w0\r\n"

    def test_single_feasible_row(self, tmp_path):
        point = SweepPoint(9, 0.9327, 0.75, "jansen", STATUS_FEASIBLE, 216, 4, 2,
                           0.93272, 0.75262, boundary_w0(9))
        out = tmp_path / "one.csv"
        export([point], None, "csv", out)
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("9,0.9327,0.75,jansen,feasible,216,4,2,")

    def test_csv_round_trip(self, small_sweep, tmp_path):
        _, points, summary = small_sweep
        out = tmp_path / "sweep.csv"
        export(points, summary, "csv", out)
        assert load_points(out) == points

    def test_json_round_trip(self, small_sweep, tmp_path):
        _, points, summary = small_sweep
        out = tmp_path / "sweep.json"
        export(points, summary, "json", out)
        assert load_points(out) == points

    def test_empty_fields_for_infeasible(self, space, tmp_path):
        grid = GridSpec(space, (10,), (0.42, 0.42, 1.0), (0.5,))
        points, summary = run_sweep(grid)
        out = tmp_path / "inf.csv"
        export(points, summary, "csv", out)
        lines = out.read_text().strip().splitlines()
        assert lines[1].split(",")[5] == ""  # n0_min empty

    def test_bad_header_rejected_on_load(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            load_points(bad)

    def test_unwritable_path(self, small_sweep, tmp_path):
        _, points, summary = small_sweep
        with pytest.raises(OSError, match="cannot write"):
            export(points, summary, "csv", tmp_path / "missing" / "out.csv")
