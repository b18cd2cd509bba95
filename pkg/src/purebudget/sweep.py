"""Grid sweeps over (path length, link quality, threshold) with file export.

Each grid point is searched independently per protocol family, so points
may be evaluated in parallel; aggregation order is fixed by the grid, and
identical sweeps serialize byte-identically.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .search import (
    STATUS_FEASIBLE,
    SearchSpace,
    min_copy_search,
)
from .werner import boundary_w0

CSV_HEADER = [
    "ell",
    "w0",
    "pth",
    "family",
    "status",
    "n0_min",
    "r",
    "k",
    "w_out",
    "p_succ",
    "boundary_w0",
]


@dataclass(frozen=True)
class GridSpec:
    space: SearchSpace
    ell_values: tuple[int, ...] = tuple(range(2, 11))
    w0_range: tuple[float, float, float] = (0.5, 1.0, 0.0025)
    p_th_values: tuple[float, ...] = (0.5, 0.7, 0.99)

    def __post_init__(self):
        lo, hi, step = self.w0_range
        if not (lo < hi or math.isclose(lo, hi)) or step <= 0:
            raise ValueError(f"invalid w0 range {self.w0_range!r}")
        if not all(0.0 < p <= 1.0 for p in self.p_th_values):
            raise ValueError(f"thresholds {self.p_th_values!r} must lie in (0, 1]")
        if not self.ell_values:
            raise ValueError("at least one path length is required")

    def w0_values(self) -> list[float]:
        lo, hi, step = self.w0_range
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [min(lo + i * step, hi) for i in range(count)]


@dataclass(frozen=True)
class SweepPoint:
    ell: int
    w0: float
    pth: float
    family: str
    status: str
    n0_min: int | None
    r: int | None
    k: int | None
    w_out: float | None
    p_succ: float | None
    boundary: float

    @property
    def above_boundary(self) -> bool:
        return self.w0 > self.boundary


@dataclass(frozen=True)
class FamilyStats:
    family: str
    pth: float
    feasible_count: int
    median_n0: float | None
    count_n0_le_10: int
    median_k: float | None
    max_k: int | None
    mean_boundary_gap: float | None


@dataclass(frozen=True)
class SweepSummary:
    per_family: tuple[FamilyStats, ...]
    # per threshold: (shared feasible count, fraction where jansen n0 < bbpssw n0)
    shared_jansen_wins: dict[float, tuple[int, float]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "per_family": [
                {
                    "family": s.family,
                    "pth": s.pth,
                    "feasible_count": s.feasible_count,
                    "median_n0": s.median_n0,
                    "count_n0_le_10": s.count_n0_le_10,
                    "median_k": s.median_k,
                    "max_k": s.max_k,
                    "mean_boundary_gap": s.mean_boundary_gap,
                }
                for s in self.per_family
            ],
            "shared_jansen_wins": {
                repr(pth): {"shared": n, "jansen_win_fraction": frac}
                for pth, (n, frac) in sorted(self.shared_jansen_wins.items())
            },
        }


def _eval_point(args) -> SweepPoint:
    ell, w0, pth, family, space = args
    res = min_copy_search(w0, ell, pth, space, family=family)
    if res.feasible:
        name, r, k = res.selected
        return SweepPoint(
            ell,
            w0,
            pth,
            family,
            res.status,
            res.n0_min,
            r,
            k,
            res.trace.w_out,
            res.p_succ_at_min,
            boundary_w0(ell),
        )
    return SweepPoint(
        ell, w0, pth, family, res.status, None, None, None, None, None, boundary_w0(ell)
    )


def run_sweep(grid: GridSpec, jobs: int = 1) -> tuple[list[SweepPoint], SweepSummary]:
    """Evaluate the full grid; returns ordered points and summary statistics."""
    families = grid.space.registry.families()
    tasks = [
        (ell, w0, pth, family, grid.space)
        for ell in grid.ell_values
        for w0 in grid.w0_values()
        for pth in grid.p_th_values
        for family in families
    ]
    if jobs == 1:
        points = [_eval_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_eval_point, tasks, chunksize=64))
    return points, summarize(points)


def summarize(points: list[SweepPoint]) -> SweepSummary:
    """Per-family statistics plus the shared-feasible family comparison."""
    families = sorted({p.family for p in points})
    pths = sorted({p.pth for p in points})
    stats: list[FamilyStats] = []
    for family in families:
        for pth in pths:
            sel = [
                p
                for p in points
                if p.family == family and p.pth == pth and p.status == STATUS_FEASIBLE
            ]
            if sel:
                n0s = [p.n0_min for p in sel]
                ks = [p.k for p in sel]
                gaps = []
                for ell in sorted({p.ell for p in sel}):
                    w0_min = min(p.w0 for p in sel if p.ell == ell)
                    gaps.append(w0_min - boundary_w0(ell))
                stats.append(
                    FamilyStats(
                        family,
                        pth,
                        len(sel),
                        float(statistics.median(n0s)),
                        sum(1 for n in n0s if n <= 10),
                        float(statistics.median(ks)),
                        max(ks),
                        sum(gaps) / len(gaps),
                    )
                )
            else:
                stats.append(FamilyStats(family, pth, 0, None, 0, None, None, None))

    shared: dict[float, tuple[int, float]] = {}
    if "bbpssw" in families and "jansen" in families:
        for pth in pths:
            bb = {
                (p.ell, p.w0): p.n0_min
                for p in points
                if p.family == "bbpssw" and p.pth == pth and p.status == STATUS_FEASIBLE
            }
            ja = {
                (p.ell, p.w0): p.n0_min
                for p in points
                if p.family == "jansen" and p.pth == pth and p.status == STATUS_FEASIBLE
            }
            keys = sorted(set(bb) & set(ja))
            if keys:
                wins = sum(1 for key in keys if ja[key] < bb[key])
                shared[pth] = (len(keys), wins / len(keys))
            else:
                shared[pth] = (0, 0.0)
    return SweepSummary(tuple(stats), shared)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest exact round-trip form
    return str(value)


def _point_row(p: SweepPoint) -> list[str]:
    return [
        str(p.ell),
        _fmt(p.w0),
        _fmt(p.pth),
        p.family,
        p.status,
        _fmt(p.n0_min),
        _fmt(p.r),
        _fmt(p.k),
        _fmt(p.w_out),
        _fmt(p.p_succ),
        _fmt(p.boundary),
    ]


def export(
    points: list[SweepPoint],
    summary: SweepSummary | None,
    fmt: str,
    path: str | Path,
) -> None:
    """Write sweep results to ``path`` as csv or json."""
    path = Path(path)
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_HEADER)
                for p in points:
                    writer.writerow(_point_row(p))
        elif fmt == "json":
            doc = {
                "points": [
                    dict(zip(CSV_HEADER, _typed_row(p))) for p in points
                ],
                "summary": summary.as_dict() if summary is not None else None,
            }
            with path.open("w") as fh:
                json.dump(doc, fh, indent=1)
                fh.write("\n")
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc}") from exc


def _typed_row(p: SweepPoint) -> list:
    return [
        p.ell,
        p.w0,
        p.pth,
        p.family,
        p.status,
        p.n0_min,
        p.r,
        p.k,
        p.w_out,
        p.p_succ,
        p.boundary,
    ]


def load_points(path: str | Path) -> list[SweepPoint]:
    """Read sweep points back from a csv or json export."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text())
        rows = [[rec[name] for name in CSV_HEADER] for rec in doc["points"]]
        return [_row_to_point(row) for row in rows]
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(
                f"unexpected CSV header {header!r}; expected {CSV_HEADER!r}"
            )
        return [_row_to_point(_untyped(row)) for row in reader]


def _untyped(row: list[str]) -> list:
    ell, w0, pth, family, status, n0, r, k, w_out, p_succ, boundary = row
    return [
        int(ell),
        float(w0),
        float(pth),
        family,
        status,
        int(n0) if n0 != "" else None,
        int(r) if r != "" else None,
        int(k) if k != "" else None,
        float(w_out) if w_out != "" else None,
        float(p_succ) if p_succ != "" else None,
        float(boundary),
    ]


def _row_to_point(row: list) -> SweepPoint:
    return SweepPoint(*row)
