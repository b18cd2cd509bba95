"""Render resource-landscape, depth, and compact figures from sweep CSVs.

The input is the sweep export of the purebudget CLI (one row per grid
point and protocol family). Rendering reads only the CSV; no quantities
are recomputed beyond the analytical entanglement boundary overlay
w0 = 3**(-1/ell).

Figure kinds:
  landscape  heatmap of the minimum copy budget over (ell, w0), log color
             scale, dashed boundary curve, contours of constant budget
  depth      heatmap of the selected recursion depth over (ell, w0)
  compact    per path length, the cheapest feasible budget per family,
             with block-size / depth annotations
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

EXPECTED_COLUMNS = [
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

FEASIBLE = "feasible"
BUDGET = "budget-exceeded"

KINDS = ("landscape", "depth", "compact")


class SchemaError(ValueError):
    """CSV does not conform to the sweep export schema."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str | Path
    kind: str
    out_path: str | Path
    families: tuple[str, ...] | None = None
    pths: tuple[float, ...] | None = None
    vmin: float | None = None
    vmax: float | None = None
    collapse_infeasible: bool = False
    dpi: int = 150


@dataclass(frozen=True)
class Panel:
    family: str
    pth: float
    ells: np.ndarray
    w0s: np.ndarray
    values: np.ma.MaskedArray  # shape (len(w0s), len(ells))
    budget_mask: np.ndarray


@dataclass(frozen=True)
class RenderResult:
    out_path: Path
    panels: tuple[Panel, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Row:
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
    boundary_w0: float


def load_csv(path: str | Path) -> list[Row]:
    """Read and type-check a sweep export."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in EXPECTED_COLUMNS:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append(
                    Row(
                        int(rec["ell"]),
                        float(rec["w0"]),
                        float(rec["pth"]),
                        rec["family"],
                        rec["status"],
                        int(rec["n0_min"]) if rec["n0_min"] else None,
                        int(rec["r"]) if rec["r"] else None,
                        int(rec["k"]) if rec["k"] else None,
                        float(rec["w_out"]) if rec["w_out"] else None,
                        float(rec["p_succ"]) if rec["p_succ"] else None,
                        float(rec["boundary_w0"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}:{lineno}: bad row ({exc})") from exc
    return rows


def _axis_values(rows, spec):
    families = spec.families or tuple(sorted({r.family for r in rows}))
    pths = spec.pths or tuple(sorted({r.pth for r in rows}))
    return families, pths


def _edges(centers: np.ndarray) -> np.ndarray:
    if centers.size == 1:
        half = 0.5 if centers.dtype.kind == "i" else 0.005
        return np.array([centers[0] - half, centers[0] + half], dtype=float)
    mids = 0.5 * (centers[1:] + centers[:-1])
    first = centers[0] - (mids[0] - centers[0])
    last = centers[-1] + (centers[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _build_panel(rows, family, pth, value_of) -> Panel:
    sel = [r for r in rows if r.family == family and r.pth == pth]
    ells = np.array(sorted({r.ell for r in sel}), dtype=int)
    w0s = np.array(sorted({r.w0 for r in sel}), dtype=float)
    values = np.full((w0s.size, ells.size), np.nan)
    budget = np.zeros((w0s.size, ells.size), dtype=bool)
    e_idx = {e: i for i, e in enumerate(ells)}
    w_idx = {w: i for i, w in enumerate(w0s)}
    for r in sel:
        i, j = w_idx[r.w0], e_idx[r.ell]
        if r.status == FEASIBLE:
            values[i, j] = value_of(r)
        elif r.status == BUDGET:
            budget[i, j] = True
    masked = np.ma.masked_invalid(values)
    return Panel(family, pth, ells, w0s, masked, budget)


def _draw_boundary(ax, ells):
    span = np.linspace(max(ells.min() - 0.5, 1.0), ells.max() + 0.5, 200)
    ax.plot(span, 3.0 ** (-1.0 / span), "k--", linewidth=1.2)


def _heatmap_figure(rows, spec, value_of, log_scale, draw_contours):
    families, pths = _axis_values(rows, spec)
    n_rows, n_cols = max(len(families), 1), max(len(pths), 1)
    fig, axes = plt.subplots(
        n_rows,
        n_cols,
        figsize=(3.6 * n_cols + 1.2, 2.9 * n_rows),
        squeeze=False,
        constrained_layout=True,
    )
    panels = []
    if not rows:
        warnings.warn("no data rows in input; rendering empty axes")
    all_vals = []
    for family in families:
        for pth in pths:
            panel = _build_panel(rows, family, pth, value_of)
            if panel.values.count():
                all_vals.append(
                    (panel.values.min(), panel.values.max())
                )
            panels.append(panel)
    vmin = spec.vmin if spec.vmin is not None else (
        min(v[0] for v in all_vals) if all_vals else 1.0
    )
    vmax = spec.vmax if spec.vmax is not None else (
        max(v[1] for v in all_vals) if all_vals else 10.0
    )
    if log_scale:
        vmin = max(vmin, 1.0)
        vmax = max(vmax, vmin * 10)
        norm = LogNorm(vmin=vmin, vmax=vmax)
    else:
        norm = plt.Normalize(vmin=vmin, vmax=max(vmax, vmin + 1))

    mesh = None
    for idx, panel in enumerate(panels):
        ax = axes[idx // n_cols][idx % n_cols]
        ax.set_title(f"{panel.family}, p_th = {panel.pth}", fontsize=9)
        if panel.values.size:
            xe = _edges(panel.ells.astype(float))
            ye = _edges(panel.w0s)
            mesh = ax.pcolormesh(
                xe, ye, panel.values, norm=norm, cmap="viridis", shading="flat"
            )
            if not spec.collapse_infeasible and panel.budget_mask.any():
                hat = np.ma.masked_where(~panel.budget_mask, np.ones_like(panel.values))
                ax.pcolormesh(
                    xe, ye, hat, cmap="gray", alpha=0.25, shading="flat",
                    hatch="//", edgecolor="none",
                )
            if draw_contours and panel.values.count() >= 8:
                levels = np.unique(
                    np.logspace(
                        np.log10(max(vmin, 1.0)), np.log10(vmax), 6
                    ).astype(int)
                )
                levels = levels[levels > 0]
                if levels.size >= 2:
                    ax.contour(
                        panel.ells,
                        panel.w0s,
                        panel.values.filled(np.nan),
                        levels=levels,
                        colors="white",
                        linewidths=0.6,
                    )
            _draw_boundary(ax, panel.ells)
            ax.set_xlim(panel.ells.min() - 0.5, panel.ells.max() + 0.5)
            pad = 0.005 if panel.w0s.size == 1 else 0.0
            ax.set_ylim(panel.w0s.min() - pad, panel.w0s.max() + pad)
        ax.set_xlabel("path length ell")
        ax.set_ylabel("w0")
    if mesh is not None:
        fig.colorbar(mesh, ax=[a for row_ in axes for a in row_], shrink=0.85)
    return fig, panels


def _compact_figure(rows, spec):
    families, pths = _axis_values(rows, spec)
    n_cols = max(len(pths), 1)
    fig, axes = plt.subplots(
        1, n_cols, figsize=(3.8 * n_cols, 3.2), squeeze=False,
        constrained_layout=True,
    )
    if not rows:
        warnings.warn("no data rows in input; rendering empty axes")
    markers = {"bbpssw": "o", "jansen": "*", "custom": "s"}
    panels = []
    for col, pth in enumerate(pths):
        ax = axes[0][col]
        ax.set_title(f"p_th = {pth}", fontsize=9)
        for family in families:
            best: dict[int, Row] = {}
            for r in rows:
                if r.family != family or r.pth != pth or r.status != FEASIBLE:
                    continue
                if r.ell not in best or r.n0_min < best[r.ell].n0_min:
                    best[r.ell] = r
            if not best:
                continue
            ells = sorted(best)
            n0s = [best[e].n0_min for e in ells]
            colors = [best[e].w_out for e in ells]
            sc = ax.scatter(
                ells,
                n0s,
                c=colors,
                marker=markers.get(family, "d"),
                s=70 if family == "jansen" else 40,
                vmin=0.5,
                vmax=1.0,
                cmap="plasma",
                label=family,
            )
            for e in ells:
                row = best[e]
                label = str(row.r) if family == "jansen" else str(row.k)
                color = "black"
                if family == "jansen" and row.k and row.k >= 2:
                    color = "tab:blue"
                ax.annotate(
                    label,
                    (e, row.n0_min),
                    textcoords="offset points",
                    xytext=(5, 4),
                    fontsize=7,
                    color=color,
                )
        ax.set_yscale("log")
        ax.set_xlabel("path length ell")
        ax.set_ylabel("minimum copy budget n0")
        ax.legend(fontsize=7, loc="upper left")
    return fig, panels


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; returns panel data for downstream checks."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind {spec.kind!r}; expected one of {KINDS}")
    rows = load_csv(spec.csv_path)
    if spec.families:
        present = {r.family for r in rows}
        for fam in spec.families:
            if rows and fam not in present:
                raise SchemaError(f"family {fam!r} not present in {spec.csv_path}")
    if spec.kind == "landscape":
        fig, panels = _heatmap_figure(
            rows, spec, lambda r: float(r.n0_min), log_scale=True, draw_contours=True
        )
    elif spec.kind == "depth":
        fig, panels = _heatmap_figure(
            rows, spec, lambda r: float(r.k), log_scale=False, draw_contours=False
        )
    else:
        fig, panels = _compact_figure(rows, spec)
    out = Path(spec.out_path)
    fig.savefig(out, dpi=spec.dpi)
    plt.close(fig)
    return RenderResult(out, tuple(panels))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render figures from purebudget sweep CSVs."
    )
    parser.add_argument("--in", dest="csv_path", required=True, help="sweep CSV path")
    parser.add_argument("--kind", choices=KINDS, default="landscape")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--pth", default=None, help="comma list of thresholds to plot")
    parser.add_argument("--families", default=None, help="comma list of families")
    parser.add_argument("--vmin", type=float, default=None, help="color-scale lower bound")
    parser.add_argument("--vmax", type=float, default=None, help="color-scale upper bound")
    parser.add_argument(
        "--collapse-infeasible",
        action="store_true",
        help="draw budget-exceeded cells plain white like infeasible ones",
    )
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            csv_path=args.csv_path,
            kind=args.kind,
            out_path=args.out,
            families=tuple(args.families.split(",")) if args.families else None,
            pths=tuple(float(v) for v in args.pth.split(",")) if args.pth else None,
            vmin=args.vmin,
            vmax=args.vmax,
            collapse_infeasible=args.collapse_infeasible,
            dpi=args.dpi,
        )
        result = render(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
