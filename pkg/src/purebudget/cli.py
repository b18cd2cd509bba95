"""Command-line interface.

Subcommands: mincopy, sweep, fixedpoint, boundary, validate. Exit codes:
0 success/feasible, 1 usage or input error, 2 infeasible (or failed
validation gate). Human-readable reports go to stdout; machine-readable
artifacts are written only via --out.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .mc import TrialSpec, simulate_success
from .protocols import RegistryError, load_registry
from .schedule import (
    DomainExitError,
    ScheduleConfig,
    ZeroProbabilityError,
    all_in_success,
    evolve_trace,
)
from .search import (
    SearchSpace,
    fixed_target_budget,
    min_copy_search,
)
from .sweep import GridSpec, export, run_sweep
from .werner import boundary_w0, check_path, check_werner, raw_werner

REGISTRY_ENV = "PUREBUDGET_REGISTRY"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the CLI contract reserves
    # 2 for infeasible results, so usage problems map to 1 instead.
    def error(self, message):
        raise UsageError(message)


def parse_int_range(text: str, flag: str) -> list[int]:
    try:
        parts = text.split(":")
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
        if hi < lo:
            raise ValueError
        return list(range(lo, hi + 1))
    except ValueError:
        raise UsageError(
            f"{flag}: expected 'lo:hi' or a single integer, got {text!r}"
        ) from None


def parse_float_range(text: str, flag: str) -> tuple[float, float, float]:
    try:
        parts = [float(v) for v in text.split(":")]
    except ValueError:
        raise UsageError(f"{flag}: expected 'lo:hi[:step]', got {text!r}") from None
    if len(parts) == 2:
        lo, hi = parts
        step = hi - lo if hi > lo else 1.0
    elif len(parts) == 3:
        lo, hi, step = parts
    else:
        raise UsageError(f"{flag}: expected 'lo:hi[:step]', got {text!r}")
    if hi < lo or step <= 0:
        raise UsageError(f"{flag}: invalid range {text!r}")
    return lo, hi, step


def parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{flag}: empty list")
    return values


def _check_unit(value: float, flag: str, lo: float = 0.0, hi: float = 1.0, open_lo=False):
    if math.isnan(value) or value < lo or value > hi or (open_lo and value == lo):
        bounds = f"({lo}, {hi}]" if open_lo else f"[{lo}, {hi}]"
        raise UsageError(f"{flag}: value {value!r} outside {bounds}")
    return value


def _load_space(args) -> SearchSpace:
    registry_path = args.registry or os.environ.get(REGISTRY_ENV) or None
    registry = load_registry(registry_path)
    kwargs = {}
    if getattr(args, "kmax", None) is not None:
        if args.kmax < 1:
            raise UsageError(f"--kmax: value {args.kmax} must be >= 1")
        kwargs["k_max"] = args.kmax
    if getattr(args, "n0max", None) is not None:
        if args.n0max < 2:
            raise UsageError(f"--n0max: value {args.n0max} must be >= 2")
        kwargs["n0_max"] = args.n0max
    return SearchSpace(registry, **kwargs)


def _trace_lines(trace) -> list[str]:
    lines = [f"  level 0: w = {trace.w_levels[0]:.6f} (raw input)"]
    for j, (w, p) in enumerate(zip(trace.w_levels[1:], trace.p_levels), start=1):
        lines.append(f"  level {j}: w = {w:.6f}  p_{j} = {p:.6f}")
    return lines


def _result_doc(res, extra=None) -> dict:
    doc = {
        "feasible": res.feasible,
        "status": res.status,
        "n0_min": res.n0_min,
        "selected": (
            {"name": res.selected[0], "r": res.selected[1], "k": res.selected[2]}
            if res.selected
            else None
        ),
        "p_succ_at_min": res.p_succ_at_min,
        "trace": (
            {"w_levels": list(res.trace.w_levels), "p_levels": list(res.trace.p_levels)}
            if res.trace
            else None
        ),
        "reason": res.reason,
    }
    if res.w_target is not None:
        doc["w_target"] = res.w_target
    if extra:
        doc.update(extra)
    return doc


def _write_out(args, doc: dict) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_mincopy(args) -> int:
    try:
        w0 = check_werner(args.w0)
    except ValueError as exc:
        raise UsageError(f"--w0: {exc}") from None
    try:
        ell = check_path(args.ell)
    except ValueError as exc:
        raise UsageError(f"--ell: {exc}") from None
    pth = _check_unit(args.pth, "--pth", open_lo=True)
    space = _load_space(args)

    res = min_copy_search(w0, ell, pth, space)
    print(f"target w0 = {w0}  path ell = {ell}  raw w0^ell = {raw_werner(w0, ell):.6f}")
    print(f"success threshold p_th = {pth}")
    extra = {}
    if res.feasible:
        name, r, k = res.selected
        print(f"feasible: n0_min = {res.n0_min}  selected = {name} (r={r}, k={k})")
        print(f"P_succ(n0_min)   = {res.p_succ_at_min:.6f}")
        if res.n0_min > 1:
            below = all_in_success(
                ScheduleConfig(space.registry.get(name), k, res.n0_min - 1), res.trace
            )
            print(f"P_succ(n0_min-1) = {below:.6f}")
            extra["p_succ_below"] = below
        print("trace:")
        for line in _trace_lines(res.trace):
            print(line)
    else:
        print(f"infeasible ({res.status}): {res.reason}")
    _write_out(args, _result_doc(res, extra))
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_sweep(args) -> int:
    ells = parse_int_range(args.ell, "--ell")
    if any(e < 1 for e in ells):
        raise UsageError(f"--ell: path lengths must be >= 1, got {args.ell!r}")
    w0_range = parse_float_range(args.w0, "--w0")
    if w0_range[0] < 0.0 or w0_range[1] > 1.0:
        raise UsageError(f"--w0: range {args.w0!r} outside [0, 1]")
    pths = parse_float_list(args.pth, "--pth")
    for p in pths:
        _check_unit(p, "--pth", open_lo=True)
    if args.jobs < 1:
        raise UsageError(f"--jobs: value {args.jobs} must be >= 1")
    space = _load_space(args)

    grid = GridSpec(space, tuple(ells), w0_range, tuple(pths))
    points, summary = run_sweep(grid, jobs=args.jobs)
    export(points, summary, args.format, args.out)

    print(f"sweep: {len(points)} points -> {args.out} ({args.format})")
    for s in summary.per_family:
        if s.feasible_count:
            print(
                f"  {s.family} pth={s.pth}: feasible={s.feasible_count} "
                f"median_n0={s.median_n0} n0<=10: {s.count_n0_le_10} "
                f"median_k={s.median_k} max_k={s.max_k} "
                f"mean_boundary_gap={s.mean_boundary_gap:.4f}"
            )
        else:
            print(f"  {s.family} pth={s.pth}: feasible=0")
    for pth, (n, frac) in sorted(summary.shared_jansen_wins.items()):
        print(f"  shared pth={pth}: {n} points, jansen cheaper at {frac:.4f}")
    return EXIT_OK


def cmd_boundary(args) -> int:
    ells = parse_int_range(args.ell, "--ell")
    if any(e < 1 for e in ells):
        raise UsageError(f"--ell: path lengths must be >= 1, got {args.ell!r}")
    print("ell  boundary_w0")
    rows = []
    for ell in ells:
        b = boundary_w0(ell)
        rows.append((ell, b))
        print(f"{ell:3d}  {b:.6f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("ell,boundary_w0\n")
            for ell, b in rows:
                fh.write(f"{ell},{b!r}\n")
    return EXIT_OK


def cmd_fixedpoint(args) -> int:
    try:
        wth = check_werner(args.wth)
    except ValueError as exc:
        raise UsageError(f"--wth: {exc}") from None
    try:
        ell = check_path(args.ell)
    except ValueError as exc:
        raise UsageError(f"--ell: {exc}") from None
    if wth >= 1.0:
        raise UsageError(f"--wth: value {wth!r} must be < 1")
    pth = _check_unit(args.pth, "--pth", open_lo=True)
    space = _load_space(args)

    print(f"target cap w_th = {wth}  path ell = {ell}  p_th = {pth}")
    per_family = {}
    for family in space.registry.families():
        res = fixed_target_budget(wth, ell, pth, space, family=family)
        per_family[family] = res
        if res.feasible:
            name, r, k = res.selected
            print(
                f"  {family}: w* = {res.w_target:.6f}  n0_min = {res.n0_min}  "
                f"selected = {name} (r={r}, k={k})  P_succ = {res.p_succ_at_min:.6f}"
            )
        else:
            print(f"  {family}: infeasible ({res.status}): {res.reason}")
    overall = fixed_target_budget(wth, ell, pth, space)
    if overall.feasible:
        name, r, k = overall.selected
        print(f"best: {name} (r={r}, k={k}) with n0_min = {overall.n0_min}")
    else:
        print(f"best: infeasible ({overall.status})")
    _write_out(
        args,
        {
            "overall": _result_doc(overall),
            "per_family": {fam: _result_doc(res) for fam, res in per_family.items()},
        },
    )
    return EXIT_OK if overall.feasible else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    try:
        w0 = check_werner(args.w0)
    except ValueError as exc:
        raise UsageError(f"--w0: {exc}") from None
    try:
        ell = check_path(args.ell)
    except ValueError as exc:
        raise UsageError(f"--ell: {exc}") from None
    pth = _check_unit(args.pth, "--pth", open_lo=True)
    if args.trials < 1:
        raise UsageError(f"--trials: value {args.trials} must be >= 1")
    space = _load_space(args)

    if args.protocol or args.k:
        if not (args.protocol and args.k):
            raise UsageError("--protocol and --k must be given together")
        try:
            pmap = space.registry.get(args.protocol)
        except KeyError:
            raise UsageError(f"--protocol: unknown entry {args.protocol!r}") from None
        if args.k < 1:
            raise UsageError(f"--k: value {args.k} must be >= 1")
        try:
            trace = evolve_trace(pmap, raw_werner(w0, ell), args.k)
        except (DomainExitError, ZeroProbabilityError) as exc:
            raise UsageError(f"configuration not evaluable: {exc}") from None
        if args.n0 is None:
            raise UsageError("--n0 is required with --protocol/--k")
        n0 = args.n0
        name, r, k = pmap.name, pmap.r, args.k
    else:
        res = min_copy_search(w0, ell, pth, space)
        if not res.feasible:
            print(f"infeasible ({res.status}): {res.reason}")
            return EXIT_INFEASIBLE
        name, r, k = res.selected
        pmap = space.registry.get(name)
        trace = res.trace
        n0 = args.n0 if args.n0 is not None else res.n0_min
    if n0 < 1:
        raise UsageError(f"--n0: value {n0} must be >= 1")

    config = ScheduleConfig(pmap, k, n0)
    dp = all_in_success(config, trace)
    p_hat, stderr = simulate_success(
        TrialSpec(config, trace, args.trials, args.seed)
    )
    # One-sample proportion test against the DP value: the null-hypothesis
    # standard error stays positive when the MC estimate saturates at 0 or 1.
    stderr0 = math.sqrt(dp * (1.0 - dp) / args.trials)
    if stderr0 == 0.0:
        z = 0.0 if p_hat == dp else math.inf
    else:
        z = (p_hat - dp) / stderr0
    print(f"config: {name} (r={r}, k={k})  n0 = {n0}  trials = {args.trials}  seed = {args.seed}")
    print(f"exact DP     : {dp:.6f}")
    print(f"monte carlo  : {p_hat:.6f}  stderr = {stderr:.2e}")
    print(f"z-score      : {z:+.3f}")
    _write_out(
        args,
        {
            "protocol": name,
            "r": r,
            "k": k,
            "n0": n0,
            "trials": args.trials,
            "seed": args.seed,
            "dp": dp,
            "mc": p_hat,
            "stderr": stderr,
            "z": z,
        },
    )
    return EXIT_OK if abs(z) <= 3.0 else EXIT_INFEASIBLE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="purebudget",
        description="Copy budgets for purification-based recovery of link-level "
        "entanglement quality over multi-hop paths.",
    )
    parser.add_argument("--version", action="version", version=f"purebudget {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_registry(p):
        p.add_argument(
            "--registry",
            default=None,
            help=f"protocol registry JSON (default: ${REGISTRY_ENV} if set)",
        )
        p.add_argument("--kmax", type=int, default=None, help="maximum recursion depth")
        p.add_argument("--n0max", type=int, default=None, help="maximum exact-DP copy budget")

    p = sub.add_parser("mincopy", help="minimum copy budget for one operating point")
    p.add_argument("--w0", type=float, required=True, help="elementary-link Werner parameter")
    p.add_argument("--ell", type=int, required=True, help="number of elementary links")
    p.add_argument("--pth", type=float, required=True, help="required success probability")
    add_registry(p)
    p.add_argument("--out", default=None, help="write JSON report to this path")
    p.set_defaults(func=cmd_mincopy)

    p = sub.add_parser("sweep", help="grid sweep over (ell, w0, p_th)")
    p.add_argument("--ell", default="2:10", help="path-length range lo:hi")
    p.add_argument("--w0", default="0.5:1.0:0.0025", help="w0 range lo:hi:step")
    p.add_argument("--pth", default="0.5,0.7,0.99", help="comma list of thresholds")
    add_registry(p)
    p.add_argument("--out", required=True, help="output file path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="entanglement boundary 3**(-1/ell)")
    p.add_argument("--ell", default="1:20", help="path-length range lo:hi")
    p.add_argument("--out", default=None, help="write CSV table to this path")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("fixedpoint", help="budget at the threshold-based fixed target")
    p.add_argument("--wth", type=float, required=True, help="upper bound on the recovery target")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--pth", type=float, required=True)
    add_registry(p)
    p.add_argument("--out", default=None, help="write JSON report to this path")
    p.set_defaults(func=cmd_fixedpoint)

    p = sub.add_parser("validate", help="exact DP vs Monte Carlo cross-check")
    p.add_argument("--w0", type=float, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--pth", type=float, default=0.75)
    add_registry(p)
    p.add_argument("--protocol", default=None, help="registry entry name (default: search-selected)")
    p.add_argument("--k", type=int, default=None, help="recursion depth (with --protocol)")
    p.add_argument("--n0", type=int, default=None, help="copy budget (default: n0_min)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write JSON report to this path")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegistryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
