"""Minimum-copy search over protocol, block size, recursion depth, and budget.

For each candidate (protocol entry, depth) the deterministic quality
trace is evaluated first; candidates that cannot restore the target
quality (or hit a zero-probability level) are rejected before any
budget search. Surviving candidates are bracketed by doubling and
binary-searched for the smallest copy budget whose all-in success
probability clears the threshold, exploiting monotonicity in the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .protocols import MapDomainError, ProtocolRegistry, PurificationMap
from .schedule import ScheduleTrace
from .werner import ENTANGLEMENT_THRESHOLD, boundary_w0, check_path, check_werner

STATUS_FEASIBLE = "feasible"
STATUS_FIDELITY = "fidelity-infeasible"
STATUS_BUDGET = "budget-exceeded"

DEFAULT_R_ALLOWED: dict[str, frozenset[int] | None] = {
    "bbpssw": frozenset({2}),
    "jansen": frozenset({3, 4, 5, 6, 7}),
    "custom": None,  # no restriction
}

FIXED_TARGET_RESIDUAL = 1e-9
_FIXED_TARGET_STEP = 1e-3


@dataclass(frozen=True)
class SearchSpace:
    registry: ProtocolRegistry
    r_allowed: dict[str, frozenset[int] | None] = field(
        default_factory=lambda: dict(DEFAULT_R_ALLOWED)
    )
    k_max: int = 14
    n0_max: int = 5000

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError(f"k_max={self.k_max} must be >= 1")
        rs = [e.r for e in self.registry.entries if self._r_ok(e)]
        if rs and self.n0_max < max(rs):
            raise ValueError(
                f"n0_max={self.n0_max} below largest allowed block size {max(rs)}"
            )

    def _r_ok(self, entry: PurificationMap) -> bool:
        allowed = self.r_allowed.get(entry.family, None)
        return allowed is None or entry.r in allowed


@dataclass(frozen=True)
class SearchResult:
    feasible: bool
    status: str
    n0_min: int | None = None
    selected: tuple[str, int, int] | None = None  # (protocol name, r, k)
    trace: ScheduleTrace | None = None
    p_succ_at_min: float | None = None
    w_target: float | None = None
    reason: str = ""


@dataclass(frozen=True)
class _Candidate:
    name: str
    r: int
    k: int
    n0_min: int
    p_succ: float
    trace: ScheduleTrace
    order: int
    w_target: float | None = None


def tie_break(candidates):
    """Pick the winner: smallest budget, then shallower k, smaller r, load order."""
    if not candidates:
        raise ValueError("tie_break requires at least one candidate")
    return min(candidates, key=lambda c: (c.n0_min, c.k, c.r, c.order))


def _success(n0: int, ps: np.ndarray, r: int, cache: dict[int, float]) -> float:
    val = cache.get(n0)
    if val is None:
        val = float(_kernels.dp_success(n0, ps, r))
        cache[n0] = val
    return val


def min_n0_for_levels(
    p_levels, r: int, k: int, p_th: float, n0_max: int, hi_cap: int | None = None
) -> tuple[int | None, float | None, bool]:
    """Smallest n0 <= n0_max with all-in success >= p_th for given level probs.

    Returns (n0_min, p_succ, exceeded) where exceeded flags that the
    threshold is unreachable within n0_max. ``hi_cap`` optionally limits
    the search to budgets <= hi_cap (used to prune against an incumbent).
    """
    ps = np.asarray(p_levels, dtype=np.float64)
    prod = float(np.prod(ps))
    base = r**k  # smallest budget with nonzero success at depth k
    # P(n0) <= E[N_k] <= n0 * prod / r^k, so budgets below p_th*r^k/prod
    # can never reach the threshold.
    markov = int(math.ceil(p_th * base / prod - 1e-12)) if prod > 0.0 else n0_max + 1
    lo_bound = max(base, markov)
    if lo_bound > n0_max:
        return None, None, True
    cap = n0_max if hi_cap is None else min(n0_max, hi_cap)
    if lo_bound > cap:
        return None, None, False
    cache: dict[int, float] = {}
    if _success(cap, ps, r, cache) < p_th:
        return None, None, cap == n0_max
    # Exponential bracketing by doubling, then binary search.
    lo = lo_bound - 1  # P below lo_bound is provably < p_th
    n = lo_bound
    while _success(n, ps, r, cache) < p_th:
        lo = n
        n = min(2 * n, cap)
    hi = n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _success(mid, ps, r, cache) >= p_th:
            hi = mid
        else:
            lo = mid
    return hi, cache[hi], False


def _iter_entries(space: SearchSpace, family: str | None):
    for order, entry in enumerate(space.registry.entries):
        if family is not None and entry.family != family:
            continue
        if not space._r_ok(entry):
            continue
        yield order, entry


def min_copy_search(
    w0: float,
    ell: int,
    p_th: float,
    space: SearchSpace,
    family: str | None = None,
) -> SearchResult:
    """Minimum raw-copy budget restoring quality w0 over an ell-link path.

    Infeasibility is a result, not an error: the status distinguishes
    points where no configuration restores the quality from points where
    the success threshold is unreachable within the budget limit.
    """
    w0 = check_werner(w0)
    ell = check_path(ell)
    if not 0.0 < p_th <= 1.0:
        raise ValueError(f"success threshold {p_th!r} outside (0, 1]")

    raw = w0**ell
    if raw <= ENTANGLEMENT_THRESHOLD:
        return SearchResult(
            False,
            STATUS_FIDELITY,
            reason=(
                f"raw Werner parameter {raw:.4f} <= 1/3: the end-to-end state "
                "is separable and purification cannot recover entanglement"
            ),
        )

    candidates: list[_Candidate] = []
    incumbent: int | None = None
    budget_hit = False

    for order, entry in _iter_entries(space, family):
        if not entry.contains(raw):
            continue
        ws = [raw]
        ps: list[float] = []
        for k in range(1, space.k_max + 1):
            try:
                w_next, p = entry.apply(ws[-1])
            except MapDomainError:
                break  # deeper levels share this input; no k >= this one works
            if p <= 0.0:
                break  # a zero-probability level poisons every deeper schedule
            ws.append(w_next)
            ps.append(p)
            if w_next < w0:
                continue
            n0_min, p_succ, exceeded = min_n0_for_levels(
                ps, entry.r, k, p_th, space.n0_max, hi_cap=incumbent
            )
            if exceeded:
                budget_hit = True
            if n0_min is None:
                continue
            candidates.append(
                _Candidate(
                    entry.name,
                    entry.r,
                    k,
                    n0_min,
                    p_succ,
                    ScheduleTrace(tuple(ws), tuple(ps)),
                    order,
                )
            )
            if incumbent is None or n0_min < incumbent:
                incumbent = n0_min

    if not candidates:
        if budget_hit:
            return SearchResult(
                False,
                STATUS_BUDGET,
                reason=(
                    f"quality is recoverable but the threshold {p_th} needs more "
                    f"than n0_max={space.n0_max} copies (outside explored exact-DP regime)"
                ),
            )
        return SearchResult(
            False,
            STATUS_FIDELITY,
            reason="no candidate configuration restores the target quality",
        )

    best = tie_break(candidates)
    return SearchResult(
        True,
        STATUS_FEASIBLE,
        n0_min=best.n0_min,
        selected=(best.name, best.r, best.k),
        trace=best.trace,
        p_succ_at_min=best.p_succ,
    )


def _iterate_quality(pmap: PurificationMap, w_start: float, k: int) -> float | None:
    """k-fold application of the quality map, or None on domain exit."""
    w = w_start
    for _ in range(k):
        if not pmap.contains(w):
            return None
        if pmap.family == "bbpssw":
            w, _p = pmap.apply(w)
        else:
            w = pmap.f(w)
    return w


def fixed_target(
    pmap: PurificationMap, ell: int, k: int, w_th: float
) -> float | None:
    """Largest self-consistent recovery target w* <= w_th, if one exists.

    Solves f^(k)((w*)^ell) = w* by scanning h(w) = f^(k)(w^ell) - w on a
    1e-3 grid downward from w_th and bisecting sign changes; grid points
    whose trace leaves the map domain are skipped.
    """
    ell = check_path(ell)
    if not 0.0 < w_th < 1.0:
        raise ValueError(f"w_th={w_th!r} must lie in (0, 1)")
    lo_edge = boundary_w0(ell)
    if w_th <= lo_edge:
        # Every candidate target under the cap has a separable raw state.
        return None

    def h(w: float) -> float | None:
        out = _iterate_quality(pmap, w**ell, k)
        return None if out is None else out - w

    n_steps = int(math.floor((w_th - lo_edge) / _FIXED_TARGET_STEP))
    grid = [w_th - i * _FIXED_TARGET_STEP for i in range(n_steps + 1)]
    if grid[-1] > lo_edge:
        grid.append(lo_edge)

    prev: tuple[float, float] | None = None
    for w in grid:
        hv = h(w)
        if hv is None:
            prev = None
            continue
        if abs(hv) <= FIXED_TARGET_RESIDUAL:
            return w
        if prev is not None and (hv < 0.0) != (prev[1] < 0.0):
            root = _bisect(h, w, prev[0])
            if root is not None:
                return root
        prev = (w, hv)
    return None


def _bisect(h, a: float, b: float) -> float | None:
    """Bisection for a root of h in [a, b]; endpoints must bracket a sign change."""
    ha = h(a)
    hb = h(b)
    if ha is None or hb is None:
        return None
    for _ in range(200):
        mid = 0.5 * (a + b)
        hm = h(mid)
        if hm is None:
            return None
        if abs(hm) <= FIXED_TARGET_RESIDUAL or (b - a) < 1e-15:
            return mid
        if (hm < 0.0) == (ha < 0.0):
            a, ha = mid, hm
        else:
            b, hb = mid, hm
    return 0.5 * (a + b)


def fixed_target_budget(
    w_th: float,
    ell: int,
    p_th: float,
    space: SearchSpace,
    family: str | None = None,
) -> SearchResult:
    """Budget at the threshold-based target: first depth admitting a fixed
    target per entry, then the minimal budget at that target.
    """
    ell = check_path(ell)
    if not 0.0 < p_th <= 1.0:
        raise ValueError(f"success threshold {p_th!r} outside (0, 1]")
    if w_th <= boundary_w0(ell):
        return SearchResult(
            False,
            STATUS_FIDELITY,
            reason=(
                f"target cap {w_th!r} at or below the entanglement boundary "
                f"{boundary_w0(ell):.6f} for ell={ell}: no entangled raw input exists"
            ),
        )

    candidates: list[_Candidate] = []
    budget_hit = False
    for order, entry in _iter_entries(space, family):
        for k in range(1, space.k_max + 1):
            wstar = fixed_target(entry, ell, k, w_th)
            if wstar is None:
                continue
            raw = wstar**ell
            ws = [raw]
            ps: list[float] = []
            ok = True
            for _ in range(k):
                try:
                    w_next, p = entry.apply(ws[-1])
                except MapDomainError:
                    ok = False
                    break
                if p <= 0.0:
                    ok = False
                    break
                ws.append(w_next)
                ps.append(p)
            if not ok:
                break
            n0_min, p_succ, exceeded = min_n0_for_levels(
                ps, entry.r, k, p_th, space.n0_max
            )
            if exceeded:
                budget_hit = True
            if n0_min is not None:
                candidates.append(
                    _Candidate(
                        entry.name,
                        entry.r,
                        k,
                        n0_min,
                        p_succ,
                        ScheduleTrace(tuple(ws), tuple(ps)),
                        order,
                        w_target=wstar,
                    )
                )
            break  # first depth admitting a target, per entry

    if not candidates:
        status = STATUS_BUDGET if budget_hit else STATUS_FIDELITY
        reason = (
            "fixed target exists but threshold unreachable within n0_max"
            if budget_hit
            else "no self-consistent recovery target under the cap"
        )
        return SearchResult(False, status, reason=reason)

    best = tie_break(candidates)
    return SearchResult(
        True,
        STATUS_FEASIBLE,
        n0_min=best.n0_min,
        selected=(best.name, best.r, best.k),
        trace=best.trace,
        p_succ_at_min=best.p_succ,
        w_target=best.w_target,
    )
