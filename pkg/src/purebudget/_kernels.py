"""Exact dynamic-programming kernels for the all-in purification schedule.

One purification level regroups ``n`` available copies into ``n // r``
complete blocks and thins them binomially: the survivor count is
``Binomial(n // r, p)``. These kernels propagate the full probability
mass function of the survivor count through ``k`` levels, which is the
hot loop of every copy-budget search.

Two implementations are provided: a numba-jitted one (default) and a
pure numpy/scipy fallback. Set ``PUREBUDGET_DISABLE_NUMBA=1`` before
import to force the fallback; ``benchmarks/bench_dp.py`` compares both.
"""

from __future__ import annotations

import math
import os

import numpy as np

# Mass entries below this are clamped to zero after each level and the
# distribution renormalized. Far below every quoted tolerance, but keeps
# denormal noise out of long recursions.
MASS_CLIP = 1e-15

# Hard stop for the per-row pmf scan; remaining tail is irrelevant at
# MASS_CLIP scale.
_ROW_TAIL = 1e-320


def _numba_disabled() -> bool:
    return os.environ.get("PUREBUDGET_DISABLE_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
    )


# ---------------------------------------------------------------------------
# pure numpy/scipy fallback
# ---------------------------------------------------------------------------


def _clean_numpy(q: np.ndarray) -> np.ndarray:
    q = np.where(q < MASS_CLIP, 0.0, q)
    s = q.sum()
    if s > 0.0:
        q = q / s
    return q


def binom_row_numpy(b: int, p: float) -> np.ndarray:
    """Binomial(b, p) pmf over m = 0..b."""
    from scipy.stats import binom

    return binom.pmf(np.arange(b + 1), b, p)


def dp_step_numpy(q: np.ndarray, p: float, r: int) -> np.ndarray:
    """One all-in level: regroup by floor division, thin binomially."""
    from scipy.stats import binom

    q = np.asarray(q, dtype=np.float64)
    big = q.size - 1
    bb = big // r
    qb = np.zeros(bb + 1)
    np.add.at(qb, np.arange(q.size) // r, q)
    ms = np.arange(bb + 1)
    # rows[b, m] = pmf(m; b, p); pmf is zero for m > b
    rows = binom.pmf(ms[None, :], ms[:, None], p)
    return _clean_numpy(qb @ rows)


def dp_distribution_numpy(n0: int, ps: np.ndarray, r: int) -> np.ndarray:
    q = np.zeros(int(n0) + 1)
    q[int(n0)] = 1.0
    for p in np.asarray(ps, dtype=np.float64):
        q = dp_step_numpy(q, float(p), r)
    return q


def dp_success_numpy(n0: int, ps: np.ndarray, r: int) -> float:
    return 1.0 - float(dp_distribution_numpy(n0, ps, r)[0])


# ---------------------------------------------------------------------------
# numba implementation
# ---------------------------------------------------------------------------

NUMBA_AVAILABLE = False
if not _numba_disabled():
    try:
        import numba

        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_AVAILABLE = False

if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def _binom_row_fill(b, p, out):
        # Fill out[lo..hi] with the Binomial(b, p) pmf, anchored at the
        # mode so rows stay representable for any (b, p); returns the
        # nonzero span. Entries outside [lo, hi] are left untouched.
        if p <= 0.0:
            out[0] = 1.0
            return 0, 0
        if p >= 1.0:
            out[b] = 1.0
            return b, b
        m0 = int((b + 1) * p)
        if m0 > b:
            m0 = b
        logpmf0 = (
            math.lgamma(b + 1.0)
            - math.lgamma(m0 + 1.0)
            - math.lgamma(b - m0 + 1.0)
            + m0 * math.log(p)
            + (b - m0) * math.log1p(-p)
        )
        pm0 = math.exp(logpmf0)
        out[m0] = pm0
        lo = m0
        cur = pm0
        m = m0
        while m > 0:
            nxt = cur * (m * (1.0 - p)) / ((b - m + 1.0) * p)
            if nxt < _ROW_TAIL:
                break
            m -= 1
            out[m] = nxt
            cur = nxt
            lo = m
        hi = m0
        cur = pm0
        m = m0
        while m < b:
            nxt = cur * ((b - m) * p) / ((m + 1.0) * (1.0 - p))
            if nxt < _ROW_TAIL:
                break
            m += 1
            out[m] = nxt
            cur = nxt
            hi = m
        return lo, hi

    @numba.njit(cache=True)
    def _dp_step_nb(q, p, r):
        big = q.size - 1
        bb = big // r
        qb = np.zeros(bb + 1)
        for n in range(big + 1):
            v = q[n]
            if v != 0.0:
                qb[n // r] += v
        out = np.zeros(bb + 1)
        out[0] += qb[0]
        row = np.empty(bb + 1)
        for b in range(1, bb + 1):
            wgt = qb[b]
            if wgt == 0.0:
                continue
            lo, hi = _binom_row_fill(b, p, row)
            for m in range(lo, hi + 1):
                out[m] += wgt * row[m]
        s = 0.0
        for m in range(out.size):
            if out[m] < MASS_CLIP:
                out[m] = 0.0
            s += out[m]
        if s > 0.0:
            inv = 1.0 / s
            for m in range(out.size):
                out[m] *= inv
        return out

    @numba.njit(cache=True)
    def _dp_distribution_nb(n0, ps, r):
        q = np.zeros(n0 + 1)
        q[n0] = 1.0
        for j in range(ps.size):
            q = _dp_step_nb(q, ps[j], r)
        return q

    @numba.njit(cache=True)
    def _dp_success_nb(n0, ps, r):
        return 1.0 - _dp_distribution_nb(n0, ps, r)[0]

    def binom_row_numba(b: int, p: float) -> np.ndarray:
        out = np.zeros(b + 1)
        _binom_row_fill(int(b), float(p), out)
        return out

    def dp_step_numba(q: np.ndarray, p: float, r: int) -> np.ndarray:
        return _dp_step_nb(np.asarray(q, dtype=np.float64), float(p), int(r))

    def dp_distribution_numba(n0: int, ps: np.ndarray, r: int) -> np.ndarray:
        return _dp_distribution_nb(
            int(n0), np.asarray(ps, dtype=np.float64), int(r)
        )

    def dp_success_numba(n0: int, ps: np.ndarray, r: int) -> float:
        return float(
            _dp_success_nb(int(n0), np.asarray(ps, dtype=np.float64), int(r))
        )

else:
    binom_row_numba = None
    dp_step_numba = None
    dp_distribution_numba = None
    dp_success_numba = None


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:
    IMPLEMENTATION = "numba"
    binom_row = binom_row_numba
    dp_step_arr = dp_step_numba
    dp_distribution = dp_distribution_numba
    dp_success = dp_success_numba
else:
    IMPLEMENTATION = "numpy"
    binom_row = binom_row_numpy
    dp_step_arr = dp_step_numpy
    dp_distribution = dp_distribution_numpy
    dp_success = dp_success_numpy
