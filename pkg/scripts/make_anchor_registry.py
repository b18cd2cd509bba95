"""Build the bundled r=4 registry entry anchored to published operating points.

The true r-to-1 quality/success maps for block sizes 3..7 live in an
external reference and must be transcribed by the user. For testing the
search machinery end to end we ship a stand-in r=4 entry: Moebius
(degree-1 rational) interpolants through the two published operating
points of the worked example plus the perfect-input fixed point. The
first anchor sits at the exact raw quality 0.9327**9 so the worked-example
trace reproduces the published level probabilities exactly; the second
quality anchor carries a +2e-5 margin so the recovery condition holds
strictly.

Writes tests/data/jansen_r4_anchored.json. Run from the repo root:

    python3 scripts/make_anchor_registry.py
"""

import json
from pathlib import Path

import numpy as np

W0 = 0.9327
RAW = W0**9  # exact float input of the worked example
W1 = 0.7247
W2 = W0 + 2e-5  # strict-margin recovery target
P1 = 0.2318
P2 = 0.4188


def mobius_through(points):
    """Coefficients (a, b, c) of (a + b*w) / (1 + c*w) through three points."""
    a_mat = np.array([[1.0, x, -x * y] for x, y in points])
    rhs = np.array([y for _, y in points])
    a, b, c = np.linalg.solve(a_mat, rhs)
    return float(a), float(b), float(c)


def check(entry_f, entry_g, domain):
    lo, hi = domain
    af, bf, cf = entry_f
    ag, bg, cg = entry_g

    def f(w):
        return (af + bf * w) / (1 + cf * w)

    def g(w):
        return (ag + bg * w) / (1 + cg * w)

    pole_f = -1.0 / cf if cf != 0 else float("inf")
    pole_g = -1.0 / cg if cg != 0 else float("inf")
    assert not lo <= pole_f <= hi, f"f pole {pole_f} inside domain"
    assert not lo <= pole_g <= hi, f"g pole {pole_g} inside domain"

    grid = np.linspace(lo, hi, 4001)
    fv = np.array([f(w) for w in grid])
    gv = np.array([g(w) for w in grid])
    assert np.all(np.diff(fv) > 0), "f not increasing"
    assert np.all(np.diff(gv) > 0), "g not increasing"
    assert np.all((fv >= 0) & (fv <= 1 + 1e-12)), "f leaves [0,1]"
    assert np.all((gv > 0) & (gv <= 1 + 1e-12)), "g leaves (0,1]"

    # worked-example trace anchors
    assert abs(f(RAW) - W1) < 1e-12
    assert abs(g(RAW) - P1) < 1e-12
    assert abs(f(W1) - W2) < 1e-12
    assert abs(g(W1) - P2) < 1e-12
    assert f(W1) >= W0, "recovery margin lost"
    # published-value fixtures at the rounded inputs
    assert abs(f(0.5343) - 0.7247) < 5e-4
    assert abs(g(0.5343) - 0.2318) < 5e-4
    assert abs(f(0.7247) - 0.9327) < 5e-4
    assert abs(g(0.7247) - 0.4188) < 5e-4

    # fixed-target structure for ell=9, k=2: h has exactly one sign change
    # in (boundary, 0.95], located within 5e-4 of 0.9327
    def h(w):
        x = w**9
        if not lo <= x <= hi:
            return None
        y = f(x)
        if not lo <= y <= hi:
            return None
        return f(y) - w

    ws = np.arange(0.95, 0.90, -1e-4)
    hs = [h(w) for w in ws]
    crossings = [
        (ws[i], ws[i + 1])
        for i in range(len(hs) - 1)
        if hs[i] is not None and hs[i + 1] is not None and (hs[i] < 0) != (hs[i + 1] < 0)
    ]
    assert len(crossings) == 1, f"expected one crossing near 0.9327, got {crossings}"
    assert abs(crossings[0][0] - W0) < 5e-4, crossings
    print("all fixture checks passed")
    print(f"  f pole at {pole_f:.6f}, g pole at {pole_g:.6f}")
    print(f"  f({RAW:.6f}) = {f(RAW):.6f}, g = {g(RAW):.6f}")
    print(f"  f({W1}) = {f(W1):.7f}, g = {g(W1):.6f}")
    print(f"  crossing bracket: {crossings[0]}")


def main():
    domain = (0.45, 1.0)
    ef = mobius_through([(RAW, W1), (W1, W2), (1.0, 1.0)])
    eg = mobius_through([(RAW, P1), (W1, P2), (1.0, 1.0)])
    check(ef, eg, domain)

    entry = {
        "family": "jansen",
        "name": "r4-anchored",
        "r": 4,
        "variable": "werner",
        "f_num": [ef[0], ef[1]],
        "f_den": [1.0, ef[2]],
        "g_num": [eg[0], eg[1]],
        "g_den": [1.0, eg[2]],
        "domain": list(domain),
        "notes": (
            "Stand-in r=4 entry: Moebius interpolant through published "
            "operating points; not a transcription of the reference tables."
        ),
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "jansen_r4_anchored.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({"protocols": [entry]}, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
