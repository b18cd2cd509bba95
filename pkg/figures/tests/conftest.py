import pytest

HEADER = "ell,w0,pth,family,status,n0_min,r,k,w_out,p_succ,boundary_w0"


def make_row(ell, w0, pth, status, n0=None, k=None):
    boundary = 3.0 ** (-1.0 / ell)
    if status == "feasible":
        return (
            f"{ell},{w0!r},{pth!r},bbpssw,feasible,{n0},2,{k},"
            f"{min(w0 + 0.01, 1.0)!r},{0.87!r},{boundary!r}"
        )
    return f"{ell},{w0!r},{pth!r},bbpssw,{status},,,,,,{boundary!r}"


@pytest.fixture
def bbpssw_csv(tmp_path):
    """BBPSSW-only sweep: feasible strictly above the boundary, plus one
    budget-exceeded band just above it."""
    lines = [HEADER]
    for ell in range(2, 7):
        boundary = 3.0 ** (-1.0 / ell)
        w0 = 0.5
        while w0 <= 1.0 + 1e-9:
            for pth in (0.5, 0.99):
                if w0 <= boundary + 0.02:
                    status = "fidelity-infeasible" if w0 <= boundary else "budget-exceeded"
                    lines.append(make_row(ell, w0, pth, status))
                else:
                    n0 = max(2, int(1000 * (1.05 - w0) * ell))
                    k = min(9, max(1, int(2 + 6 * (1 - w0) + 0.3 * ell)))
                    lines.append(make_row(ell, w0, pth, "feasible", n0, k))
            w0 = round(w0 + 0.025, 6)
    path = tmp_path / "bbpssw_sweep.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
