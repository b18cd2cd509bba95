"""Werner-state quality algebra for multi-hop entanglement paths.

A two-qubit Werner state is a mixture of a Bell state and the maximally
mixed state; its single quality scalar ``w`` is the weight on the Bell
component. The state is entangled iff ``w > 1/3``. Ideal entanglement
swapping multiplies Werner parameters, so an ``ell``-link path turns
elementary-link quality ``w0`` into raw end-to-end quality ``w0**ell``.
"""

from __future__ import annotations

ENTANGLEMENT_THRESHOLD = 1.0 / 3.0


def check_werner(w: float) -> float:
    """Validate a Werner parameter in [0, 1] and return it as a float."""
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"Werner parameter {w!r} outside [0, 1]")
    return w


def check_fidelity(f: float) -> float:
    """Validate a Bell-state fidelity in [1/4, 1] and return it as a float."""
    f = float(f)
    if not 0.25 <= f <= 1.0:
        raise ValueError(f"fidelity {f!r} outside [1/4, 1]")
    return f


def check_path(ell: int) -> int:
    """Validate a path length (number of elementary links)."""
    if not isinstance(ell, (int,)) or isinstance(ell, bool):
        raise ValueError(f"path length must be an integer, got {ell!r}")
    if ell < 1:
        raise ValueError(f"path length must be >= 1, got {ell}")
    return ell


def entangled(w: float) -> bool:
    """Whether a Werner state with parameter ``w`` is entangled."""
    return check_werner(w) > ENTANGLEMENT_THRESHOLD


def fidelity_from_werner(w: float) -> float:
    """Bell-state fidelity F = (1 + 3w) / 4."""
    w = check_werner(w)
    return (1.0 + 3.0 * w) / 4.0


def werner_from_fidelity(f: float) -> float:
    """Werner parameter w = (4F - 1) / 3; inverse of fidelity_from_werner."""
    f = check_fidelity(f)
    return (4.0 * f - 1.0) / 3.0


def raw_werner(w0: float, ell: int) -> float:
    """Raw end-to-end Werner parameter after ideal swapping over ``ell`` links."""
    w0 = check_werner(w0)
    ell = check_path(ell)
    return w0**ell


def boundary_w0(ell: int) -> float:
    """Minimum elementary-link quality 3**(-1/ell) for an entangled raw state.

    Below this value the raw end-to-end state is separable and no LOCC
    purification can recover entanglement.
    """
    ell = check_path(ell)
    return 3.0 ** (-1.0 / ell)
