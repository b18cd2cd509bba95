"""Purification-protocol registry.

Each protocol is an r-to-1 purification round described by two maps over
state quality: ``f`` gives the output Werner parameter conditioned on
success and ``g`` gives the round success probability. BBPSSW (r=2) is
built in analytically; higher-order r-to-1 maps are loaded from a JSON
registry file as rational functions and validated on load.

Internally every map is stored in the Werner variable; fidelity-variable
registry entries are converted at load time.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .werner import (
    ENTANGLEMENT_THRESHOLD,
    check_werner,
    fidelity_from_werner,
    werner_from_fidelity,
)

FAMILIES = ("bbpssw", "jansen", "custom")
LOADABLE_FAMILIES = ("jansen", "custom")
VARIABLES = ("werner", "fidelity")

DEFAULT_DOMAIN = (ENTANGLEMENT_THRESHOLD, 1.0)

# Grid density used for load-time shape checks of registry maps.
_VALIDATION_GRID = 513

ANCHOR_TOL = 1e-9


class RegistryError(ValueError):
    """Registry document failed to parse or violated a map invariant."""


class MapDomainError(ValueError):
    """Input quality outside the declared domain of a purification map."""


class MapEvaluationError(ArithmeticError):
    """Map denominator vanished; signals malformed registry data."""


# ---------------------------------------------------------------------------
# BBPSSW recurrence (fidelity variable)
# ---------------------------------------------------------------------------


def bbpssw_success(f: float) -> float:
    """BBPSSW round success probability at input fidelity ``f``."""
    return f * f + (2.0 / 3.0) * f * (1.0 - f) + (5.0 / 9.0) * (1.0 - f) ** 2


def bbpssw_step(f: float) -> tuple[float, float]:
    """One successful BBPSSW round on two identical Werner pairs.

    Returns ``(f_out, p_round)`` for input fidelity ``f`` in (1/4, 1].
    """
    f = float(f)
    if not 0.25 < f <= 1.0:
        raise ValueError(f"fidelity {f!r} outside (1/4, 1]")
    den = bbpssw_success(f)
    num = f * f + (1.0 / 9.0) * (1.0 - f) ** 2
    return num / den, den


# ---------------------------------------------------------------------------
# rational maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMap:
    """Ratio of two polynomials, coefficients in ascending powers."""

    variable: str
    num: tuple[float, ...]
    den: tuple[float, ...]

    def __call__(self, x: float) -> float:
        n = _polyval(self.num, x)
        d = _polyval(self.den, x)
        if abs(d) < 1e-300:
            raise MapEvaluationError(
                f"denominator vanished at {self.variable}={x!r}"
            )
        return n / d


def _polyval(coeffs: tuple[float, ...], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_compose_affine(
    coeffs: Iterable[float], a: float, b: float
) -> tuple[float, ...]:
    """Coefficients of p(a + b*x) given ascending coefficients of p."""
    acc = np.zeros(1)
    inner = np.array([a, b])
    for c in reversed(list(coeffs)):
        acc = np.polynomial.polynomial.polymul(acc, inner)
        acc = np.polynomial.polynomial.polyadd(acc, [c])
    return tuple(float(v) for v in np.atleast_1d(acc))


def _poly_sub(p: Iterable[float], q: Iterable[float]) -> tuple[float, ...]:
    return tuple(
        float(v) for v in np.polynomial.polynomial.polysub(list(p), list(q))
    )


def _poly_scale(p: Iterable[float], s: float) -> tuple[float, ...]:
    return tuple(float(s * v) for v in p)


def _to_werner_variable(
    f: RationalMap, g: RationalMap, domain: tuple[float, float]
) -> tuple[RationalMap, RationalMap, tuple[float, float]]:
    """Convert fidelity-variable maps (and their domain) to the Werner variable.

    ``f`` maps F -> F'; the Werner form is w' = (4*N(phi(w)) - D(phi(w))) / (3*D(phi(w)))
    with phi(w) = (1 + 3w)/4. ``g`` only needs its argument substituted.
    """
    nf = _poly_compose_affine(f.num, 0.25, 0.75)
    df = _poly_compose_affine(f.den, 0.25, 0.75)
    f_w = RationalMap(
        "werner",
        _poly_sub(_poly_scale(nf, 4.0), df),
        _poly_scale(df, 3.0),
    )
    g_w = RationalMap(
        "werner",
        _poly_compose_affine(g.num, 0.25, 0.75),
        _poly_compose_affine(g.den, 0.25, 0.75),
    )
    lo, hi = domain
    return f_w, g_w, (werner_from_fidelity(lo), werner_from_fidelity(hi))


# ---------------------------------------------------------------------------
# purification maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PurificationMap:
    """An r-to-1 purification round: quality map ``f`` and success map ``g``.

    Both maps are stored in the Werner variable over ``domain``.
    """

    family: str
    name: str
    r: int
    f: RationalMap
    g: RationalMap
    domain: tuple[float, float]

    def contains(self, w: float) -> bool:
        return self.domain[0] <= w <= self.domain[1]

    def apply(self, w: float) -> tuple[float, float]:
        """One round on identical inputs of quality ``w``: (w_out, p_round)."""
        w = check_werner(w)
        if not self.contains(w):
            raise MapDomainError(
                f"{self.name}: input w={w!r} outside domain "
                f"[{self.domain[0]!r}, {self.domain[1]!r}]"
            )
        if self.family == "bbpssw":
            f_out, p = bbpssw_step(fidelity_from_werner(w))
            w_out = (4.0 * f_out - 1.0) / 3.0
        else:
            w_out, p = self.f(w), self.g(w)
        # Load-time validation bounds outputs to [0, 1] within 1e-9; strip
        # the remaining float dust so iterated traces stay in range.
        return min(max(w_out, 0.0), 1.0), min(max(p, 0.0), 1.0)


def apply_map(pmap: PurificationMap, w: float) -> tuple[float, float]:
    """Evaluate one purification round; see PurificationMap.apply."""
    return pmap.apply(w)


def bbpssw_map() -> PurificationMap:
    """The built-in BBPSSW entry (r=2), with rational forms for introspection."""
    # Fidelity-variable coefficients of the recurrence, ascending powers.
    f_num = (1.0 / 9.0, -2.0 / 9.0, 10.0 / 9.0)
    f_den = (5.0 / 9.0, -4.0 / 9.0, 8.0 / 9.0)
    f_w, g_w, _ = _to_werner_variable(
        RationalMap("fidelity", f_num, f_den),
        RationalMap("fidelity", f_den, (1.0,)),
        (0.5, 1.0),
    )
    # Operating domain in w is the default entangled range.
    return PurificationMap("bbpssw", "bbpssw", 2, f_w, g_w, DEFAULT_DOMAIN)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolRegistry:
    entries: tuple[PurificationMap, ...]

    def families(self) -> tuple[str, ...]:
        seen: list[str] = []
        for e in self.entries:
            if e.family not in seen:
                seen.append(e.family)
        return tuple(seen)

    def for_family(self, family: str) -> tuple[PurificationMap, ...]:
        return tuple(e for e in self.entries if e.family == family)

    def get(self, name: str) -> PurificationMap:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _validate_map(pmap: PurificationMap) -> None:
    lo, hi = pmap.domain
    if not (0.0 <= lo < hi <= 1.0):
        raise RegistryError(
            f"{pmap.name}: domain [{lo!r}, {hi!r}] is not a valid "
            "sub-interval of [0, 1] in the Werner variable"
        )
    if pmap.r < 2:
        raise RegistryError(f"{pmap.name}: block size r={pmap.r} must be >= 2")

    grid = np.linspace(lo, hi, _VALIDATION_GRID)
    for w in grid:
        try:
            f_val = pmap.f(float(w))
            g_val = pmap.g(float(w))
        except MapEvaluationError as exc:
            raise RegistryError(
                f"{pmap.name}: denominator vanishes inside domain ({exc})"
            ) from exc
        if not -1e-9 <= f_val <= 1.0 + 1e-9:
            raise RegistryError(
                f"{pmap.name}: output quality f({w:.6f})={f_val:.6f} "
                "outside [0, 1]"
            )
        if w > ENTANGLEMENT_THRESHOLD and not 0.0 < g_val <= 1.0 + 1e-12:
            raise RegistryError(
                f"{pmap.name}: success probability g({w:.6f})={g_val:.6f} "
                "outside (0, 1] on entangled inputs"
            )
    # Perfect input must be a fixed point of f and certain for g.
    f1 = pmap.f(1.0)
    g1 = pmap.g(1.0)
    if abs(f1 - 1.0) > ANCHOR_TOL or abs(g1 - 1.0) > ANCHOR_TOL:
        raise RegistryError(
            f"{pmap.name}: perfect-input anchor violated "
            f"(f(1)={f1!r}, g(1)={g1!r})"
        )


def _coeffs(entry: dict, key: str, idx: int) -> tuple[float, ...]:
    try:
        raw = entry[key]
    except KeyError:
        raise RegistryError(f"protocols[{idx}]: missing field {key!r}") from None
    if (
        not isinstance(raw, list)
        or not raw
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
    ):
        raise RegistryError(
            f"protocols[{idx}].{key}: expected a non-empty list of numbers"
        )
    return tuple(float(v) for v in raw)


def _parse_entry(entry: dict, idx: int) -> PurificationMap:
    if not isinstance(entry, dict):
        raise RegistryError(f"protocols[{idx}]: expected an object")

    def field(key: str):
        try:
            return entry[key]
        except KeyError:
            raise RegistryError(
                f"protocols[{idx}]: missing field {key!r}"
            ) from None

    family = field("family")
    if family not in LOADABLE_FAMILIES:
        raise RegistryError(
            f"protocols[{idx}].family: {family!r} not one of "
            f"{list(LOADABLE_FAMILIES)} (BBPSSW is built in)"
        )
    name = field("name")
    if not isinstance(name, str) or not name:
        raise RegistryError(f"protocols[{idx}].name: expected a non-empty string")
    r = field("r")
    if not isinstance(r, int) or isinstance(r, bool):
        raise RegistryError(f"protocols[{idx}].r: expected an integer")
    variable = field("variable")
    if variable not in VARIABLES:
        raise RegistryError(
            f"protocols[{idx}].variable: {variable!r} not one of {list(VARIABLES)}"
        )

    f_map = RationalMap(variable, _coeffs(entry, "f_num", idx), _coeffs(entry, "f_den", idx))
    g_map = RationalMap(variable, _coeffs(entry, "g_num", idx), _coeffs(entry, "g_den", idx))

    if "domain" in entry:
        dom = entry["domain"]
        if (
            not isinstance(dom, list)
            or len(dom) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in dom)
        ):
            raise RegistryError(
                f"protocols[{idx}].domain: expected [lo, hi] numbers"
            )
        domain = (float(dom[0]), float(dom[1]))
    elif variable == "fidelity":
        domain = (0.5, 1.0)
    else:
        domain = DEFAULT_DOMAIN

    if variable == "fidelity":
        f_map, g_map, domain = _to_werner_variable(f_map, g_map, domain)

    return PurificationMap(family, name, r, f_map, g_map, domain)


def load_registry(source: str | os.PathLike | IO[str] | None = None) -> ProtocolRegistry:
    """Load a protocol registry; BBPSSW is always included as a built-in.

    ``source`` may be a path, an open text stream, or None (built-in only).
    An empty document also yields the built-in-only registry.
    """
    entries: list[PurificationMap] = [bbpssw_map()]
    text = ""
    if source is not None:
        if hasattr(source, "read"):
            text = source.read()
        else:
            text = Path(source).read_text()
    if text.strip():
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RegistryError(
                f"registry parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(doc, dict) or "protocols" not in doc:
            raise RegistryError("registry document must be an object with a 'protocols' array")
        protocols = doc["protocols"]
        if not isinstance(protocols, list):
            raise RegistryError("'protocols' must be an array")
        for idx, raw in enumerate(protocols):
            entries.append(_parse_entry(raw, idx))

    names = [e.name for e in entries]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise RegistryError(f"duplicate entry names: {sorted(dupes)}")
    for entry in entries:
        _validate_map(entry)
    return ProtocolRegistry(tuple(entries))
