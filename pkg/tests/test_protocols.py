import io
import json
from fractions import Fraction

import numpy as np
import pytest

from purebudget.protocols import (
    MapDomainError,
    RationalMap,
    RegistryError,
    apply_map,
    bbpssw_map,
    bbpssw_step,
    load_registry,
)
from purebudget.werner import fidelity_from_werner, werner_from_fidelity

from conftest import ANCHOR_REGISTRY


def bbpssw_exact(f: Fraction) -> tuple[Fraction, Fraction]:
    """Exact rational-arithmetic evaluation of the BBPSSW recurrence."""
    num = f * f + Fraction(1, 9) * (1 - f) ** 2
    den = f * f + Fraction(2, 3) * f * (1 - f) + Fraction(5, 9) * (1 - f) ** 2
    return num / den, den


class TestBBPSSWStep:
    @pytest.mark.parametrize("f", [Fraction(1, 2), Fraction(3, 5), Fraction(7, 10),
                                   Fraction(4, 5), Fraction(9, 10), Fraction(1)])
    def test_matches_exact_rational_evaluation(self, f):
        f_out, p = bbpssw_step(float(f))
        f_ref, p_ref = bbpssw_exact(f)
        assert abs(f_out - float(f_ref)) < 1e-12
        assert abs(p - float(p_ref)) < 1e-12

    def test_perfect_input_fixed_point(self):
        f_out, p = bbpssw_step(1.0)
        assert f_out == 1.0
        assert p == 1.0

    def test_half_fixed_point(self):
        f_out, p = bbpssw_step(0.5)
        assert f_out == pytest.approx(0.5, abs=1e-15)
        assert p == pytest.approx(5.0 / 9.0, abs=1e-15)

    def test_known_point(self):
        f_out, p = bbpssw_step(0.8)
        assert f_out == pytest.approx(0.83815, abs=1e-5)
        assert p == pytest.approx(0.76889, abs=1e-5)

    def test_gain_region(self):
        for f in np.linspace(0.5, 1.0, 501)[1:-1]:
            f_out, _ = bbpssw_step(float(f))
            assert f_out > f

    def test_success_bounds(self):
        for f in np.linspace(0.5, 1.0, 201):
            _, p = bbpssw_step(float(f))
            assert 5.0 / 9.0 - 1e-12 <= p <= 1.0 + 1e-12

    @pytest.mark.parametrize("f", [0.25, 0.1, 1.00001])
    def test_domain(self, f):
        with pytest.raises(ValueError):
            bbpssw_step(f)


class TestApplyMap:
    def test_bbpssw_perfect(self, bbpssw):
        assert apply_map(bbpssw, 1.0) == (1.0, 1.0)

    def test_bbpssw_delegates_to_step(self, bbpssw):
        for w in np.linspace(0.34, 1.0, 101):
            w_out, p = apply_map(bbpssw, float(w))
            f_out, p_ref = bbpssw_step(fidelity_from_werner(float(w)))
            assert abs(w_out - werner_from_fidelity(f_out)) < 1e-12
            assert abs(p - p_ref) < 1e-12

    def test_bbpssw_rational_form_agrees_with_recurrence(self, bbpssw):
        # the stored rational maps are introspection copies of the analytic path
        for w in np.linspace(0.34, 1.0, 101):
            w_out, p = apply_map(bbpssw, float(w))
            assert abs(bbpssw.f(float(w)) - w_out) < 1e-12
            assert abs(bbpssw.g(float(w)) - p) < 1e-12

    def test_jansen_anchor_one(self, jansen_r4):
        w_out, p = apply_map(jansen_r4, 0.5343)
        assert w_out == pytest.approx(0.7247, abs=5e-4)
        assert p == pytest.approx(0.2318, abs=5e-4)

    def test_jansen_anchor_two(self, jansen_r4):
        w_out, p = apply_map(jansen_r4, 0.7247)
        assert w_out == pytest.approx(0.9327, abs=5e-4)
        assert p == pytest.approx(0.4188, abs=5e-4)

    def test_domain_error(self, jansen_r4):
        with pytest.raises(MapDomainError):
            apply_map(jansen_r4, 0.40)

    def test_outputs_stay_in_unit_interval(self, jansen_r4):
        lo, hi = jansen_r4.domain
        for w in np.linspace(lo, hi, 501):
            w_out, p = apply_map(jansen_r4, float(w))
            assert 0.0 <= w_out <= 1.0
            assert 0.0 <= p <= 1.0


def _entry(**overrides):
    entry = {
        "family": "custom",
        "name": "probe",
        "r": 3,
        "variable": "werner",
        "f_num": [0.0, 1.0],
        "f_den": [1.0],
        "g_num": [0.0, 1.0],
        "g_den": [1.0],
    }
    entry.update(overrides)
    return entry


def _doc(*entries):
    return io.StringIO(json.dumps({"protocols": list(entries)}))


class TestLoadRegistry:
    def test_none_gives_builtin_only(self):
        reg = load_registry(None)
        assert [e.name for e in reg.entries] == ["bbpssw"]
        assert reg.entries[0].r == 2

    def test_empty_document(self):
        reg = load_registry(io.StringIO(""))
        assert [e.name for e in reg.entries] == ["bbpssw"]

    def test_fixture_file_has_two_entries(self):
        reg = load_registry(ANCHOR_REGISTRY)
        assert len(reg.entries) == 2
        assert reg.entries[1].family == "jansen"
        assert reg.entries[1].r == 4

    def test_perfect_input_anchor_enforced(self):
        # g(1) = 0.9 violates the anchor
        bad = _entry(g_num=[0.0, 0.9])
        with pytest.raises(RegistryError, match="perfect-input anchor violated"):
            load_registry(_doc(bad))

    def test_bbpssw_not_loadable(self):
        with pytest.raises(RegistryError, match="family"):
            load_registry(_doc(_entry(family="bbpssw")))

    def test_duplicate_names_rejected(self):
        with pytest.raises(RegistryError, match="duplicate"):
            load_registry(_doc(_entry(), _entry()))

    def test_parse_error_carries_line(self):
        with pytest.raises(RegistryError, match="line"):
            load_registry(io.StringIO('{"protocols": [}'))

    def test_missing_field_named(self):
        entry = _entry()
        del entry["r"]
        with pytest.raises(RegistryError, match="missing field 'r'"):
            load_registry(_doc(entry))

    def test_pole_inside_domain_rejected(self):
        # the pole at w = 0.5 blows the quality map out of [0, 1]
        bad = _entry(f_den=[-0.5, 1.0])
        with pytest.raises(RegistryError):
            load_registry(_doc(bad))

    def test_exact_zero_denominator_is_evaluation_error(self):
        from purebudget.protocols import MapEvaluationError

        m = RationalMap("werner", (1.0,), (-0.5, 1.0))
        with pytest.raises(MapEvaluationError):
            m(0.5)

    def test_success_probability_bounds_enforced(self):
        bad = _entry(g_num=[0.0, 3.0, -2.0])  # peaks at 1.125 at w = 0.75
        with pytest.raises(RegistryError, match="success probability"):
            load_registry(_doc(bad))

    def test_small_r_rejected(self):
        with pytest.raises(RegistryError, match="block size"):
            load_registry(_doc(_entry(r=1)))

    def test_deterministic_reload(self):
        reg1 = load_registry(ANCHOR_REGISTRY)
        reg2 = load_registry(ANCHOR_REGISTRY)
        assert reg1.entries == reg2.entries

    def test_default_domain(self):
        reg = load_registry(_doc(_entry()))
        assert reg.get("probe").domain == (1.0 / 3.0, 1.0)

    def test_fidelity_variable_conversion(self):
        # a custom entry expressing the BBPSSW recurrence in the fidelity
        # variable must agree with the built-in analytic path after load
        entry = _entry(
            r=2,
            variable="fidelity",
            f_num=[1 / 9, -2 / 9, 10 / 9],
            f_den=[5 / 9, -4 / 9, 8 / 9],
            g_num=[5 / 9, -4 / 9, 8 / 9],
            g_den=[1.0],
            domain=[0.5, 1.0],
        )
        reg = load_registry(_doc(entry))
        probe = reg.get("probe")
        builtin = reg.get("bbpssw")
        assert probe.domain[0] == pytest.approx(1.0 / 3.0, abs=1e-12)
        for w in np.linspace(0.34, 1.0, 101):
            w_ref, p_ref = builtin.apply(float(w))
            w_out, p = probe.apply(float(w))
            assert abs(w_out - w_ref) < 1e-12
            assert abs(p - p_ref) < 1e-12


class TestRationalMap:
    def test_polynomial_evaluation(self):
        m = RationalMap("werner", (1.0, 2.0, 3.0), (1.0,))
        assert m(0.5) == pytest.approx(1.0 + 1.0 + 0.75)

    def test_rational_evaluation(self):
        m = RationalMap("werner", (0.0, 1.0), (2.0, -1.0))
        assert m(0.5) == pytest.approx(0.5 / 1.5)


def test_bbpssw_map_is_fresh_each_call():
    assert bbpssw_map() == bbpssw_map()
    assert bbpssw_map() is not bbpssw_map()
