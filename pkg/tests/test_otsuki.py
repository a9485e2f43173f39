from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from fbma import otsuki, surface
from fbma.otsuki import GuaranteeError, OtsukiError, OtsukiSpec

RATIONALS = [(2, 3), (3, 5), (4, 7), (5, 8), (5, 9)]


@pytest.mark.parametrize("p, q", RATIONALS)
def test_solve_parameter_against_simpson_bisection(p, q):
    spec = otsuki.solve_parameter(p, q)
    assert spec.residual < 1e-12
    assert 0 < spec.a < 0.4999
    assert spec.a == pytest.approx(oracles.otsuki_parameter(p, q), abs=1e-10)


def test_solved_values():
    assert otsuki.solve_parameter(2, 3).a == pytest.approx(0.3901215467580398, abs=1e-12)
    assert otsuki.solve_parameter(5, 8).a == pytest.approx(0.4652864637715896, abs=1e-12)


@pytest.mark.parametrize("p, q", [(1, 2), (2, 4), (3, 4), (5, 7), (0, 3), (-2, 3)])
def test_solve_parameter_rejections(p, q):
    with pytest.raises(OtsukiError):
        otsuki.solve_parameter(p, q)


@pytest.mark.parametrize("p, q", RATIONALS)
def test_detect_rational_round_trip(p, q):
    assert otsuki.detect_rational_period(otsuki.solve_parameter(p, q).a) == (p, q)


def test_detect_rational_negative_cases():
    assert otsuki.detect_rational_period(0.0) is None
    a = 0.1234
    x = surface.big_c(a) / (2 * math.pi)
    # no continued-fraction convergent with denominator <= 64 comes within 1e-8
    best = min(abs(x - Fraction(h, k)) for h, k in oracles.convergent_denominators(x, 64))
    assert best * 2 * math.pi > 1e-8
    assert otsuki.detect_rational_period(a) is None
    with pytest.raises(ValueError):
        otsuki.detect_rational_period(a, max_den=1000)


@pytest.mark.parametrize("p, q, cases", [(2, 3, ("0", "half_pi")), (3, 5, ("0", "half_pi")),
                                         (4, 7, ("0", "half_pi")), (5, 9, ("0", "half_pi")),
                                         (5, 8, ("0", "pi_over_q"))])
def test_zero_counts_meet_guarantee(p, q, cases):
    spec = otsuki.solve_parameter(p, q)
    for case in cases:
        zeros = otsuki.representative_zeros(spec, otsuki.phi0_value(spec, case))
        assert len(zeros) >= 2 * p
        assert all(-spec.period / 2 <= z < spec.period / 2 for z in zeros)
        for z in zeros:
            assert abs(surface.f((spec.a, otsuki.phi0_value(spec, case)), z)) < 1e-10


def test_enumerate_2_3_phi0_zero(spec23):
    e = otsuki.enumerate_annuli(spec23, "0")
    assert len(e.bands) >= 4 and e.ok
    assert any(not b.contained_north and not b.contained_south for b in e.bands)
    for b in e.bands:
        assert abs(surface.f(b.params, b.s_lo)) < 1e-10
        assert abs(surface.f(b.params, b.s_hi)) < 1e-10


def test_enumerate_2_3_half_pi(spec23):
    e = otsuki.enumerate_annuli(spec23, "half_pi")
    assert len(e.bands) == 2
    assert all(abs(b.sphere_x1) < 1e-9 for b in e.bands)
    assert e.witnesses[0]["kind"] == "reflection"
    assert e.witnesses[0]["residual"] < 1e-9
    assert otsuki.mirror_map_check(spec23)
    # control: phi0 = 0 makes x even, so the odd-x assertion fails
    assert not otsuki.mirror_map_check(spec23, phi0=0.0)
    assert surface.gamma((spec23.a, math.pi / 2), 0.0).pos[0] == pytest.approx(0.0, abs=1e-16)


@pytest.mark.parametrize("case", ["0", "pi_over_q"])
def test_enumerate_5_8(spec58, case):
    e = otsuki.enumerate_annuli(spec58, case)
    assert len(e.bands) >= 10
    assert len(e.witnesses) == 5
    assert all(w["zero_symmetry_residual"] < 1e-9 for w in e.witnesses)
    if case == "pi_over_q":
        assert e.phi0 == pytest.approx(math.pi / 8)
        assert all(w["set_equality_residual"] < 1e-9 for w in e.witnesses)


def test_rotation_map(spec58):
    assert otsuki.rotation_map_check(spec58)
    perturbed = OtsukiSpec(5, 8, spec58.a + 1e-3)
    assert not otsuki.rotation_map_check(perturbed)
    # single point: R(pi) gamma(q pi / 2) = gamma(0)
    moved = surface.rotate(math.pi, surface.gamma((spec58.a, 0.0), 4 * math.pi).pos)
    np.testing.assert_allclose(moved, surface.gamma((spec58.a, 0.0), 0.0).pos, atol=1e-10)


def test_set_equality(spec58):
    assert otsuki.modular_inverse(5, 16) == 13
    residual, n = otsuki.set_equality_residual(spec58)
    assert n == 13
    assert residual < 1e-9
    assert otsuki.set_equality_check(spec58)


@pytest.mark.parametrize("phi0", [0.0, math.pi / 8, 0.77])
def test_rotation_period(spec58, phi0):
    assert otsuki.rotation_period_residual(spec58, phi0) < 1e-9


def test_parity_guards(spec23, spec58):
    with pytest.raises(OtsukiError):
        otsuki.enumerate_annuli(spec23, "pi_over_q")
    with pytest.raises(OtsukiError):
        otsuki.enumerate_annuli(spec58, "half_pi")
    with pytest.raises(OtsukiError):
        otsuki.rotation_map_check(spec23)
    with pytest.raises(OtsukiError):
        otsuki.mirror_map_check(spec58)
    with pytest.raises(OtsukiError):
        otsuki.enumerate_annuli(spec23, "quarter")
    with pytest.raises(OtsukiError):
        otsuki.modular_inverse(4, 8)


def test_guarantee_error_when_zeros_missing(spec23, monkeypatch):
    real = otsuki.representative_zeros
    monkeypatch.setattr(otsuki, "representative_zeros", lambda spec, phi0, a=None: real(spec, phi0, a)[:2])
    with pytest.raises(GuaranteeError, match="guarantee"):
        otsuki.enumerate_annuli(spec23, "0")


@pytest.mark.parametrize("p, q", [(5, 8), (7, 10)])
def test_f_odd_about_quarter_period_even_q(p, q):
    spec = otsuki.solve_parameter(p, q)
    s = np.linspace(0.05, spec.period / 2 - 0.05, 40)
    lhs = surface.f_many((spec.a, 0.0), spec.period / 2 - s)
    rhs = -surface.f_many((spec.a, 0.0), s)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("p, q", RATIONALS)
def test_q_pi_periodic(p, q):
    spec = otsuki.solve_parameter(p, q)
    s = np.linspace(-3, 3, 25)
    a0 = surface.curve_many((spec.a, 0.3), s)
    a1 = surface.curve_many((spec.a, 0.3), s + spec.period)
    for k in ("x", "y", "z", "f"):
        np.testing.assert_allclose(a0[k], a1[k], atol=1e-9)
