from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

import oracles
from fbma import numerics, surface
from fbma.numerics import Bracket, Interval


@pytest.mark.parametrize(
    "f, iv, expected",
    [
        (lambda x: math.sqrt(2.0), (0.0, math.pi), math.sqrt(2.0) * math.pi),
        (lambda x: surface.psi(0.0, x), (0.0, math.pi), math.sqrt(2.0) * math.pi),
        (math.sin, (0.0, math.pi), 2.0),
        (math.exp, (-1.0, 2.0), math.exp(2.0) - math.exp(-1.0)),
    ],
)
def test_integrate_closed_forms(f, iv, expected):
    res = numerics.integrate(f, iv)
    assert res.value == pytest.approx(expected, abs=1e-12)
    assert res.error_estimate <= 1e-10
    assert res.evaluations >= 15


def test_integrate_vectorized_matches_scalar():
    g = lambda x: np.cos(3 * x) / (1.2 + np.sin(x))
    a = numerics.integrate(g, (0.0, 5.0), vectorized=True).value
    b = numerics.integrate(lambda x: float(g(x)), (0.0, 5.0)).value
    assert a == pytest.approx(b, abs=1e-13)


def test_integrate_against_quadpack():
    g = lambda x: 1.0 / (1.01 - math.cos(x))
    ref, _ = sp_integrate.quad(g, 0.3, 2.0, epsabs=1e-13, epsrel=1e-13)
    assert numerics.integrate(g, (0.3, 2.0)).value == pytest.approx(ref, rel=1e-11)


def test_integrate_budget_exhaustion_keeps_partial():
    with pytest.raises(numerics.QuadratureError) as err:
        numerics.integrate(lambda x: math.sin(1.0 / x), (1e-6, 1.0), max_evals=200)
    assert math.isfinite(err.value.partial.value)


@pytest.mark.parametrize("lo, hi", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf), (math.nan, 1.0)])
def test_interval_rejects_degenerate(lo, hi):
    with pytest.raises(ValueError):
        Interval(lo, hi)


def test_integrate_nonfinite_integrand():
    with pytest.raises(FloatingPointError):
        numerics.integrate(lambda x: math.nan, (0.0, 1.0))


@given(coeffs=st.lists(st.floats(-5, 5), min_size=1, max_size=8),
       lo=st.floats(-3, 0), width=st.floats(0.1, 4))
def test_integrate_polynomials_exact(coeffs, lo, width):
    poly = np.polynomial.Polynomial(coeffs)
    hi = lo + width
    expected = poly.integ()(hi) - poly.integ()(lo)
    got = numerics.integrate(poly, (lo, hi), vectorized=True).value
    assert got == pytest.approx(expected, abs=1e-11 * (1 + abs(expected)))


@given(split=st.floats(0.05, 2.95))
def test_integrate_additive(split):
    whole = numerics.integrate(math.cos, (0.0, 3.0)).value
    parts = numerics.integrate(math.cos, (0.0, split)).value + numerics.integrate(math.cos, (split, 3.0)).value
    assert whole == pytest.approx(parts, abs=1e-12)


def test_singular_arcsine_and_inverse_sqrt():
    arcsine = numerics.integrate_singular_endpoints(lambda x, d0, d1: 1.0 / math.sqrt(d0 * d1), (0.0, 1.0),
                                                    complement=True)
    assert arcsine.value == pytest.approx(math.pi, abs=1e-12)
    inv = numerics.integrate_singular_endpoints(lambda x: 1.0 / math.sqrt(x), (0.0, 1.0))
    assert inv.value == pytest.approx(2.0, abs=1e-10)


def test_singular_period_integrand_matches_big_c():
    c = 1.0 - 4.0 * 0.3**2
    assert surface.period_T(c) == pytest.approx(oracles.big_c_quad(0.3), abs=1e-10)


def test_find_root_basic():
    assert numerics.find_root(math.cos, numerics.make_bracket(math.cos, 1.0, 2.0)) == pytest.approx(math.pi / 2, abs=1e-13)
    assert numerics.find_root(lambda x: x, numerics.make_bracket(lambda x: x, -1.0, 1.0)) == pytest.approx(0.0, abs=1e-13)


def test_find_root_first_zero_of_f():
    fa = lambda s: surface.f((0.29, 0.0), s)
    b = numerics.scan_sign_changes(fa, (0.0, 0.5 * math.pi + 0.01), 0.01)[0]
    root = numerics.find_root(fa, numerics.make_bracket(fa, b.lo, b.hi))
    assert root == pytest.approx(oracles.first_zero(0.29), abs=1e-10)


def test_find_root_rejects_invalid_bracket():
    with pytest.raises(numerics.RootFindingError):
        numerics.find_root(math.cos, numerics.make_bracket(math.cos, 0.0, 1.0))


def test_find_root_budget():
    g = lambda x: math.tanh(50 * (x - 0.3))
    with pytest.raises(numerics.RootFindingError):
        numerics.find_root(g, numerics.make_bracket(g, 0.0, 1.0), max_evals=3)


@given(c=st.floats(-0.9, 0.9), slope=st.floats(0.1, 10))
def test_find_root_linear(c, slope):
    g = lambda x: slope * (x - c)
    assert numerics.find_root(g, numerics.make_bracket(g, -1.0, 1.0)) == pytest.approx(c, abs=1e-12)


def test_scan_sign_changes_examples():
    brackets = numerics.scan_sign_changes(math.cos, (0.0, 2 * math.pi), math.pi / 8)
    assert len(brackets) == 2
    assert brackets[0].lo <= math.pi / 2 <= brackets[0].hi
    assert brackets[1].lo <= 3 * math.pi / 2 <= brackets[1].hi
    assert numerics.scan_sign_changes(lambda x: 1.0, (0.0, 1.0), 0.1) == []


def test_scan_sign_changes_otsuki(spec23):
    fa = lambda s: surface.f((spec23.a, 0.0), s)
    brackets = numerics.scan_sign_changes(fa, (-1.5 * math.pi, 1.5 * math.pi), math.pi / 256)
    assert len(brackets) >= 4
    assert all(isinstance(b, Bracket) and b.valid for b in brackets)


def test_scan_rejects_bad_step():
    with pytest.raises(ValueError):
        numerics.scan_sign_changes(math.sin, (0.0, 1.0), 0.0)


@pytest.mark.parametrize(
    "g, target, iv, expected",
    [
        (lambda x: x * x, 4.0, (0.0, 3.0), 2.0),
        (lambda x: -x, 0.5, (-1.0, 0.0), -0.5),
    ],
)
def test_invert_monotone_examples(g, target, iv, expected):
    assert numerics.invert_monotone(g, target, iv, 1e-13) == pytest.approx(expected, abs=1e-12)


def test_invert_monotone_big_c_against_simpson_bisection():
    a = numerics.invert_monotone(surface.big_c, 4 * math.pi / 3, (0.0, 0.4999), 1e-13)
    assert a == pytest.approx(oracles.otsuki_parameter(2, 3), abs=1e-10)


def test_invert_monotone_out_of_range_names_range():
    with pytest.raises(ValueError, match="range"):
        numerics.invert_monotone(lambda x: x, 5.0, (0.0, 1.0), 1e-12)
