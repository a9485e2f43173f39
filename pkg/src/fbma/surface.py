"""The do Carmo-Dajczer family of minimal surfaces of revolution in S^3.

For a shape parameter ``a`` in (-1/2, 1/2) and an initial angle ``phi0`` the
generating curve in the upper half of S^2 is

    x = rho(s) cos phi(s),  y = rho(s) sin phi(s),  z = (1/2 + a cos 2s)^(1/2)

with ``rho = (1/2 - a cos 2s)^(1/2)`` and ``phi' = psi(a, s)``. Rotating it
about the x1x2-plane gives the immersion ``X_a(s, theta)`` into S^3.

Scalar entry points (``phi``, ``gamma``, ``f``) use the adaptive integrator
from :mod:`fbma.numerics`; the ``*_many`` variants evaluate whole grids with
a panel-sized Gauss-Legendre rule and are what the scanners call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from fbma import numerics

A_MAX = 0.4999
SQRT2 = math.sqrt(2.0)
HALF_PI = 0.5 * math.pi


class DomainError(ValueError):
    pass


class PoleError(ValueError):
    """The conormal field of geodesic spheres is undefined at x1 = +-1."""


@dataclass(frozen=True)
class SurfaceParams:
    a: float
    phi0: float = 0.0

    def __post_init__(self):
        check_a(self.a)


@dataclass(frozen=True)
class CurvePoint:
    s: float
    phi: float
    pos: tuple[float, float, float]
    vel: tuple[float, float, float]


@dataclass(frozen=True)
class FrameSample:
    point: np.ndarray
    normal: np.ndarray
    conormal_field: np.ndarray
    inner: float


def check_a(a: float) -> float:
    if not abs(a) <= A_MAX:
        raise DomainError(f"shape parameter a={a!r} outside |a| <= {A_MAX}")
    return a


def _params(params) -> SurfaceParams:
    if isinstance(params, SurfaceParams):
        return params
    a, phi0 = params
    return SurfaceParams(float(a), float(phi0))


def psi(a: float, t):
    """Angular speed ``phi'`` of the generating curve; pi-periodic and positive.

    Accepts scalar or array ``t``.
    """
    check_a(a)
    c = np.cos(2.0 * np.asarray(t, dtype=float))
    out = math.sqrt(0.25 - a * a) / (np.sqrt(0.5 + a * c) * (0.5 - a * c))
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=4096)
def _big_c(a: float) -> float:
    res = numerics.integrate(lambda t: psi(a, t), (0.0, HALF_PI), vectorized=True)
    return 2.0 * res.value


def big_c(a: float) -> float:
    """Increase of ``phi`` over one period ``pi`` of ``psi``.

    Memoised per ``a``; ``lru_cache`` is safe for concurrent readers.
    """
    check_a(a)
    return _big_c(float(a))


def period_T(c: float) -> float:
    """Otsuki's period integral, with inverse-square-root endpoint blowup.

    ``T(c) = sqrt(2c) * int_{x0}^{x1} dx / (x sqrt((2-x)(x(2-x)-c)))`` with
    ``x0, x1 = 1 -+ sqrt(1-c)``. The quadratic under the root factors as
    ``(x - x0)(x1 - x)``, which the tanh-sinh rule hands over without
    cancellation.
    """
    if not 0.0 < c < 1.0:
        raise DomainError(f"period_T needs c in (0, 1), got {c!r}")
    w = math.sqrt(1.0 - c)
    x0, x1 = 1.0 - w, 1.0 + w

    def integrand(x, dlo, dhi):
        return 1.0 / (x * math.sqrt((2.0 - x) * dlo * dhi))

    res = numerics.integrate_singular_endpoints(integrand, (x0, x1), complement=True)
    return math.sqrt(2.0 * c) * res.value


def _reduce(s: float) -> tuple[int, float]:
    # s = m*pi/2 + r with |r| <= pi/4
    m = int(round(s / HALF_PI))
    return m, s - m * HALF_PI


def phi(params, s: float) -> float:
    """``phi0 + int_0^s psi``.

    Uses ``phi(m pi/2) = phi0 + m C_a / 2`` and the glide symmetry
    ``psi(a, t + pi/2) = psi(-a, t)`` so only ``|r| <= pi/4`` is integrated.
    """
    p = _params(params)
    m, r = _reduce(float(s))
    base = p.phi0 + 0.5 * m * big_c(p.a)
    if r == 0.0:
        return base
    a_eff = -p.a if m % 2 else p.a
    lo, hi = (0.0, r) if r > 0 else (r, 0.0)
    part = numerics.integrate(lambda t: psi(a_eff, t), (lo, hi), vectorized=True).value
    return base + (part if r > 0 else -part)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _panel_count(a: float) -> int:
    # psi has poles where cos 2t = 1/(2a); keep panels well inside the
    # Bernstein ellipse through the nearest one
    if abs(a) < 0.05:
        return 1
    dist = 0.5 * math.acosh(1.0 / (2.0 * abs(a)))
    return max(1, math.ceil(HALF_PI * 0.5 / dist))


def phi_many(params, s) -> np.ndarray:
    """Vectorised ``phi`` on an array of parameters."""
    p = _params(params)
    s = np.asarray(s, dtype=float)
    flat = s.ravel()
    m = np.round(flat / HALF_PI)
    r = flat - m * HALF_PI
    odd = (m.astype(np.int64) % 2) == 1
    out = p.phi0 + 0.5 * m * big_c(p.a)
    k = _panel_count(p.a)
    # composite Gauss-Legendre on [0, r] with k equal panels
    edges = np.linspace(0.0, 1.0, k + 1)
    acc = np.zeros_like(flat)
    for j in range(k):
        lo, hi = edges[j], edges[j + 1]
        u = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
        t = np.outer(r, u)
        c = np.cos(2.0 * t)
        a_eff = np.where(odd, -p.a, p.a)[:, None]
        vals = math.sqrt(0.25 - p.a * p.a) / (np.sqrt(0.5 + a_eff * c) * (0.5 - a_eff * c))
        acc += 0.5 * (hi - lo) * r * (vals @ _GL_WEIGHTS)
    return (out + acc).reshape(s.shape)


def _curve_arrays(a: float, s, ph):
    c2 = np.cos(2.0 * s)
    s2 = np.sin(2.0 * s)
    rho2 = 0.5 - a * c2
    z2 = 0.5 + a * c2
    rho = np.sqrt(rho2)
    z = np.sqrt(z2)
    cp, sp = np.cos(ph), np.sin(ph)
    x, y = rho * cp, rho * sp
    ps = math.sqrt(0.25 - a * a) / (z * rho2)
    # d(rho)/ds = a sin 2s / rho, so d(rho)/ds / rho = a sin 2s / rho^2
    g = a * s2 / rho2
    dx = g * x - y * ps
    dy = g * y + x * ps
    dz = -a * s2 / z
    return x, y, z, dx, dy, dz


def gamma(params, s: float) -> CurvePoint:
    p = _params(params)
    ph = phi(p, s)
    x, y, z, dx, dy, dz = (float(v) for v in _curve_arrays(p.a, float(s), ph))
    return CurvePoint(float(s), ph, (x, y, z), (dx, dy, dz))


def curve_many(params, s) -> dict[str, np.ndarray]:
    """Columns ``s, phi, x, y, z, dx, dy, dz, f`` sampled on ``s``."""
    p = _params(params)
    s = np.asarray(s, dtype=float)
    ph = phi_many(p, s)
    x, y, z, dx, dy, dz = _curve_arrays(p.a, s, ph)
    fv = _f_arrays(p.a, s, ph)
    return {"s": s, "phi": ph, "x": x, "y": y, "z": z, "dx": dx, "dy": dy, "dz": dz, "f": fv}


def immersion(params, s: float, theta: float) -> np.ndarray:
    """Point ``X_a(s, theta)`` of S^3 as a length-4 array."""
    x, y, z = gamma(params, s).pos
    return np.array([x, y, z * math.cos(theta), z * math.sin(theta)])


def _normal(pos, vel, theta: float) -> np.ndarray:
    x, y, z = pos
    dx, dy, dz = vel
    k = x * dy - y * dx
    return np.array([
        y * dz - z * dy,
        -(x * dz - z * dx),
        k * math.cos(theta),
        k * math.sin(theta),
    ])


def frame(params, s: float, theta: float) -> FrameSample:
    """Unit normal, radial conormal field and their inner product.

    The normal is ``gamma x gamma'`` rotated with the surface; the conormal
    field is the outward unit normal of the geodesic spheres about (1,0,0,0).
    """
    cp = gamma(params, s)
    x, y, z = cp.pos
    w2 = 1.0 - x * x
    if w2 <= 1e-14:
        raise PoleError(f"x1 = {x!r} is at a pole; the conormal field is undefined")
    w = math.sqrt(w2)
    point = np.array([x, y, z * math.cos(theta), z * math.sin(theta)])
    normal = _normal(cp.pos, cp.vel, theta)
    nu = np.array([x * x - 1.0, x * y, x * point[2], x * point[3]]) / w
    return FrameSample(point, normal, nu, float(normal @ nu))


def _f_arrays(a: float, s, ph):
    return a * np.sin(2.0 * s) * np.sin(ph) + math.sqrt(0.25 - a * a) * np.sqrt(
        0.5 + a * np.cos(2.0 * s)
    ) * np.cos(ph)


def f(params, s: float) -> float:
    """Orthogonality function; zeros mark orthogonal meetings with spheres about p_N.

    ``<N, nu> = f / (rho z sqrt(1 - x^2))``, a positive multiple of ``f``.
    """
    p = _params(params)
    return float(_f_arrays(p.a, float(s), phi(p, s)))


def f_many(params, s) -> np.ndarray:
    p = _params(params)
    s = np.asarray(s, dtype=float)
    return _f_arrays(p.a, s, phi_many(p, s))


def rotate(beta: float, v) -> np.ndarray:
    """Counterclockwise rotation by ``beta`` in the first two coordinates."""
    v = np.array(v, dtype=float)
    c, s = math.cos(beta), math.sin(beta)
    x, y = v[0], v[1]
    v[0], v[1] = c * x - s * y, s * x + c * y
    return v


def rational_multiple(a: float, max_den: int = 64, tol: float = 1e-8) -> tuple[int, int] | None:
    """``(p, q)`` with ``|C_a - 2 p pi / q| <= tol`` and ``q <= max_den``."""
    ca = big_c(a)
    frac = Fraction(ca / (2.0 * math.pi)).limit_denominator(max_den)
    if abs(ca - 2.0 * math.pi * frac.numerator / frac.denominator) <= tol:
        return frac.numerator, frac.denominator
    return None


def curve_period(a: float, max_den: int = 64) -> float | None:
    """Period of the generating curve when it closes up, else ``None``.

    The Clifford curve ``a = 0`` is a circle of period ``sqrt(2) pi``; for
    ``a != 0`` the curve closes exactly when ``C_a = 2 p pi / q``, with period
    ``q pi``.
    """
    if a == 0.0:
        return SQRT2 * math.pi
    pq = rational_multiple(a, max_den)
    return None if pq is None else pq[1] * math.pi
