"""Integral and differential quantities of an annulus band.

The induced metric of ``X_a`` is ``ds^2 + z(s)^2 dtheta^2``, so every
surface integral here is ``int ds`` of an explicit theta-integral
(``2 pi``, ``pi`` or 0) times a function of ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fbma import numerics, surface
from fbma.annuli import AnnulusBand
from fbma.surface import SurfaceParams

FD_STEP = 1e-3
EIG_TOL = 1e-10
K_DIM = 2


class NotApplicable(ValueError):
    """The statement being checked does not apply to this band."""


# central difference stencils, offsets in units of h
_STENCIL_2 = {
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
}
_STENCIL_4 = {
    1: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
    2: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
}


def local_curve(params, s: float, offsets) -> dict[str, np.ndarray]:
    """Curve columns at ``s + offsets`` with ``phi`` carried from ``phi(s)``.

    The increments are integrated on the short offset intervals directly,
    so finite differences see no quadrature noise from the base angle.
    """
    p = surface._params(params)
    offsets = np.asarray(offsets, dtype=float)
    base = surface.phi(p, s)
    nodes, weights = surface._GL_NODES, surface._GL_WEIGHTS
    t = s + 0.5 * np.outer(offsets, nodes + 1.0)
    inc = 0.5 * offsets * (surface.psi(p.a, t) @ weights)
    ss = s + offsets
    ph = base + inc
    x, y, z, dx, dy, dz = surface._curve_arrays(p.a, ss, ph)
    return {"s": ss, "phi": ph, "x": x, "y": y, "z": z, "dx": dx, "dy": dy, "dz": dz}


def fd_derivatives(params, s: float, h: float = FD_STEP, order: int = 4) -> dict[str, tuple[float, float, float]]:
    """``(value, first, second)`` derivatives of x, y, z by central differences."""
    stencils = _STENCIL_4 if order == 4 else _STENCIL_2
    off1, w1 = stencils[1]
    off2, w2 = stencils[2]
    c0 = local_curve(params, s, [0.0])
    c1 = local_curve(params, s, off1 * h)
    c2 = local_curve(params, s, off2 * h)
    out = {}
    for k in ("x", "y", "z"):
        out[k] = (float(c0[k][0]), float(w1 @ c1[k]) / h, float(w2 @ c2[k]) / h**2)
    return out


def ode_residuals(params, s: float, h: float = 1e-4, order: int = 2) -> tuple[float, float, float]:
    """Residuals of the three generating-curve equations of minimality.

    ``x'' + (z'/z) x' + 2x``, the same for ``y``, and
    ``z'' + (z'^2 - 1)/z + 2z``, all from finite differences.
    """
    d = fd_derivatives(params, s, h, order)
    x, dx, ddx = d["x"]
    y, dy, ddy = d["y"]
    z, dz, ddz = d["z"]
    return (
        abs(ddx + dz / z * dx + 2.0 * x),
        abs(ddy + dz / z * dy + 2.0 * y),
        abs(ddz + (dz * dz - 1.0) / z + 2.0 * z),
    )


def area(band: AnnulusBand) -> float:
    """``2 pi int z ds`` over the band."""
    a = band.params.a

    def z(s):
        return np.sqrt(0.5 + a * np.cos(2.0 * s))

    res = numerics.integrate(z, (band.s_lo, band.s_hi), vectorized=True)
    return 2.0 * math.pi * res.value


def boundary_length(band: AnnulusBand) -> float:
    a = band.params.a
    z_lo = math.sqrt(0.5 + a * math.cos(2.0 * band.s_lo))
    z_hi = math.sqrt(0.5 + a * math.cos(2.0 * band.s_hi))
    return 2.0 * math.pi * (z_lo + z_hi)


def boundary_side(band: AnnulusBand) -> int:
    """Side of the sphere ``{x1 = c}`` the band leaves into at its ends.

    +1 for ``x1 > c`` at both ends, -1 for ``x1 < c`` at both ends, 0 when
    the ends disagree.
    """
    p = band.params
    dx_lo = surface.gamma(p, band.s_lo).vel[0]
    dx_hi = surface.gamma(p, band.s_hi).vel[0]
    # moving inward: +ds at s_lo, -ds at s_hi
    side_lo = np.sign(dx_lo)
    side_hi = np.sign(-dx_hi)
    return int(side_lo) if side_lo == side_hi else 0


def same_side_check(band: AnnulusBand) -> bool:
    return boundary_side(band) != 0


def ball(band: AnnulusBand) -> tuple[int, float]:
    """``(orientation, radius)`` of the geodesic ball the band leaves into.

    Orientation +1 is the ball about ``(1, 0, 0, 0)`` of radius ``r``; -1 is
    the ball about ``(-1, 0, 0, 0)`` of radius ``pi - r``.
    """
    side = boundary_side(band)
    if side == 0:
        raise NotApplicable("band meets its sphere from opposite sides")
    return side, band.radius if side > 0 else math.pi - band.radius


@dataclass(frozen=True)
class IsoperimetricResult:
    ratio: float
    lower: float
    upper: float
    radius: float
    skipped: bool = False

    @property
    def lower_slack(self) -> float:
        return self.ratio - self.lower

    @property
    def upper_slack(self) -> float:
        return self.upper - self.ratio

    @property
    def holds(self) -> bool:
        return self.skipped or (self.lower_slack >= 0.0 and self.upper_slack >= 0.0)


def iso_bounds(r: float, k: int = K_DIM) -> tuple[float, float]:
    return k / math.tan(r), k * (1.0 + math.cos(r)) / (2.0 * math.sin(r))


def isoperimetric_check(band: AnnulusBand) -> IsoperimetricResult:
    """Boundary-to-area ratio against ``k cot r <= ratio <= k (1 + cos r)/(2 sin r)``.

    Non-contained bands come back with ``skipped=True``.
    """
    ratio = boundary_length(band) / area(band)
    if band.contained_north:
        r = band.radius
    elif band.contained_south:
        r = math.pi - band.radius
    else:
        return IsoperimetricResult(ratio, math.nan, math.nan, math.nan, skipped=True)
    lower, upper = iso_bounds(r)
    return IsoperimetricResult(ratio, lower, upper, r)


def boundary_moment(band: AnnulusBand, i: int) -> float:
    """``int over the boundary of x^i``; exactly 0 for the rotated coordinates."""
    if i not in (1, 2, 3, 4):
        raise ValueError("coordinate index must be 1..4")
    if i in (3, 4):
        return 0.0
    p = band.params
    total = 0.0
    for s in (band.s_lo, band.s_hi):
        x, y, z = surface.gamma(p, s).pos
        total += z * (x if i == 1 else y)
    return 2.0 * math.pi * total


def second_fundamental_norm(params, s: float) -> float:
    """``|II|^2 = 2 k^2`` with ``k = (x y' - y x')/z`` the theta-circle curvature."""
    cp = surface.gamma(params, s)
    x, y, z = cp.pos
    dx, dy, _ = cp.vel
    k = (x * dy - y * dx) / z
    return 2.0 * k * k


def _ii_norm_closed(a: float, s):
    # x y' - y x' = rho^2 psi, which reduces k to sqrt(1/4 - a^2) / z^2
    k = math.sqrt(0.25 - a * a) / (0.5 + a * np.cos(2.0 * s))
    return 2.0 * k * k


def _fd_second_form(params, s: float, theta: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    if not 1e-5 <= h <= 1e-3:
        raise ValueError("finite-difference step must lie in [1e-5, 1e-3]")
    p = surface._params(params)
    off = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    col = local_curve(p, s, off)

    def X(i, th):
        return np.array([col["x"][i], col["y"][i], col["z"][i] * math.cos(th), col["z"][i] * math.sin(th)])

    c = 2  # index of offset 0
    d1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    d2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    Xs = sum(d1[i] * X(i, theta) for i in range(5))
    Xss = sum(d2[i] * X(i, theta) for i in range(5))
    ths = theta + off
    Xt = sum(d1[i] * X(c, ths[i]) for i in range(5))
    Xtt = sum(d2[i] * X(c, ths[i]) for i in range(5))
    Xst = sum(d1[i] * d1[j] * X(i, ths[j]) for i in range(5) for j in range(5) if d1[i] and d1[j])
    g = np.array([[Xs @ Xs, Xs @ Xt], [Xt @ Xs, Xt @ Xt]])
    # unit normal tangent to S^3: orthogonal to X, Xs, Xt
    N = surface._normal((col["x"][c], col["y"][c], col["z"][c]), (col["dx"][c], col["dy"][c], col["dz"][c]), theta)
    # for N tangent to S^3 the sphere correction <X, N> vanishes, so the
    # ambient second derivative projects straight onto N
    II = np.array([[Xss @ N, Xst @ N], [Xst @ N, Xtt @ N]])
    return g, II


def second_fundamental_fd(params, s: float, theta: float = 0.0, h: float = FD_STEP) -> float:
    """Finite-difference ``|II|^2`` in the induced metric (test oracle)."""
    g, II = _fd_second_form(params, s, theta, h)
    shape = np.linalg.solve(g, II)
    return float(np.trace(shape @ shape))


def mean_curvature_fd(params, s: float, theta: float = 0.0, h: float = FD_STEP) -> float:
    g, II = _fd_second_form(params, s, theta, h)
    return float(np.trace(np.linalg.solve(g, II)))


def index_form_matrix(band: AnnulusBand) -> np.ndarray:
    """Index form on linear functions ``<x, e_i>``, i = 1..4.

    ``S_ij = -int |II|^2 phi_i phi_j dmu - delta_i1 delta_j1 cot(r) |dSigma|``
    with ``r`` the radius of the ball the band leaves into (see :func:`ball`).
    """
    _, r = ball(band)
    p = band.params
    a = p.a

    def moments(s):
        c = surface.curve_many(p, s)
        w = _ii_norm_closed(a, s) * c["z"]
        return np.stack([w * c["x"] ** 2, w * c["x"] * c["y"], w * c["y"] ** 2, w * c["z"] ** 2])

    vals = []
    for k in range(4):
        res = numerics.integrate(lambda s, k=k: moments(s)[k], (band.s_lo, band.s_hi), 1e-13, 1e-12, vectorized=True)
        vals.append(res.value)
    xx, xy, yy, zz = vals
    S = np.zeros((4, 4))
    S[0, 0] = -2.0 * math.pi * xx - boundary_length(band) / math.tan(r)
    S[0, 1] = S[1, 0] = -2.0 * math.pi * xy
    S[1, 1] = -2.0 * math.pi * yy
    # theta integrals of cos^2 and sin^2 are pi; mixed terms vanish
    S[2, 2] = S[3, 3] = -math.pi * zz
    return S


def negative_eigen_count(matrix, tol: float = EIG_TOL) -> int:
    m = np.asarray(matrix, dtype=float)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(m - m.T)) > 1e-10:
        raise ValueError("matrix is not symmetric")
    return int(np.sum(np.linalg.eigvalsh(0.5 * (m + m.T)) < -tol))


def laplace_residual(params, s: float, i: int, h: float = FD_STEP) -> float:
    """``|Lap x^i + 2 x^i|`` on the surface, theta-amplitude for i = 3, 4.

    ``Lap u = u_ss + (z'/z) u_s + u_thth / z^2``; s-derivatives by central
    differences, theta-derivatives exact.
    """
    if i not in (1, 2, 3, 4):
        raise ValueError("coordinate index must be 1..4")
    if not 1e-5 <= h <= 1e-3:
        raise ValueError("finite-difference step must lie in [1e-5, 1e-3]")
    d = fd_derivatives(params, s, h, order=4)
    dz_exact = surface.gamma(params, s).vel[2]
    z = d["z"][0]
    if i in (1, 2):
        u, du, ddu = d["x" if i == 1 else "y"]
        return abs(ddu + dz_exact / z * du + 2.0 * u)
    # u = z cos(theta) or z sin(theta); the angular factor drops out
    u, du, ddu = d["z"]
    return abs(ddu + dz_exact / z * du - u / z**2 + 2.0 * u)


def steklov_residuals(band: AnnulusBand) -> np.ndarray:
    """Boundary-condition residuals for x^1..x^4 over both boundary circles.

    With ``(sigma, r) = ball(band)`` and ``x~ = sigma x^1`` these are
    ``|d_eta x~ + sin r|`` and ``|d_eta x^i - cot(r) x^i|``, ``eta`` the
    outward conormal (``+d/ds`` at ``s_hi``, ``-d/ds`` at ``s_lo``).
    """
    sigma, r = ball(band)
    p = band.params
    res = np.zeros(4)
    for s, out in ((band.s_lo, -1.0), (band.s_hi, 1.0)):
        cp = surface.gamma(p, s)
        x, y, z = cp.pos
        dx, dy, dz = (out * v for v in cp.vel)
        cot = 1.0 / math.tan(r)
        res[0] = max(res[0], abs(sigma * dx + math.sin(r)))
        res[1] = max(res[1], abs(dy - cot * y))
        res[2] = max(res[2], abs(dz - cot * z))
        res[3] = res[2]
    return res


def steklov_boundary_check(band: AnnulusBand, tol: float = 1e-6) -> bool:
    return bool(np.max(steklov_residuals(band)) <= tol)


@dataclass
class GeometricReport:
    area: float
    boundary_length: float
    ratio: float
    iso_lower: float
    iso_upper: float
    balancing: list[float]
    index_matrix: list[list[float]] | None
    negative_directions: int | None
    same_side: bool
    restricted_negative_directions: int | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def geometric_report(band: AnnulusBand) -> GeometricReport:
    A = area(band)
    L = boundary_length(band)
    iso = isoperimetric_check(band)
    side = boundary_side(band)
    notes = []
    matrix = neg = neg_r = None
    if side != 0:
        S = index_form_matrix(band)
        matrix = S.tolist()
        neg = negative_eigen_count(S)
        neg_r = negative_eigen_count(S[1:, 1:])
    else:
        notes.append("index form skipped: band meets its sphere from both sides")
    if iso.skipped:
        notes.append("isoperimetric bounds skipped: band is not contained in a ball")
    return GeometricReport(
        area=A,
        boundary_length=L,
        ratio=L / A,
        iso_lower=iso.lower,
        iso_upper=iso.upper,
        balancing=[boundary_moment(band, i) for i in (1, 2, 3, 4)],
        index_matrix=matrix,
        negative_directions=neg,
        same_side=side != 0,
        restricted_negative_directions=neg_r,
        notes=notes,
    )
