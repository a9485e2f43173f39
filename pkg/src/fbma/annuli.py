"""Free boundary annuli cut out of a do Carmo-Dajczer surface.

A band ``[s_lo, s_hi]`` whose ends are zeros of ``f_a`` with equal ``x_a``
rotates into an immersed minimal annulus meeting the geodesic sphere
``{x1 = x_a(s_lo)}`` orthogonally along both boundary circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from fbma import numerics, surface
from fbma.surface import SurfaceParams

SCAN_STEP = math.pi / 256
ZERO_TOL = 1e-10
X_MATCH_TOL = 1e-9
CONTAIN_TOL = 1e-8
MERGE_TOL = 1e-9


class BandError(ValueError):
    pass


@dataclass(frozen=True)
class AnnulusBand:
    params: SurfaceParams
    s_lo: float
    s_hi: float
    sphere_x1: float
    radius: float
    contained_north: bool
    contained_south: bool
    embedded: bool | None = None
    wraps_torus: bool = False
    label: str = field(default="", compare=False)

    @property
    def width(self) -> float:
        return self.s_hi - self.s_lo

    def as_dict(self) -> dict:
        return {
            "a": self.params.a,
            "phi0": self.params.phi0,
            "s_lo": self.s_lo,
            "s_hi": self.s_hi,
            "sphere_x1": self.sphere_x1,
            "radius": self.radius,
            "contained_north": self.contained_north,
            "contained_south": self.contained_south,
            "embedded": self.embedded,
            "wraps_torus": self.wraps_torus,
            "label": self.label,
        }


def _params(params) -> SurfaceParams:
    return surface._params(params)


def find_f_zeros(params, iv, step: float = SCAN_STEP) -> list[float]:
    """Sign-change zeros of ``f_a`` on ``iv``, refined and sorted.

    Tangential (even multiplicity) zeros are invisible to the scan.
    """
    p = _params(params)
    if step > math.pi / 64:
        raise ValueError("scan step must be at most pi/64")
    brackets = numerics.scan_sign_changes(lambda s: surface.f_many(p, s), iv, step, vectorized=True)
    fs = lambda s: surface.f(p, s)
    zeros: list[float] = []
    for b in brackets:
        # re-evaluate the ends with the scalar path so the bracket is consistent
        b = numerics.make_bracket(fs, b.lo, b.hi)
        if not b.valid:
            # grid value and scalar value disagree in sign at a node-level zero
            end = b.lo if abs(b.f_lo) <= abs(b.f_hi) else b.hi
            if abs(fs(end)) <= numerics.F_TOL:
                zeros.append(end)
            continue
        zeros.append(numerics.find_root(fs, b))
    zeros.sort()
    merged: list[float] = []
    for z in zeros:
        if not merged or z - merged[-1] > MERGE_TOL:
            merged.append(z)
    return merged


def first_positive_zero(a: float) -> float:
    """``s_1(a)``: first positive zero of ``f_a`` for ``phi0 = 0``.

    ``f_a(0) > 0 > f_a(pi/2)``, so it lies in (0, pi/2).
    """
    surface.check_a(a)
    zeros = find_f_zeros((a, 0.0), (0.0, 0.5 * math.pi + SCAN_STEP))
    zeros = [z for z in zeros if z > 0.0]
    if not zeros:
        raise BandError(f"no positive zero of f found for a={a}")
    return zeros[0]


def positive_zeros(a: float, count: int, window: float | None = None) -> list[float]:
    if window is None:
        window = (count + 2) * math.pi
    zeros = [z for z in find_f_zeros((a, 0.0), (0.0, window)) if z > 0.0]
    if len(zeros) < count:
        raise BandError(
            f"only {len(zeros)} positive zeros of f in (0, {window:.6g}] for a={a}; "
            f"pass a larger window to reach index {count}"
        )
    return zeros[:count]


def symmetric_band(a: float, i: int, window: float | None = None, *, check_embedding: bool = True) -> AnnulusBand:
    """Band ``[-s_i, s_i]`` of ``Sigma_a(0)``; bands grow with ``i``."""
    if i < 1:
        raise ValueError("band index starts at 1")
    s_i = positive_zeros(a, i, window)[-1]
    band = band_from_zero_pair((a, 0.0), -s_i, s_i, label=f"symmetric-{i}")
    if check_embedding:
        band = replace(band, embedded=embeddedness_check(band))
    return band


def _x(p: SurfaceParams, s: float) -> float:
    return surface.gamma(p, s).pos[0]


def band_from_zero_pair(params, s_lo: float, s_hi: float, *, label: str = "") -> AnnulusBand:
    """Validate a zero pair and build the band with containment flags.

    Raises
    ------
    BandError
        If either end is not a zero of ``f`` or the ends sit on different
        spheres.
    """
    p = _params(params)
    if not s_lo < s_hi:
        raise BandError(f"need s_lo < s_hi, got {s_lo}, {s_hi}")
    f_lo, f_hi = surface.f(p, s_lo), surface.f(p, s_hi)
    if abs(f_lo) > ZERO_TOL or abs(f_hi) > ZERO_TOL:
        raise BandError(f"band ends are not zeros of f: f(s_lo)={f_lo:.3g}, f(s_hi)={f_hi:.3g}")
    x_lo, x_hi = _x(p, s_lo), _x(p, s_hi)
    if abs(x_lo - x_hi) > X_MATCH_TOL:
        raise BandError(
            f"band ends lie on different spheres: x1 = {x_lo!r} vs {x_hi!r} "
            f"(discrepancy {abs(x_lo - x_hi):.3g})"
        )
    c = 0.5 * (x_lo + x_hi)
    period = surface.curve_period(p.a)
    wraps = period is not None and (s_hi - s_lo) >= period - 1e-9
    band = AnnulusBand(
        params=p,
        s_lo=float(s_lo),
        s_hi=float(s_hi),
        sphere_x1=c,
        radius=math.acos(max(-1.0, min(1.0, c))),
        contained_north=False,
        contained_south=False,
        wraps_torus=wraps,
        label=label,
    )
    north, south = containment_check(band)
    return replace(band, contained_north=north, contained_south=south)


def containment_check(band: AnnulusBand, n_samples: int = 2048) -> tuple[bool, bool]:
    """Whether the band stays in ``{x1 >= c}`` (north) or ``{x1 <= c}`` (south).

    Grid extremum of ``x_a`` followed by one bounded local refinement.
    """
    if n_samples < 1024:
        raise ValueError("containment_check needs at least 1024 samples")
    p = band.params
    s = np.linspace(band.s_lo, band.s_hi, n_samples)
    x = surface.curve_many(p, s)["x"]
    lo_val = _refine_extremum(p, s, x, np.argmin(x), +1.0)
    hi_val = _refine_extremum(p, s, x, np.argmax(x), -1.0)
    c = band.sphere_x1
    return bool(lo_val >= c - CONTAIN_TOL), bool(hi_val <= c + CONTAIN_TOL)


def _refine_extremum(p: SurfaceParams, s: np.ndarray, x: np.ndarray, k: int, sign: float) -> float:
    best = float(x[k])
    if 0 < k < len(s) - 1:
        res = minimize_scalar(
            lambda t: sign * _x(p, t), bounds=(s[k - 1], s[k + 1]), method="bounded",
            options={"xatol": 1e-12},
        )
        best = min(best, sign * res.fun) if sign > 0 else max(best, sign * res.fun)
    return best


def polyline_is_embedded(points: np.ndarray, param_width: float) -> bool:
    """Sample-based injectivity certificate for a sampled curve.

    Fails when two samples more than three steps apart in parameter come
    closer than half a step in chordal distance.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    step = param_width / n
    threshold = 0.5 * step
    idx = np.arange(n)
    # blockwise to bound memory at n ~ 10^4
    for start in range(0, n, 512):
        block = pts[start:start + 512]
        d = np.linalg.norm(block[:, None, :] - pts[None, :, :], axis=-1)
        sep = np.abs(idx[start:start + 512, None] - idx[None, :])
        if np.any((sep > 3) & (d < threshold)):
            return False
    return True


def embeddedness_check(band: AnnulusBand, n_samples: int = 2048) -> bool:
    """Heuristic embedding certificate for the band's annulus.

    The rotation about the x1x2-plane is injective for ``z > 0``, so the
    annulus is embedded exactly when its generating arc is. For symmetric
    first bands of ``Sigma_a(0)`` the analytic sufficient conditions
    ``s_1 < pi/2`` and ``sign(y) = sign(s)`` are checked as well.
    """
    if n_samples < 2048:
        raise ValueError("embeddedness_check needs at least 2048 samples")
    p = band.params
    s = np.linspace(band.s_lo, band.s_hi, n_samples)
    cols = surface.curve_many(p, s)
    pts = np.column_stack([cols["x"], cols["y"], cols["z"]])
    ok = polyline_is_embedded(pts, band.width)
    if p.phi0 == 0.0 and abs(band.s_lo + band.s_hi) <= 1e-12 and p.a != 0.0 and band.s_hi < 0.5 * math.pi:
        y = cols["y"]
        inner = np.abs(s) > 1e-12
        ok = ok and bool(np.all(np.sign(y[inner]) == np.sign(s[inner])))
    return ok


def radius(a: float) -> float:
    """``r(a) = arccos x_a(s_1(a))``."""
    p = SurfaceParams(a, 0.0)
    return math.acos(_x(p, first_positive_zero(a)))


def radius_trichotomy(a: float, tol: float = 1e-9) -> tuple[float, int]:
    """``(r(a), sign(r(a) - pi/2))`` with ``|r - pi/2| <= tol`` read as 0."""
    r = radius(a)
    d = r - 0.5 * math.pi
    return r, 0 if abs(d) <= tol else (1 if d > 0 else -1)
