"""Free boundary annuli inside Otsuki tori.

For coprime ``p, q`` with ``1/2 < p/q < 1/sqrt(2)`` there is a unique
``a`` in (0, 1/2) with ``C_a = 2 p pi / q``; the curve then closes after
``s = q pi``. Band pairings follow the three initial-angle cases
``phi0 = 0``, ``pi/2`` (``q`` odd) and ``pi/q`` (``q`` even).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fbma import annuli, numerics, surface
from fbma.annuli import AnnulusBand
from fbma.surface import SurfaceParams

PHI0_CASES = ("0", "half_pi", "pi_over_q")
MAX_DEN = 64


class OtsukiError(ValueError):
    pass


class GuaranteeError(RuntimeError):
    """Fewer zeros or bands than guaranteed for the rational p/q."""


@dataclass(frozen=True)
class OtsukiSpec:
    p: int
    q: int
    a: float

    @property
    def period(self) -> float:
        return self.q * math.pi

    @property
    def target(self) -> float:
        return 2.0 * self.p * math.pi / self.q

    @property
    def residual(self) -> float:
        return abs(surface.big_c(self.a) - self.target)


@dataclass
class Enumeration:
    spec: OtsukiSpec
    phi0: float
    case: str
    zeros: list[float]
    bands: list[AnnulusBand]
    guarantee: int
    zero_guarantee: int
    witnesses: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return len(self.bands) >= self.guarantee and len(self.zeros) >= self.zero_guarantee


def solve_parameter(p: int, q: int) -> OtsukiSpec:
    """Invert the strictly decreasing ``a -> C_a`` on [0, 0.4999]."""
    p, q = int(p), int(q)
    if p <= 0 or q <= 0:
        raise OtsukiError("p and q must be positive")
    if math.gcd(p, q) != 1:
        raise OtsukiError(f"p={p} and q={q} are not coprime")
    if not 0.5 < p / q < 1.0 / math.sqrt(2.0):
        raise OtsukiError(f"p/q = {p}/{q} outside (1/2, 1/sqrt(2))")
    target = 2.0 * p * math.pi / q
    a = numerics.invert_monotone(surface.big_c, target, (0.0, surface.A_MAX), tol=1e-13)
    return OtsukiSpec(p, q, a)


def detect_rational_period(a: float, max_den: int = MAX_DEN) -> tuple[int, int] | None:
    if max_den > 64:
        raise ValueError("max_den above 64 is not resolvable at the 1e-8 tolerance")
    return surface.rational_multiple(a, max_den)


def phi0_value(spec: OtsukiSpec, case: str) -> float:
    if case == "0":
        return 0.0
    if case == "half_pi":
        return 0.5 * math.pi
    if case == "pi_over_q":
        return math.pi / spec.q
    raise OtsukiError(f"unknown phi0 case {case!r}; expected one of {PHI0_CASES}")


def representative_zeros(spec: OtsukiSpec, phi0: float, a: float | None = None) -> list[float]:
    """Zeros of ``f`` on ``[-q pi/2, q pi/2)``: the left end counts, the right does not."""
    a = spec.a if a is None else a
    half = 0.5 * spec.period
    step = annuli.SCAN_STEP
    # pad the scan so zeros sitting on the ends are bracketed
    zeros = annuli.find_f_zeros((a, phi0), (-half - step, half + step), step)
    eps = 1e-9
    inside = [z for z in zeros if -half - eps <= z < half - eps]
    return [(-half if abs(z + half) <= eps else z) for z in inside]


def _pairs_symmetric(params: SurfaceParams, spec: OtsukiSpec, pos: list[float], prefix: str) -> list[AnnulusBand]:
    bands = []
    for i, s_i in enumerate(pos, start=1):
        bands.append(annuli.band_from_zero_pair(params, -s_i, s_i, label=f"{prefix}[-s{i},s{i}]"))
        bands.append(
            annuli.band_from_zero_pair(params, s_i, spec.period - s_i, label=f"{prefix}[s{i},q*pi-s{i}]")
        )
    return bands


def enumerate_annuli(spec: OtsukiSpec, case: str = "0") -> Enumeration:
    """Annuli of ``Sigma_a(phi0)`` inside the Otsuki torus, paired by the parity of ``q``.

    Raises
    ------
    GuaranteeError
        If the zero count on the representative interval falls below ``2p``
        or fewer bands than guaranteed are produced.
    """
    phi0 = phi0_value(spec, case)
    params = SurfaceParams(spec.a, phi0)
    zeros = representative_zeros(spec, phi0)
    half = 0.5 * spec.period
    witnesses: list[dict] = []
    if case == "0":
        pos = [z for z in zeros if 0.0 < z < half]
        bands = _pairs_symmetric(params, spec, pos, "")
        guarantee = 2 * spec.p
        if spec.q % 2 == 0:
            witnesses = rotation_witnesses(spec, pos)
    elif case == "half_pi":
        if spec.q % 2 == 0:
            raise OtsukiError("phi0 = pi/2 is the odd-q case")
        bands = [
            annuli.band_from_zero_pair(params, -half, 0.0, label="[-q*pi/2,0]"),
            annuli.band_from_zero_pair(params, 0.0, half, label="[0,q*pi/2]"),
        ]
        guarantee = 2
        witnesses = [{"kind": "reflection", "map": "x1 -> -x1", "pair": [0, 1],
                      "residual": mirror_residual(spec)}]
    elif case == "pi_over_q":
        if spec.q % 2 == 1:
            raise OtsukiError("phi0 = pi/q is the even-q case")
        bands, witnesses = _pi_over_q_bands(spec, params)
        guarantee = 2 * spec.p
    else:
        raise OtsukiError(f"unknown phi0 case {case!r}")
    result = Enumeration(spec, phi0, case, zeros, bands, guarantee, 2 * spec.p, witnesses)
    if not result.ok:
        raise GuaranteeError(
            f"p/q={spec.p}/{spec.q}, case {case}: {len(zeros)} zeros and {len(bands)} bands, "
            f"guarantee is {2 * spec.p} zeros and {guarantee} bands"
        )
    return result


def rotation_witnesses(spec: OtsukiSpec, pos: list[float]) -> list[dict]:
    """Pair ``[-s_i, s_i]`` with ``[s_{n+1-i}, q pi - s_{n+1-i}]`` via ``R(pi)``.

    The pairing uses ``s_{n+1-i} = q pi/2 - s_i``; its residual is reported.
    """
    n = len(pos)
    out = []
    half = 0.5 * spec.period
    for i in range(n):
        j = n - 1 - i
        out.append({
            "kind": "rotation",
            "angle": math.pi,
            "shift": half,
            "pair": [2 * i, 2 * j + 1],
            "zero_symmetry_residual": abs(pos[j] - (half - pos[i])),
        })
    return out


def _sample_grid(spec: OtsukiSpec, n: int = 100) -> np.ndarray:
    # deterministic, irregular offsets avoid special points
    k = np.arange(n)
    return spec.period * (((k * 0.6180339887498949) % 1.0) - 0.5)


def rotation_map_check(spec: OtsukiSpec, tol: float = 1e-9, n: int = 100) -> bool:
    """``R(pi) X_a(q pi/2 + s, theta) = X_a(s, theta)`` for even ``q``, ``phi0 = 0``."""
    return rotation_map_residual(spec, n) <= tol


def rotation_map_residual(spec: OtsukiSpec, n: int = 100) -> float:
    if spec.q % 2:
        raise OtsukiError("rotation map check needs even q")
    p = SurfaceParams(spec.a, 0.0)
    s = _sample_grid(spec, n)
    thetas = np.linspace(0.0, 2.0 * math.pi, 7)[:-1]
    a_cols = surface.curve_many(p, s)
    b_cols = surface.curve_many(p, s + 0.5 * spec.period)
    worst = 0.0
    for i in range(len(s)):
        base = np.array([a_cols["x"][i], a_cols["y"][i]])
        moved = surface.rotate(math.pi, [b_cols["x"][i], b_cols["y"][i]])
        worst = max(worst, float(np.max(np.abs(moved - base))))
        # rotation acts on x1x2 only; the (x3, x4) part must already agree
        dz = abs(b_cols["z"][i] - a_cols["z"][i])
        worst = max(worst, float(dz * np.max(np.abs(np.cos(thetas)))))
    return worst


def mirror_residual(spec: OtsukiSpec, n: int = 100) -> float:
    p = SurfaceParams(spec.a, 0.5 * math.pi)
    return _parity_residual(p, _sample_grid(spec, n))


def _parity_residual(p: SurfaceParams, s: np.ndarray) -> float:
    plus = surface.curve_many(p, s)
    minus = surface.curve_many(p, -s)
    return float(max(
        np.max(np.abs(minus["x"] + plus["x"])),
        np.max(np.abs(minus["y"] - plus["y"])),
        np.max(np.abs(minus["z"] - plus["z"])),
    ))


def mirror_map_check(spec: OtsukiSpec, tol: float = 1e-9, phi0: float | None = None, n: int = 100) -> bool:
    """``x`` odd, ``y`` and ``z`` even for odd ``q`` and ``phi0 = pi/2``.

    So ``X(-s, theta)`` is the reflection of ``X(s, theta)`` across ``x1 = 0``.
    """
    if spec.q % 2 == 0:
        raise OtsukiError("mirror map check needs odd q")
    phi0 = 0.5 * math.pi if phi0 is None else phi0
    return _parity_residual(SurfaceParams(spec.a, phi0), _sample_grid(spec, n)) <= tol


def modular_inverse(p: int, m: int) -> int:
    try:
        return pow(p, -1, m)
    except ValueError:
        raise OtsukiError(f"{p} has no inverse modulo {m}") from None


def set_equality_residual(spec: OtsukiSpec, n: int = 100) -> tuple[float, int]:
    """Residual of ``gamma_{-a}(0, s - n pi/2) = R(-(phi0 + n p pi/q)) gamma_a(phi0, s)``.

    ``phi0 = pi/q`` and ``n p = 1 (mod 2q)``; with that ``n`` the rotation
    is by ``-2 pi/q``, a symmetry of the closed curve, so both surfaces have
    the same image.
    """
    if spec.q % 2:
        raise OtsukiError("set equality check needs even q")
    n_inv = modular_inverse(spec.p, 2 * spec.q)
    phi0 = math.pi / spec.q
    s = _sample_grid(spec, n)
    lhs = surface.curve_many((-spec.a, 0.0), s - 0.5 * n_inv * math.pi)
    rhs = surface.curve_many((spec.a, phi0), s)
    beta = -(phi0 + n_inv * spec.p * math.pi / spec.q)
    c, sn = math.cos(beta), math.sin(beta)
    rx = c * rhs["x"] - sn * rhs["y"]
    ry = sn * rhs["x"] + c * rhs["y"]
    worst = max(
        np.max(np.abs(lhs["x"] - rx)),
        np.max(np.abs(lhs["y"] - ry)),
        np.max(np.abs(lhs["z"] - rhs["z"])),
    )
    return float(worst), n_inv


def set_equality_check(spec: OtsukiSpec, tol: float = 1e-9, n: int = 100) -> bool:
    return set_equality_residual(spec, n)[0] <= tol


def rotation_period_residual(spec: OtsukiSpec, phi0: float, n: int = 100) -> float:
    """Residual of ``gamma_a(phi0, s + pi) = R(2 p pi/q) gamma_a(phi0, s)``."""
    s = _sample_grid(spec, n)
    p = SurfaceParams(spec.a, phi0)
    now = surface.curve_many(p, s)
    later = surface.curve_many(p, s + math.pi)
    beta = spec.target
    c, sn = math.cos(beta), math.sin(beta)
    return float(max(
        np.max(np.abs(later["x"] - (c * now["x"] - sn * now["y"]))),
        np.max(np.abs(later["y"] - (sn * now["x"] + c * now["y"]))),
        np.max(np.abs(later["z"] - now["z"])),
    ))


def _pi_over_q_bands(spec: OtsukiSpec, params: SurfaceParams) -> tuple[list[AnnulusBand], list[dict]]:
    # Build the phi0 = 0 bands of Sigma_{-a}(0), then carry them over point
    # for point: gamma_{-a}(0, u) = gamma_a(pi/q, u + shift).
    n_inv = modular_inverse(spec.p, 2 * spec.q)
    m = (-modular_inverse(spec.p, spec.q)) % spec.q
    shift = (0.5 * n_inv + m) * math.pi
    shift = math.fmod(shift, spec.period)
    mirror = OtsukiSpec(spec.p, spec.q, -spec.a)
    half = 0.5 * spec.period
    pos = [z for z in representative_zeros(mirror, 0.0) if 0.0 < z < half]
    bands = []
    for i, u in enumerate(pos, start=1):
        for lo, hi, tag in ((-u, u, f"[-u{i},u{i}]"), (u, spec.period - u, f"[u{i},q*pi-u{i}]")):
            s_lo, s_hi = lo + shift, hi + shift
            # snap the shifted ends onto zeros of the phi0 = pi/q function
            s_lo, s_hi = _polish_zero(params, s_lo), _polish_zero(params, s_hi)
            bands.append(annuli.band_from_zero_pair(params, s_lo, s_hi, label=f"Sigma_-a(0){tag}+{shift:.6f}"))
    witnesses = rotation_witnesses(mirror, pos)
    residual, _ = set_equality_residual(spec)
    for w in witnesses:
        w["set_equality_residual"] = residual
        w["shift"] = shift
    return bands, witnesses


def _polish_zero(params: SurfaceParams, s: float, width: float = 1e-6) -> float:
    fs = lambda t: surface.f(params, t)
    if abs(fs(s)) <= numerics.F_TOL:
        return s
    b = numerics.make_bracket(fs, s - width, s + width)
    if not b.valid:
        return s
    return numerics.find_root(fs, b)
