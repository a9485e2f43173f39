"""One-dimensional numerical primitives.

Adaptive Gauss-Kronrod quadrature, tanh-sinh quadrature for integrands with
inverse-square-root endpoint blowup, bracketed root refinement, monotone
inversion and grid sign-change scanning.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

ABS_TOL = 1e-12
REL_TOL = 1e-12
F_TOL = 1e-12
X_TOL = 1e-13
MAX_EVALS = 1_000_000


class QuadratureError(RuntimeError):
    """Raised when a quadrature exhausts its evaluation budget.

    The best available estimate is kept on ``partial``.
    """

    def __init__(self, message: str, partial: "QuadResult"):
        super().__init__(message)
        self.partial = partial


class RootFindingError(RuntimeError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.hi > self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    @property
    def valid(self) -> bool:
        return self.f_lo * self.f_hi < 0 or self.f_lo == 0.0 or self.f_hi == 0.0


def _as_interval(iv) -> Interval:
    if isinstance(iv, Interval):
        return iv
    lo, hi = iv
    return Interval(float(lo), float(hi))


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes: +-xgk[1], +-xgk[3], +-xgk[5], 0.
for _i, _k in enumerate((1, 3, 5)):
    _GAUSS_W[_k] = _WG[_i]
    _GAUSS_W[14 - _k] = _WG[_i]
_GAUSS_W[7] = _WG[3]


def _gk15(f, lo: float, hi: float, vectorized: bool) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid + half * _NODES
    if vectorized:
        y = np.asarray(f(x), dtype=float)
    else:
        y = np.array([f(float(xi)) for xi in x], dtype=float)
    if not np.all(np.isfinite(y)):
        raise FloatingPointError(f"non-finite integrand value on [{lo}, {hi}]")
    kronrod = half * float(_KRONROD_W @ y)
    gauss = half * float(_GAUSS_W @ y)
    return kronrod, abs(kronrod - gauss)


def integrate(
    f: Callable,
    iv,
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
    *,
    vectorized: bool = False,
    max_evals: int = MAX_EVALS,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7, 15) quadrature.

    Parameters
    ----------
    f : callable
        Integrand. With ``vectorized=True`` it is called once per panel on a
        numpy array of 15 abscissae.
    iv : Interval or (lo, hi)
    abs_tol, rel_tol : float
        Stop once the summed panel error estimate is below
        ``max(abs_tol, rel_tol * |value|)``.

    Returns
    -------
    QuadResult
        ``error_estimate`` is the sum of ``|K15 - G7|`` over panels.

    Raises
    ------
    QuadratureError
        When ``max_evals`` integrand calls do not reach the tolerance.
    """
    iv = _as_interval(iv)
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    value, err = _gk15(f, iv.lo, iv.hi, vectorized)
    evals = 15
    heap = [(-err, iv.lo, iv.hi, value)]
    total, total_err = value, err
    while total_err > max(abs_tol, rel_tol * abs(total)):
        if evals + 30 > max_evals:
            raise QuadratureError(
                f"integrate: budget of {max_evals} evaluations exhausted "
                f"(estimate {total!r}, error {total_err:.3g})",
                QuadResult(total, total_err, evals),
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # panel at machine resolution; nothing left to split
            heapq.heappush(heap, (neg_err, lo, hi, val))
            break
        left, left_err = _gk15(f, lo, mid, vectorized)
        right, right_err = _gk15(f, mid, hi, vectorized)
        evals += 30
        total += left + right - val
        total_err += left_err + right_err + neg_err
        heapq.heappush(heap, (-left_err, lo, mid, left))
        heapq.heappush(heap, (-right_err, mid, hi, right))
    # resum to shed accumulated update rounding
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return QuadResult(total, total_err, evals)


_TS_TMAX = 4.5
_TS_MAX_LEVEL = 12


def integrate_singular_endpoints(
    f: Callable,
    iv,
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
    *,
    complement: bool = False,
    max_evals: int = MAX_EVALS,
) -> QuadResult:
    """Tanh-sinh quadrature for integrands singular at the endpoints.

    The abscissae cluster double-exponentially at both ends, which handles
    ``(x - lo)**-0.5`` and ``(hi - x)**-0.5`` type blowup.

    With ``complement=True`` the integrand is called as ``f(x, dlo, dhi)``
    where ``dlo = x - lo`` and ``dhi = hi - x`` are computed without
    cancellation. Use this when the singular factor is built from those
    distances; near an endpoint ``x`` itself rounds to the endpoint long
    before the tail of the integral is negligible.

    The error estimate is the change between successive step halvings.
    """
    iv = _as_interval(iv)
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    half = 0.5 * iv.width

    def node_sum(ts: np.ndarray) -> tuple[float, int]:
        u = 0.5 * math.pi * np.sinh(ts)
        cu = np.cosh(u)
        w = 0.5 * math.pi * np.cosh(ts) / cu**2
        # distance of the abscissa from +-1, free of cancellation
        gap = 1.0 / (np.exp(u) * cu)
        count = 0
        parts = []
        for sign in (1.0, -1.0):
            if sign < 0:
                keep = ts > 0
                g, ww = gap[keep], w[keep]
            else:
                g, ww = gap, w
            # sign=+1 -> nodes near hi, sign=-1 -> nodes near lo
            dnear = half * g
            dfar = iv.width - dnear
            if sign > 0:
                x, dlo, dhi = iv.hi - dnear, dfar, dnear
            else:
                x, dlo, dhi = iv.lo + dnear, dnear, dfar
            usable = dnear > 0
            if not complement:
                usable &= (x > iv.lo) & (x < iv.hi)
            x, dlo, dhi, ww = x[usable], dlo[usable], dhi[usable], ww[usable]
            if complement:
                y = np.array([f(float(a), float(b), float(c)) for a, b, c in zip(x, dlo, dhi)])
            else:
                y = np.array([f(float(a)) for a in x])
            if y.size and not np.all(np.isfinite(y)):
                raise FloatingPointError("non-finite integrand value in tanh-sinh sweep")
            count += y.size
            parts.append(ww * y)
        total = math.fsum(np.concatenate(parts)) if parts else 0.0
        return total, count

    # level 0: t = 0, +-1, +-2, ...; positive t covers both ends via the sign loop
    h = 1.0
    ts = np.arange(0.0, _TS_TMAX + 0.5 * h, h)
    raw, evals = node_sum(ts)
    estimate = half * h * raw
    err = math.inf
    for level in range(1, _TS_MAX_LEVEL + 1):
        h *= 0.5
        ts = np.arange(h, _TS_TMAX + 0.5 * h, 2 * h)
        new, count = node_sum(ts)
        evals += count
        raw += new
        refined = half * h * raw
        err = abs(refined - estimate)
        estimate = refined
        if level >= 3 and err <= max(abs_tol, rel_tol * abs(estimate)):
            return QuadResult(estimate, err, evals)
        if evals > max_evals:
            break
    raise QuadratureError(
        f"integrate_singular_endpoints: no convergence (estimate {estimate!r}, error {err:.3g})",
        QuadResult(estimate, err, evals),
    )


def make_bracket(f: Callable[[float], float], lo: float, hi: float) -> Bracket:
    return Bracket(lo, hi, f(lo), f(hi))


def find_root(
    f: Callable[[float], float],
    b: Bracket,
    x_tol: float = X_TOL,
    f_tol: float = F_TOL,
    *,
    max_evals: int = MAX_EVALS,
) -> float:
    """Refine a sign-change bracket to a root.

    Illinois-modified regula falsi; if three consecutive steps fail to halve
    the bracket a bisection step is forced. The returned point always lies in
    ``[b.lo, b.hi]``.
    """
    lo, hi, flo, fhi = b.lo, b.hi, b.f_lo, b.f_hi
    if not lo < hi:
        raise RootFindingError(f"degenerate bracket [{lo}, {hi}]")
    if flo == 0.0 or (abs(flo) <= f_tol and abs(flo) <= abs(fhi)):
        return lo
    if fhi == 0.0 or abs(fhi) <= f_tol:
        return hi
    if not flo * fhi < 0:
        raise RootFindingError(f"no sign change on [{lo}, {hi}]: f = {flo!r}, {fhi!r}")
    # weighted copies of the endpoint values for the Illinois modification
    wlo, whi = flo, fhi
    last = 0
    evals = 0
    checkpoint = hi - lo
    while hi - lo > x_tol:
        if evals >= max_evals:
            raise RootFindingError(f"find_root: budget exhausted on [{lo}, {hi}]")
        if evals % 3 == 2 and hi - lo > 0.5 * checkpoint:
            x = 0.5 * (lo + hi)
        else:
            x = (lo * whi - hi * wlo) / (whi - wlo)
            if not lo < x < hi:
                x = 0.5 * (lo + hi)
        if evals % 3 == 2:
            checkpoint = hi - lo
        fx = f(x)
        evals += 1
        if fx == 0.0 or abs(fx) <= f_tol:
            return x
        if (fx < 0) == (flo < 0):
            lo, flo, wlo = x, fx, fx
            if last == -1:
                whi *= 0.5
            last = -1
        else:
            hi, fhi, whi = x, fx, fx
            if last == 1:
                wlo *= 0.5
            last = 1
    return lo if abs(flo) <= abs(fhi) else hi


def scan_sign_changes(
    f: Callable,
    iv,
    step: float,
    *,
    vectorized: bool = False,
) -> list[Bracket]:
    """Brackets of the uniform grid on which ``f`` changes sign.

    A node where ``f`` is exactly zero yields the bracket to its right (the
    last node falls back to the bracket on its left), so each such zero is
    reported once.
    """
    iv = _as_interval(iv)
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(math.ceil(iv.width / step - 1e-9))
    xs = iv.lo + step * np.arange(n + 1, dtype=float)
    xs[-1] = iv.hi
    if vectorized:
        ys = np.asarray(f(xs), dtype=float)
    else:
        ys = np.array([f(float(x)) for x in xs])
    out: list[Bracket] = []
    for k in range(n):
        y0, y1 = ys[k], ys[k + 1]
        if y0 * y1 < 0 or y0 == 0.0 or (y1 == 0.0 and k + 1 == n):
            out.append(Bracket(float(xs[k]), float(xs[k + 1]), float(y0), float(y1)))
    return out


def invert_monotone(
    g: Callable[[float], float],
    target: float,
    iv,
    tol: float = F_TOL,
) -> float:
    """Solve ``g(x) = target`` for strictly monotone ``g`` on ``iv``."""
    iv = _as_interval(iv)
    g_lo, g_hi = g(iv.lo), g(iv.hi)
    low, high = min(g_lo, g_hi), max(g_lo, g_hi)
    if not low < target < high:
        raise ValueError(
            f"target {target!r} outside the attained range ({low!r}, {high!r}) on [{iv.lo}, {iv.hi}]"
        )
    bracket = Bracket(iv.lo, iv.hi, g_lo - target, g_hi - target)
    return find_root(lambda x: g(x) - target, bracket, x_tol=1e-15, f_tol=tol)
