"""SVG pictures of generating curves and the geodesic circles they meet.

Points of S^2 are projected orthographically onto the plane orthogonal to a
view direction ``d``; the far hemisphere ``<P, d> < 0`` is drawn faded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from fbma import annuli, otsuki, surface  # noqa: E402
from fbma.annuli import AnnulusBand  # noqa: E402

DEFAULT_VIEW = (0.3, -0.8, 0.52)
SAMPLES_PER_BAND = 512
HIDDEN_ALPHA = 0.3
FIGURE_IDS = (1, 2, 3, 4, 5)


def unit_view(direction=DEFAULT_VIEW) -> tuple[float, float, float]:
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,) or not np.all(np.isfinite(d)):
        raise ValueError(f"projection must be three finite numbers, got {direction!r}")
    n = np.linalg.norm(d)
    if n == 0.0:
        raise ValueError("projection direction must be nonzero")
    return tuple(float(v) for v in d / n)


@dataclass
class FigureSpec:
    params: object
    bands: list[AnnulusBand]
    projection: tuple[float, float, float] = field(default_factory=unit_view)
    size: int = 600
    title: str = ""

    def __post_init__(self):
        if abs(math.fsum(v * v for v in self.projection) - 1.0) > 1e-12:
            raise ValueError("projection must be a unit vector")
        if self.size < 16:
            raise ValueError("figure size must be at least 16 pixels")


def _basis(d) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = np.asarray(d, dtype=float)
    # screen "up" is the projection of e3 whenever possible
    up = np.array([0.0, 0.0, 1.0]) if abs(d[2]) < 0.99 else np.array([0.0, 1.0, 0.0])
    u = np.cross(up, d)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v, d


def _split_visible(pts: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Copies of ``pts`` with the hidden (resp. visible) samples set to NaN."""
    vis = pts @ d >= 0.0
    front, back = pts.copy(), pts.copy()
    # keep one neighbouring sample on each side so the two parts join up
    grow = vis | np.roll(vis, 1) | np.roll(vis, -1)
    grow_back = ~vis | np.roll(~vis, 1) | np.roll(~vis, -1)
    front[~grow] = np.nan
    back[~grow_back] = np.nan
    return front, back


def _draw(ax, pts: np.ndarray, basis, color: str, gid: str, lw: float) -> None:
    u, v, d = basis
    front, back = _split_visible(pts, d)
    for part, alpha, tag in ((back, HIDDEN_ALPHA, "hidden"), (front, 1.0, "visible")):
        if np.all(np.isnan(part[:, 0])):
            continue
        (line,) = ax.plot(part @ u, part @ v, color=color, alpha=alpha, lw=lw)
        line.set_gid(f"{gid}-{tag}")


def band_points(band: AnnulusBand, n: int = SAMPLES_PER_BAND) -> np.ndarray:
    s = np.linspace(band.s_lo, band.s_hi, n)
    cols = surface.curve_many(band.params, s)
    return np.column_stack([cols["x"], cols["y"], cols["z"]])


def circle_points(c: float, n: int = SAMPLES_PER_BAND) -> np.ndarray:
    """The circle ``x1 = c`` on S^2."""
    w = math.sqrt(max(0.0, 1.0 - c * c))
    t = np.linspace(0.0, 2.0 * math.pi, n)
    return np.column_stack([np.full_like(t, c), w * np.cos(t), w * np.sin(t)])


def distinct_spheres(bands: list[AnnulusBand], tol: float = 1e-7) -> list[float]:
    out: list[float] = []
    for b in bands:
        if all(abs(b.sphere_x1 - c) > tol for c in out):
            out.append(b.sphere_x1)
    return out


def render(spec: FigureSpec, out_path, fmt: str = "svg") -> None:
    """Write ``spec`` as an SVG file; ``OSError`` if the path is unwritable."""
    basis = _basis(spec.projection)
    dpi = 100
    with plt.rc_context({"svg.hashsalt": "fbma"}):
        fig, ax = plt.subplots(figsize=(spec.size / dpi, spec.size / dpi), dpi=dpi)
        try:
            _paint(ax, spec, basis)
            fig.savefig(out_path, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
        finally:
            plt.close(fig)


def _paint(ax, spec: FigureSpec, basis) -> None:
    t = np.linspace(0.0, 2.0 * math.pi, 361)
    (outline,) = ax.plot(np.cos(t), np.sin(t), color="0.5", lw=0.8)
    outline.set_gid("outline")
    for k, c in enumerate(distinct_spheres(spec.bands)):
        _draw(ax, circle_points(c), basis, "black", f"sphere-{k}", 1.0)
    for k, band in enumerate(spec.bands):
        _draw(ax, band_points(band), basis, "red", f"band-{k}", 1.4)
    ax.set_aspect("equal")
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.axis("off")
    if spec.title:
        ax.set_title(spec.title, fontsize=9)


def figure_spec(figure_id: int, projection=DEFAULT_VIEW) -> FigureSpec:
    """The five standard pictures.

    1. ``a = 0.29``: the first four nested symmetric bands.
    2. ``(p, q) = (2, 3)``, ``phi0 = 0``.
    3. ``(2, 3)``, ``phi0 = pi/2``: two bands on the great circle ``x1 = 0``.
    4. ``(5, 8)``, ``phi0 = 0``.
    5. ``(5, 8)``, ``phi0 = pi/8``.
    """
    view = unit_view(projection)
    if figure_id == 1:
        bands = [annuli.symmetric_band(0.29, i, check_embedding=False) for i in range(1, 5)]
        return FigureSpec(bands[0].params, bands, view, title="a = 0.29")
    cases = {2: ((2, 3), "0"), 3: ((2, 3), "half_pi"), 4: ((5, 8), "0"), 5: ((5, 8), "pi_over_q")}
    if figure_id not in cases:
        raise ValueError(f"figure id must be one of {FIGURE_IDS}, got {figure_id!r}")
    (p, q), case = cases[figure_id]
    spec = otsuki.solve_parameter(p, q)
    enum = otsuki.enumerate_annuli(spec, case)
    title = f"p/q = {p}/{q}, phi0 = {enum.phi0:.6g}"
    return FigureSpec(spec, enum.bands, view, title=title)
