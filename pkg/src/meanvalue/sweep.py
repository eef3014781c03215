"""Sweeps of the decay-threshold function ``g(d, p)`` and its level curve.

``g(d, p) = sqrt(1 + 2d) |u0|_{p+1}^{p+1} ||u0_x||^2 / (||u0||^2 |u0_x|_4^2)``
with ``|v|_4^2 = (int v^4)^(1/2)``. A parameter pair is flagged as decaying
when ``g < 4/pi^2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateFieldError, PositivityError
from .foundation import (
    GridField,
    GridSpec,
    InitialData,
    gradient,
    integrate_nodal,
    sample_initial_data,
)

LEVEL = 4.0 / math.pi**2
MIN_SAMPLES = 11
JOIN_TOL = 1e-9


def _base_norms(u0: GridField) -> tuple[np.ndarray, float, float, float]:
    v = u0.values
    if v.min() < -1e-12:
        raise PositivityError(f"sweep needs nonnegative data (min {v.min()!r})")
    v = np.maximum(v, 0.0)
    ux = gradient(u0.with_values(v)).values
    l2 = integrate_nodal(v * v, u0.grid)
    g2 = integrate_nodal(ux * ux, u0.grid)
    g4 = math.sqrt(integrate_nodal(ux**4, u0.grid))
    if l2 == 0 or g2 == 0:
        raise DegenerateFieldError("g needs ||u0|| > 0 and ||u0_x|| > 0")
    return v, l2, g2, g4


def _g(v, grid, l2, g2, g4, d, p):
    return math.sqrt(1.0 + 2.0 * d) * integrate_nodal(v ** (p + 1.0), grid) * g2 / (l2 * g4)


def compute_g(u0: GridField, d: float, p: float) -> float:
    if d < 0 or p < 1:
        raise ValueError(f"need d >= 0 and p >= 1, got d={d}, p={p}")
    v, l2, g2, g4 = _base_norms(u0)
    return _g(v, u0.grid, l2, g2, g4, d, p)


@dataclass(frozen=True)
class SweepGrid:
    d: np.ndarray
    p: np.ndarray
    values: np.ndarray  # values[i, j] = g(d[i], p[j])

    @property
    def decays(self) -> np.ndarray:
        return self.values < LEVEL


def run_sweep(u0: InitialData, grid: GridSpec, d_samples: int = 41, p_samples: int = 41,
              d_max: float = 2.0, p_max: float = 3.0) -> SweepGrid:
    """Fill ``g`` on ``d_samples`` x ``p_samples`` points of ``[0, d_max] x [1, p_max]``."""
    if d_samples < MIN_SAMPLES or p_samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples per axis, got {d_samples}x{p_samples}")
    if not (d_max > 0 and p_max > 1):
        raise ValueError(f"need d_max > 0 and p_max > 1, got {d_max}, {p_max}")
    field_ = sample_initial_data(u0, grid, "mixed")
    v, l2, g2, g4 = _base_norms(field_)
    d = np.linspace(0.0, d_max, d_samples)
    p = np.linspace(1.0, p_max, p_samples)
    # only the sqrt(1+2d) prefactor depends on d
    lp = np.array([integrate_nodal(v ** (pj + 1.0), grid) for pj in p])
    values = np.sqrt(1.0 + 2.0 * d)[:, None] * (lp * g2 / (l2 * g4))[None, :]
    bad = ~np.isfinite(values) | (values <= 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DegenerateFieldError(f"g not finite/positive at d={d[i]!r}, p={p[j]!r}")
    return SweepGrid(d, p, values)


# --------------------------------------------------------------------------
# Marching squares
# --------------------------------------------------------------------------


@dataclass
class ContourResult:
    level: float
    segments: list = field(default_factory=list)  # polylines, each an (k, 2) array of (d, p)
    cells_decaying: int = 0


def _edge_point(x0, y0, v0, x1, y1, v1, level):
    t = (level - v0) / (v1 - v0)
    return (x0 + t * (x1 - x0), y0 + t * (y1 - y0))


def _cell_segments(xs, ys, vals, level):
    """Segments in one cell. Corners ordered a=(0,0), b=(1,0), c=(1,1), e=(0,1)."""
    (x0, x1), (y0, y1) = xs, ys
    va, vb, vc, ve = vals
    above = [v >= level for v in vals]
    edges = {}
    # each edge is interpolated from its lower-index corner so shared edges agree bitwise
    if above[0] != above[1]:
        edges["bottom"] = _edge_point(x0, y0, va, x1, y0, vb, level)
    if above[1] != above[2]:
        edges["right"] = _edge_point(x1, y0, vb, x1, y1, vc, level)
    if above[3] != above[2]:
        edges["top"] = _edge_point(x0, y1, ve, x1, y1, vc, level)
    if above[0] != above[3]:
        edges["left"] = _edge_point(x0, y0, va, x0, y1, ve, level)
    if len(edges) == 2:
        a, b = edges.values()
        return [(a, b)]
    if len(edges) == 4:
        centre_above = 0.25 * (va + vb + vc + ve) >= level
        if centre_above == above[0]:
            return [(edges["bottom"], edges["right"]), (edges["left"], edges["top"])]
        return [(edges["bottom"], edges["left"]), (edges["right"], edges["top"])]
    return []


def _close(p, q):
    return abs(p[0] - q[0]) <= JOIN_TOL and abs(p[1] - q[1]) <= JOIN_TOL


def _join(segments):
    polylines = []
    pool = [list(s) for s in segments]
    while pool:
        line = pool.pop(0)
        grown = True
        while grown:
            grown = False
            for k, (a, b) in enumerate(pool):
                if _close(line[-1], a):
                    line.append(b)
                elif _close(line[-1], b):
                    line.append(a)
                elif _close(line[0], b):
                    line.insert(0, a)
                elif _close(line[0], a):
                    line.insert(0, b)
                else:
                    continue
                pool.pop(k)
                grown = True
                break
        polylines.append(np.array(line))
    return polylines


def extract_contour(sweep: SweepGrid, level: float = LEVEL) -> ContourResult:
    """Level curve of ``sweep.values`` as joined polylines in ``(d, p)``."""
    V, d, p = sweep.values, sweep.d, sweep.p
    segs = []
    for i in range(d.size - 1):
        for j in range(p.size - 1):
            vals = (V[i, j], V[i + 1, j], V[i + 1, j + 1], V[i, j + 1])
            segs.extend(_cell_segments((d[i], d[i + 1]), (p[j], p[j + 1]), vals, level))
    return ContourResult(level, _join(segs), int(np.count_nonzero(V < level)))


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

# viridis anchor colours at 0, 1/8, ..., 1; interpolated linearly to 256 steps
_ANCHORS = np.array([
    (68, 1, 84), (71, 44, 122), (59, 81, 139), (44, 113, 142), (33, 144, 141),
    (39, 173, 129), (92, 200, 99), (170, 220, 50), (253, 231, 37),
], dtype=float)
_anchor_x = np.linspace(0.0, 1.0, len(_ANCHORS))
_steps = np.linspace(0.0, 1.0, 256)
COLORMAP = np.stack([np.interp(_steps, _anchor_x, _ANCHORS[:, k]) for k in range(3)], axis=1).round().astype(int)


def _colour(t: float) -> str:
    r, g, b = COLORMAP[min(255, max(0, int(t * 255 + 0.5)))]
    return f"#{r:02x}{g:02x}{b:02x}"


def write_csv(sweep: SweepGrid, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "p", "g", "decays"])
        for i, di in enumerate(sweep.d):
            for j, pj in enumerate(sweep.p):
                g = sweep.values[i, j]
                w.writerow([format(di, ".17g"), format(pj, ".17g"), format(g, ".17g"), int(g < LEVEL)])


def read_csv(path) -> SweepGrid:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    d = np.unique([float(r["d"]) for r in rows])
    p = np.unique([float(r["p"]) for r in rows])
    values = np.full((d.size, p.size), np.nan)
    for r in rows:
        values[np.searchsorted(d, float(r["d"])), np.searchsorted(p, float(r["p"]))] = float(r["g"])
    return SweepGrid(d, p, values)


def render_svg(sweep: SweepGrid, contour: ContourResult, width: int = 480, height: int = 480) -> str:
    ml, mr, mt, mb = 60, 150, 20, 50
    W, H = width + ml + mr, height + mt + mb
    d0, d1 = sweep.d[0], sweep.d[-1]
    p0, p1 = sweep.p[0], sweep.p[-1]

    def X(dv):
        return ml + (dv - d0) / (d1 - d0) * width

    def Y(pv):
        return mt + (p1 - pv) / (p1 - p0) * height

    V = sweep.values
    vmin, vmax = float(V.min()), float(V.max())
    span = vmax - vmin if vmax > vmin else 1.0
    # cell boundaries halfway between samples
    de = np.concatenate([[d0], 0.5 * (sweep.d[1:] + sweep.d[:-1]), [d1]])
    pe = np.concatenate([[p0], 0.5 * (sweep.p[1:] + sweep.p[:-1]), [p1]])
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           '<rect width="100%" height="100%" fill="white"/>', '<g id="colormap" shape-rendering="crispEdges">']
    for i in range(sweep.d.size):
        for j in range(sweep.p.size):
            x, y = X(de[i]), Y(pe[j + 1])
            w, h = X(de[i + 1]) - x, Y(pe[j]) - y
            out.append(f'<rect x="{x:.3f}" y="{y:.3f}" width="{w:.3f}" height="{h:.3f}" '
                       f'fill="{_colour((V[i, j] - vmin) / span)}"/>')
    out.append("</g>")
    out.append('<g id="contour" fill="none" stroke="red" stroke-width="2">')
    for line in contour.segments:
        pts = " ".join(f"{X(a):.3f},{Y(b):.3f}" for a, b in line)
        out.append(f'<polyline points="{pts}"/>')
    out.append("</g>")
    # axes
    out.append(f'<rect x="{ml}" y="{mt}" width="{width}" height="{height}" fill="none" stroke="black"/>')
    for k in range(5):
        dv = d0 + k * (d1 - d0) / 4
        pv = p0 + k * (p1 - p0) / 4
        out.append(f'<text x="{X(dv):.3f}" y="{mt + height + 18}" font-size="12" text-anchor="middle">{dv:g}</text>')
        out.append(f'<text x="{ml - 8}" y="{Y(pv) + 4:.3f}" font-size="12" text-anchor="end">{pv:g}</text>')
    out.append(f'<text x="{ml + width / 2}" y="{H - 10}" font-size="14" text-anchor="middle">d</text>')
    out.append(f'<text x="{ml - 40}" y="{mt + height / 2}" font-size="14" text-anchor="middle">p</text>')
    # legend
    lx = ml + width + 20
    out.append('<g id="legend">')
    for k in range(64):
        out.append(f'<rect x="{lx}" y="{mt + height - (k + 1) * height / 64:.3f}" width="16" '
                   f'height="{height / 64 + 0.5:.3f}" fill="{_colour(k / 63)}"/>')
    out.append(f'<text x="{lx + 22}" y="{mt + 10}" font-size="11">g={vmax:.4g}</text>')
    out.append(f'<text x="{lx + 22}" y="{mt + height}" font-size="11">g={vmin:.4g}</text>')
    out.append(f'<line x1="{lx}" y1="{mt + height / 2}" x2="{lx + 16}" y2="{mt + height / 2}" stroke="red" stroke-width="2"/>')
    out.append(f'<text x="{lx + 22}" y="{mt + height / 2 + 4}" font-size="11">level {contour.level:.6f}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_outputs(sweep: SweepGrid, contour: ContourResult, csv_path=None, svg_path=None) -> list:
    written = []
    for path, writer in ((csv_path, lambda p: write_csv(sweep, p)),
                         (svg_path, lambda p: Path(p).write_text(render_svg(sweep, contour)))):
        if path is None:
            continue
        try:
            writer(path)
        except OSError as exc:
            raise OSError(f"{path}: {exc.strerror or exc}") from exc
        written.append(Path(path))
    return written
