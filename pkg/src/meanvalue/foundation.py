"""Shared building blocks: domains, grids, potentials, initial data, quadrature
and norms on uniform 1D grids, and a bisection root finder.

All quadrature is the composite trapezoid rule on the grid nodes, so that the
norms agree with the node-based finite difference / finite volume schemes in
:mod:`meanvalue.solvers`.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .errors import BracketError, CoverageError, DomainError

#: Upper guard for the singular potential ``-(1 - s)^(-p)``.
SINGULAR_GUARD = 1e-12

#: Tolerated undershoot below a closed lower domain bound (rounding noise).
_DOMAIN_SLACK = 1e-12

BC_KINDS = ("dirichlet", "mixed", "weighted_mixed")


class ExtrapolationWarning(UserWarning):
    """A tabulated potential was evaluated outside its data range."""


# --------------------------------------------------------------------------
# Domain and grid
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Domain1D:
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ValueError(f"need finite a < b, got a={self.a}, b={self.b}")

    @property
    def measure(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with ``n`` cells (``n + 1`` nodes) on a domain."""

    domain: Domain1D
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"grid needs an integer n >= 8, got {self.n}")

    @cached_property
    def nodes(self) -> np.ndarray:
        x = self.domain.a + self.h * np.arange(self.n + 1)
        x[-1] = self.domain.b
        x.setflags(write=False)
        return x

    @property
    def h(self) -> float:
        return self.domain.measure / self.n

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights; ``weights @ v`` integrates nodal values ``v``."""
        w = np.full(self.n + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        w.setflags(write=False)
        return w

    @cached_property
    def faces(self) -> np.ndarray:
        """Cell midpoints x_{i+1/2}."""
        x = self.nodes
        f = 0.5 * (x[1:] + x[:-1])
        f.setflags(write=False)
        return f


def unit_grid(n: int) -> GridSpec:
    return GridSpec(Domain1D(0.0, 1.0), n)


@dataclass(frozen=True)
class GridField:
    """Nodal values of a function on a grid. Values are stored read-only."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def interp(self, x):
        """Evaluate the piecewise-linear interpolant at ``x``."""
        return np.interp(x, self.grid.nodes, self.values)

    def with_values(self, values) -> "GridField":
        return GridField(self.grid, values)


# --------------------------------------------------------------------------
# Potentials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """A continuous nonlinearity ``f`` entering the reaction term ``f(u) u``.

    Build instances with the class constructors rather than directly.
    ``params`` holds the kind-specific data (``mu``, ``p``, polynomial
    coefficients in ascending order, or the table as ``(s_values, f_values)``).
    """

    kind: str
    params: tuple = ()
    valid_domain: tuple = (-math.inf, math.inf)

    @classmethod
    def chafee_infante(cls, mu: float) -> "Potential":
        """``f(s) = s^2 - mu``."""
        return cls("chafee_infante", (float(mu),))

    @classmethod
    def piecewise_f2(cls) -> "Potential":
        """``1 - s`` on ``[0, 3)`` and ``(1 - s)/(s - 2)`` on ``[3, inf)``."""
        return cls("piecewise_f2", (), (0.0, math.inf))

    @classmethod
    def singular_f3(cls, p: float) -> "Potential":
        """``f(s) = -(1 - s)^(-p)`` on ``[0, 1)``, ``0 < p < 1``."""
        if not 0.0 < p < 1.0:
            raise ValueError(f"singular potential needs 0 < p < 1, got {p}")
        return cls("singular_f3", (float(p),), (0.0, 1.0 - SINGULAR_GUARD))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "Potential":
        """``f(s) = sum_k coeffs[k] s^k``."""
        c = tuple(float(v) for v in coeffs)
        if not c:
            raise ValueError("polynomial needs at least one coefficient")
        return cls("polynomial", c)

    @classmethod
    def constant(cls, c: float) -> "Potential":
        return cls.polynomial([c])

    @classmethod
    def tabulated(cls, points: Iterable[tuple[float, float]]) -> "Potential":
        """Piecewise-linear through ``(s, f(s))`` pairs; flat outside the table."""
        pts = [(float(s), float(v)) for s, v in points]
        if len(pts) < 2:
            raise ValueError("tabulated potential needs at least two points")
        s = tuple(p[0] for p in pts)
        v = tuple(p[1] for p in pts)
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("tabulated s values must be strictly increasing")
        return cls("tabulated", (s, v))

    @classmethod
    def from_csv(cls, path) -> "Potential":
        return cls.tabulated(read_two_column_csv(path, key="s"))

    def __call__(self, s):
        return potential_eval(self, s)

    def extrapolates(self, s) -> np.ndarray:
        """Mask of points where a tabulated potential is clamped."""
        s = np.asarray(s, dtype=float)
        if self.kind != "tabulated":
            return np.zeros(s.shape, dtype=bool)
        table = self.params[0]
        return (s < table[0]) | (s > table[-1])

    def describe(self) -> str:
        if self.kind == "chafee_infante":
            return f"s^2 - {self.params[0]:g}"
        if self.kind == "piecewise_f2":
            return "f2 (piecewise)"
        if self.kind == "singular_f3":
            return f"-(1-s)^(-{self.params[0]:g})"
        if self.kind == "polynomial":
            return "poly" + str(list(self.params))
        return f"tabulated[{len(self.params[0])} pts]"


def _check_domain(f: Potential, s: np.ndarray) -> np.ndarray:
    lo, hi = f.valid_domain
    if s.size == 0:
        return s
    if np.any(~np.isfinite(s)):
        raise DomainError(f"non-finite argument for potential {f.kind}")
    if np.any(s < lo - _DOMAIN_SLACK) or np.any(s > hi):
        bad = s[(s < lo - _DOMAIN_SLACK) | (s > hi)].flat[0]
        raise DomainError(f"s={bad!r} outside valid domain [{lo}, {hi}] of {f.kind}")
    return np.maximum(s, lo) if math.isfinite(lo) else s


def potential_eval(f: Potential, s):
    """Evaluate ``f(s)`` (scalar or array)."""
    scalar = np.ndim(s) == 0
    s = _check_domain(f, np.asarray(s, dtype=float))
    if f.kind == "chafee_infante":
        out = s * s - f.params[0]
    elif f.kind == "piecewise_f2":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(s < 3.0, 1.0 - s, (1.0 - s) / (s - 2.0))
    elif f.kind == "singular_f3":
        out = -np.power(1.0 - s, -f.params[0])
    elif f.kind == "polynomial":
        out = np.polynomial.polynomial.polyval(s, np.asarray(f.params))
        out = np.broadcast_to(out, s.shape).astype(float)
    elif f.kind == "tabulated":
        table_s, table_v = f.params
        if np.any(f.extrapolates(s)):
            warnings.warn(
                f"tabulated potential clamped outside [{table_s[0]}, {table_s[-1]}]",
                ExtrapolationWarning,
                stacklevel=2,
            )
        out = np.interp(s, table_s, table_v)
    else:
        raise ValueError(f"unknown potential kind {f.kind!r}")
    return float(out) if scalar else out


def potential_avg(f: Potential, s: float) -> float:
    """Running average ``(1/s) * integral_0^s f``, for ``s > 0``."""
    s = float(s)
    if not s > 0.0:
        raise DomainError(f"average needs s > 0, got {s}")
    if f.kind == "chafee_infante":
        return s * s / 3.0 - f.params[0]
    if f.kind == "singular_f3":
        p = f.params[0]
        if s > 1.0:
            raise DomainError(f"singular potential average needs s <= 1, got {s}")
        if s == 1.0:
            return 1.0 / (p - 1.0)
        # ((1-s)^(1-p) - 1) / ((1-p) s), written to avoid cancellation at small s
        return math.expm1((1.0 - p) * math.log1p(-s)) / ((1.0 - p) * s)
    if f.kind == "polynomial":
        c = np.asarray(f.params)
        k = np.arange(c.size)
        return float(np.sum(c * s**k / (k + 1)))

    lo, hi = f.valid_domain
    if lo > 0.0 or s > hi:
        raise DomainError(f"(0, {s}) leaves the valid domain [{lo}, {hi}] of {f.kind}")
    if f.kind == "tabulated":
        table_s = np.asarray(f.params[0])
        knots = np.concatenate(([0.0], table_s[(table_s > 0.0) & (table_s < s)], [s]))
        # exact for a piecewise-linear integrand with these breakpoints
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            vals = potential_eval(f, knots)
        return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(knots)) / s)
    points = [3.0] if f.kind == "piecewise_f2" and s > 3.0 else None
    total, _ = integrate.quad(
        lambda t: potential_eval(f, t), 0.0, s, points=points, epsabs=1e-13, epsrel=1e-12, limit=200
    )
    return total / s


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12):
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol * max(1.0, abs(a), abs(b)):
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - _INV_PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INV_PHI * (b - a)
            gd = g(d)
    return (c, gc) if gc <= gd else (d, gd)


def potential_inf(f: Potential, interval: tuple[float, float], samples: int = 512) -> float:
    """Numerical lower estimate of ``inf f`` over a closed interval.

    Uniform sampling followed by golden-section refinement around the best
    sample. This is an estimate, not a certified bound.
    """
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if samples < 64:
        raise ValueError(f"need at least 64 samples, got {samples}")
    s = np.linspace(lo, hi, samples)
    v = potential_eval(f, s)
    i = int(np.argmin(v))
    best = float(v[i])
    a, b = s[max(i - 1, 0)], s[min(i + 1, samples - 1)]
    _, refined = _golden_section(lambda t: potential_eval(f, t), a, b)
    return min(best, float(refined))


# --------------------------------------------------------------------------
# Initial data
# --------------------------------------------------------------------------

_PRESETS = {
    "x_sin_pi_x": (0, lambda x: x * np.sin(np.pi * x)),
    "exp_bump": (0, lambda x: np.exp(1.0 - x * x) - 1.0),
    "amp_sin": (1, lambda x, A: A * np.sin(np.pi * x)),
    "amp_ramp": (1, lambda x, A: A * (1.0 - x)),
}


@dataclass(frozen=True)
class InitialData:
    kind: str
    name: str = ""
    params: tuple = ()

    @classmethod
    def preset(cls, name: str, A: float | None = None) -> "InitialData":
        if name not in _PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
        nargs = _PRESETS[name][0]
        if nargs and A is None:
            raise ValueError(f"preset {name!r} needs an amplitude A")
        if not nargs and A is not None:
            raise ValueError(f"preset {name!r} takes no amplitude")
        return cls("preset", name, (float(A),) if nargs else ())

    @classmethod
    def sampled(cls, points: Iterable[tuple[float, float]]) -> "InitialData":
        pts = tuple((float(x), float(v)) for x, v in points)
        if len(pts) < 2:
            raise ValueError("sampled data needs at least two points")
        if any(q[0] <= p[0] for p, q in zip(pts, pts[1:])):
            raise ValueError("sampled x values must be strictly increasing")
        return cls("sampled", "", pts)

    @classmethod
    def from_csv(cls, path) -> "InitialData":
        return cls.sampled(read_two_column_csv(path, key="x"))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "preset":
            return _PRESETS[self.name][1](x, *self.params)
        xs = np.array([p[0] for p in self.params])
        vs = np.array([p[1] for p in self.params])
        return np.interp(x, xs, vs)


def sample_initial_data(u0: InitialData, grid: GridSpec, bc: str | None = "dirichlet") -> GridField:
    """Nodal samples of ``u0``; Dirichlet nodes of ``bc`` are set to zero exactly."""
    x = grid.nodes
    if u0.kind == "sampled":
        xs = u0.params[0][0], u0.params[-1][0]
        tol = 1e-12 * max(1.0, abs(grid.domain.a), abs(grid.domain.b))
        if xs[0] > grid.domain.a + tol or xs[1] < grid.domain.b - tol:
            raise CoverageError(
                f"sampled data spans [{xs[0]}, {xs[1]}], grid needs [{grid.domain.a}, {grid.domain.b}]"
            )
    v = np.array(u0.evaluate(x), dtype=float)
    if bc is not None:
        if bc not in BC_KINDS:
            raise ValueError(f"unknown boundary condition {bc!r}")
        if bc == "dirichlet":
            v[0] = 0.0
        v[-1] = 0.0
    return GridField(grid, v)


def read_two_column_csv(path, key: str = "x") -> list[tuple[float, float]]:
    """Read a ``<key>,value`` CSV with a header row into a list of pairs."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header = [h.strip() for h in rows[0]]
    if header != [key, "value"]:
        raise ValueError(f"{path}: expected header '{key},value', got {','.join(header)!r}")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns")
        try:
            out.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if any(b[0] <= a[0] for a, b in zip(out, out[1:])):
        raise ValueError(f"{path}: first column must be strictly increasing")
    return out


# --------------------------------------------------------------------------
# Spectral data and problem description
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralInfo:
    """First eigenvalue of ``-d^2/dx^2`` for the active boundary conditions."""

    bc_kind: str
    domain: Domain1D = field(default_factory=Domain1D)
    override: float | None = None

    def __post_init__(self):
        if self.bc_kind not in BC_KINDS:
            raise ValueError(f"unknown boundary condition {self.bc_kind!r}")
        if self.override is not None and not self.override > 0:
            raise ValueError("lambda1 override must be positive")

    @property
    def lambda1(self) -> float:
        if self.override is not None:
            return float(self.override)
        L = self.domain.measure
        if self.bc_kind == "dirichlet":
            return math.pi**2 / L**2
        # u(b) = 0 with a (weighted) Neumann end at a
        return math.pi**2 / (4.0 * L**2)


@dataclass(frozen=True)
class ProblemSpec:
    """A solvable instance.

    With ``degenerate=(d, p)`` the equation is ``u_t = (x^d u_x)_x + u^p`` on
    ``(0, b)`` and ``potential`` is ignored; otherwise it is
    ``u_t - nu u_xx + f(u) u = 0``.
    """

    domain: Domain1D
    nu: float
    potential: Potential | None
    initial: InitialData
    bc: str = "dirichlet"
    degenerate: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.bc not in BC_KINDS:
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.degenerate is not None:
            d, p = self.degenerate
            if not d > 0 or not p > 1:
                raise ValueError(f"degenerate problem needs d > 0 and p > 1, got d={d}, p={p}")
            if self.domain.a != 0.0:
                raise ValueError("degenerate problem is posed on (0, b)")
            object.__setattr__(self, "degenerate", (float(d), float(p)))
        elif self.potential is None:
            raise ValueError("a non-degenerate problem needs a potential")
        if self.bc == "weighted_mixed" and self.degenerate is None:
            raise ValueError("weighted_mixed boundary condition needs degenerate parameters")

    @property
    def is_degenerate(self) -> bool:
        return self.degenerate is not None


# --------------------------------------------------------------------------
# Quadrature and norms
# --------------------------------------------------------------------------


def _finite(u: GridField) -> np.ndarray:
    v = u.values
    if not np.all(np.isfinite(v)):
        raise ValueError("field contains non-finite values")
    return v


def integrate_nodal(values, grid: GridSpec) -> float:
    """Composite trapezoid integral of nodal values over the grid."""
    return float(grid.weights @ np.asarray(values, dtype=float))


def l2_norm(u: GridField) -> float:
    v = _finite(u)
    return math.sqrt(integrate_nodal(v * v, u.grid))


def lp_power(u: GridField, p: float) -> float:
    """``|u|_p^p``."""
    v = np.abs(_finite(u))
    return integrate_nodal(v**p, u.grid)


def lp_norm(u: GridField, p: float) -> float:
    return lp_power(u, p) ** (1.0 / p)


def gradient(u: GridField) -> GridField:
    """Nodal ``u_x``: central differences inside, second-order one-sided at the ends."""
    return u.with_values(np.gradient(_finite(u), u.grid.h, edge_order=2))


def h1_seminorm(u: GridField) -> float:
    return l2_norm(gradient(u))


def weighted_square(v: GridField, d: float) -> float:
    """``<x^d, v^2>``."""
    vals = _finite(v)
    x = v.grid.nodes
    if d != 0 and x[0] < 0:
        raise DomainError("weight x^d needs a nonnegative domain")
    return integrate_nodal(np.power(x, d) * vals * vals, v.grid)


def face_dirichlet_form(u: GridField, d: float = 0.0) -> float:
    """``sum_faces |x_f|^d ((u_{i+1} - u_i)/h)^2 h``.

    This is the discrete Dirichlet form of the solvers' operators: for fields
    obeying the boundary conditions, ``-<L u, u>`` in the trapezoid inner
    product equals this value exactly.
    """
    v = _finite(u)
    h = u.grid.h
    du = np.diff(v) / h
    w = np.abs(u.grid.faces) ** d if d else 1.0
    return float(np.sum(w * du * du) * h)


def field_norms(u: GridField, orders: Iterable = ("l2", "h1_semi")) -> dict:
    """Report of requested norms of a field.

    ``orders`` entries: ``"l2"``, ``"h1_semi"`` (central-difference gradient),
    ``"h1_face"`` (face-difference gradient), ``"sup"``, ``("lp", p)`` for
    ``|u|_p``, ``("weighted", d)`` for ``<x^d, u^2>``. Keys of the result are
    the entries themselves.
    """
    out = {}
    for key in orders:
        if key == "l2":
            out[key] = l2_norm(u)
        elif key == "h1_semi":
            out[key] = h1_seminorm(u)
        elif key == "h1_face":
            out[key] = math.sqrt(face_dirichlet_form(u))
        elif key == "sup":
            out[key] = float(np.max(np.abs(_finite(u))))
        elif isinstance(key, tuple) and key[0] == "lp":
            out[key] = lp_norm(u, key[1])
        elif isinstance(key, tuple) and key[0] == "weighted":
            out[key] = weighted_square(u, key[1])
        else:
            raise ValueError(f"unknown norm request {key!r}")
    return out


# --------------------------------------------------------------------------
# Root finding
# --------------------------------------------------------------------------


def bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
                ftol: float = 0.0, max_iter: int = 200) -> float:
    """Bisection for a sign change of ``g`` on ``[lo, hi]``.

    Stops when the bracket is narrower than ``tol`` or ``|g| <= ftol`` at the
    midpoint; returns the midpoint (or an endpoint that is an exact root).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, b = float(lo), float(hi)
    ga, gb = g(a), g(b)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if ga * gb > 0:
        raise BracketError(f"no sign change on [{a}, {b}]: g(lo)={ga}, g(hi)={gb}")
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm == 0.0 or abs(gm) <= ftol or (b - a) <= tol or mid in (a, b):
            return mid
        if (gm < 0) == (ga < 0):
            a, ga = mid, gm
        else:
            b = mid
    return 0.5 * (a + b)
