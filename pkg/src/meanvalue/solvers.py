"""Time integration of the semilinear and degenerate equations.

Both equations are written as ``u_t = L u + R(u)`` with a linear, symmetric
(in the trapezoid inner product) tridiagonal operator ``L`` and a reaction
``R``:

* semilinear: ``L = nu d^2/dx^2``, ``R(u) = -f(u) u``;
* degenerate: ``L = d/dx (x^d d/dx)``, ``R(u) = u^p``.

One step is Crank-Nicolson in ``L`` with ``R`` taken explicitly in a
two-stage Heun predictor/corrector, so the scheme is second order in time.
Steps are controlled by step doubling on the relative L2 difference.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PositivityError
from .foundation import (
    GridField,
    GridSpec,
    ProblemSpec,
    face_dirichlet_form,
    gradient,
    integrate_nodal,
    l2_norm,
    lp_power,
    sample_initial_data,
)

#: Nodal values in ``[-NEG_CLAMP, 0)`` are clamped to zero in degenerate runs.
NEG_CLAMP = 1e-10
#: Default number of stored frames when ``frame_stride`` is not given.
DEFAULT_FRAMES = 200


# --------------------------------------------------------------------------
# Tridiagonal algebra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TridiagOperator:
    """Row ``i`` maps ``u`` to ``lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1]``.

    Rows flagged in ``fixed`` are Dirichlet nodes: the operator returns 0
    there and time stepping keeps them at 0.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    fixed: np.ndarray

    def apply(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[1:] += self.lower[1:] * u[:-1]
        out[:-1] += self.upper[:-1] * u[1:]
        out[self.fixed] = 0.0
        return out

    def dense(self) -> np.ndarray:
        n = self.diag.size
        A = np.diag(self.diag) + np.diag(self.lower[1:], -1) + np.diag(self.upper[:-1], 1)
        A[self.fixed] = 0.0
        return A.reshape(n, n)


class ThomasFactor:
    """LU factorisation of a tridiagonal matrix for repeated solves (Thomas algorithm).

    ``lower[0]`` and ``upper[-1]`` are ignored. No pivoting: the matrices
    used here are diagonally dominant.
    """

    def __init__(self, lower, diag, upper):
        a = [float(v) for v in lower]
        b = [float(v) for v in diag]
        c = [float(v) for v in upper]
        n = len(b)
        cp = [0.0] * n
        den = [0.0] * n
        den[0] = b[0]
        for i in range(1, n):
            cp[i - 1] = c[i - 1] / den[i - 1]
            den[i] = b[i] - a[i] * cp[i - 1]
        self._a, self._cp, self._den, self.n = a, cp, den, n

    def solve(self, rhs) -> np.ndarray:
        a, cp, den, n = self._a, self._cp, self._den, self.n
        r = rhs.tolist() if isinstance(rhs, np.ndarray) else [float(v) for v in rhs]
        y = [0.0] * n
        y[0] = r[0] / den[0]
        for i in range(1, n):
            y[i] = (r[i] - a[i] * y[i - 1]) / den[i]
        for i in range(n - 2, -1, -1):
            y[i] -= cp[i] * y[i + 1]
        return np.array(y)


def thomas_solve(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system in one call."""
    return ThomasFactor(lower, diag, upper).solve(np.asarray(rhs, dtype=float))


def assemble_weighted_operator(grid: GridSpec, d: float, bc: str, nu: float = 1.0) -> TridiagOperator:
    """Conservative discretisation of ``nu (|x|^d u_x)_x`` at the nodes.

    Interior rows use face coefficients ``|x_{i+1/2}|^d``. The left row is
    a Dirichlet node for ``bc="dirichlet"``; for ``"weighted_mixed"`` it is
    the half control volume ``[0, h/2]`` with zero flux through ``x = 0``, and
    for ``"mixed"`` it is the ghost reflection ``u_{-1} = u_1``. The two
    Neumann-type rows coincide. The right node is always Dirichlet.
    """
    n = grid.n
    h2 = grid.h**2
    k = np.abs(grid.faces) ** d if d else np.ones(n)
    lower = np.zeros(n + 1)
    upper = np.zeros(n + 1)
    diag = np.zeros(n + 1)
    lower[1:n] = nu * k[:-1] / h2
    upper[1:n] = nu * k[1:] / h2
    diag[1:n] = -(lower[1:n] + upper[1:n])
    fixed = np.zeros(n + 1, dtype=bool)
    fixed[n] = True
    if bc == "dirichlet":
        fixed[0] = True
    elif bc in ("mixed", "weighted_mixed"):
        upper[0] = 2.0 * nu * k[0] / h2
        diag[0] = -upper[0]
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    lower[fixed] = diag[fixed] = upper[fixed] = 0.0
    return TridiagOperator(lower, diag, upper, fixed)


def problem_operator(spec: ProblemSpec, grid: GridSpec) -> TridiagOperator:
    if spec.is_degenerate:
        return assemble_weighted_operator(grid, spec.degenerate[0], spec.bc)
    return assemble_weighted_operator(grid, 0.0, spec.bc, nu=spec.nu)


def reaction(spec: ProblemSpec):
    if spec.is_degenerate:
        p = spec.degenerate[1]
        return lambda v: np.power(np.maximum(v, 0.0), p)
    f = spec.potential
    return lambda v: -np.asarray(f(v), dtype=float) * v


class _Stepper:
    """CN + Heun stepper with per-``dt`` cached factorisations."""

    def __init__(self, spec: ProblemSpec, grid: GridSpec):
        self.op = problem_operator(spec, grid)
        self.react = reaction(spec)
        self.free = ~self.op.fixed
        self._cache: dict[float, ThomasFactor] = {}

    def _factor(self, dt: float) -> ThomasFactor:
        fac = self._cache.get(dt)
        if fac is None:
            if len(self._cache) > 64:
                self._cache.clear()
            op = self.op
            fac = ThomasFactor(-0.5 * dt * op.lower, 1.0 - 0.5 * dt * op.diag, -0.5 * dt * op.upper)
            self._cache[dt] = fac
        return fac

    def _cn(self, u, Lu, r, dt):
        rhs = u + 0.5 * dt * Lu + dt * r
        rhs[~self.free] = 0.0
        return self._factor(dt).solve(rhs)

    def __call__(self, u: np.ndarray, dt: float) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            Lu = self.op.apply(u)
            r0 = self.react(u)
            pred = self._cn(u, Lu, r0, dt)
            r1 = self.react(pred)
            return self._cn(u, Lu, 0.5 * (r0 + r1), dt)


def step_imex(u: GridField, dt: float, spec: ProblemSpec) -> GridField:
    """One Crank-Nicolson/Heun step of the semilinear equation."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if spec.is_degenerate:
        raise ValueError("step_imex is for the semilinear equation; use degenerate_step")
    return u.with_values(_Stepper(spec, u.grid)(np.array(u.values), dt))


def degenerate_step(u: GridField, dt: float, spec: ProblemSpec) -> GridField:
    """One Crank-Nicolson/Heun step of the degenerate equation (no clamping)."""
    if not spec.is_degenerate:
        raise ValueError("degenerate_step needs degenerate parameters")
    return u.with_values(_Stepper(spec, u.grid)(np.array(u.values), dt))


# --------------------------------------------------------------------------
# Adaptive integration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveConfig:
    t_end: float
    n: int = 200
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    rel_step_tol: float = 1e-4
    blowup_threshold: float = 1e8
    frame_stride: int | None = None
    dt_max: float | None = None
    lp_orders: tuple = (3.0, 4.0, 6.0)

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0 < self.dt_init <= self.t_end:
            raise ValueError("need 0 < dt_init <= t_end")
        if not 0 < self.dt_min < self.dt_init:
            raise ValueError("need 0 < dt_min < dt_init")
        if not self.rel_step_tol > 0:
            raise ValueError("rel_step_tol must be positive")
        if not self.blowup_threshold > 1:
            raise ValueError("blowup_threshold must exceed 1")
        if self.frame_stride is not None and self.frame_stride < 1:
            raise ValueError("frame_stride must be >= 1")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ValueError("dt_max must be positive")

    @property
    def stride(self) -> int:
        if self.frame_stride is not None:
            return int(self.frame_stride)
        return max(1, math.ceil(self.t_end / self.dt_init / DEFAULT_FRAMES))


@dataclass(frozen=True)
class BlowupEvent:
    t_detect: float
    sup_norm: float
    l2_norm: float
    last_dt: float

    def as_dict(self) -> dict:
        return {"t_detect": self.t_detect, "sup_norm": self.sup_norm,
                "l2_norm": self.l2_norm, "last_dt": self.last_dt}


@dataclass
class Trajectory:
    """Stored frames of a run plus per-frame diagnostics.

    ``diagnostics`` maps ``t, l2, h1_semi, dissipation, sup, m, dt`` to arrays
    aligned with ``frames``; ``lp`` maps each order ``q`` to ``|u|_q^q``.
    ``dissipation`` is the discrete Dirichlet form of the operator, i.e.
    ``-<L u, u>``.
    """

    spec: ProblemSpec
    config: SolveConfig
    frames: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    lp: dict = field(default_factory=dict)
    outcome: str = "completed"
    t_stop: float = 0.0
    blowup: BlowupEvent | None = None
    accepted: int = 0
    rejected: int = 0
    clamped_nodes: int = 0

    @property
    def grid(self) -> GridSpec:
        return self.frames[0][1].grid

    @property
    def times(self) -> np.ndarray:
        return self.diagnostics["t"]

    def to_csv(self, path):
        cols = ["t", "l2", "h1_semi", "sup", "m", "dt"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in zip(*(self.diagnostics[c] for c in cols)):
                w.writerow([format(float(v), ".17g") for v in row])

    def frames_to_csv(self, path):
        """Matrix CSV: first row node coordinates, then one row per frame."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([format(float(v), ".17g") for v in self.grid.nodes])
            for _, u in self.frames:
                w.writerow([format(float(v), ".17g") for v in u.values])


def _diagnose(traj: Trajectory, records: list, spec: ProblemSpec):
    lp_orders = traj.config.lp_orders
    d = spec.degenerate[0] if spec.is_degenerate else 0.0
    scale = 1.0 if spec.is_degenerate else spec.nu
    cols = {k: [] for k in ("t", "l2", "h1_semi", "dissipation", "sup", "m", "dt")}
    lp = {q: [] for q in lp_orders}
    if spec.is_degenerate:
        p = spec.degenerate[1]
        f = lambda v: -np.power(np.maximum(v, 0.0), p - 1.0)  # noqa: E731
    else:
        f = spec.potential
    for (t, u), dt in records:
        v = u.values
        u2 = integrate_nodal(v * v, u.grid)
        cols["t"].append(t)
        cols["l2"].append(math.sqrt(u2))
        cols["h1_semi"].append(l2_norm(gradient(u)))
        cols["dissipation"].append(scale * face_dirichlet_form(u, d))
        cols["sup"].append(float(np.max(np.abs(v))))
        cols["m"].append(integrate_nodal(np.asarray(f(v)) * v * v, u.grid) / u2 if u2 > 0 else math.nan)
        cols["dt"].append(dt)
        for q in lp_orders:
            lp[q].append(lp_power(u, q))
    traj.diagnostics = {k: np.array(v) for k, v in cols.items()}
    traj.lp = {q: np.array(v) for q, v in lp.items()}


def _integrate(spec: ProblemSpec, config: SolveConfig, u0: GridField) -> Trajectory:
    grid = u0.grid
    stepper = _Stepper(spec, grid)
    w = grid.weights
    positive = spec.is_degenerate
    clamp_budget = 0.01 * (grid.n + 1)

    def norm(v):
        return math.sqrt(float(w @ (v * v)))

    traj = Trajectory(spec, config)
    u = np.array(u0.values)
    t = 0.0
    dt = config.dt_init
    dt_cap = config.dt_max if config.dt_max is not None else config.t_end
    streak = 0
    stride = config.stride
    records = [((0.0, u0), 0.0)]
    recent_sup = [float(np.max(np.abs(u)))]
    sup0 = recent_sup[0]
    last_dt = 0.0
    pending = None

    while config.t_end - t > 1e-14 * config.t_end:
        remaining = config.t_end - t
        step = min(dt, remaining, dt_cap)
        full = stepper(u, step)
        half = stepper(stepper(u, 0.5 * step), 0.5 * step)
        ok = np.all(np.isfinite(full)) and np.all(np.isfinite(half))
        if ok and positive and half.min() < -NEG_CLAMP:
            ok = False
        err = math.inf
        if ok:
            scale = norm(half)
            diff = norm(full - half)
            err = 0.0 if diff == 0.0 else diff / max(scale, 1e-300)
        if ok and err <= config.rel_step_tol:
            if positive:
                neg = half < 0.0
                count = int(np.count_nonzero(neg))
                if count > clamp_budget:
                    raise PositivityError(
                        f"t={t + step!r}: clamped {count} of {grid.n + 1} nodes (> 1%)"
                    )
                traj.clamped_nodes += count
                half[neg] = 0.0
            u = half
            t = config.t_end if step >= remaining else t + step
            last_dt = step
            traj.accepted += 1
            streak += 1
            if streak >= 5:
                dt = min(1.5 * dt, dt_cap)
                streak = 0
            sup = float(np.max(np.abs(u)))
            recent_sup = (recent_sup + [sup])[-4:]
            pending = ((t, GridField(grid, u)), step)
            if traj.accepted % stride == 0:
                records.append(pending)
                pending = None
            if sup >= config.blowup_threshold:
                traj.outcome = "blown_up"
                traj.blowup = BlowupEvent(t, sup, norm(u), step)
                break
        else:
            traj.rejected += 1
            streak = 0
            dt = 0.5 * step
            if dt < config.dt_min:
                growing = (recent_sup[-1] > sup0 and len(recent_sup) > 1
                           and all(b > a for a, b in zip(recent_sup, recent_sup[1:])))
                if growing:
                    traj.outcome = "blown_up"
                    traj.blowup = BlowupEvent(t, recent_sup[-1], norm(u), last_dt)
                else:
                    traj.outcome = "stalled"
                break
    if pending is not None:
        records.append(pending)
    traj.t_stop = t
    traj.frames = [rec[0] for rec in records]
    _diagnose(traj, records, spec)
    return traj


def solve_semilinear(spec: ProblemSpec, config: SolveConfig) -> Trajectory:
    """Integrate ``u_t - nu u_xx + f(u) u = 0`` from the sampled initial data."""
    if spec.is_degenerate:
        raise ValueError("solve_semilinear needs a non-degenerate problem")
    grid = GridSpec(spec.domain, config.n)
    return _integrate(spec, config, sample_initial_data(spec.initial, grid, spec.bc))


def solve_degenerate(spec: ProblemSpec, config: SolveConfig) -> Trajectory:
    """Integrate ``u_t = (x^d u_x)_x + u^p`` from nonnegative initial data."""
    if not spec.is_degenerate:
        raise ValueError("solve_degenerate needs degenerate parameters (d, p)")
    grid = GridSpec(spec.domain, config.n)
    u0 = sample_initial_data(spec.initial, grid, spec.bc)
    if u0.values.min() < -1e-12:
        raise PositivityError("degenerate problem needs nonnegative initial data")
    u0 = u0.with_values(np.maximum(u0.values, 0.0))
    return _integrate(spec, config, u0)


def solve(spec: ProblemSpec, config: SolveConfig) -> Trajectory:
    return solve_degenerate(spec, config) if spec.is_degenerate else solve_semilinear(spec, config)
