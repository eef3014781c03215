"""Mean Value Theorem for Integrals on discrete fields.

Given a field ``u`` and a continuous ``f``, the weighted mean
``m = <f(u), u^2> / ||u||^2`` lies between the extreme nodal values of
``f(u)``, so the linear interpolant ``u~`` of ``u`` has a point ``xi`` with
``f(u~(xi)) = m``. This module computes ``m``, locates such points, and
threads them through trajectories into paths ``xi(t)``, ``chi(t)``.

Among several admissible points the one nearest the previous point is
returned (leftmost on ties, or when there is no previous point).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BracketError, DegenerateFieldError, PositivityError
from .foundation import (
    GridField,
    bisect_root,
    gradient,
    integrate_nodal,
    lp_power,
    weighted_square,
)

#: Slack (relative to ``max(1, |m|)``) for treating a nodal value as a root.
NODE_SLACK = 1e-12


def mean_ratio(f: Callable, u: GridField) -> float:
    """``<f(u), u^2> / ||u||^2`` by trapezoid quadrature."""
    v = u.values
    u2 = v * v
    den = integrate_nodal(u2, u.grid)
    if den == 0.0:
        raise DegenerateFieldError("mean value undefined for a zero field")
    return integrate_nodal(np.asarray(f(v), dtype=float) * u2, u.grid) / den


def _pick(candidates: list[float], prev: float | None) -> float:
    candidates = sorted(candidates)
    if prev is None:
        return candidates[0]
    dist = [abs(c - prev) for c in candidates]
    return candidates[int(np.argmin(dist))]


def locate_xi(f: Callable, u: GridField, m: float, prev_xi: float | None = None) -> float:
    """Interior point ``xi`` with ``f(u~(xi)) = m`` on the linear interpolant.

    Every interior node where ``f(u) - m`` vanishes (within slack) is a
    candidate; every cell whose end values change sign contributes the root
    found by bisection inside it.
    """
    x = u.grid.nodes
    v = u.values
    g = np.asarray(f(v), dtype=float) - m
    slack = NODE_SLACK * max(1.0, abs(m))
    if g.min() > slack or g.max() < -slack:
        raise BracketError(
            f"m={m!r} outside [{g.min() + m!r}, {g.max() + m!r}]; quadrature and interpolant disagree"
        )

    hit = np.abs(g) <= slack
    candidates = [float(xi) for xi in x[1:-1][hit[1:-1]]]
    cells = np.nonzero((g[:-1] * g[1:] < 0) & ~hit[:-1] & ~hit[1:])[0]
    for i in cells:
        xa, xb = x[i], x[i + 1]
        ua, du = v[i], (v[i + 1] - v[i]) / (xb - xa)

        def resid(t, xa=xa, ua=ua, du=du):
            return float(f(ua + du * (t - xa))) - m

        tol = 4.0 * np.finfo(float).eps * max(1.0, abs(xa), abs(xb))
        candidates.append(bisect_root(resid, xa, xb, tol=tol))
    if not candidates:
        raise BracketError(f"no interior mean-value point for m={m!r}")
    return _pick(candidates, prev_xi)


def xi_weighted(u_x: GridField, d: float) -> float:
    """``xi`` with ``xi^d ||u_x||^2 = <x^d, u_x^2>`` (closed form)."""
    if not d > 0:
        raise ValueError(f"weight exponent must be positive, got {d}")
    den = weighted_square(u_x, 0.0)
    if den == 0.0:
        raise DegenerateFieldError("weighted mean undefined for zero gradient")
    return (weighted_square(u_x, d) / den) ** (1.0 / d)


def chi_ratio(u: GridField, p: float) -> float:
    """``|u|_{p+1}^{p+1} / ||u||^2`` for a nonnegative field."""
    v = u.values
    if v.min() < -1e-12:
        raise PositivityError(f"chi needs a nonnegative field (min {v.min()!r})")
    v = np.maximum(v, 0.0)
    den = integrate_nodal(v * v, u.grid)
    if den == 0.0:
        raise DegenerateFieldError("chi undefined for a zero field")
    return lp_power(u.with_values(v), p + 1.0) / den


def locate_chi(u: GridField, p: float, prev_chi: float | None = None) -> float:
    """Interior ``chi`` with ``u~(chi)^(p-1) = |u|_{p+1}^{p+1} / ||u||^2``."""
    if not p > 1:
        raise ValueError(f"chi needs p > 1, got {p}")
    r = chi_ratio(u, p)
    power = _power(p - 1.0)
    return locate_xi(power, u.with_values(np.maximum(u.values, 0.0)), r, prev_chi)


def _power(q: float) -> Callable:
    def f(s):
        return np.power(np.maximum(s, 0.0), q)

    return f


# --------------------------------------------------------------------------
# Paths along trajectories
# --------------------------------------------------------------------------


def _write(path, header, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([format(float(v), ".17g") for v in row])


@dataclass(frozen=True)
class MeanValuePath:
    times: np.ndarray
    m: np.ndarray
    xi: np.ndarray
    residual: np.ndarray

    @property
    def max_jump(self) -> float:
        return float(np.max(np.abs(np.diff(self.xi)))) if self.xi.size > 1 else 0.0

    def to_csv(self, path):
        _write(path, ["t", "m", "xi"], [self.times, self.m, self.xi])


@dataclass(frozen=True)
class WeightedMeanPath:
    times: np.ndarray
    xi_d: np.ndarray
    d: float

    @property
    def max_jump(self) -> float:
        return float(np.max(np.abs(np.diff(self.xi_d)))) if self.xi_d.size > 1 else 0.0

    def to_csv(self, path):
        _write(path, ["t", "xi_d"], [self.times, self.xi_d])


@dataclass(frozen=True)
class ChiPath:
    times: np.ndarray
    chi: np.ndarray
    p: float
    ratio: np.ndarray

    @property
    def max_jump(self) -> float:
        return float(np.max(np.abs(np.diff(self.chi)))) if self.chi.size > 1 else 0.0

    def to_csv(self, path):
        _write(path, ["t", "chi"], [self.times, self.chi])


def trajectory_potential(traj) -> Callable:
    """The ``f`` of ``f(u) u`` for the trajectory's equation.

    For the degenerate equation the reaction ``+u^p`` corresponds to
    ``f(s) = -s^(p-1)``.
    """
    spec = traj.spec
    if spec.is_degenerate:
        q = spec.degenerate[1] - 1.0
        return lambda s: -np.power(np.maximum(s, 0.0), q)
    return spec.potential


def path_over_trajectory(traj, extractor="xi", f: Callable | None = None):
    """Per-frame mean-value points of a trajectory, threaded for continuity.

    ``extractor`` is ``"xi"``, ``("xi_weighted", d)`` or ``("chi", p)``.
    ``f`` overrides the trajectory's potential for the ``"xi"`` extractor.
    """
    frames = traj.frames
    if len(frames) < 2:
        raise ValueError("path extraction needs at least two stored frames")
    times = np.array([t for t, _ in frames])

    if extractor == "xi":
        f = f if f is not None else trajectory_potential(traj)
        ms, xis, res = [], [], []
        prev = None
        for t, u in frames:
            try:
                m = mean_ratio(f, u)
                xi = locate_xi(f, u, m, prev)
            except (BracketError, DegenerateFieldError, ValueError) as exc:
                raise type(exc)(f"t={t!r}: {exc}") from exc
            ms.append(m)
            xis.append(xi)
            res.append(float(f(u.interp(xi))) - m)
            prev = xi
        return MeanValuePath(times, np.array(ms), np.array(xis), np.array(res))

    kind, param = extractor
    if kind == "xi_weighted":
        vals = []
        for t, u in frames:
            try:
                vals.append(xi_weighted(gradient(u), param))
            except (DegenerateFieldError, ValueError) as exc:
                raise type(exc)(f"t={t!r}: {exc}") from exc
        return WeightedMeanPath(times, np.array(vals), float(param))
    if kind == "chi":
        chis, ratios = [], []
        prev = None
        for t, u in frames:
            try:
                chis.append(locate_chi(u, param, prev))
                ratios.append(chi_ratio(u, param))
            except (BracketError, DegenerateFieldError, PositivityError, ValueError) as exc:
                raise type(exc)(f"t={t!r}: {exc}") from exc
            prev = chis[-1]
        return ChiPath(times, np.array(chis), float(param), np.array(ratios))
    raise ValueError(f"unknown extractor {extractor!r}")


def chi_residual(u: GridField, p: float, chi: float) -> float:
    """Relative residual of ``u~(chi)^(p-1) ||u||^2 = |u|_{p+1}^{p+1}``."""
    v = np.maximum(u.values, 0.0)
    lhs = float(np.interp(chi, u.grid.nodes, v)) ** (p - 1.0) * integrate_nodal(v * v, u.grid)
    rhs = lp_power(u.with_values(v), p + 1.0)
    return abs(lhs - rhs) / max(abs(rhs), math.ulp(1.0))
