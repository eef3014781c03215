"""Decay and blow-up criteria, envelope and energy checks, blow-up time predictors.

Criterion evaluators return a :class:`ConditionReport`. Each entry carries a
signed ``margin`` (positive when the inequality is satisfied) and echoes the
numbers it was computed from. Strict inequalities are judged with a relative
dead band of ``1e-9``: margins inside the band are reported as ``Boundary``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DegenerateFieldError, NotReachedError, PositivityError
from .foundation import (
    GridField,
    GridSpec,
    Potential,
    ProblemSpec,
    face_dirichlet_form,
    gradient,
    integrate_nodal,
    lp_power,
    potential_avg,
    potential_eval,
    potential_inf,
    sample_initial_data,
    weighted_square,
)
from .mvt import mean_ratio

REL_TOL = 1e-9
#: The decay threshold 4/pi^2 of the degenerate application.
DECAY_LEVEL = 4.0 / math.pi**2
#: First eigenvalue for u_x(0) = 0, u(1) = 0 on (0, 1).
LAMBDA1_MIXED = math.pi**2 / 4.0


class Verdict(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    BOUNDARY = "Boundary"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CriterionEntry:
    id: str
    verdict: Verdict
    margin: float
    inputs: dict
    statement: str = ""

    def as_dict(self) -> dict:
        return {"id": self.id, "verdict": self.verdict.value, "margin": self.margin,
                "statement": self.statement, "inputs": self.inputs}


@dataclass
class ConditionReport:
    entries: list = field(default_factory=list)

    def __getitem__(self, key: str) -> CriterionEntry:
        for e in self.entries:
            if e.id == key:
                return e
        raise KeyError(key)

    def __iter__(self):
        return iter(self.entries)

    def verdicts(self) -> dict:
        return {e.id: e.verdict for e in self.entries}

    def holds(self, *ids: str) -> bool:
        chosen = [self[i] for i in ids] if ids else self.entries
        return all(e.verdict is Verdict.HOLDS for e in chosen)

    def as_dict(self) -> dict:
        return {"criteria": [e.as_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, default=_jsonable)

    def to_text(self) -> str:
        width = max((len(e.id) for e in self.entries), default=0)
        lines = []
        for e in self.entries:
            lines.append(f"{e.id:<{width}}  {e.verdict.value:<12} margin={e.margin:+.6e}  {e.statement}")
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Enum):
        return obj.value
    raise TypeError(f"not serialisable: {type(obj)}")


def judge(cid: str, lhs: float, rhs: float, sense: str, inputs: dict, statement: str = "") -> CriterionEntry:
    """Compare ``lhs <sense> rhs``; ``sense`` in ``<, >, <=, >=``.

    Non-strict comparisons count the dead band as satisfied.
    """
    margin = rhs - lhs if sense in ("<", "<=") else lhs - rhs
    tol = REL_TOL * max(abs(lhs), abs(rhs))
    inputs = dict(inputs, lhs=lhs, rhs=rhs)
    if not math.isfinite(margin):
        verdict = Verdict.INCONCLUSIVE
    elif abs(margin) <= tol:
        verdict = Verdict.HOLDS if sense in ("<=", ">=") else Verdict.BOUNDARY
    else:
        verdict = Verdict.HOLDS if margin > 0 else Verdict.FAILS
    return CriterionEntry(cid, verdict, float(margin), inputs, statement)


def _inconclusive(cid: str, reason: str, statement: str = "") -> CriterionEntry:
    return CriterionEntry(cid, Verdict.INCONCLUSIVE, math.nan, {"reason": reason}, statement)


# --------------------------------------------------------------------------
# Criteria on data
# --------------------------------------------------------------------------


def avg_min_on_log_grid(f: Potential, s_interval, samples: int = 256) -> tuple[float, float]:
    """Minimum of the running average over a log-spaced grid of ``s > 0``."""
    lo, hi = map(float, s_interval)
    if not hi > 0:
        raise ValueError("the average is only defined for s > 0")
    start = lo if lo > 0 else hi * 1e-6
    s = np.geomspace(start, hi, samples)
    vals = np.array([potential_avg(f, v) for v in s])
    i = int(np.argmin(vals))
    return float(vals[i]), float(s[i])


def evaluate_decay_criteria(spec: ProblemSpec, s_interval, lambda1: float,
                            grid: GridSpec | None = None) -> ConditionReport:
    """Positivity, inf-bound, average-bound and the necessary condition on u0."""
    lo, hi = map(float, s_interval)
    if not lo < hi:
        raise ValueError(f"empty s interval [{lo}, {hi}]")
    f = spec.potential
    if f is None:
        raise ValueError("decay criteria need a potential")
    threshold = -spec.nu * lambda1
    echo = {"nu": spec.nu, "lambda1": lambda1, "s_interval": [lo, hi]}
    inf = potential_inf(f, (lo, hi))
    report = ConditionReport()
    report.entries.append(judge("positivity", inf, 0.0, ">", dict(echo, inf=inf), "inf f > 0"))
    report.entries.append(judge("inf_bound", inf, threshold, ">", dict(echo, inf=inf),
                                "inf f > -nu*lambda1"))
    if hi > 0:
        avg_min, s_at = avg_min_on_log_grid(f, (lo, hi))
        report.entries.append(judge("avg_bound", avg_min, threshold, ">",
                                    dict(echo, min_avg=avg_min, s_at_min=s_at, samples=256),
                                    "min_s f_avg(s) > -nu*lambda1"))
    else:
        report.entries.append(_inconclusive("avg_bound", "interval has no s > 0"))
    grid = grid or GridSpec(spec.domain, 400)
    u0 = sample_initial_data(spec.initial, grid, spec.bc)
    try:
        m0 = mean_ratio(f, u0)
    except DegenerateFieldError as exc:
        report.entries.append(_inconclusive("necessary", str(exc)))
    else:
        report.entries.append(judge("necessary", m0, threshold, ">", dict(echo, m0=m0),
                                    "<f(u0), u0^2>/||u0||^2 > -nu*lambda1"))
    return report


@dataclass(frozen=True)
class SandwichBounds:
    """``c1 - c2 (r+2)/4 s^r <= f(s) <= c1 - c2 s^r``."""

    c1: float
    c2: float
    r: float

    def __post_init__(self):
        if not (self.c1 >= 0 and self.c2 > 0 and self.r > 2):
            raise ValueError(f"need c1 >= 0, c2 > 0, r > 2; got {self}")

    def upper(self, s):
        return self.c1 - self.c2 * np.power(s, self.r)

    def lower(self, s):
        return self.c1 - 0.25 * self.c2 * (self.r + 2.0) * np.power(s, self.r)

    def lower_envelope(self) -> Potential:
        """The lower bound as a polynomial potential (``r`` must be an integer)."""
        if float(self.r) != int(self.r):
            raise ValueError("lower envelope as polynomial needs an integer r")
        c = [0.0] * (int(self.r) + 1)
        c[0] = self.c1
        c[-1] = -0.25 * self.c2 * (self.r + 2.0)
        return Potential.polynomial(c)

    def upper_envelope(self) -> Potential:
        if float(self.r) != int(self.r):
            raise ValueError("upper envelope as polynomial needs an integer r")
        c = [0.0] * (int(self.r) + 1)
        c[0] = self.c1
        c[-1] = -self.c2
        return Potential.polynomial(c)

    def as_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "r": self.r}


def _nonnegative(u0: GridField):
    if u0.values.min() < -1e-12:
        raise PositivityError(f"criterion needs u0 >= 0 (min {u0.values.min()!r})")


def evaluate_blowup_criterion(u0: GridField, nu: float, bounds: SandwichBounds, f: Potential,
                              s_interval, samples: int = 512) -> ConditionReport:
    """Sandwich check for ``f`` and the energy criterion for ``u0``."""
    _nonnegative(u0)
    s = np.linspace(float(s_interval[0]), float(s_interval[1]), samples)
    fs = potential_eval(f, s)
    lo_b, up_b = bounds.lower(s), bounds.upper(s)
    slack = np.minimum(fs - lo_b, up_b - fs)
    i = int(np.argmin(slack))
    scale = float(np.max(np.abs(np.concatenate([fs, lo_b, up_b]))))
    report = ConditionReport()
    # expressed as lhs >= rhs with the worst slack so that the shared judge applies
    report.entries.append(judge("sandwich", scale + float(slack[i]), scale, ">=",
                                {"worst_s": float(s[i]), "worst_slack": float(slack[i]),
                                 "samples": samples, **bounds.as_dict()},
                                "c1 - c2(r+2)/4 s^r <= f(s) <= c1 - c2 s^r"))
    grad2 = integrate_nodal(gradient(u0).values ** 2, u0.grid)
    l22 = integrate_nodal(u0.values**2, u0.grid)
    lr = lp_power(u0, bounds.r + 2.0)
    lhs = nu * grad2 + bounds.c1 * l22
    rhs = 0.5 * bounds.c2 * lr
    report.entries.append(judge("blowup_criterion", lhs, rhs, "<",
                                {"nu": nu, "grad_l2_sq": grad2, "l2_sq": l22, "lr2_pow": lr,
                                 **bounds.as_dict()},
                                "nu||u0_x||^2 + c1||u0||^2 < c2/2 |u0|_{r+2}^{r+2}"))
    return report


def wang_quantities(u0: GridField, d: float, p: float) -> dict:
    """Norms entering the degenerate-equation criteria (central-difference ``u0_x``)."""
    _nonnegative(u0)
    v = np.maximum(u0.values, 0.0)
    u = u0.with_values(v)
    ux = gradient(u)
    q = {
        "l2_sq": integrate_nodal(v * v, u.grid),
        "lp1_pow": lp_power(u, p + 1.0),
        "grad_l2_sq": integrate_nodal(ux.values**2, u.grid),
        "grad_l4_sq": math.sqrt(integrate_nodal(ux.values**4, u.grid)),
        "weighted_grad_sq": weighted_square(ux, d),
    }
    if q["l2_sq"] == 0 or q["grad_l2_sq"] == 0:
        raise DegenerateFieldError("criteria need ||u0|| > 0 and ||u0_x|| > 0")
    return q


def evaluate_wang_criteria(u0: GridField, d: float, p: float) -> ConditionReport:
    """Decay, blow-up, data-set and blow-up-possible criteria for the degenerate equation."""
    if d < 0 or not p > 1:
        raise ValueError(f"need d >= 0 and p > 1, got d={d}, p={p}")
    q = wang_quantities(u0, d, p)
    echo = dict(q, d=d, p=p)
    N2, P, G2, Q4, W = q["l2_sq"], q["lp1_pow"], q["grad_l2_sq"], q["grad_l4_sq"], q["weighted_grad_sq"]
    report = ConditionReport()
    report.entries.append(judge("wang_decay", P / N2, LAMBDA1_MIXED * W / G2, "<", echo,
                                "|u0|_{p+1}^{p+1}/||u0||^2 < (pi^2/4) <x^d,u0_x^2>/||u0_x||^2"))
    report.entries.append(judge("wang_blowup", W, P / (p + 1.0), "<", echo,
                                "<x^d,u0_x^2> < |u0|_{p+1}^{p+1}/(p+1)"))
    report.entries.append(judge("e_set", N2 * Q4 / (P * G2), DECAY_LEVEL * math.sqrt(1.0 + 2.0 * d), ">",
                                echo, "||u0||^2 |u0_x|_4^2 / (|u0|_{p+1}^{p+1} ||u0_x||^2) > (4/pi^2) sqrt(1+2d)"))
    report.entries.append(judge("blowup_possible", Q4 / P, LAMBDA1_MIXED, "<=", echo,
                                "|u0_x|_4^2 / |u0|_{p+1}^{p+1} <= pi^2/4"))
    return report


# --------------------------------------------------------------------------
# Trajectory verification
# --------------------------------------------------------------------------


@dataclass
class DecayReport:
    times: np.ndarray
    l2: np.ndarray
    F: np.ndarray
    envelope_general: np.ndarray
    envelope_sharp: np.ndarray | None
    envelope_deg: np.ndarray | None
    energy_residual: np.ndarray
    tol: float = 1e-6

    @staticmethod
    def _violation(l2, env):
        return l2 / env - 1.0

    @property
    def slack(self) -> dict:
        """Relative excess ``||u||/envelope - 1`` per envelope (positive = violated)."""
        out = {"general": self._violation(self.l2, self.envelope_general)}
        if self.envelope_sharp is not None:
            out["sharp"] = self._violation(self.l2, self.envelope_sharp)
        if self.envelope_deg is not None:
            out["degenerate"] = self._violation(self.l2, self.envelope_deg)
        return out

    @property
    def worst_violation(self) -> dict:
        return {k: float(max(np.max(v), 0.0)) for k, v in self.slack.items()}

    def holds(self, which: str | None = None) -> bool:
        worst = self.worst_violation
        if which is not None:
            return worst[which] <= self.tol
        return all(v <= self.tol for v in worst.values())

    @property
    def max_energy_residual(self) -> float:
        return float(np.max(self.energy_residual))

    def as_dict(self) -> dict:
        return {
            "frames": int(self.times.size),
            "t_end": float(self.times[-1]),
            "tol": self.tol,
            "worst_violation": self.worst_violation,
            "holds": {k: v <= self.tol for k, v in self.worst_violation.items()},
            "max_energy_residual": self.max_energy_residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, default=_jsonable)

    def to_text(self) -> str:
        lines = [f"frames={self.times.size} t_end={self.times[-1]:.6g}"]
        for k, v in self.worst_violation.items():
            lines.append(f"envelope {k:<10} worst excess {v:.3e}  {'ok' if v <= self.tol else 'VIOLATED'}")
        lines.append(f"energy identity residual max {self.max_energy_residual:.3e}")
        return "\n".join(lines)


def verify_trajectory(traj, path, lambda1: float | None = None, xi_path=None, chi_path=None,
                      tol: float = 1e-6) -> DecayReport:
    """Check the decay envelopes and the integrated energy identity along ``traj``.

    ``path`` supplies ``m(t)``; the sharp envelope needs ``lambda1``; the
    degenerate envelope needs both a weighted ``xi`` path and a ``chi`` path.
    Time integrals are frame-level trapezoid sums.
    """
    t = traj.times
    if path.times.shape != t.shape or not np.array_equal(path.times, t):
        raise ValueError("mean-value path is not aligned with the trajectory frames")
    l2 = traj.diagnostics["l2"]
    u0n = l2[0]
    if u0n == 0:
        raise DegenerateFieldError("verification needs a nonzero initial state")
    F = cumulative_trapezoid(path.m, t, initial=0.0)
    env_general = np.exp(-F) * u0n
    env_sharp = None
    if lambda1 is not None and not traj.spec.is_degenerate:
        env_sharp = np.exp(-(traj.spec.nu * lambda1 * t + F)) * u0n
    env_deg = None
    if xi_path is not None and chi_path is not None:
        for p_ in (xi_path, chi_path):
            if not np.array_equal(p_.times, t):
                raise ValueError("xi/chi paths are not aligned with the trajectory frames")
        rate = LAMBDA1_MIXED * xi_path.xi_d**xi_path.d - chi_path.ratio
        env_deg = np.exp(-cumulative_trapezoid(rate, t, initial=0.0)) * u0n

    # ||u||^2 e^{2F} + int_0^t 2 D(s) e^{2F(s)} ds = ||u0||^2
    D = traj.diagnostics["dissipation"]
    G = cumulative_trapezoid(2.0 * D * np.exp(2.0 * F), t, initial=0.0)
    # relative to the larger of ||u||^2 and e^{-2F} ||u0||^2 (scaled by e^{2F})
    scaled = l2**2 * np.exp(2.0 * F)
    residual = np.abs(scaled + G - u0n**2) / np.maximum(scaled, u0n**2)
    return DecayReport(t, l2, F, env_general, env_sharp, env_deg, residual, tol)


# --------------------------------------------------------------------------
# Energy functionals
# --------------------------------------------------------------------------


@dataclass
class EnergyReport:
    times: np.ndarray
    script_E: np.ndarray | None
    E_deg: np.ndarray | None
    violations: dict
    max_jump: dict
    asserted: dict

    @property
    def monotone(self) -> bool:
        """True when every asserted functional is nonincreasing within tolerance."""
        return all(self.violations[k] == 0 for k, a in self.asserted.items() if a)

    def as_dict(self) -> dict:
        out = {"frames": int(self.times.size), "violations": self.violations,
               "max_jump": self.max_jump, "asserted": self.asserted, "monotone": self.monotone}
        if self.script_E is not None:
            out["script_E_initial"] = float(self.script_E[0])
        if self.E_deg is not None:
            out["E_deg_initial"] = float(self.E_deg[0])
        return out


def _jumps(values: np.ndarray) -> tuple[int, float]:
    inc = np.diff(values)
    band = 1e-6 * (1.0 + np.abs(values[:-1]))
    bad = inc > band
    return int(np.count_nonzero(bad)), float(max(np.max(inc, initial=0.0), 0.0))


def is_lower_envelope(f: Potential | None, bounds: SandwichBounds) -> bool:
    if f is None or f.kind != "polynomial":
        return False
    try:
        target = bounds.lower_envelope().params
    except ValueError:
        return False
    a, b = list(f.params), list(target)
    n = max(len(a), len(b))
    a += [0.0] * (n - len(a))
    b += [0.0] * (n - len(b))
    return all(math.isclose(x, y, rel_tol=1e-14, abs_tol=0.0) for x, y in zip(a, b))


def script_E(u: GridField, nu: float, bounds: SandwichBounds) -> float:
    """``nu ||u_x||^2 + c1 ||u||^2 - c2/2 |u|_{r+2}^{r+2}`` (face-difference gradient)."""
    return (nu * face_dirichlet_form(u) + bounds.c1 * integrate_nodal(u.values**2, u.grid)
            - 0.5 * bounds.c2 * lp_power(u, bounds.r + 2.0))


def degenerate_E(u: GridField, d: float, p: float) -> float:
    """``<x^d, u_x^2> - |u|_{p+1}^{p+1}/(p+1)`` (face-difference gradient)."""
    v = np.maximum(u.values, 0.0)
    return face_dirichlet_form(u, d) - lp_power(u.with_values(v), p + 1.0) / (p + 1.0)


def energy_monitor(traj, bounds: SandwichBounds | None = None,
                   degenerate: tuple[float, float] | None = None) -> EnergyReport:
    """Evaluate the energy functionals on every frame and count upward jumps.

    Nonincrease is asserted for the degenerate functional and for the
    semilinear functional only when the run's potential is the exact lower
    envelope of ``bounds``; other cases are diagnostics.
    """
    if bounds is None and degenerate is None:
        raise ValueError("energy_monitor needs bounds and/or degenerate parameters")
    t = traj.times
    sE = Ed = None
    violations, jumps, asserted = {}, {}, {}
    if bounds is not None:
        sE = np.array([script_E(u, traj.spec.nu, bounds) for _, u in traj.frames])
        violations["script_E"], jumps["script_E"] = _jumps(sE)
        asserted["script_E"] = (not traj.spec.is_degenerate) and is_lower_envelope(traj.spec.potential, bounds)
    if degenerate is not None:
        d, p = degenerate
        Ed = np.array([degenerate_E(u, d, p) for _, u in traj.frames])
        violations["E_deg"], jumps["E_deg"] = _jumps(Ed)
        asserted["E_deg"] = traj.spec.is_degenerate and tuple(traj.spec.degenerate) == (float(d), float(p))
    return EnergyReport(t, sE, Ed, violations, jumps, asserted)


# --------------------------------------------------------------------------
# Blow-up time prediction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BlowupPrediction:
    method: str
    t_prime: float
    inputs: dict

    def as_dict(self) -> dict:
        return {"method": self.method, "t_prime": self.t_prime, "inputs": self.inputs}


def xi_integrand(traj, path) -> tuple[np.ndarray, np.ndarray]:
    """``u~(xi(t), t)^2`` per frame."""
    vals = np.array([float(u.interp(xi)) ** 2 for (_, u), xi in zip(traj.frames, path.xi)])
    return np.asarray(path.times), vals


def _first_crossing(t: np.ndarray, y: np.ndarray, level: float) -> float | None:
    above = np.nonzero(y >= level)[0]
    if above.size == 0:
        return None
    k = int(above[0])
    if k == 0 or y[k] == level:
        return float(t[k])
    return float(t[k - 1] + (level - y[k - 1]) * (t[k] - t[k - 1]) / (y[k] - y[k - 1]))


def predict_blowup(u0_l2: float, bounds: SandwichBounds | None = None,
                   degenerate: tuple[float, float] | None = None,
                   xi_integrand_data: tuple | None = None, measure: float = 1.0) -> list:
    """Blow-up time estimates applicable to the given parameters.

    * ``PaperGeneric`` (needs ``bounds`` and recorded ``u~(xi)^2`` along a run):
      first time the accumulated integral of ``u~(xi)^2`` reaches
      ``2 |Omega|^((r-2)/2) / (c2 (r-2) ||u0||^(r-2))``, with the implied
      mean-value time ``t*``.
    * ``PaperDegenerate``: ``(p+1)/(2p) ||u0||^(-(p-1)/2)``.
    * ``ComparisonODE``: explosion time ``(p+1)/(p(p-1)) ||u0||^(-(p-1))`` of
      ``y' = 2p/(p+1) y^((p+1)/2)``, ``y(0) = ||u0||^2``.
    """
    if not u0_l2 > 0:
        raise DegenerateFieldError("prediction needs ||u0|| > 0")
    out = []
    if bounds is not None and xi_integrand_data is not None:
        r, c2 = bounds.r, bounds.c2
        level = 2.0 * measure ** ((r - 2.0) / 2.0) / (c2 * (r - 2.0) * u0_l2 ** (r - 2.0))
        t, y = (np.asarray(a, dtype=float) for a in xi_integrand_data)
        acc = cumulative_trapezoid(y, t, initial=0.0)
        tp = _first_crossing(t, acc, level)
        if tp is None:
            raise NotReachedError(
                f"accumulated integral {acc[-1]:.6g} stays below {level:.6g} up to t={t[-1]:.6g}"
            )
        k = int(np.searchsorted(t, tp, side="right"))
        avg = level / tp if tp > 0 else float(y[0])
        ts = t[:k]
        ys = y[:k]
        dev = ys - avg
        if np.all(np.abs(dev) <= 1e-12 * max(1.0, abs(avg))):
            t_star = float(ts[0])
        else:
            cross = np.nonzero(dev[:-1] * dev[1:] <= 0)[0]
            if cross.size:
                j = int(cross[0])
                t_star = float(ts[j] if dev[j] == dev[j + 1] else
                               ts[j] + dev[j] * (ts[j + 1] - ts[j]) / (dev[j] - dev[j + 1]))
            else:
                t_star = math.nan
        out.append(BlowupPrediction("PaperGeneric", tp, {
            "threshold": level, "accumulated_integral": float(level), "t_star": t_star,
            "mean_integrand": avg, "u0_l2": u0_l2, "measure": measure, **bounds.as_dict(),
        }))
    if degenerate is not None:
        d, p = degenerate
        out.append(BlowupPrediction("PaperDegenerate", (p + 1.0) / (2.0 * p) * u0_l2 ** (-(p - 1.0) / 2.0),
                                    {"u0_l2": u0_l2, "d": d, "p": p}))
        out.append(BlowupPrediction("ComparisonODE", (p + 1.0) / (p * (p - 1.0)) * u0_l2 ** (-(p - 1.0)),
                                    {"u0_l2": u0_l2, "d": d, "p": p, "y0": u0_l2**2}))
    return out


def fit_decay_rate(traj, t_min: float = 0.0) -> float:
    """Least-squares exponential rate ``k`` in ``||u(t)|| ~ C exp(-k t)``."""
    t = traj.times
    l2 = traj.diagnostics["l2"]
    keep = (t >= t_min) & (l2 > 0)
    if np.count_nonzero(keep) < 2:
        raise ValueError("need at least two frames with positive norm")
    slope = np.polyfit(t[keep], np.log(l2[keep]), 1)[0]
    return float(-slope)
