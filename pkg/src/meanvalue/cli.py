"""Command-line front end: ``meanvalue {solve,check,sweep,predict,verify} --config FILE``.

Exit codes: 0 success, 1 an asserted check failed, 2 blow-up outcome differs
from ``expect``, 3 configuration error, 4 runtime or file error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import analysis, sweep as sweep_mod
from .errors import ConfigError, MeanValueError, NotReachedError
from .foundation import (
    Domain1D,
    GridSpec,
    InitialData,
    Potential,
    ProblemSpec,
    SpectralInfo,
    l2_norm,
    sample_initial_data,
)
from .mvt import path_over_trajectory
from .solvers import SolveConfig, solve

EXIT_OK, EXIT_ASSERT, EXIT_BLOWUP, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3, 4

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_file = {"type": "string", "minLength": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["problem"],
    "properties": {
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "required": ["initial"],
            "properties": {
                "domain": _pair,
                "nu": _pos,
                "bc": {"enum": ["dirichlet", "mixed", "weighted_mixed"]},
                "potential": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["chafee_infante", "piecewise_f2", "singular_f3",
                                          "polynomial", "constant", "tabulated"]},
                        "mu": _num, "p": _num, "c": _num,
                        "coeffs": {"type": "array", "items": _num, "minItems": 1},
                        "points": {"type": "array", "items": _pair, "minItems": 2},
                        "csv": _file,
                    },
                },
                "initial": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "preset": {"enum": ["x_sin_pi_x", "exp_bump", "amp_sin", "amp_ramp"]},
                        "A": _num,
                        "points": {"type": "array", "items": _pair, "minItems": 2},
                        "csv": _file,
                    },
                },
                "degenerate": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["d", "p"],
                    "properties": {"d": _num, "p": _num},
                },
            },
        },
        "solve": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t_end"],
            "properties": {
                "t_end": _pos,
                "n": {"type": "integer", "minimum": 8},
                "dt_init": _pos,
                "dt_min": _pos,
                "dt_max": _pos,
                "rel_step_tol": _pos,
                "blowup_threshold": _pos,
                "frame_stride": {"type": "integer", "minimum": 1},
            },
        },
        "check": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s_interval": _pair,
                "lambda1_override": _pos,
                "grid_n": {"type": "integer", "minimum": 8},
                "sandwich": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["c1", "c2", "r"],
                    "properties": {"c1": _num, "c2": _num, "r": _num},
                },
                "wang": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["d", "p"],
                    "properties": {"d": _num, "p": _num},
                },
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "d_samples": {"type": "integer"},
                "p_samples": {"type": "integer"},
                "d_max": _num,
                "p_max": _num,
                "n": {"type": "integer", "minimum": 8},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"csv": _file, "svg": _file, "frames": _file, "json": _file, "text": _file},
        },
        "expect": {"enum": ["blowup", "decay", "none"]},
    },
}


@dataclass
class RunConfig:
    raw: dict
    spec: ProblemSpec | None
    initial: InitialData
    domain: Domain1D
    solve: SolveConfig | None
    s_interval: tuple | None
    lambda1: float
    grid_n: int
    sandwich: analysis.SandwichBounds | None
    wang: tuple | None
    sweep: dict
    outputs: dict
    expect: str


def _build(section: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), section) from exc


def _potential(cfg: dict, base: Path) -> Potential:
    kind = cfg["kind"]
    need = {"chafee_infante": "mu", "singular_f3": "p", "constant": "c", "polynomial": "coeffs"}
    if kind in need and need[kind] not in cfg:
        raise ConfigError(f"'{need[kind]}' is required for kind {kind!r}", f"problem/potential/{need[kind]}")
    if kind == "chafee_infante":
        return Potential.chafee_infante(cfg["mu"])
    if kind == "piecewise_f2":
        return Potential.piecewise_f2()
    if kind == "singular_f3":
        return Potential.singular_f3(cfg["p"])
    if kind == "polynomial":
        return Potential.polynomial(cfg["coeffs"])
    if kind == "constant":
        return Potential.constant(cfg["c"])
    if "points" in cfg:
        return Potential.tabulated(cfg["points"])
    if "csv" in cfg:
        return Potential.from_csv(base / cfg["csv"])
    raise ConfigError("tabulated potential needs 'points' or 'csv'", "problem/potential")


def _initial(cfg: dict, base: Path) -> InitialData:
    given = [k for k in ("preset", "points", "csv") if k in cfg]
    if len(given) != 1:
        raise ConfigError("exactly one of 'preset', 'points', 'csv' is required", "problem/initial")
    if "preset" in cfg:
        return InitialData.preset(cfg["preset"], cfg.get("A"))
    if "A" in cfg:
        raise ConfigError("'A' only applies to presets", "problem/initial/A")
    if "points" in cfg:
        return InitialData.sampled(cfg["points"])
    return InitialData.from_csv(base / cfg["csv"])


def load_config(path) -> RunConfig:
    """Parse, schema-validate and build every object named in a config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", str(path)) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", str(path)) from exc
    errors = sorted(jsonschema.Draft7Validator(CONFIG_SCHEMA).iter_errors(raw),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise ConfigError(e.message, "/".join(map(str, e.absolute_path)) or "<root>")
    base = path.parent
    p = raw["problem"]
    try:
        potential = _build("problem/potential", _potential, p["potential"], base) if "potential" in p else None
        initial = _build("problem/initial", _initial, p["initial"], base)
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc}", "problem") from exc
    deg = (p["degenerate"]["d"], p["degenerate"]["p"]) if "degenerate" in p else None
    domain = _build("problem/domain", Domain1D, *p.get("domain", (0.0, 1.0)))
    spec = None
    if potential is not None or deg is not None:
        spec = _build("problem", ProblemSpec, domain, p.get("nu", 1.0), potential, initial,
                      p.get("bc", "dirichlet"), deg)
    bc = spec.bc if spec is not None else p.get("bc", "dirichlet")

    solve_cfg = None
    if "solve" in raw:
        s = raw["solve"]
        solve_cfg = _build("solve", SolveConfig, **s)

    c = raw.get("check", {})
    s_interval = tuple(c["s_interval"]) if "s_interval" in c else None
    if s_interval is not None and not s_interval[0] < s_interval[1]:
        raise ConfigError("need lo < hi", "check/s_interval")
    lambda1 = _build("check/lambda1_override", lambda: SpectralInfo(bc, domain, c.get("lambda1_override")).lambda1)
    sandwich = _build("check/sandwich", analysis.SandwichBounds, **c["sandwich"]) if "sandwich" in c else None
    wang = None
    if "wang" in c:
        wang = (c["wang"]["d"], c["wang"]["p"])
        if wang[0] < 0 or not wang[1] > 1:
            raise ConfigError("need d >= 0 and p > 1", "check/wang")
    grid_n = c.get("grid_n", solve_cfg.n if solve_cfg else 400)

    sw = {"d_samples": 41, "p_samples": 41, "d_max": 2.0, "p_max": 3.0, "n": 400}
    sw.update(raw.get("sweep", {}))
    for k in ("d_samples", "p_samples"):
        if sw[k] < sweep_mod.MIN_SAMPLES:
            raise ConfigError(f"must be >= {sweep_mod.MIN_SAMPLES}", f"sweep/{k}")
    if not sw["d_max"] > 0:
        raise ConfigError("must be positive", "sweep/d_max")
    if not sw["p_max"] > 1:
        raise ConfigError("must exceed 1", "sweep/p_max")
    return RunConfig(raw, spec, initial, domain, solve_cfg, s_interval, lambda1, grid_n, sandwich, wang, sw,
                     raw.get("outputs", {}), raw.get("expect", "none"))


# --------------------------------------------------------------------------
# Subcommands. Each returns (exit code, {file name: content}, stdout text).
# --------------------------------------------------------------------------


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=analysis._jsonable) + "\n"


def _expect_code(cfg: RunConfig, traj) -> int:
    blown = traj.outcome == "blown_up"
    if cfg.expect == "blowup":
        return EXIT_OK if blown else EXIT_BLOWUP
    return EXIT_BLOWUP if blown else EXIT_OK


def _need_spec(cfg: RunConfig):
    if cfg.spec is None:
        raise ConfigError("'potential' or 'degenerate' is required for this command", "problem/potential")


def _need_solve(cfg: RunConfig):
    _need_spec(cfg)
    if cfg.solve is None:
        raise ConfigError("a 'solve' section is required", "solve")


def _run(cfg: RunConfig):
    traj = solve(cfg.spec, cfg.solve)
    if traj.outcome == "stalled":
        raise RuntimeError(f"time step underflow at t={traj.t_stop!r} without growth")
    return traj


def _summary(traj) -> dict:
    return {
        "outcome": traj.outcome,
        "t_stop": traj.t_stop,
        "frames": len(traj.frames),
        "accepted_steps": traj.accepted,
        "rejected_steps": traj.rejected,
        "clamped_nodes": traj.clamped_nodes,
        "blowup": traj.blowup.as_dict() if traj.blowup else None,
    }


def cmd_solve(cfg: RunConfig, args):
    _need_solve(cfg)
    traj = _run(cfg)
    files = {cfg.outputs.get("csv", "trajectory.csv"): lambda p: traj.to_csv(p)}
    if "frames" in cfg.outputs:
        files[cfg.outputs["frames"]] = lambda p: traj.frames_to_csv(p)
    summary = _summary(traj)
    files[cfg.outputs.get("json", "solve.json")] = _dumps(summary)
    return _expect_code(cfg, traj), files, _dumps(summary)


def _check_report(cfg: RunConfig) -> analysis.ConditionReport:
    spec = cfg.spec
    grid = GridSpec(cfg.domain, cfg.grid_n)
    report = analysis.ConditionReport()
    if (cfg.s_interval is not None or cfg.sandwich is not None) and spec is None:
        _need_spec(cfg)
    if cfg.s_interval is not None and not spec.is_degenerate:
        report.entries += analysis.evaluate_decay_criteria(spec, cfg.s_interval, cfg.lambda1, grid).entries
    if cfg.sandwich is not None and not spec.is_degenerate:
        if cfg.s_interval is None:
            raise ConfigError("sandwich check needs s_interval", "check/s_interval")
        u0 = sample_initial_data(spec.initial, grid, spec.bc)
        report.entries += analysis.evaluate_blowup_criterion(
            u0, spec.nu, cfg.sandwich, spec.potential, cfg.s_interval).entries
    if cfg.wang is not None:
        u0 = sample_initial_data(cfg.initial, grid, "mixed")
        report.entries += analysis.evaluate_wang_criteria(u0, *cfg.wang).entries
    if not report.entries:
        raise ConfigError("nothing to check: give s_interval, sandwich or wang", "check")
    return report


#: criterion groups sufficient for an ``--assert`` claim
ASSERT_GROUPS = {
    "decay": [("positivity",), ("inf_bound",), ("avg_bound",), ("wang_decay",), ("e_set",)],
    "blowup": [("sandwich", "blowup_criterion"), ("wang_blowup",)],
}


def assertion_holds(report: analysis.ConditionReport, claim: str) -> bool:
    ids = {e.id for e in report}
    return any(all(i in ids for i in grp) and report.holds(*grp) for grp in ASSERT_GROUPS[claim])


def cmd_check(cfg: RunConfig, args):
    report = _check_report(cfg)
    text = report.to_text() + "\n"
    files = {cfg.outputs.get("json", "report.json"): report.to_json() + "\n",
             cfg.outputs.get("text", "report.txt"): text}
    code = EXIT_OK
    if args.assert_ is not None:
        ok = assertion_holds(report, args.assert_)
        text += f"assert {args.assert_}: {'holds' if ok else 'FAILS'}\n"
        code = EXIT_OK if ok else EXIT_ASSERT
    return code, files, text


def cmd_sweep(cfg: RunConfig, args):
    sw = cfg.sweep
    grid = GridSpec(cfg.domain, sw["n"])
    result = sweep_mod.run_sweep(cfg.initial, grid, sw["d_samples"], sw["p_samples"], sw["d_max"], sw["p_max"])
    contour = sweep_mod.extract_contour(result)
    files = {cfg.outputs.get("csv", "sweep.csv"): lambda p: sweep_mod.write_csv(result, p),
             cfg.outputs.get("svg", "sweep.svg"): sweep_mod.render_svg(result, contour)}
    text = (f"level {contour.level:.6f}\ncells {result.values.size} decaying {contour.cells_decaying}\n"
            f"polylines {len(contour.segments)}\n")
    return EXIT_OK, files, text


def cmd_predict(cfg: RunConfig, args):
    _need_spec(cfg)
    spec = cfg.spec
    grid = GridSpec(spec.domain, cfg.solve.n if cfg.solve else cfg.grid_n)
    u0 = sample_initial_data(spec.initial, grid, spec.bc)
    u0_l2 = l2_norm(u0)
    entries = []
    integrand = None
    if cfg.sandwich is not None and cfg.solve is not None and not spec.is_degenerate:
        traj = _run(cfg)
        integrand = analysis.xi_integrand(traj, path_over_trajectory(traj, "xi"))
    try:
        preds = analysis.predict_blowup(u0_l2, cfg.sandwich, spec.degenerate, integrand, spec.domain.measure)
    except NotReachedError as exc:
        entries.append({"method": "PaperGeneric", "t_prime": None, "error": str(exc)})
        preds = analysis.predict_blowup(u0_l2, None, spec.degenerate, None, spec.domain.measure)
    entries += [p.as_dict() for p in preds]
    if not entries:
        raise ConfigError("no prediction applies: give problem/degenerate or check/sandwich with solve",
                          "problem")
    body = _dumps({"u0_l2": u0_l2, "predictions": entries})
    return EXIT_OK, {cfg.outputs.get("json", "predictions.json"): body}, body


def verify_run(cfg: RunConfig) -> tuple[dict, bool]:
    """Solve, extract paths and check every invariant; returns (report, all asserted hold)."""
    _need_solve(cfg)
    spec = cfg.spec
    traj = _run(cfg)
    path = path_over_trajectory(traj, "xi")
    xi_path = chi_path = None
    if spec.is_degenerate:
        d, p = spec.degenerate
        xi_path = path_over_trajectory(traj, ("xi_weighted", d))
        chi_path = path_over_trajectory(traj, ("chi", p))
    lam = None if spec.is_degenerate else cfg.lambda1
    decay = analysis.verify_trajectory(traj, path, lam, xi_path, chi_path)
    mv_res = float(np.max(np.abs(path.residual) / np.maximum(1.0, np.abs(path.m))))
    checks = {"envelopes": decay.holds(), "mean_value_residual": mv_res <= 1e-10}
    # frame-level quadrature cannot resolve the identity through a blow-up
    if traj.outcome == "completed":
        checks["energy_identity"] = decay.max_energy_residual <= 1e-3
    out = {"run": _summary(traj), "decay": decay.as_dict(),
           "mean_value_residual_max": mv_res,
           "xi_max_jump": path.max_jump}
    if cfg.sandwich is not None or spec.is_degenerate:
        energy = analysis.energy_monitor(traj, cfg.sandwich if not spec.is_degenerate else None, spec.degenerate)
        out["energy"] = energy.as_dict()
        checks["energy_monotone"] = energy.monotone
    if traj.outcome == "completed" and traj.times[-1] > traj.times[0]:
        try:
            out["fitted_rate"] = analysis.fit_decay_rate(traj)
        except ValueError:
            pass
    out["checks"] = checks
    return out, all(checks.values())


def cmd_verify(cfg: RunConfig, args):
    out, ok = verify_run(cfg)
    body = _dumps(out)
    code = EXIT_OK if ok else EXIT_ASSERT
    if code == EXIT_OK:
        blown = out["run"]["outcome"] == "blown_up"
        if blown != (cfg.expect == "blowup"):
            code = EXIT_BLOWUP
    return code, {cfg.outputs.get("json", "verify.json"): body}, body


COMMANDS = {"solve": cmd_solve, "check": cmd_check, "sweep": cmd_sweep,
            "predict": cmd_predict, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message, "argv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="meanvalue", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--quiet", action="store_true", help="suppress the timestamp line")
        sp.add_argument("--seedless-deterministic", action="store_true",
                        help="accepted for forward compatibility; runs are always deterministic")
        if name == "check":
            sp.add_argument("--assert", dest="assert_", choices=sorted(ASSERT_GROUPS))
    return parser


def _write(out_dir: Path, files: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        target = out_dir / name
        try:
            if callable(content):
                content(target)
            else:
                target.write_text(content)
        except OSError as exc:
            raise OSError(f"{target}: {exc.strerror or exc}") from exc


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        code, files, text = COMMANDS[args.command](cfg, args)
        _write(Path(args.out), files)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (MeanValueError, OSError, RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_RUNTIME
    if not args.quiet:
        print(f"# {args.command} finished {_dt.datetime.now().isoformat(timespec='seconds')}", file=stdout)
    stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_cli())
