"""Command-line interface.

    anisosc simulate   --omega 2,3 --init 1,0,0,1 --t-max 100 --n-samples 4096 --out run.csv
    anisosc invariants --omega 2,3 --point 1,0.3,0.2,1
    anisosc verify brackets|canonical|genfunc|epsilon [--n-points N] [--seed S]
    anisosc sweep [brackets|canonical|genfunc] --omega1 1.5,2,3 --omega2 2,3.5 [--workers 4]

Every option may also come from ``--config file.json`` (keys are the option
names with dashes replaced by underscores, plus ``command``/``check``);
explicit flags win.  Exit status: 0 pass, 1 verification failure, 2 bad
configuration, 3 runtime or numerical error (details as JSON on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from itertools import product

import numpy as np

from .dynamics import evolve_trajectory, trajectory_invariants
from .errors import AnisoscError, ConfigError
from .genfunc import GenFuncKind, check_gradients, check_legendre
from .invariants import (
    aniso_invariants_closed,
    aniso_invariants_pauli,
    convention_signs,
    epsilon_invariants,
)
from .phase_space import DEFAULT_TOLERANCES, FrequencySpec, RealPhasePoint
from .poisson import BracketBasis, verify_canonical, verify_su2
from .sampling import branch_safe_points, uniform_points
from .transforms import BranchPolicy, complexify_components, forward_components

COMMANDS = ("simulate", "invariants", "verify", "sweep")
CHECKS = ("brackets", "canonical", "genfunc", "epsilon")
CHECK_TOLERANCES = {
    "brackets": 1e-8,
    "canonical": 1e-9,
    "genfunc": 1e-9,
    "epsilon_slope": 0.1,
    "epsilon_exact": 1e-14,
}
CSV_HEADER = ["t", "q1", "q2", "p1", "p2", "theta1", "theta2", "I0", "I1", "I2", "I3", "branch_crossings"]
# enum-style command names accepted in config files
_ALIASES = {
    "Simulate": ("simulate", None),
    "Invariants": ("invariants", None),
    "VerifyBrackets": ("verify", "brackets"),
    "VerifyCanonical": ("verify", "canonical"),
    "VerifyGenfunc": ("verify", "genfunc"),
    "VerifyEpsilon": ("verify", "epsilon"),
    "Sweep": ("sweep", None),
}


@dataclass
class RunConfig:
    command: str = None
    check: str = None
    omega: tuple = None
    init: tuple = None
    t_max: float = None
    n_samples: int = None
    n_points: int = 1000
    seed: int = 42
    eps: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    tolerances: dict = field(default_factory=dict)
    unwrap: bool = True
    out: str = None
    omega1: tuple = None
    omega2: tuple = None
    workers: int = 1

    def tol(self, name: str) -> float:
        defaults = {**DEFAULT_TOLERANCES, **CHECK_TOLERANCES}
        return float(self.tolerances.get(name, defaults[name]))

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"{self.command}: missing {', '.join('--' + m.replace('_', '-') for m in missing)}")

    def frequency(self) -> FrequencySpec:
        self.require("omega")
        try:
            return FrequencySpec(self.omega)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def start(self) -> RealPhasePoint:
        self.require("init")
        if len(self.init) % 2:
            raise ConfigError("--init needs q1..qn,p1..pn")
        return RealPhasePoint.from_flat(self.init)


# parsing ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text):
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _tolerance(text):
    name, sep, value = str(text).partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="anisosc", description="Anisotropic oscillator invariants and checks.")
    ap.add_argument("command", nargs="?", help=" | ".join(COMMANDS))
    ap.add_argument("check", nargs="?", help="for verify: " + " | ".join(CHECKS) + "; for sweep: brackets | canonical | genfunc")
    # every default is None so that config-file values survive unless overridden
    ap.add_argument("--omega", type=_floats)
    ap.add_argument("--init", "--point", dest="init", type=_floats)
    ap.add_argument("--t-max", type=float)
    ap.add_argument("--n-samples", type=int)
    ap.add_argument("--n-points", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--eps", type=_floats)
    ap.add_argument("--tol", type=_tolerance, action="append", metavar="NAME=VALUE")
    ap.add_argument("--unwrap", type=_bool)
    ap.add_argument("--config")
    ap.add_argument("--out")
    ap.add_argument("--omega1", type=_floats, help="sweep grid values for w1")
    ap.add_argument("--omega2", type=_floats, help="sweep grid values for w2")
    ap.add_argument("--workers", type=int)
    return ap


def _from_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    if data.get("command") in _ALIASES:
        data["command"], alias_check = _ALIASES[data["command"]]
        data.setdefault("check", alias_check)
    conv = {"omega": _floats, "init": _floats, "eps": _floats, "omega1": _floats, "omega2": _floats, "unwrap": _bool}
    if "point" in data:
        data.setdefault("init", data.pop("point"))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        for key, fn in conv.items():
            if data.get(key) is not None:
                val = data[key]
                data[key] = fn(",".join(map(str, val)) if isinstance(val, list) else val)
    except argparse.ArgumentTypeError as exc:
        raise ConfigError(str(exc)) from exc
    return data


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = _from_file(ns.config) if ns.config else {}
    tolerances = dict(values.pop("tolerances", {}) or {})
    for key, val in vars(ns).items():
        if key in ("config", "tol") or val is None:
            continue
        values[key] = val
    tolerances.update(dict(ns.tol or []))
    cfg = RunConfig(**values, tolerances=tolerances)
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cfg.command!r}")
    if cfg.command == "verify" and cfg.check not in CHECKS:
        raise ConfigError(f"verify needs a check in {CHECKS}, got {cfg.check!r}")
    if cfg.command not in ("verify", "sweep") and cfg.check is not None:
        raise ConfigError(f"unexpected argument {cfg.check!r} for {cfg.command}")
    known_tols = set(DEFAULT_TOLERANCES) | set(CHECK_TOLERANCES)
    bad = set(cfg.tolerances) - known_tols
    if bad:
        raise ConfigError(f"unknown tolerance names {sorted(bad)}; known: {sorted(known_tols)}")
    if cfg.n_points is not None and cfg.n_points < 1:
        raise ConfigError("--n-points must be positive")
    if cfg.workers < 1:
        raise ConfigError("--workers must be positive")
    return cfg


# commands -----------------------------------------------------------------------


def _fmt(x) -> str:
    return format(x, ".17g")


def simulate_csv(cfg: RunConfig) -> str:
    cfg.require("t_max", "n_samples")
    freq = cfg.frequency()
    if freq.n != 2:
        raise ConfigError("simulate writes two-axis trajectories; give two frequencies")
    traj = evolve_trajectory(cfg.start(), freq, cfg.t_max, cfg.n_samples)
    inv = trajectory_invariants(traj, use_unwrapped=cfg.unwrap)
    theta = traj.theta if cfg.unwrap else traj.principal_theta
    crossings = traj.branch_crossing_counts()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, t in enumerate(traj.times):
        row = [t, *traj.q[i], *traj.p[i], *theta[i], *inv[i]]
        writer.writerow([_fmt(v) for v in row] + [int(crossings[i])])
    return buf.getvalue()


def invariants_report(cfg: RunConfig) -> dict:
    freq = cfg.frequency()
    point = cfg.start()
    closed = aniso_invariants_closed(point, freq)
    pauli = aniso_invariants_pauli(point, freq, tol_imag=cfg.tol("imag"))
    signs = convention_signs(freq)
    aligned = closed.as_array() * np.array([1, signs[0], signs[1], 1])
    names = ("I0", "I1", "I2", "I3")
    return {
        "omega": list(freq.omegas),
        "point": list(point.as_flat()),
        "theta": list(closed.theta),
        "closed": dict(zip(names, map(float, closed.as_array()))),
        "pauli": dict(zip(names, map(float, pauli.as_array()))),
        "convention_signs": {"I1": signs[0], "I2": signs[1]},
        "difference": dict(zip(names, map(float, pauli.as_array() - aligned))),
        "residual_imag": pauli.residual_imag,
    }


def _report(check, cfg, freq, max_residual, tolerance, **extra):
    out = {
        "check_name": check,
        "n_points": cfg.n_points,
        "seed": cfg.seed,
        "omega": list(freq.omegas) if freq is not None else None,
        "max_residual": float(max_residual),
        "tolerance": tolerance,
        "pass": bool(max_residual < tolerance),
    }
    out.update(extra)
    return out


def verify_brackets(cfg: RunConfig, freq: FrequencySpec) -> dict:
    q, p = uniform_points(cfg.n_points, freq.n, seed=cfg.seed)
    rep = verify_su2(freq, (q, p))
    return _report("brackets", cfg, freq, rep.max_residual, cfg.tol("brackets"), residuals=rep.residuals)


def verify_canonical_map(cfg: RunConfig, freq: FrequencySpec) -> dict:
    q, p = branch_safe_points(cfg.n_points, freq, seed=cfg.seed)
    X, P = (np.array(v) for v in complexify_components(q, p))
    rep = verify_canonical(
        lambda a, b: forward_components(a, b, freq.omegas), (X, P), BracketBasis.COMPLEX_XP
    )
    return _report("canonical", cfg, freq, rep.max_residual, cfg.tol("canonical"), residuals=rep.residuals)


def verify_genfunc(cfg: RunConfig, freq: FrequencySpec) -> dict:
    q, p = branch_safe_points(cfg.n_points, freq, seed=cfg.seed)
    branch = BranchPolicy.principal()
    residuals, skipped = {}, []
    at_pole = any(abs(w - 1.0) < cfg.tol("pole") for w in freq.omegas)
    for kind in GenFuncKind:
        if at_pole and kind in (GenFuncKind.F1, GenFuncKind.F4):
            skipped.append(kind.value)
            continue
        residuals[kind.value] = check_gradients(kind, (q, p), freq, branch).max_residual
    if at_pole:
        skipped.append("legendre")
    else:
        residuals.update(check_legendre((q, p), freq, branch).residuals)
    return _report(
        "genfunc", cfg, freq, max(residuals.values()), cfg.tol("genfunc"),
        residuals=residuals, skipped=skipped,
    )


def epsilon_fit(point: RealPhasePoint, eps_grid) -> dict:
    """Errors of the first-order formulas against the closed forms at
    ``w = (1 + eps, 1 - eps)`` and their log-log slopes for I1, I2."""
    errors = []
    for eps in eps_grid:
        freq = FrequencySpec.from_epsilon(eps)
        s1, s2 = convention_signs(freq)
        closed = aniso_invariants_closed(point, freq).as_array() * np.array([1, s1, s2, 1])
        errors.append(np.abs(epsilon_invariants(point, eps).as_array() - closed))
    errors = np.array(errors)
    log_eps = np.log10(eps_grid)
    slopes = {}
    for mu in (1, 2):
        with np.errstate(divide="ignore"):
            slopes[f"I{mu}"] = float(np.polyfit(log_eps, np.log10(errors[:, mu]), 1)[0])
    return {
        "eps": [float(e) for e in eps_grid],
        "errors": {f"I{mu}": [float(v) for v in errors[:, mu]] for mu in range(4)},
        "slopes": slopes,
        "max_exact_error": float(errors[:, [0, 3]].max()),
    }


def verify_epsilon(cfg: RunConfig) -> dict:
    if cfg.init is None:
        cfg.init = (1.0, 0.0, 0.0, 1.0)
    if len(cfg.eps) < 2 or not all(0 < e < 1 for e in cfg.eps):
        raise ConfigError("--eps needs at least two values in (0, 1)")
    fit = epsilon_fit(cfg.start(), cfg.eps)
    slope_dev = max(abs(s - 2.0) for s in fit["slopes"].values())
    if not np.isfinite(slope_dev):
        slope_dev = np.inf
    exact_ok = fit["max_exact_error"] < cfg.tol("epsilon_exact")
    out = _report("epsilon", cfg, None, slope_dev, cfg.tol("epsilon_slope"), **fit)
    out["n_points"] = 1
    out["point"] = list(cfg.init)
    out["pass"] = bool(out["pass"] and exact_ok)
    return out


VERIFIERS = {
    "brackets": verify_brackets,
    "canonical": verify_canonical_map,
    "genfunc": verify_genfunc,
}


def _sweep_cell(args):
    check, omegas, cfg = args
    try:
        return VERIFIERS[check](cfg, FrequencySpec(omegas))
    except AnisoscError as exc:
        return {"check_name": check, "omega": list(omegas), "error": type(exc).__name__, "message": str(exc), "pass": False}


def sweep_lines(cfg: RunConfig) -> list:
    cfg.require("omega1", "omega2")
    check = cfg.check or "brackets"
    if check not in VERIFIERS:
        raise ConfigError(f"sweep check must be one of {sorted(VERIFIERS)}")
    cells = [(check, (w1, w2), cfg) for w1, w2 in product(cfg.omega1, cfg.omega2)]
    if cfg.workers == 1:
        return list(map(_sweep_cell, cells))
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        # map() yields in submission order, so output follows the grid
        return list(pool.map(_sweep_cell, cells))


def run(cfg: RunConfig):
    """Execute ``cfg``; returns ``(text, exit_status)``."""
    if cfg.command == "simulate":
        return simulate_csv(cfg), 0
    if cfg.command == "invariants":
        return json.dumps(invariants_report(cfg), indent=2) + "\n", 0
    if cfg.command == "verify":
        if cfg.check == "epsilon":
            rep = verify_epsilon(cfg)
        else:
            rep = VERIFIERS[cfg.check](cfg, cfg.frequency())
        return json.dumps(rep, indent=2) + "\n", 0 if rep["pass"] else 1
    lines = sweep_lines(cfg)
    text = "".join(json.dumps(rec) + "\n" for rec in lines)
    return text, 0 if all(rec["pass"] for rec in lines) else 1


def _fail(exc: Exception, status: int) -> int:
    json.dump({"error": type(exc).__name__, "message": str(exc), "exit_status": status}, sys.stderr)
    sys.stderr.write("\n")
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        text, status = run(cfg)
    except ConfigError as exc:
        return _fail(exc, 2)
    except (AnisoscError, ArithmeticError, ValueError) as exc:
        return _fail(exc, 3)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
