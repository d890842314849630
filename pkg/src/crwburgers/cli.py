"""Command-line entry point: ``crwburgers {simulate,diagram,verify,classify}``.

Exit codes: 0 ok, 1 verification failed, 2 bad configuration,
3 invariant violation, 4 insufficient data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .automata import make_state, run, table1_row
from .errors import ConfigError, InsufficientData, InvariantViolation, NonBinary, OutOfRange
from .io import (
    staged_output, write_diagram_csv, write_diagram_svg, write_field_csv, write_json, write_pgm,
)
from .maxplus import RNG_ALGORITHM, make_rng
from .traffic import DiagramConfig, estimate_transitions, fundamental_diagram
from .verify import SUITES, run_suites

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_INVARIANT, EXIT_DATA = 0, 1, 2, 3, 4
OUT_ENV = "CRWBURGERS_OUT"

PRESETS = {
    "fig1": {"N": 30, "L": 1, "steps": 29, "vt0": 1, "set_vt0": {21: 0}, "vt_prev": 0},
    "fig2": {"N": 30, "L": 3, "steps": 29, "vt0": 3, "set_vt0": {8: 2, 21: 1}, "vt_prev": 0},
}


@dataclass
class SimulateConfig:
    N: int = 30
    L: int = 1
    steps: int = 29
    seed: int = 0
    u0: Optional[list] = None
    vt0: object = None
    vt_prev: object = 0
    set_vt0: dict = field(default_factory=dict)
    preset: Optional[str] = None

    def fields(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ConfigError("N must be a positive integer")
        if not self.L > 0:
            raise ConfigError("L must be positive")
        if not isinstance(self.steps, int) or self.steps < 0:
            raise ConfigError("steps must be a non-negative integer")
        if self.u0 is None:
            U0 = make_rng(self.seed).integers(0, int(self.L) + 1, size=self.N)
        else:
            U0 = np.asarray(self.u0)
        Vt0 = self._broadcast(self.L if self.vt0 is None else self.vt0, "vt0")
        Vt0 = np.array(Vt0, dtype=float)
        for j, v in self.set_vt0.items():
            j = int(j)
            if not 0 <= j < self.N:
                raise ConfigError(f"set_vt0 site {j} outside 0..{self.N - 1}")
            Vt0[j] = v
        VtPrev = self._broadcast(self.vt_prev, "vt_prev")
        if U0.shape != (self.N,):
            raise ConfigError(f"u0 has {U0.size} entries, expected N={self.N}")
        return U0, Vt0, VtPrev

    def _broadcast(self, value, name):
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 0:
            return np.full(self.N, float(arr))
        if arr.shape != (self.N,):
            raise ConfigError(f"{name} has {arr.size} entries, expected N={self.N}")
        return arr


def _parse_list(text):
    if text is None:
        return None
    try:
        vals = [float(t) for t in str(text).replace(" ", "").split(",") if t != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse list {text!r}") from exc
    return [int(v) if v == int(v) else v for v in vals]


def _parse_scalar_or_list(text):
    if text is None:
        return None
    vals = _parse_list(text)
    return vals[0] if len(vals) == 1 else vals


def _parse_assignments(items):
    out = {}
    for item in items or []:
        try:
            j, v = item.split("=")
            out[int(j)] = float(v)
        except ValueError as exc:
            raise ConfigError(f"expected SITE=VALUE, got {item!r}") from exc
    return out


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _merge(config: dict, flags: dict) -> dict:
    merged = dict(config)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def _out_dir(args, config):
    return Path(args.out or os.environ.get(OUT_ENV) or config.get("out") or "out")


def _formats(args, config, default):
    raw = args.format or config.get("format")
    if raw is None:
        return set(default)
    chosen = {f.strip().lower() for f in (raw if isinstance(raw, list) else raw.split(","))}
    unknown = chosen - set(default)
    if unknown:
        raise ConfigError(f"unsupported formats {sorted(unknown)}; choose from {sorted(default)}")
    return chosen


def _write_error(out_dir: Path, payload: dict):
    with staged_output(out_dir) as stage:
        write_json(stage / "error.json", payload)


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    flags = {
        "N": args.N, "L": args.L, "steps": args.steps, "seed": args.seed,
        "u0": _parse_list(args.u0), "vt0": _parse_scalar_or_list(args.vt0),
        "vt_prev": _parse_scalar_or_list(args.vt_prev), "preset": args.preset,
    }
    preset_name = flags["preset"] or config.get("preset")
    settings = dict(PRESETS[preset_name]) if preset_name else {}
    if preset_name not in (None, *PRESETS):
        raise ConfigError(f"unknown preset {preset_name!r}")
    settings = _merge(_merge(settings, config), flags)
    set_vt0 = {int(k): v for k, v in settings.get("set_vt0", {}).items()}
    set_vt0.update(_parse_assignments(args.set_vt0))
    settings["set_vt0"] = set_vt0
    settings = {k: v for k, v in settings.items() if k in SimulateConfig.__dataclass_fields__}
    try:
        cfg = SimulateConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    formats = _formats(args, config, ("csv", "pgm", "json"))
    out_dir = _out_dir(args, config)

    U0, Vt0, VtPrev = cfg.fields()
    try:
        state = make_state(U0, Vt0, VtPrev, cfg.L)
    except OutOfRange as exc:
        raise ConfigError(str(exc)) from exc
    try:
        traj = run(state, cfg.steps)
    except InvariantViolation as exc:
        _write_error(out_dir, {"error": "InvariantViolation", "message": str(exc),
                               "context": exc.context, "config": asdict(cfg)})
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    vt_scale = max(float(traj.L), float(np.max(traj.I0)))
    with staged_output(out_dir) as stage:
        if "csv" in formats:
            write_field_csv(stage / "U.csv", traj.U)
            write_field_csv(stage / "Vt.csv", traj.Vt)
            write_field_csv(stage / "X.csv", traj.X)
        if "pgm" in formats:
            write_pgm(stage / "U.pgm", traj.U, traj.L)
            write_pgm(stage / "Vt.pgm", traj.Vt, vt_scale)
        if "json" in formats:
            write_json(stage / "metadata.json", {
                "command": "simulate",
                "version": __version__,
                "config": asdict(cfg),
                "rng": RNG_ALGORITHM,
                "N": traj.N, "L": traj.L, "steps": traj.steps,
                "regime": traj.regime,
                "I0": traj.I0, "M": np.max(traj.I0),
                "VtMinus1": traj.VtMinus1,
                "mass": traj.mass,
                "flows": traj.flows(),
                "pgm_scale": {"U": traj.L, "Vt": vt_scale},
            })
    print(f"simulate: N={traj.N} L={traj.L} steps={traj.steps} -> {out_dir}")
    return EXIT_OK


def cmd_diagram(args) -> int:
    config = _load_config(args.config)
    flags = {
        "N": args.N, "L": args.L, "mode": args.mode, "seed": args.seed,
        "samples_per_density": args.samples, "total_samples": args.total_samples,
        "warmup": args.warmup, "last_step": args.last_step, "vt_min": args.vt_min,
        "vt_max": args.vt_max, "bin_width": args.bin_width, "tol": args.tol,
        "fixed_vt": True if args.fixed_vt else None,
    }
    settings = _merge(config, flags)
    settings = {k: v for k, v in settings.items() if k in DiagramConfig.__dataclass_fields__}
    try:
        cfg = DiagramConfig(**settings).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    formats = _formats(args, config, ("csv", "svg", "json"))
    out_dir = _out_dir(args, config)

    points = fundamental_diagram(cfg)
    try:
        est = estimate_transitions(points, cfg.L, cfg.vt_min, tol=cfg.tol, bin_width=cfg.bin_width)
    except InsufficientData as exc:
        _write_error(out_dir, {"error": "InsufficientData", "message": str(exc),
                               "config": asdict(cfg)})
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_DATA

    with staged_output(out_dir) as stage:
        if "csv" in formats:
            write_diagram_csv(stage / "diagram.csv", points)
        if "svg" in formats:
            write_diagram_svg(stage / "diagram.svg", points, cfg.L, est)
        if "json" in formats:
            write_json(stage / "transitions.json", {
                **asdict(est), "config": asdict(cfg), "version": __version__, "rng": RNG_ALGORITHM,
            })
    print(f"diagram: L={cfg.L} rho*=({est.rho_star_low:.3f}, {est.rho_star_high:.3f}) "
          f"q*={est.q_star:.4f} conjectured=({est.conjectured_rho_low:.4f}, "
          f"{est.conjectured_rho_high:.4f}, {est.conjectured_q:.4f})")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    names = args.suite or config.get("suite") or ["all"]
    if isinstance(names, str):
        names = names.split(",")
    bad = set(names) - set(SUITES) - {"all"}
    if bad:
        raise ConfigError(f"unknown suites {sorted(bad)}")
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    results = run_suites(names, seed=seed)
    report = {"passed": all(r["passed"] for r in results), "seed": seed, "suites": results}
    if args.out or os.environ.get(OUT_ENV) or config.get("out"):
        with staged_output(_out_dir(args, config)) as stage:
            write_json(stage / "verify.json", report)
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"{status} {r['suite']} ({r['checked']} checked)")
        if not r["passed"]:
            print(f"  failing instance: {json.dumps(r['failure'], default=str)}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_classify(args) -> int:
    values = []
    for token in args.values:
        if token not in ("0", "1"):
            raise NonBinary(f"expected 0 or 1, got {token!r}")
        values.append(int(token))
    row = table1_row(*values)
    number = 1 + int("".join(map(str, values)), 2)
    if args.json:
        print(json.dumps({"row": number, "inputs": values, "case": row.case.value,
                          "X_j": row.X_j, "X_j+1": row.X_j1, "U_next": row.U_next}))
    else:
        print(f"row {number}: case {row.case.value}  X_j={row.X_j}  X_j+1={row.X_j1}  "
              f"U_j^(n+1)={row.U_next}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help=f"output directory (env {OUT_ENV}, default ./out)")
    common.add_argument("--format", help="comma-separated subset of output formats")
    common.add_argument("--config", help="JSON config file; flags take precedence")

    parser = argparse.ArgumentParser(prog="crwburgers", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="run the CA and write rasters")
    sim.add_argument("--preset", choices=sorted(PRESETS))
    sim.add_argument("--N", type=int)
    sim.add_argument("--L", type=int)
    sim.add_argument("--steps", type=int)
    sim.add_argument("--u0", help="comma-separated initial car counts (default: random)")
    sim.add_argument("--vt0", help="scalar or comma list of initial maximum inflows")
    sim.add_argument("--vt-prev", help="scalar or comma list for the layer before n = 0")
    sim.add_argument("--set-vt0", action="append", metavar="SITE=VALUE")
    sim.set_defaults(func=cmd_simulate)

    dia = sub.add_parser("diagram", parents=[common], help="fundamental-diagram sweep")
    dia.add_argument("--N", type=int)
    dia.add_argument("--L", type=int)
    dia.add_argument("--mode", choices=["scatter", "controlled-density"])
    dia.add_argument("--samples", type=int, help="samples per density bin")
    dia.add_argument("--total-samples", type=int, help="scatter-mode sample count")
    dia.add_argument("--warmup", type=int)
    dia.add_argument("--last-step", type=int)
    dia.add_argument("--vt-min", type=int)
    dia.add_argument("--vt-max", type=int)
    dia.add_argument("--bin-width", type=float)
    dia.add_argument("--tol", type=float)
    dia.add_argument("--fixed-vt", action="store_true", help="one Vt0 draw shared by all samples")
    dia.set_defaults(func=cmd_diagram)

    ver = sub.add_parser("verify", parents=[common], help="run self-check suites")
    ver.add_argument("--suite", action="append", choices=[*SUITES, "all"])
    ver.set_defaults(func=cmd_verify)

    cls = sub.add_parser("classify", help="case label of one binary neighbourhood")
    cls.add_argument("values", nargs=5, metavar="B",
                     help="U[j-1] U[j] U[j+1] Vt[j] Vt[j+1]")
    cls.add_argument("--json", action="store_true")
    cls.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, NonBinary) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
