"""Command-line front end: identity suite, solve, sweep and residual checks.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
Floats are written with ``repr`` so output is byte-stable and re-parses to
the same values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import identities
from .exterior import contract_left, hodge
from .media import ETA, electric_vector
from .wwe import (
    SWEEP_PARAMS,
    THETA0,
    WWEConfig,
    angular_momentum,
    fields_at,
    potential,
    residual_report,
    solve,
    sweep,
    sweep_values,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CONFIG_FIELDS = ("r1", "r2", "omega", "epsilon", "mu", "B0", "height", "moment_of_inertia")
CONFIG_OPTIONAL = {"samples": 64, "fd_step": 1e-4}
CSV_HEADER = ("r", "E_r", "B_z_interior", "H_z_interior")


class ConfigError(Exception):
    pass


def load_config(path) -> tuple[WWEConfig, dict]:
    """Read a JSON config; returns the solver config and the run options."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_FIELDS) - set(CONFIG_OPTIONAL))
    if unknown:
        raise ConfigError(f"config: unknown field(s) {', '.join(unknown)}")
    values = {}
    for name in CONFIG_FIELDS:
        if name not in raw:
            raise ConfigError(f"config: missing field '{name}'")
        v = raw[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"config: field '{name}' must be a finite number, got {v!r}")
        values[name] = float(v)
    options = dict(CONFIG_OPTIONAL)
    if "samples" in raw:
        s = raw["samples"]
        if isinstance(s, bool) or not isinstance(s, int) or s < 1:
            raise ConfigError(f"config: field 'samples' must be a positive integer, got {s!r}")
        options["samples"] = s
    if "fd_step" in raw:
        h = raw["fd_step"]
        if isinstance(h, bool) or not isinstance(h, (int, float)) or not (h > 0 and math.isfinite(h)):
            raise ConfigError(f"config: field 'fd_step' must be a positive number, got {h!r}")
        options["fd_step"] = float(h)
    try:
        cfg = WWEConfig(**values)
    except ValueError as exc:
        raise ConfigError(f"config: {exc}") from exc
    return cfg, options


def _config_record(cfg: WWEConfig) -> dict:
    return {name: getattr(cfg, name) for name in CONFIG_FIELDS}


def _sample(sol, r: float) -> dict:
    # B and H are the theta^3 components of theta^0 _| *F and theta^0 _| *G,
    # so both equal B0 in the surrounding vacuum
    f = fields_at(sol, r)
    H_lab = contract_left(THETA0, hodge(sol.G(r), ETA), ETA)
    return {
        "r": float(r),
        "E_r": float(electric_vector(f.E_lab)[0]),
        "B": float(f.H_lab.components[3]),
        "H": float(H_lab.components[3]),
    }


def solve_record(cfg: WWEConfig, samples: int = 64, fd_step: float = 1e-4) -> dict:
    """The full solution record; key order is part of the output format."""
    sol = solve(cfg)
    radii = np.linspace(cfg.r1, cfg.r2, samples) if samples > 1 else np.array([cfg.r1])
    V, V_small = potential(sol)
    am = angular_momentum(sol)
    rep = residual_report(sol, h=fd_step)
    return {
        "config": _config_record(cfg),
        "K": sol.K_const,
        "L": sol.L_const,
        "samples": [_sample(sol, float(r)) for r in radii],
        "V_exact": V,
        "V_small_omega": V_small,
        "L_mech_z": am.L_mech_z,
        "L_em_numeric_z": am.L_em_numeric_z,
        "L_em_closed_magnitude": am.L_em_closed_magnitude,
        "residuals": {
            "dF_max": rep.dF_max,
            "dstarG_max": rep.dstarG_max,
            "jump_r1": rep.jump_r1,
            "jump_r2": rep.jump_r2,
        },
    }


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def samples_csv(record: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in record["samples"]:
        w.writerow([_fmt(s["r"]), _fmt(s["E_r"]), _fmt(s["B"]), _fmt(s["H"])])
    return buf.getvalue()


def sweep_records(rows) -> list:
    return [
        {
            "param": row.param,
            "V_exact": row.V_exact,
            "V_small_omega": row.V_small_omega,
            "L_em_numeric": row.L_em_numeric,
            "L_em_closed": row.L_em_closed,
            "error": row.error,
        }
        for row in rows
    ]


def sweep_csv(records: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = ("param", "V_exact", "V_small_omega", "L_em_numeric", "L_em_closed", "error")
    w.writerow(keys)
    for rec in records:
        w.writerow([(rec[k] or "") if k == "error" else _fmt(rec[k]) for k in keys])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# commands


def cmd_check_identities(args, ops: Optional[identities.Ops] = None) -> int:
    report = identities.run_suite(args.seed, args.cases, ops=ops)
    for res in report.results:
        status = "pass" if res.passed else "FAIL"
        if not res.enforced:
            status = "info" if not res.passed else "pass"
        print(f"{res.name:<16} {status:<4}  max_err={res.max_error:.3e}  {res.label}")
    print(f"seed={report.seed} cases={report.cases} elapsed={report.elapsed:.2f}s")
    if report.passed:
        return EXIT_OK
    for res in report.failures():
        print(f"identity violated: {res.name}: {res.label}", file=sys.stderr)
        print(json.dumps({"identity": res.name, "seed": report.seed, "case": res.worst_case}), file=sys.stderr)
    return EXIT_FAIL


def cmd_solve(args) -> int:
    cfg, opts = load_config(args.config)
    samples = args.samples if args.samples is not None else opts["samples"]
    if samples < 1:
        raise ConfigError("--samples must be >= 1")
    record = solve_record(cfg, samples, opts["fd_step"])
    text = samples_csv(record) if args.format == "csv" else to_json(record)
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg, _ = load_config(args.config)
    try:
        values = sweep_values(args.start, args.stop, args.steps)
    except ValueError as exc:
        raise ConfigError(f"invalid sweep bounds: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise ConfigError("invalid sweep bounds: not finite")
    records = sweep_records(sweep(cfg, args.param, values, workers=args.workers))
    text = sweep_csv(records) if args.format == "csv" else to_json(records)
    _emit(text, args.out)
    return EXIT_OK


def cmd_residual(args) -> int:
    cfg, opts = load_config(args.config)
    h = args.h if args.h is not None else opts["fd_step"]
    if not (h > 0 and math.isfinite(h)):
        raise ConfigError(f"finite-difference step must be positive, got {h!r}")
    rep = residual_report(solve(cfg), h=h)
    _emit(to_json(rep.as_dict()), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minkforms", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    ci = sub.add_parser("check-identities", help="run the seeded identity suite")
    ci.add_argument("--seed", type=int, default=1)
    ci.add_argument("--cases", type=int, default=1000)
    ci.set_defaults(func=cmd_check_identities)

    wwe = sub.add_parser("wwe", help="rotating insulator solver")
    wsub = wwe.add_subparsers(dest="wwe_command", required=True)

    s = wsub.add_parser("solve", help="solve one configuration")
    s.add_argument("--config", required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    sw = wsub.add_parser("sweep", help="sweep one parameter")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True)
    sw.add_argument("--format", choices=("json", "csv"), default="json")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    r = wsub.add_parser("residual", help="finite-difference residual report")
    r.add_argument("--config", required=True)
    r.add_argument("--h", type=float)
    r.add_argument("--out")
    r.set_defaults(func=cmd_residual)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check-identities" and args.cases < 1:
        parser.error("--cases must be >= 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
