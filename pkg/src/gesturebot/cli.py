"""Command-line front end: fk, solve, run, bench."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .harness import (
    ScenarioError,
    load_scenario,
    run_scenario,
    timeline_to_csv,
    timeline_to_jsonl,
    _splitmix64,
)
from .ik import InvalidParamsError, solve_ik
from .kinematics import JOINT_NAMES, JointAngles, Pose9, fk_array, forward_kinematics
from .runtime import run_motion  # noqa: F401  (re-exported for scripting)


def _parse_floats(text: str, n: int, what: str) -> np.ndarray:
    try:
        vals = np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise SystemExit(f"error: {what} must be comma-separated numbers: {text!r}")
    if vals.shape != (n,):
        raise SystemExit(f"error: {what} needs exactly {n} values, got {len(vals)}")
    return vals


def _load_config_arg(args) -> RunConfig:
    if getattr(args, "config", None):
        try:
            return load_config(args.config)
        except ConfigError as exc:
            raise SystemExit(f"error: {exc}")
    return RunConfig()


def _write_out(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise SystemExit(f"error: cannot write {path}: {exc}")


def cmd_fk(args):
    cfg = _load_config_arg(args)
    angles = _parse_floats(args.angles, 8, "--angles")
    if args.degrees:
        angles = np.deg2rad(angles)
    pose = forward_kinematics(JointAngles.from_array(angles), cfg.links)
    for name, coords in (("right_hand", pose.right_hand),
                         ("left_hand", pose.left_hand),
                         ("head_center", pose.head_center)):
        print(f"{name}: {coords[0]:.6f} {coords[1]:.6f} {coords[2]:.6f}")
    return 0


def cmd_solve(args):
    cfg = _load_config_arg(args)
    if args.target is not None:
        target = Pose9.from_array(_parse_floats(args.target, 9, "--target"))
    elif args.angles is not None:
        angles = _parse_floats(args.angles, 8, "--angles")
        target = Pose9.from_array(fk_array(angles, cfg.links))
    else:
        raise SystemExit("error: solve needs --target or --angles")
    params = replace(cfg.bma, rng_seed=args.seed if args.seed is not None else cfg.seed)
    try:
        report = solve_ik(target, params, cfg.links, cfg.limits)
    except InvalidParamsError as exc:
        raise SystemExit(f"error: {exc}")
    result = {
        "angles": {n: getattr(report.best_angles, n) for n in JOINT_NAMES},
        "residual": report.best_cost,
        "generations": report.generations_run,
        "evaluations": report.evaluations,
        "succeeded": report.succeeded,
    }
    print(json.dumps(result, indent=2))
    print(f"wall time: {report.wall_time:.3f}s", file=sys.stderr)
    if args.out:
        if args.format == "csv":
            lines = ["generation,best_cost,evaluations,lm_runs,gamma_min,gamma_max"]
            for rec in report.trace:
                d = rec.to_dict()
                lines.append(",".join("" if d[k] is None else repr(d[k]) for k in
                                      ("generation", "best_cost", "evaluations",
                                       "lm_runs", "gamma_min", "gamma_max")))
            _write_out(args.out, "\n".join(lines) + "\n")
        else:
            _write_out(args.out, report.trace_jsonl())
    return 0


def cmd_run(args):
    cfg = _load_config_arg(args)
    if args.seed is not None:
        cfg.seed = args.seed
    try:
        events = load_scenario(args.scenario)
        timeline = run_scenario(cfg, events)
    except (ScenarioError, ConfigError, InvalidParamsError) as exc:
        raise SystemExit(f"error: {exc}")
    text = timeline_to_csv(timeline) if args.format == "csv" else timeline_to_jsonl(timeline)
    if args.out:
        _write_out(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args):
    cfg = _load_config_arg(args)
    seed = args.seed if args.seed is not None else cfg.seed
    rng = np.random.default_rng(_splitmix64(seed, 0))
    rows = []
    successes = 0
    for i in range(args.n):
        theta = rng.uniform(cfg.limits.lower, cfg.limits.upper)
        target = Pose9.from_array(fk_array(theta, cfg.links))
        params = replace(cfg.bma, rng_seed=_splitmix64(seed, i + 1))
        report = solve_ik(target, params, cfg.links, cfg.limits)
        joint_err = float(np.max(np.abs(report.best_angles.to_array() - theta)))
        successes += report.succeeded
        rows.append({
            "trial": i,
            "best_cost": report.best_cost,
            "succeeded": report.succeeded,
            "generations": report.generations_run,
            "evaluations": report.evaluations,
            "wall_time": report.wall_time,
            "max_joint_error": joint_err,
        })
    times = sorted(r["wall_time"] for r in rows)
    summary = {
        "trials": args.n,
        "successes": successes,
        "success_rate": successes / args.n if args.n else math.nan,
        "median_wall_time": times[len(times) // 2] if times else math.nan,
        "joint_error_le_0.015": sum(1 for r in rows if r["succeeded"] and r["max_joint_error"] <= 0.015),
    }
    print(json.dumps(summary, indent=2))
    if args.out:
        _write_out(args.out, "\n".join(json.dumps(r) for r in rows) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gesturebot",
        description="Gesture-engine toolbox: forward/inverse kinematics, "
                    "scenario runs, and solver benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fk = sub.add_parser("fk", help="forward kinematics of one angle vector")
    p_fk.add_argument("--angles", default="0,0,0,0,0,0,0,0",
                      help="8 comma-separated joint angles (radians)")
    p_fk.add_argument("--degrees", action="store_true", help="interpret angles as degrees")
    p_fk.add_argument("--config", help="YAML config path")
    p_fk.set_defaults(func=cmd_fk)

    p_solve = sub.add_parser("solve", help="one-shot inverse kinematics")
    p_solve.add_argument("--target", help="9 comma-separated coordinates")
    p_solve.add_argument("--angles", help="derive the target from these 8 angles")
    p_solve.add_argument("--config", help="YAML config path")
    p_solve.add_argument("--seed", type=int)
    p_solve.add_argument("--out", help="write per-generation trace here")
    p_solve.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    p_solve.set_defaults(func=cmd_solve)

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--config", help="YAML config path")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out", help="write the timeline here (default stdout)")
    p_run.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="solver success-rate and runtime sweep")
    p_bench.add_argument("--n", type=int, default=100)
    p_bench.add_argument("--config", help="YAML config path")
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--out", help="write per-trial records here")
    p_bench.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
