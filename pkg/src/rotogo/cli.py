"""Command line front end.

Subcommands: ``monitor`` (verdict and robustness of a trace), ``progress``
(step-by-step formula progression over a trace), ``plan`` (one planning
problem from a scenario's initial state), ``run`` (one MPC episode),
``bench`` (episode batches with statistics), and ``selftest`` (the
randomized property corpus).

Exit codes: ``monitor`` exits 0 when the trace satisfies the formula, 1 when
it violates it, and 2 on input errors.  ``selftest`` exits 0 only when every
property passes.  All other subcommands exit 0 on success and 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bench import BenchSpec, run_bench
from .cmaes import CmaesConfig, cmaes_minimize
from .dynamics import EnvState, RobotState
from .formula import to_seconds, to_ticks
from .mpc import mpc_run
from .parser import format_formula, parse_formula
from .planning import Trajectory, rollout
from .progression import monitor_step, start_monitor
from .scenarios import BUILTIN_SCENARIOS, MODES, ScenarioConfig, get_scenario
from .selftest import run_selftest
from .semantics import robustness, rotogo, sat
from .signals import read_trace_csv, write_trace_csv


def _fmt_value(v: float) -> str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return repr(v)


def _load_scenario(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        cfg = ScenarioConfig.load(args.config)
    elif getattr(args, "scenario", None):
        cfg = get_scenario(args.scenario)
    else:
        raise SystemExit("error: one of --config or --scenario is required")
    if getattr(args, "mode", None):
        cfg = cfg.with_mode(args.mode)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _aliases_from(args) -> dict:
    if getattr(args, "config", None):
        return ScenarioConfig.load(args.config).aliases
    return {}


def cmd_monitor(args) -> int:
    f = parse_formula(args.formula, aliases=_aliases_from(args))
    trace = read_trace_csv(args.trace)
    t0 = trace.t0
    verdict = sat(trace, t0, f)
    print(f"verdict: {'satisfied' if verdict else 'violated'}")
    print(f"robustness: {_fmt_value(robustness(trace, t0, f))}")
    if args.rotogo_from is not None:
        t_hat = to_ticks(args.rotogo_from)
        print(f"rotogo[t_hat={args.rotogo_from}]: {_fmt_value(rotogo(trace, t0, t_hat, f))}")
    return 0 if verdict else 1


def cmd_progress(args) -> int:
    f = parse_formula(args.formula, aliases=_aliases_from(args))
    trace = read_trace_csv(args.trace)
    monitor = start_monitor(f, trace.t0)
    print(f"t={to_seconds(trace.t0):g}: {format_formula(monitor.current)}")
    for i in range(len(trace) - 1):
        monitor = monitor_step(monitor, trace.t(i + 1), trace.state(i))
        print(f"t={to_seconds(monitor.anchor_time):g}: {format_formula(monitor.current)}")
    print(f"verdict after {monitor.step_count} steps: {monitor.verdict}")
    return 0


def cmd_plan(args) -> int:
    cfg = _load_scenario(args)
    f = cfg.validate()
    from .fasteval import eval_robustness_arrays
    from .planning import (
        clamp_robustness,
        limit_penalty,
        rollout_arrays,
        workspace_penalty,
    )

    robot = RobotState(*cfg.robot_start)
    env = EnvState(*cfg.env_start)
    duration = cfg.mission_horizon
    hz = 1.0 / cfg.trace_period
    start_pos = np.array([robot.x, robot.y])
    start_vel = np.array([robot.vx, robot.vy])
    n_samples = to_ticks(cfg.mission_horizon) // to_ticks(cfg.trace_period) + 1
    eval_times = np.arange(n_samples, dtype=np.int64) * to_ticks(cfg.trace_period)
    limits, workspace = cfg.limits(), cfg.workspace_box()

    def batch_objective(X):
        via = X.reshape(X.shape[0], cfg.via_points, 2)
        _, pos, vel, acc = rollout_arrays(via, start_pos, start_vel, duration, hz)
        comps = {
            "x": pos[..., 0], "y": pos[..., 1],
            "vx": vel[..., 0], "vy": vel[..., 1],
            "xe": np.full(pos.shape[:2], env.xe), "ye": np.full(pos.shape[:2], env.ye),
        }
        rho = eval_robustness_arrays(eval_times, comps, f)[:, 0]
        pen = workspace_penalty(pos, workspace) + limit_penalty(vel, acc, limits)
        return -clamp_robustness(rho) + pen

    config = CmaesConfig(
        population_size=cfg.population_size,
        initial_step_size=cfg.initial_step_size,
        warm_start_step_size=cfg.warm_start_step_size,
        max_iterations=cfg.first_attempt_iterations,
        seed=cfg.seed,
    )
    result = cmaes_minimize(None, np.tile(start_pos, cfg.via_points), config, batch_objective=batch_objective)
    best = result.best_x.reshape(cfg.via_points, 2)
    print(f"scenario: {cfg.name}")
    print(f"cost: {result.best_value!r}")
    if abs(result.best_value) < 1e7:
        print(f"robustness: {_fmt_value(-result.best_value)}")
    else:
        print("robustness: plan dominated by penalties")
    print("via points:")
    for j, (x, y) in enumerate(best, 1):
        print(f"  {j}: ({x:.4f}, {y:.4f})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        from .planning import ViaPointPlan

        traj = rollout(ViaPointPlan(best, duration), robot, hz)
        path = out / f"{cfg.name}_plan.csv"
        _write_plan_csv(traj, path)
        print(f"trajectory written to {path}")
    return 0


def _write_plan_csv(traj: Trajectory, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,x,y,vx,vy,ax,ay\n")
        for row in traj.rows():
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def cmd_run(args) -> int:
    cfg = _load_scenario(args)
    result = mpc_run(cfg)
    print(f"scenario: {result.scenario} mode: {result.mode} seed: {result.seed}")
    print(f"final robustness: {_fmt_value(result.final_robustness)}")
    print(f"success: {result.success}")
    print(f"min distance: {result.min_distance!r}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        trace_path = out / f"{result.scenario}_{result.mode}_{result.seed}.csv"
        write_trace_csv(result.trace, trace_path)
        summary_path = out / f"{result.scenario}_{result.mode}_{result.seed}.json"
        with open(summary_path, "w", encoding="utf-8") as fh:
            json.dump(result.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"trace written to {trace_path}")
    return 0


def cmd_bench(args) -> int:
    cfg = _load_scenario(args)
    modes = tuple(args.modes.split(",")) if args.modes else MODES
    spec = BenchSpec(
        scenario=cfg,
        modes=modes,
        episodes=args.episodes,
        base_seed=args.seed if args.seed is not None else 0,
        out_dir=Path(args.out) if args.out else None,
        workers=args.workers,
    )
    result = run_bench(spec)
    for row in result.stats:
        print(
            f"{row.problem} {row.mode}: success_rate={row.success_rate:.3f} "
            f"mean_robustness={row.mean_robustness:.4f} mean_min_distance={row.mean_min_distance:.4f} "
            f"episodes={row.episodes}"
        )
    for mode, failures in result.failures.items():
        for episode, message in failures:
            print(f"episode failed: mode={mode} episode={episode}: {message}", file=sys.stderr)
    if args.out:
        print(f"outputs written to {args.out}")
    return 0


def cmd_selftest(args) -> int:
    if args.cases <= 0:
        print("warning: --cases 0 requested; all properties pass vacuously")
    result = run_selftest(cases=args.cases, seed=args.seed)
    width = max(len(r.name) for r in result.reports)
    for report in result.reports:
        status = "pass" if report.passed else "FAIL"
        print(f"{report.name:<{width}}  cases={report.cases:<6d} failures={report.failures:<4d} {status}")
        if report.detail:
            print("  counterexample:")
            for line in report.detail.splitlines():
                print(f"    {line}")
    print("selftest:", "pass" if result.passed else "FAIL")
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotogo", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monitor", help="evaluate a formula over a trace CSV")
    p.add_argument("formula")
    p.add_argument("trace")
    p.add_argument("--rotogo-from", type=float, default=None, metavar="SECONDS",
                   help="also report robustness-to-go with the cut at this time")
    p.add_argument("--config", default=None, help="scenario config providing predicate aliases")
    p.set_defaults(fn=cmd_monitor)

    p = sub.add_parser("progress", help="print the progressed formula after each sample")
    p.add_argument("formula")
    p.add_argument("trace")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_progress)

    for name, fn, help_text in (
        ("plan", cmd_plan, "solve one planning problem from the initial state"),
        ("run", cmd_run, "run one MPC episode"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="scenario config JSON file")
        p.add_argument("--scenario", default=None, choices=sorted(BUILTIN_SCENARIOS))
        p.add_argument("--mode", default=None, choices=MODES)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(fn=fn)

    p = sub.add_parser("bench", help="run an episode batch and write statistics")
    p.add_argument("--config", default=None)
    p.add_argument("--scenario", default=None, choices=sorted(BUILTIN_SCENARIOS))
    p.add_argument("--modes", default=None, help="comma-separated subset of modes")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="base seed")
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("selftest", help="run the randomized property corpus")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest" and args.seed is None:
        from .selftest import DEFAULT_SEED

        args.seed = DEFAULT_SEED
    try:
        return args.fn(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
