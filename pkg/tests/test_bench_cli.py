import json
import math

import numpy as np
import pytest

from rotogo.bench import BenchSpec, format_stats_csv, run_bench
from rotogo.cli import main
from rotogo.formula import to_ticks
from rotogo.scenarios import ScenarioConfig
from rotogo.signals import Signal, write_trace_csv


def tiny_scenario(**overrides) -> ScenarioConfig:
    base = dict(
        name="tiny",
        formula="G[0,2] (x > 0.5)",
        robot_start=(1.0, 1.0, 0.0, 0.0),
        env_start=(3.0, 3.0),
        mission_horizon=2.0,
        env_noise_std=0.0,
        seed=0,
        first_attempt_iterations=8,
        cmaes_iterations=4,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def goal_trace(tmp_path, xs):
    n = len(xs)
    signal = Signal(
        np.arange(n, dtype=np.int64) * to_ticks(0.1),
        {
            "x": np.asarray(xs, dtype=float),
            "y": np.full(n, 2.5),
            "vx": np.zeros(n),
            "vy": np.zeros(n),
            "xe": np.full(n, 2.5),
            "ye": np.full(n, 2.5),
        },
    )
    path = tmp_path / "trace.csv"
    write_trace_csv(signal, path)
    return path


# ---------------------------------------------------------------------------
# bench


def test_bench_outputs_and_reproducibility(tmp_path):
    spec = BenchSpec(
        scenario=tiny_scenario(),
        modes=("rotogo", "robustness"),
        episodes=2,
        base_seed=7,
        out_dir=tmp_path / "a",
    )
    result = run_bench(spec)
    assert [row.mode for row in result.stats] == ["rotogo", "robustness"]
    first = (tmp_path / "a" / "stats.csv").read_bytes()
    header = first.decode().splitlines()[0]
    assert header == "problem,mode,mean_robustness,mean_min_distance,success_rate,episodes"

    again = run_bench(
        BenchSpec(
            scenario=tiny_scenario(),
            modes=("rotogo", "robustness"),
            episodes=2,
            base_seed=7,
            out_dir=tmp_path / "b",
        )
    )
    assert (tmp_path / "b" / "stats.csv").read_bytes() == first

    traces = sorted(p.name for p in (tmp_path / "a" / "traces").iterdir())
    assert traces == [
        "tiny_robustness_000.csv",
        "tiny_robustness_001.csv",
        "tiny_rotogo_000.csv",
        "tiny_rotogo_001.csv",
    ]


def test_stats_recomputable_from_jsonl(tmp_path):
    spec = BenchSpec(scenario=tiny_scenario(), modes=("rotogo",), episodes=3, base_seed=1, out_dir=tmp_path)
    result = run_bench(spec)
    rows = [json.loads(line) for line in (tmp_path / "episodes.jsonl").read_text().splitlines()]
    assert len(rows) == 3
    finite = [r["final_robustness"] for r in rows if not isinstance(r["final_robustness"], str)]
    mean_rho = sum(finite) / len(finite)
    success = sum(1 for r in rows if r["success"]) / len(rows)
    mean_dist = sum(r["min_distance"] for r in rows) / len(rows)
    stats_line = (tmp_path / "stats.csv").read_text().splitlines()[1].split(",")
    assert float(stats_line[2]) == pytest.approx(mean_rho, abs=0)
    assert float(stats_line[3]) == pytest.approx(mean_dist, abs=1e-15)
    assert float(stats_line[4]) == success
    assert int(stats_line[5]) == 3


def test_parallel_workers_reproduce_serial_output(tmp_path):
    serial = BenchSpec(scenario=tiny_scenario(), modes=("rotogo",), episodes=2, base_seed=9, out_dir=tmp_path / "s")
    parallel = BenchSpec(
        scenario=tiny_scenario(), modes=("rotogo",), episodes=2, base_seed=9,
        out_dir=tmp_path / "p", workers=2,
    )
    run_bench(serial)
    run_bench(parallel)
    assert (tmp_path / "p" / "stats.csv").read_bytes() == (tmp_path / "s" / "stats.csv").read_bytes()
    assert (tmp_path / "p" / "episodes.jsonl").read_bytes() == (tmp_path / "s" / "episodes.jsonl").read_bytes()


def test_bench_episode_seeds_derive_from_base():
    spec = BenchSpec(scenario=tiny_scenario(), modes=("rotogo",), episodes=2, base_seed=40)
    result = run_bench(spec)
    seeds = [run.seed for _, run in result.results["rotogo"]]
    assert seeds == [40, 41]


def test_paired_static_avoid_rows_favor_rotogo(tmp_path):
    # One static episode per mode of the avoid scenario: the rotogo row's
    # min distance is at least the robustness row's.
    from dataclasses import replace
    from rotogo.scenarios import scenario_phi_avoid

    scenario = replace(scenario_phi_avoid(), env_noise_std=0.0)
    spec = BenchSpec(scenario=scenario, modes=("rotogo", "robustness"), episodes=1, base_seed=3, out_dir=tmp_path)
    result = run_bench(spec)
    rows = {row.mode: row for row in result.stats}
    assert len(rows) == 2
    assert rows["rotogo"].mean_min_distance >= rows["robustness"].mean_min_distance
    lines = (tmp_path / "stats.csv").read_text().splitlines()
    assert len(lines) == 3  # header + one row per mode


def test_format_stats_csv_handles_all_infinite():
    from rotogo.mpc import StatsRow

    row = StatsRow("p", "rotogo", 1, math.nan, 1, 0, 0.0, 1.0)
    text = format_stats_csv([row])
    assert "nan" in text


# ---------------------------------------------------------------------------
# CLI


def test_monitor_satisfied_exit_zero(tmp_path, capsys):
    trace = goal_trace(tmp_path, [4.5] * 5)
    code = main(["monitor", "F[0,0.4] (x > 4)", str(trace)])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict: satisfied" in out
    assert "robustness: 0.5" in out


def test_monitor_violated_exit_one(tmp_path, capsys):
    trace = goal_trace(tmp_path, [1.0] * 5)
    code = main(["monitor", "G[0,0.4] (x > 100)", str(trace)])
    assert code == 1
    assert "verdict: violated" in capsys.readouterr().out


def test_monitor_missing_file_exit_two(tmp_path, capsys):
    code = main(["monitor", "(x > 0)", str(tmp_path / "nope.csv")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_monitor_reports_rotogo_value(tmp_path, capsys):
    trace = goal_trace(tmp_path, [-1.0, 2.0, 2.0])
    code = main(["monitor", "G[0,0.2] (x > 0)", str(trace), "--rotogo-from", "0"])
    out = capsys.readouterr().out
    assert code == 1
    assert "rotogo[t_hat=0.0]: -inf" in out


def test_progress_prints_each_step(tmp_path, capsys):
    trace = goal_trace(tmp_path, [-1.0, 5.0, 6.0])
    code = main(["progress", "F[0,0.2] (x > 4)", str(trace)])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert out[0].startswith("t=0:")
    assert out[2] == "t=0.2: true"
    assert out[-1].endswith("satisfied")


def test_run_writes_trace_and_summary(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    tiny_scenario().save(cfg_path)
    out_dir = tmp_path / "out"
    code = main(["run", "--config", str(cfg_path), "--out", str(out_dir), "--seed", "3"])
    assert code == 0
    assert (out_dir / "tiny_rotogo_3.csv").exists()
    summary = json.loads((out_dir / "tiny_rotogo_3.json").read_text())
    assert summary["scenario"] == "tiny" and summary["seed"] == 3


def test_bench_cli_runs(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    tiny_scenario().save(cfg_path)
    out_dir = tmp_path / "bench"
    code = main([
        "bench", "--config", str(cfg_path), "--episodes", "1",
        "--modes", "rotogo", "--seed", "5", "--out", str(out_dir),
    ])
    assert code == 0
    assert (out_dir / "stats.csv").exists()
    assert "success_rate" in capsys.readouterr().out


def test_plan_prints_via_points(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    tiny_scenario().save(cfg_path)
    code = main(["plan", "--config", str(cfg_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "via points:" in out


def test_selftest_zero_cases_vacuous(capsys):
    code = main(["selftest", "--cases", "0"])
    out = capsys.readouterr().out
    assert code == 0
    assert "warning" in out
    assert "selftest: pass" in out


def test_selftest_small_run(capsys):
    code = main(["selftest", "--cases", "5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "progression_equivalence" in out


def test_monitor_uses_config_aliases(tmp_path, capsys):
    from rotogo.scenarios import scenario_phi_avoid

    cfg_path = tmp_path / "avoid.json"
    scenario_phi_avoid().save(cfg_path)
    trace = goal_trace(tmp_path, [4.5] * 5)
    code = main(["monitor", "F[0,0.4] goal", str(trace), "--config", str(cfg_path)])
    assert code == 0
