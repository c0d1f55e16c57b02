import numpy as np

from rotogo.fasteval import TouchCounter, eval_robustness, eval_robustness_all, eval_robustness_arrays
from rotogo.formula import Interval, Pred, TOP, Until, Var, to_ticks
from rotogo.parser import parse_formula
from rotogo.semantics import robustness
from rotogo.signals import Signal
from rotogo.testgen import random_instance


def test_matches_reference_at_every_index():
    rng = np.random.default_rng(31)
    for _ in range(250):
        f, s = random_instance(rng)
        table = eval_robustness_all(s, f)
        for j in range(len(s)):
            assert float(table[j]) == robustness(s, s.t(j), f)


def test_matches_reference_with_general_until():
    # Force the non-trivial left-operand path.
    rng = np.random.default_rng(32)
    for _ in range(150):
        left, s = random_instance(rng, max_depth=2, max_temporal=1)
        right, _ = random_instance(rng, max_depth=2, max_temporal=1)
        lo = int(rng.integers(0, to_ticks(3.0)))
        interval = Interval(lo, lo + int(rng.integers(1, to_ticks(5.0))), bool(rng.random() < 0.5), bool(rng.random() < 0.5))
        f = Until(left, interval, right)
        table = eval_robustness_all(s, f)
        for j in range(len(s)):
            assert float(table[j]) == robustness(s, s.t(j), f)


def test_batched_rows_evaluate_independently():
    rng = np.random.default_rng(33)
    f, base = random_instance(rng)
    batch = 7
    comps = {
        name: np.vstack([col * (1.0 + 0.1 * b) for b in range(batch)])
        for name, col in base.components.items()
    }
    table = eval_robustness_arrays(base.times, comps, f)
    assert table.shape == (batch, len(base))
    for b in range(batch):
        single = Signal(base.times, {n: comps[n][b] for n in comps})
        expect = eval_robustness_all(single, f)
        assert np.array_equal(table[b], expect)


def test_eval_robustness_scalar_helper():
    rng = np.random.default_rng(34)
    f, s = random_instance(rng)
    t = s.t(len(s) // 2)
    assert eval_robustness(s, t, f) == robustness(s, t, f)


def test_touch_counter_tracks_distinct_samples_and_reads():
    s = Signal(
        np.arange(5, dtype=np.int64) * to_ticks(0.1),
        {"x": np.arange(5.0), "y": np.arange(5.0)},
    )
    f = parse_formula("G[0,0.4] ((x > 0) & (y > 1))")
    counter = TouchCounter()
    eval_robustness_all(s, f, counter)
    assert counter.samples == 5  # distinct sample slots
    assert counter.reads == 10  # two predicates over five samples


def test_constant_formulas_touch_nothing():
    s = Signal(np.arange(3, dtype=np.int64), {"x": np.zeros(3)})
    counter = TouchCounter()
    table = eval_robustness_all(s, TOP, counter)
    assert counter.samples == 0 and counter.reads == 0
    assert np.all(np.isposinf(table))


def test_matches_reference_at_mission_scale():
    # Benchmark-sized signals: 201 samples at 10 Hz with the reach-avoid
    # formula shape, checked at a spread of evaluation times.
    from rotogo.scenarios import scenario_phi_avoid

    rng = np.random.default_rng(35)
    f = scenario_phi_avoid().parsed_formula()
    n = 201
    times = np.arange(n, dtype=np.int64) * to_ticks(0.1)
    comps = {
        "x": rng.uniform(0, 5, n), "y": rng.uniform(0, 5, n),
        "vx": rng.uniform(-0.5, 0.5, n), "vy": rng.uniform(-0.5, 0.5, n),
        "xe": 2.5 + np.cumsum(rng.normal(0, 0.02, n)),
        "ye": 2.5 + np.cumsum(rng.normal(0, 0.02, n)),
    }
    s = Signal(times, comps)
    table = eval_robustness_all(s, f)
    for j in (0, 1, 50, 100, 195, 200):
        assert float(table[j]) == robustness(s, s.t(j), f), j


def test_windows_respect_open_and_closed_bounds():
    s = Signal(
        np.array([0, 1, 2, 3], dtype=np.int64) * to_ticks(1.0),
        {"x": np.array([0.0, 1.0, 2.0, 3.0])},
    )
    # F(1,3] x>0 at t=0: sup over x at {2,3} = 3
    f = Until(TOP, Interval(to_ticks(1.0), to_ticks(3.0), False, True), Pred(Var("x")))
    table = eval_robustness_all(s, f)
    assert table[0] == 3.0
    assert robustness(s, 0, f) == 3.0
