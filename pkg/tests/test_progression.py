import math

import numpy as np
import pytest

from rotogo.formula import (
    And,
    Bottom,
    Interval,
    Not,
    Or,
    TOP,
    BOTTOM,
    Top,
    Until,
    to_ticks,
)
from rotogo.parser import parse_formula
from rotogo.progression import (
    FormulaSizeError,
    MonitorState,
    monitor_step,
    progress,
    progress_along,
    rotogo_via_progression,
    simplify,
    start_monitor,
)
from rotogo.semantics import robustness, rotogo, sat
from rotogo.signals import Signal
from rotogo.testgen import random_instance

SEC = 1_000_000


def make_signal(times_s, **comps):
    times = np.array([to_ticks(t) for t in times_s], dtype=np.int64)
    return Signal(times, {k: np.asarray(v, dtype=float) for k, v in comps.items()})


# ---------------------------------------------------------------------------
# progress


def test_constants_are_fixed_points():
    assert progress(TOP, SEC, {"x": 0.0}) == TOP
    assert progress(BOTTOM, SEC, {"x": 0.0}) == BOTTOM


def test_predicate_resolves_to_verdict():
    f = parse_formula("(x > 4)")
    assert progress(f, SEC, {"x": 5.0}) == TOP
    assert progress(f, SEC, {"x": 3.0}) == BOTTOM
    assert progress(f, SEC, {"x": 4.0}) == BOTTOM  # boundary is a violation


def test_progress_requires_positive_delta():
    with pytest.raises(ValueError):
        progress(TOP, 0, {})


def test_always_shrinks_its_window():
    g = parse_formula("G[0,20] (x > 4)")
    out = progress(g, to_ticks(0.1), {"x": 5.0})
    assert out == parse_formula("G[0,19.9] (x > 4)")
    assert progress(g, to_ticks(0.1), {"x": 3.0}) == BOTTOM


def test_eventually_resolves_when_witnessed():
    f = parse_formula("F[0,5] (x > 0)")
    assert progress(f, SEC, {"x": 1.0}) == TOP
    out = progress(f, SEC, {"x": -1.0})
    assert out == parse_formula("F[0,4] (x > 0)")


def test_until_with_positive_lower_bound_keeps_left_obligation():
    f = parse_formula("(x>0) U[2,5] (y>0)")
    out = progress(f, SEC, {"x": 1.0, "y": 9.0})
    assert out == parse_formula("(x>0) U[1,4] (y>0)")
    assert progress(f, SEC, {"x": -1.0, "y": 9.0}) == BOTTOM


def test_until_interval_expiry_resolves_false():
    f = parse_formula("(x>0) U[0,1] (y>0)")
    out = progress(f, 2 * SEC, {"x": 1.0, "y": -1.0})
    assert out == BOTTOM


def test_unbounded_until_can_be_monitored():
    # Planning rejects unbounded formulas, monitoring does not.
    f = parse_formula("F[0,inf) (x > 0)")
    out = progress(f, 3 * SEC, {"x": -1.0})
    assert out == f  # the infinite window never shrinks
    assert progress(f, 3 * SEC, {"x": 1.0}) == TOP


def test_exhausted_eventually_keeps_point_interval():
    # Shifting [0,1] by exactly 1 leaves the degenerate point interval [0,0]:
    # one more chance at the final sample, not yet false.
    f = parse_formula("F[0,1] (y>0)")
    out = progress(f, SEC, {"y": -1.0})
    assert isinstance(out, Until)
    assert out.interval == Interval(0, 0, True, True)


# ---------------------------------------------------------------------------
# simplify


def test_simplify_rules():
    p = parse_formula("(x > 0)")
    u = parse_formula("(x>0) U[0,5] (y>0)")
    assert simplify(And(TOP, p)) == p
    assert simplify(And(p, BOTTOM)) == BOTTOM
    assert simplify(Or(BOTTOM, p)) == p
    assert simplify(Or(p, TOP)) == TOP
    assert simplify(Not(Not(u))) == u
    assert simplify(Not(TOP)) == BOTTOM
    assert simplify(Until(p, Interval(0, 0, False, False), p)) == BOTTOM
    # false-until with a strictly positive window can never hold
    assert simplify(Until(BOTTOM, Interval(SEC, 2 * SEC), p)) == BOTTOM
    # ... but with 0 in the window the right operand may fire immediately
    kept = simplify(Until(BOTTOM, Interval(0, SEC), p))
    assert isinstance(kept, Until)


def test_simplify_is_idempotent():
    rng = np.random.default_rng(21)
    for _ in range(200):
        f, _ = random_instance(rng)
        once = simplify(f)
        assert simplify(once) == once


def test_simplify_preserves_robustness_bit_exactly():
    rng = np.random.default_rng(22)
    for _ in range(300):
        f, s = random_instance(rng)
        assert robustness(s, s.t0, simplify(f)) == robustness(s, s.t0, f)


# ---------------------------------------------------------------------------
# monitor


def test_monitor_absorbs_verdicts():
    m = MonitorState(current=TOP, anchor_time=0, original=TOP)
    m2 = monitor_step(m, SEC, {"x": -1.0})
    assert m2.current == TOP and m2.step_count == 1 and m2.verdict == "satisfied"


def test_monitor_requires_increasing_time():
    m = start_monitor(TOP, SEC)
    with pytest.raises(ValueError):
        monitor_step(m, SEC, {})


def test_monitor_detects_satisfaction_of_eventually():
    f = parse_formula("F[0,2] (x > 4)")
    s = make_signal([0, 1, 2], x=[0.0, 5.0, 0.0])
    m = start_monitor(f, s.t0)
    seen = []
    for i in range(len(s) - 1):
        m = monitor_step(m, s.t(i + 1), s.state(i))
        seen.append(m.current)
    assert seen[0] != TOP  # x=0 at t=0 does not witness it
    assert seen[1] == TOP  # x=5 at t=1 does
    assert sat(s, 0, f) is True


def test_monitor_detects_violation_of_always():
    f = parse_formula("G[0,2] (x > 0)")
    s = make_signal([0, 1, 2], x=[1.0, -0.5, 1.0])
    m = start_monitor(f, s.t0)
    m = monitor_step(m, s.t(1), s.state(0))
    assert not isinstance(m.current, (Top, Bottom))
    m = monitor_step(m, s.t(2), s.state(1))
    assert m.current == BOTTOM
    assert sat(s, 0, f) is False


def test_size_cap_guards_pathological_growth():
    # Or-of-until duplicates under progression faster than simplify can
    # shrink when every branch stays undecided.
    leaf = parse_formula("(x>0) U[0,50] (y>0)")
    f = leaf
    for _ in range(7):
        f = Or(Until(f, Interval(0, to_ticks(50.0)), f), f)
    with pytest.raises(FormulaSizeError):
        progress(f, SEC, {"x": 1.0, "y": -1.0})


# ---------------------------------------------------------------------------
# progression equals robustness-to-go


def test_rotogo_via_progression_bounds_checked():
    s = make_signal([0, 1], x=[1.0, 1.0])
    with pytest.raises(IndexError):
        rotogo_via_progression(s, 1, TOP)
    with pytest.raises(IndexError):
        rotogo_via_progression(s, -1, TOP)


def test_rotogo_via_progression_of_true_is_infinite():
    s = make_signal([0, 1, 2], x=[0.0, 0.0, 0.0])
    assert rotogo_via_progression(s, 0, TOP) == math.inf
    assert rotogo_via_progression(s, 1, TOP) == math.inf


def test_single_step_equals_progressed_robustness():
    rng = np.random.default_rng(23)
    for _ in range(150):
        f, s = random_instance(rng)
        stepped = progress(f, s.t(1) - s.t(0), s.state(0))
        assert rotogo_via_progression(s, 0, f) == robustness(s, s.t(1), stepped)


def test_progression_equivalence_random_instances():
    rng = np.random.default_rng(24)
    for _ in range(150):
        f, s = random_instance(rng)
        for cut in range(len(s) - 1):
            got = rotogo_via_progression(s, cut, f)
            want = rotogo(s, s.t0, s.t(cut), f)
            assert got == want, (f, s.times, cut, got, want)


def test_progressed_formula_ignores_prefix_mutations():
    rng = np.random.default_rng(25)
    for _ in range(100):
        f, s = random_instance(rng)
        cut = int(rng.integers(0, len(s) - 1))
        progressed = progress_along(f, s, cut)
        base = robustness(s, s.t(cut + 1), progressed)
        mutated = s
        for j in range(cut + 1):
            mutated = mutated.replaced(j, {n: float(rng.uniform(-20, 20)) for n in s.components})
        assert robustness(mutated, mutated.t(cut + 1), progressed) == base
