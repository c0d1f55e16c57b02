import numpy as np

from rotogo.dynamics import RobotState
from rotogo.fasteval import TouchCounter
from rotogo.formula import to_ticks
from rotogo.parser import parse_formula
from rotogo.planning import (
    LIMIT_PENALTY,
    ROBUSTNESS_CLAMP,
    WORKSPACE_PENALTY,
    Limits,
    Trajectory,
    ViaPointPlan,
    clamp_robustness,
    plan_cost,
    rollout,
    rollout_arrays,
    spline_positions,
)
from rotogo.signals import Signal


def suffix_signal(traj: Trajectory, env=(2.5, 2.5)) -> Signal:
    times = np.array([to_ticks(t) for t in traj.times], dtype=np.int64)
    n = len(traj.times)
    return Signal(
        times,
        {
            "x": traj.pos[:, 0],
            "y": traj.pos[:, 1],
            "vx": traj.vel[:, 0],
            "vy": traj.vel[:, 1],
            "xe": np.full(n, env[0]),
            "ye": np.full(n, env[1]),
        },
    )


def test_stationary_plan_stays_put():
    plan = ViaPointPlan(np.array([[1.0, 2.0]] * 4), duration=8.0)
    traj = rollout(plan, RobotState(1.0, 2.0, 0.0, 0.0), 10.0)
    assert np.all(traj.pos == [1.0, 2.0])
    assert np.all(traj.vel == 0.0)


def test_single_via_point_is_the_analytic_minimum_jerk_move():
    plan = ViaPointPlan(np.array([[1.0, 0.0]]), duration=2.0)
    traj = rollout(plan, RobotState(0.0, 0.0, 0.0, 0.0), 10.0)
    assert len(traj) == 21
    assert traj.times[0] == 0.0 and traj.times[-1] == 2.0
    tau = traj.times / 2.0
    analytic = 10 * tau**3 - 15 * tau**4 + 6 * tau**5
    assert np.abs(traj.pos[:, 0] - analytic).max() < 1e-9
    assert np.all(np.diff(traj.pos[:, 0]) >= -1e-15)  # monotone x
    assert traj.vel[0, 0] == 0.0 and abs(traj.vel[-1, 0]) < 1e-9


def test_resolution_grid_row_count():
    plan = ViaPointPlan(np.array([[1.0, 1.0]]), duration=2.0)
    traj = rollout(plan, RobotState(0.0, 0.0, 0.0, 0.0), 10.0)
    assert np.array_equal(traj.times, np.arange(21) / 10.0)


def test_boundary_conditions_and_knot_continuity_random_plans():
    rng = np.random.default_rng(41)
    for _ in range(100):
        n = int(rng.integers(1, 6))
        via = rng.uniform(0.0, 5.0, size=(n, 2))
        duration = float(rng.uniform(1.0, 20.0))
        start = RobotState(*rng.uniform(0.0, 5.0, 2), *rng.uniform(-0.5, 0.5, 2))
        plan = ViaPointPlan(via, duration)
        traj = rollout(plan, start, resolution_hz=100.0)
        # start state exact, terminal at rest on the last via point
        assert traj.pos[0, 0] == start.x and traj.pos[0, 1] == start.y
        assert traj.vel[0, 0] == start.vx and traj.vel[0, 1] == start.vy
        assert np.abs(traj.vel[-1]).max() < 1e-9
        assert np.abs(traj.acc[-1]).max() < 1e-9
        assert np.abs(traj.pos[-1] - via[-1]).max() < 1e-9
        # C1 continuity across knots: evaluate both sides of each knot
        seg_t = duration / n
        knots = seg_t * np.arange(1, n)
        if knots.size:
            eps = 1e-9
            left = spline_positions(via, traj.pos[0], traj.vel[0], duration, knots - eps)
            right = spline_positions(via, traj.pos[0], traj.vel[0], duration, knots + eps)
            assert np.abs(left - right).max() < 1e-6  # position continuity at eps scale
            before = rollout(plan, start, resolution_hz=1000.0)
            idx = np.searchsorted(before.times, knots)
            dv = np.abs(np.diff(before.vel, axis=0))[idx - 1]
            assert dv.max() < 1e-2  # velocity has no jumps at knot crossings


def test_batch_rollout_matches_single():
    rng = np.random.default_rng(42)
    via = rng.uniform(0.0, 5.0, size=(6, 4, 2))
    times, pos, vel, acc = rollout_arrays(via, np.array([0.5, 2.5]), np.zeros(2), 20.0, 10.0)
    for b in range(6):
        single = rollout(ViaPointPlan(via[b], 20.0), RobotState(0.5, 2.5, 0.0, 0.0), 10.0)
        assert np.array_equal(single.pos, pos[b])
        assert np.array_equal(single.vel, vel[b])
        assert np.array_equal(single.acc, acc[b])


# ---------------------------------------------------------------------------
# Costs


def test_out_of_workspace_penalty_dominates():
    plan = ViaPointPlan(np.array([[8.0, 8.0]] * 4), duration=2.0)
    traj = rollout(plan, RobotState(7.0, 7.0, 0.0, 0.0), 10.0)
    cost = plan_cost(traj, suffix_signal, parse_formula("G[0,2] (x > 0)"))
    assert cost >= 21 * WORKSPACE_PENALTY


def test_stationary_goal_plan_costs_negative_robustness():
    goal = parse_formula("F[0,20] ((x > 4) & (y > 2) & (y < 3))")
    plan = ViaPointPlan(np.array([[4.5, 2.5]] * 4), duration=20.0)
    traj = rollout(plan, RobotState(4.5, 2.5, 0.0, 0.0), 10.0)
    cost = plan_cost(traj, suffix_signal, goal)
    assert cost == -0.5  # min(x-4, y-2, 3-y) = 0.5 at the goal center


def test_true_formula_maps_to_clamped_infinity():
    plan = ViaPointPlan(np.array([[1.0, 1.0]] * 2), duration=2.0)
    traj = rollout(plan, RobotState(1.0, 1.0, 0.0, 0.0), 10.0)
    cost = plan_cost(traj, suffix_signal, parse_formula("true"))
    assert cost == -ROBUSTNESS_CLAMP


def test_limit_penalty_scales_with_violation():
    # A long move in a short duration forces speeds beyond the cap.
    plan = ViaPointPlan(np.array([[4.5, 0.0]]), duration=2.0)
    traj = rollout(plan, RobotState(0.0, 0.0, 0.0, 0.0), 10.0)
    speed = np.sqrt((traj.vel**2).sum(axis=1))
    expected = LIMIT_PENALTY * np.maximum(0.0, speed - 0.5).sum()
    cost = plan_cost(traj, suffix_signal, parse_formula("true"), limits=Limits(v_max=0.5, a_max=1e9))
    assert cost == -ROBUSTNESS_CLAMP + expected
    assert expected > 0


def test_clamp_robustness():
    assert clamp_robustness(np.array([np.inf]))[0] == ROBUSTNESS_CLAMP
    assert clamp_robustness(np.array([-np.inf]))[0] == -ROBUSTNESS_CLAMP
    assert clamp_robustness(np.array([0.25]))[0] == 0.25


def test_plan_cost_counts_touched_samples():
    plan = ViaPointPlan(np.array([[1.0, 1.0]] * 2), duration=2.0)
    traj = rollout(plan, RobotState(1.0, 1.0, 0.0, 0.0), 10.0)
    counter = TouchCounter()
    plan_cost(traj, suffix_signal, parse_formula("G[0,2] (x > 0)"), counter=counter)
    assert counter.samples == 21
