"""One planning problem: via-point trajectories scored by robustness.

Solves the reach-avoid scenario's initial planning problem with CMA-ES over
four via points, then inspects the best plan: where it goes, its margin, and
how the loss is assembled from robustness and penalties.
"""
import numpy as np
from pathlib import Path

from rotogo import (
    RobotState,
    ViaPointPlan,
    parse_formula,
    rollout,
    scenario_phi_avoid,
    to_ticks,
)
from rotogo.cmaes import CmaesConfig, cmaes_minimize
from rotogo.fasteval import eval_robustness_arrays
from rotogo.planning import clamp_robustness, limit_penalty, rollout_arrays, workspace_penalty

cfg = scenario_phi_avoid()
phi = cfg.validate()
robot = RobotState(*cfg.robot_start)
print(f"scenario {cfg.name}: start ({robot.x}, {robot.y}), human at {cfg.env_start}")

# ---------------------------------------------------------------------------
# The decision vector is the flat list of via points.  A candidate's loss is
# the negative robustness of its rolled-out signal plus workspace and limit
# penalties; the whole population is evaluated in one vectorized pass.

hz = 1.0 / cfg.trace_period
duration = cfg.mission_horizon
n_samples = to_ticks(duration) // to_ticks(cfg.trace_period) + 1
eval_times = np.arange(n_samples, dtype=np.int64) * to_ticks(cfg.trace_period)
start_pos, start_vel = np.array([robot.x, robot.y]), np.zeros(2)
limits, workspace = cfg.limits(), cfg.workspace_box()


def batch_objective(X):
    via = X.reshape(X.shape[0], cfg.via_points, 2)
    _, pos, vel, acc = rollout_arrays(via, start_pos, start_vel, duration, hz)
    comps = {
        "x": pos[..., 0], "y": pos[..., 1],
        "vx": vel[..., 0], "vy": vel[..., 1],
        "xe": np.full(pos.shape[:2], cfg.env_start[0]),
        "ye": np.full(pos.shape[:2], cfg.env_start[1]),
    }
    rho = eval_robustness_arrays(eval_times, comps, phi)[:, 0]
    return -clamp_robustness(rho) + workspace_penalty(pos, workspace) + limit_penalty(vel, acc, limits)


result = cmaes_minimize(
    None,
    np.tile(start_pos, cfg.via_points),
    CmaesConfig(seed=0, max_iterations=cfg.first_attempt_iterations),
    batch_objective=batch_objective,
)
best = result.best_x.reshape(cfg.via_points, 2)
print(f"best loss {result.best_value:.4f} after {result.evaluations} evaluations")
print("robustness of best plan:", -result.best_value)
print("via points:")
for j, (x, y) in enumerate(best, 1):
    print(f"  {j}: ({x:6.3f}, {y:6.3f})")

# The margin tops out near 0.1: the start position sits 0.1 from both static
# obstacles, and nothing the plan does later can widen that.

# ---------------------------------------------------------------------------
# Roll the winner out and check its kinematics.

traj = rollout(ViaPointPlan(best, duration), robot, hz)
speed = np.sqrt((traj.vel**2).sum(axis=1))
print(f"trajectory: {len(traj)} rows, peak speed {speed.max():.3f} m/s (limit {limits.v_max})")
print(f"final position ({traj.pos[-1, 0]:.3f}, {traj.pos[-1, 1]:.3f}), final speed {speed[-1]:.2e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Rectangle((0.5, 0.0), 0.5, 2.4, color="0.6"))
    ax.add_patch(plt.Rectangle((0.5, 2.6), 0.5, 2.4, color="0.6"))
    ax.add_patch(plt.Circle(cfg.env_start, 0.5, color="tab:red", alpha=0.4))
    ax.add_patch(plt.Rectangle((4.0, 2.0), 1.0, 1.0, color="tab:green", alpha=0.3))
    ax.plot(traj.pos[:, 0], traj.pos[:, 1], "-", lw=2)
    ax.plot(*best.T, "o", ms=5)
    ax.set_xlim(0, 5), ax.set_ylim(0, 5), ax.set_aspect("equal")
    out = Path(__file__).parent / "plan_phi_avoid.png"
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")
except ImportError:
    print("matplotlib not available; skipping the plot")
