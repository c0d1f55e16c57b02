"""Via-point trajectory parameterization and the planning loss.

A plan is a flat list of 2-D via points over a fixed duration.  The rollout
lays minimum-jerk quintic segments through the via points: time is split
evenly, the robot starts from its current position and velocity, passes
through via points 1..N-1 with a smooth finite-difference velocity, and
comes to rest (zero velocity and acceleration) exactly at the last via
point when the duration ends.  Each segment is the unique quintic for its
endpoint position/velocity/acceleration constraints, which is the
minimum-jerk point-to-point solution; knots share their velocity and a zero
acceleration, so the spline is twice differentiable.

The loss for a candidate trajectory is the negative robustness of the
signal assembled from it, plus hard penalties for leaving the workspace and
soft penalties for exceeding velocity or acceleration limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fasteval import TouchCounter, eval_robustness_arrays
from .formula import Formula
from .signals import Signal

#: Cost assigned per trajectory sample outside the workspace.
WORKSPACE_PENALTY = 1e8

#: Cost per unit of velocity/acceleration limit violation per sample.
LIMIT_PENALTY = 1e6

#: Infinite robustness is mapped to +/- this value before cost arithmetic.
ROBUSTNESS_CLAMP = 1e9


@dataclass(frozen=True)
class ViaPointPlan:
    """Decision variables: N via points (x, y) and the plan duration."""

    via_points: np.ndarray  # (N, 2)
    duration: float  # seconds

    def __post_init__(self):
        pts = np.asarray(self.via_points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] != 2:
            raise ValueError("via_points must have shape (N, 2) with N >= 1")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        object.__setattr__(self, "via_points", pts)

    @classmethod
    def from_vector(cls, x: np.ndarray, duration: float) -> "ViaPointPlan":
        x = np.asarray(x, dtype=np.float64)
        return cls(x.reshape(-1, 2), duration)

    def as_vector(self) -> np.ndarray:
        return self.via_points.reshape(-1)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # (L,) seconds from plan start
    pos: np.ndarray  # (L, 2)
    vel: np.ndarray  # (L, 2)
    acc: np.ndarray  # (L, 2)

    def __len__(self) -> int:
        return int(self.times.size)

    def rows(self) -> np.ndarray:
        """(L, 7) array of (t, x, y, vx, vy, ax, ay)."""
        return np.column_stack([self.times, self.pos, self.vel, self.acc])


@dataclass(frozen=True)
class Limits:
    v_max: float = 0.5
    a_max: float = 1.0


@dataclass(frozen=True)
class Workspace:
    x_min: float = 0.0
    x_max: float = 5.0
    y_min: float = 0.0
    y_max: float = 5.0

    def outside(self, pos: np.ndarray) -> np.ndarray:
        """Boolean mask of positions outside the bounds; pos is (..., 2)."""
        x, y = pos[..., 0], pos[..., 1]
        return (x < self.x_min) | (x > self.x_max) | (y < self.y_min) | (y > self.y_max)


def _quintic_coefficients(p0, v0, a0, p1, v1, a1, T):
    """Coefficients of the minimum-jerk quintic meeting both endpoint states.

    All arguments broadcast; returns six arrays c0..c5 with
    p(t) = c0 + c1 t + ... + c5 t^5 over t in [0, T].
    """
    T2, T3, T4, T5 = T * T, T**3, T**4, T**5
    dp = p1 - p0 - v0 * T - 0.5 * a0 * T2
    dv = v1 - v0 - a0 * T
    da = a1 - a0
    c0 = p0
    c1 = v0
    c2 = 0.5 * a0
    c3 = (10 * dp - 4 * dv * T + 0.5 * da * T2) / T3
    c4 = (-15 * dp + 7 * dv * T - da * T2) / T4
    c5 = (6 * dp - 3 * dv * T + 0.5 * da * T2) / T5
    return c0, c1, c2, c3, c4, c5


def _segment_coefficients(via: np.ndarray, start_pos: np.ndarray, start_vel: np.ndarray, duration: float):
    """Quintic coefficients for every segment; via is (..., N, 2).

    Knots sit at t_j = j * duration / N with via point j at knot j; knot N is
    the trajectory end, reached at rest.  Interior knot velocities are
    central finite differences of the neighboring knot positions, so the
    robot flows through via points instead of stopping at each one.  Returns
    an array of shape (..., N, 2, 6).
    """
    via = np.asarray(via, dtype=np.float64)
    n_via = via.shape[-2]
    batch_shape = via.shape[:-2]
    seg_t = duration / n_via

    knots_p = np.concatenate(
        [np.broadcast_to(start_pos, batch_shape + (1, 2)), via], axis=-2
    )  # (..., N+1, 2)
    knots_v = np.zeros(batch_shape + (n_via + 1, 2))
    knots_v[..., 0, :] = start_vel
    if n_via > 1:
        knots_v[..., 1:-1, :] = (knots_p[..., 2:, :] - knots_p[..., :-2, :]) / (2.0 * seg_t)

    coeffs = np.broadcast_arrays(
        *_quintic_coefficients(
            knots_p[..., :-1, :],
            knots_v[..., :-1, :],
            0.0,
            knots_p[..., 1:, :],
            knots_v[..., 1:, :],
            0.0,
            seg_t,
        )
    )
    return np.stack(coeffs, axis=-1)  # (..., N, 2, 6)


def _sample_spline(coeffs: np.ndarray, duration: float, times: np.ndarray):
    """Evaluate a piecewise quintic at the given plan-local times."""
    n_segments = coeffs.shape[-3]
    seg_t = duration / n_segments
    seg_idx = np.minimum((times / seg_t).astype(np.int64), n_segments - 1)
    tau = times - seg_idx * seg_t

    c = coeffs[..., seg_idx, :, :]  # (..., L, 2, 6)
    # Horner evaluation of position, velocity, acceleration.
    t = tau[..., :, np.newaxis]  # broadcast over the trailing dim-2 axis
    k0, k1, k2, k3, k4, k5 = (c[..., i] for i in range(6))
    pos = ((((k5 * t + k4) * t + k3) * t + k2) * t + k1) * t + k0
    vel = (((5 * k5 * t + 4 * k4) * t + 3 * k3) * t + 2 * k2) * t + k1
    acc = ((20 * k5 * t + 12 * k4) * t + 6 * k3) * t + 2 * k2
    return pos, vel, acc


def rollout_arrays(
    via: np.ndarray, start_pos: np.ndarray, start_vel: np.ndarray, duration: float, resolution_hz: float
):
    """Sample the via-point spline on the resolution grid.

    ``via`` is (..., N, 2); returns (times (L,), pos/vel/acc (..., L, 2)).
    """
    coeffs = _segment_coefficients(via, start_pos, start_vel, duration)  # (..., S, 2, 6)
    count = int(math.floor(duration * resolution_hz + 1e-9)) + 1
    times = np.arange(count) / resolution_hz
    if duration - times[-1] > 1e-9:
        times = np.append(times, duration)  # always sample the terminal state
    pos, vel, acc = _sample_spline(coeffs, duration, times)
    return times, pos, vel, acc


def spline_positions(
    via: np.ndarray, start_pos: np.ndarray, start_vel: np.ndarray, duration: float, times: np.ndarray
) -> np.ndarray:
    """Positions of the via-point spline at arbitrary plan-local times."""
    coeffs = _segment_coefficients(via, start_pos, start_vel, duration)
    pos, _, _ = _sample_spline(coeffs, duration, np.asarray(times, dtype=np.float64))
    return pos


def rollout(plan: ViaPointPlan, start, resolution_hz: float = 10.0) -> Trajectory:
    """Roll the plan out from ``start`` (anything with x, y, vx, vy)."""
    start_pos = np.array([start.x, start.y])
    start_vel = np.array([start.vx, start.vy])
    times, pos, vel, acc = rollout_arrays(
        plan.via_points, start_pos, start_vel, plan.duration, resolution_hz
    )
    return Trajectory(times, pos, vel, acc)


def limit_penalty(vel: np.ndarray, acc: np.ndarray, limits: Limits) -> np.ndarray:
    """Penalty for speed/acceleration limit violations; arrays are (..., L, 2)."""
    speed = np.sqrt(np.sum(vel * vel, axis=-1))
    accel = np.sqrt(np.sum(acc * acc, axis=-1))
    over_v = np.maximum(0.0, speed - limits.v_max).sum(axis=-1)
    over_a = np.maximum(0.0, accel - limits.a_max).sum(axis=-1)
    return LIMIT_PENALTY * (over_v + over_a)


def workspace_penalty(pos: np.ndarray, workspace: Workspace) -> np.ndarray:
    return WORKSPACE_PENALTY * workspace.outside(pos).sum(axis=-1)


def clamp_robustness(rho: np.ndarray) -> np.ndarray:
    """Map infinite robustness to +/-ROBUSTNESS_CLAMP for finite arithmetic."""
    return np.clip(rho, -ROBUSTNESS_CLAMP, ROBUSTNESS_CLAMP)


def plan_cost(
    traj: Trajectory,
    build_signal: Callable[[Trajectory], Signal],
    formula: Formula,
    limits: Limits = Limits(),
    workspace: Workspace = Workspace(),
    counter: TouchCounter | None = None,
) -> float:
    """Loss of one candidate trajectory: negative robustness plus penalties.

    ``build_signal`` assembles the signal the formula is scored on (the
    candidate suffix alone, or executed prefix plus suffix); robustness is
    evaluated at that signal's first sample.  Penalties are computed over
    the trajectory itself.
    """
    signal = build_signal(traj)
    comps = {name: col[np.newaxis, :] for name, col in signal.components.items()}
    rho = eval_robustness_arrays(signal.times, comps, formula, counter)[0, 0]
    cost = -float(clamp_robustness(rho))
    cost += float(workspace_penalty(traj.pos, workspace))
    cost += float(limit_penalty(traj.vel, traj.acc, limits))
    return cost
