"""Double-integrator robot and randomly drifting environment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0

    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def velocity(self) -> np.ndarray:
        return np.array([self.vx, self.vy])


@dataclass(frozen=True)
class EnvState:
    xe: float
    ye: float


class DoubleIntegrator:
    """Exact zero-order-hold integration of planar double-integrator dynamics."""

    @staticmethod
    def step(robot: tuple[float, float, float, float], u: tuple[float, float], dt: float):
        x, y, vx, vy = robot
        ax, ay = u
        return (
            x + vx * dt + 0.5 * ax * dt * dt,
            y + vy * dt + 0.5 * ay * dt * dt,
            vx + ax * dt,
            vy + ay * dt,
        )


def robot_step(state: RobotState, u: tuple[float, float], dt: float) -> RobotState:
    if dt <= 0:
        raise ValueError("dt must be positive")
    x, y, vx, vy = DoubleIntegrator.step((state.x, state.y, state.vx, state.vy), u, dt)
    return RobotState(x, y, vx, vy)


def env_step(state: EnvState, rng: np.random.Generator, noise_std: float) -> EnvState:
    """One environment step: position drifts by a zero-mean Gaussian draw.

    Two draws are consumed per step (one per axis) even when the standard
    deviation is zero, so seeded runs with different noise levels stay
    aligned on the same random stream.
    """
    w = rng.normal(0.0, 1.0, size=2) * noise_std
    return EnvState(state.xe + w[0], state.ye + w[1])
