"""Scenario configuration and the two built-in benchmark scenarios.

A scenario bundles the task formula (with its named predicate aliases), the
initial robot and environment states, the workspace, timing, noise, and
optimizer settings.  Configurations round-trip through JSON so they can be
shipped to the command line tools.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from .formula import Formula, horizon, is_bounded, to_ticks
from .parser import parse_formula
from .planning import Limits, Workspace

MODES = ("robustness", "rotogo")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    formula: str
    aliases: dict[str, str] = field(default_factory=dict)
    robot_start: tuple[float, float, float, float] = (0.5, 2.5, 0.0, 0.0)
    env_start: tuple[float, float] = (2.5, 2.5)
    workspace: tuple[float, float, float, float] = (0.0, 5.0, 0.0, 5.0)
    mission_horizon: float = 20.0  # seconds
    trace_period: float = 0.1  # execution logging and cost evaluation period
    replan_period: float = 0.5
    env_step_period: float = 0.005
    env_noise_std: float = 0.01  # meters per environment step
    objective_mode: str = "rotogo"
    seed: int = 0
    min_distance_radius: float = 0.5
    via_points: int = 4
    population_size: int = 25
    cmaes_iterations: int = 20
    # The first planning attempt happens before the robot starts moving, so
    # it can afford a deeper search than the in-mission replans.
    first_attempt_iterations: int = 100
    initial_step_size: float = math.sqrt(10.0)
    warm_start_step_size: float = math.sqrt(5.0)
    v_max: float = 0.5
    a_max: float = 1.0

    def __post_init__(self):
        if self.objective_mode not in MODES:
            raise ValueError(f"objective_mode must be one of {MODES}")
        if self.via_points < 1:
            raise ValueError("via_points must be >= 1")

    def parsed_formula(self) -> Formula:
        return parse_formula(self.formula, aliases=self.aliases)

    def limits(self) -> Limits:
        return Limits(v_max=self.v_max, a_max=self.a_max)

    def workspace_box(self) -> Workspace:
        x0, x1, y0, y1 = self.workspace
        return Workspace(x0, x1, y0, y1)

    def validate(self) -> Formula:
        """Parse and cross-check the configuration; returns the formula."""
        f = self.parsed_formula()
        if not is_bounded(f):
            raise ValueError("the scenario formula must be bounded (finite horizon)")
        if horizon(f) > to_ticks(self.mission_horizon):
            raise ValueError("mission_horizon is shorter than the formula horizon")
        trace_dt = to_ticks(self.trace_period)
        if trace_dt <= 0:
            raise ValueError("trace_period must be positive")
        if to_ticks(self.replan_period) % trace_dt != 0:
            raise ValueError("replan_period must be a multiple of trace_period")
        if to_ticks(self.mission_horizon) % trace_dt != 0:
            raise ValueError("mission_horizon must be a multiple of trace_period")
        if trace_dt % to_ticks(self.env_step_period) != 0:
            raise ValueError("trace_period must be a multiple of env_step_period")
        return f

    def with_mode(self, mode: str) -> "ScenarioConfig":
        return replace(self, objective_mode=mode)

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["robot_start"] = list(self.robot_start)
        d["env_start"] = list(self.env_start)
        d["workspace"] = list(self.workspace)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown scenario config keys: {', '.join(unknown)}")
        for key in ("robot_start", "env_start", "workspace"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def scenario_phi_avoid(mode: str = "rotogo", seed: int = 0) -> ScenarioConfig:
    """Reach the goal box within the mission while avoiding the human and
    two static obstacles.  The robot starts wedged between the obstacles, so
    no trajectory from that start can score a robustness above 0.1."""
    return ScenarioConfig(
        name="phi_avoid",
        formula="G[0,20] !(human | obs1 | obs2) & F[0,20] goal",
        aliases={
            "human": "(x - xe)^2 + (y - ye)^2 < 0.25",
            "obs1": "(x > 0.5) & (x < 1) & (y > 0) & (y < 2.4)",
            "obs2": "(x > 0.5) & (x < 1) & (y > 2.6) & (y < 5)",
            "goal": "(x > 4) & (y > 2) & (y < 3)",
        },
        robot_start=(0.5, 2.5, 0.0, 0.0),
        env_start=(2.5, 2.5),
        min_distance_radius=0.5,  # human disc radius, sqrt(0.25)
        objective_mode=mode,
        seed=seed,
    )


def scenario_phi_stayin(mode: str = "rotogo", seed: int = 0) -> ScenarioConfig:
    """Stay inside a disc around the drifting environment for the mission."""
    return ScenarioConfig(
        name="phi_stayin",
        formula="G[0,20] region",
        aliases={"region": "(x - xe)^2 + (y - ye)^2 < 2"},
        robot_start=(1.2, 2.5, 0.0, 0.0),
        env_start=(2.5, 2.5),
        min_distance_radius=math.sqrt(2.0),  # disc radius
        objective_mode=mode,
        seed=seed,
    )


BUILTIN_SCENARIOS = {
    "phi_avoid": scenario_phi_avoid,
    "phi_stayin": scenario_phi_stayin,
}


def get_scenario(name: str, mode: str = "rotogo", seed: int = 0) -> ScenarioConfig:
    try:
        return BUILTIN_SCENARIOS[name](mode=mode, seed=seed)
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; built-ins: {sorted(BUILTIN_SCENARIOS)}") from None
