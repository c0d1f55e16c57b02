"""Finite timed signals over named state components, plus trace CSV I/O.

Semantics are pointwise: a signal is exactly its samples, there is no
interpolation between timestamps.  Evaluators quantify over the finite set
of sample times only.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .formula import Interval, TimePoint, to_seconds, to_ticks

#: Core state components carried by every simulation trace.
STATE_COMPONENTS = ("x", "y", "vx", "vy", "xe", "ye")

#: Optional control-input and disturbance columns.
EXTRA_COMPONENTS = ("ax", "ay", "w1", "w2")


class NoSampleError(ValueError):
    """Raised when a signal is queried at a non-sample time."""


@dataclass(frozen=True)
class Sample:
    t: TimePoint
    state: Mapping[str, float]


@dataclass(frozen=True)
class TraceRow:
    """One trace sample with optional control input u and disturbance w."""

    t: TimePoint
    state: Mapping[str, float]
    u: Optional[tuple[float, float]] = None
    w: Optional[tuple[float, float]] = None


class Signal:
    """Immutable sequence of samples with strictly increasing timestamps.

    Stored as one int64 array of tick times plus one float64 array per
    component, which lets evaluators and predicates work on whole columns.
    """

    __slots__ = ("times", "components")

    def __init__(self, times: np.ndarray, components: Mapping[str, np.ndarray]):
        times = np.asarray(times, dtype=np.int64)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("a signal needs at least one sample")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("sample timestamps must be strictly increasing")
        comps = {}
        for name, values in components.items():
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != times.shape:
                raise ValueError(f"component {name!r} has {arr.shape[0] if arr.ndim else 0} values for {times.size} samples")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"component {name!r} contains non-finite values")
            comps[name] = arr
        self.times = times
        self.components = comps

    @classmethod
    def from_samples(cls, samples: Sequence[Sample]) -> "Signal":
        if not samples:
            raise ValueError("a signal needs at least one sample")
        names = sorted(samples[0].state)
        times = np.array([s.t for s in samples], dtype=np.int64)
        comps = {n: np.array([s.state[n] for s in samples]) for n in names}
        return cls(times, comps)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def t0(self) -> TimePoint:
        return int(self.times[0])

    @property
    def t_end(self) -> TimePoint:
        return int(self.times[-1])

    def t(self, index: int) -> TimePoint:
        return int(self.times[index])

    def state(self, index: int) -> dict[str, float]:
        return {name: float(col[index]) for name, col in self.components.items()}

    def index_of(self, t: TimePoint) -> int:
        i = int(np.searchsorted(self.times, t))
        if i >= len(self) or int(self.times[i]) != t:
            raise NoSampleError(f"no sample at t={to_seconds(t)} s")
        return i

    def has_time(self, t: TimePoint) -> bool:
        i = int(np.searchsorted(self.times, t))
        return i < len(self) and int(self.times[i]) == t

    def value_at(self, t: TimePoint) -> dict[str, float]:
        return self.state(self.index_of(t))

    def index_range_in(self, interval: Interval, offset: TimePoint = 0) -> tuple[int, int]:
        """Half-open index range of samples inside ``interval`` shifted by ``offset``."""
        lo_bound = interval.lower + offset
        lo = int(np.searchsorted(self.times, lo_bound, side="left" if interval.lower_closed else "right"))
        if interval.upper == math.inf:
            hi = len(self)
        else:
            hi_bound = interval.upper + offset
            hi = int(np.searchsorted(self.times, hi_bound, side="right" if interval.upper_closed else "left"))
        return lo, max(lo, hi)

    def times_in(self, interval: Interval, offset: TimePoint = 0) -> list[TimePoint]:
        """Sample timestamps inside ``interval`` shifted by ``offset``, in order."""
        lo, hi = self.index_range_in(interval, offset)
        return [int(t) for t in self.times[lo:hi]]

    def times_between(self, start: TimePoint, stop: TimePoint) -> list[TimePoint]:
        """Sample timestamps in the half-open window [start, stop)."""
        lo = int(np.searchsorted(self.times, start, side="left"))
        hi = int(np.searchsorted(self.times, stop, side="left"))
        return [int(t) for t in self.times[lo:hi]]

    def suffix(self, index: int) -> "Signal":
        return Signal(self.times[index:], {n: c[index:] for n, c in self.components.items()})

    def prefix(self, index: int) -> "Signal":
        """Samples 0..index inclusive."""
        return Signal(self.times[: index + 1], {n: c[: index + 1] for n, c in self.components.items()})

    def replaced(self, index: int, state: Mapping[str, float]) -> "Signal":
        comps = {n: c.copy() for n, c in self.components.items()}
        for name, value in state.items():
            comps[name][index] = value
        return Signal(self.times, comps)

    def concat(self, other: "Signal") -> "Signal":
        if other.t0 <= self.t_end:
            raise ValueError("concatenated suffix must start after the prefix ends")
        names = set(self.components) & set(other.components)
        return Signal(
            np.concatenate([self.times, other.times]),
            {n: np.concatenate([self.components[n], other.components[n]]) for n in names},
        )

    def __repr__(self) -> str:
        span = f"[{to_seconds(self.t0)}, {to_seconds(self.t_end)}]s"
        return f"Signal({len(self)} samples over {span}, components={sorted(self.components)})"


def signal_from_rows(rows: Sequence[TraceRow]) -> Signal:
    names = sorted(rows[0].state)
    comps = {n: np.array([r.state[n] for r in rows]) for n in names}
    if rows[0].u is not None:
        comps["ax"] = np.array([r.u[0] for r in rows])
        comps["ay"] = np.array([r.u[1] for r in rows])
    if rows[0].w is not None:
        comps["w1"] = np.array([r.w[0] for r in rows])
        comps["w2"] = np.array([r.w[1] for r in rows])
    return Signal(np.array([r.t for r in rows], dtype=np.int64), comps)


# ---------------------------------------------------------------------------
# Trace validity


@dataclass(frozen=True)
class TraceValidation:
    valid: bool
    index: Optional[int] = None
    component: Optional[str] = None
    error: float = 0.0

    def __bool__(self) -> bool:
        return self.valid


def validate_trace(trace, dt: TimePoint, dynamics, tol: float = 1e-9) -> TraceValidation:
    """Check that consecutive samples follow the robot and environment models.

    Robot components must satisfy the dynamics step under the recorded control
    input, and environment components must advance by the recorded disturbance,
    within ``tol`` per component.  The first offending pair is reported.
    """
    if not isinstance(trace, Signal):
        trace = signal_from_rows(list(trace))
    for name in ("ax", "ay", "w1", "w2"):
        if name not in trace.components:
            raise ValueError(f"trace has no {name!r} column; validity is not checkable")
    c = trace.components
    dt_s = to_seconds(dt)
    for i in range(len(trace) - 1):
        gap = trace.t(i + 1) - trace.t(i)
        if gap != dt:
            return TraceValidation(False, i, "t", abs(gap - dt))
        robot = (float(c["x"][i]), float(c["y"][i]), float(c["vx"][i]), float(c["vy"][i]))
        u = (float(c["ax"][i]), float(c["ay"][i]))
        predicted = dynamics.step(robot, u, dt_s)
        for name, value in zip(("x", "y", "vx", "vy"), predicted):
            err = abs(float(c[name][i + 1]) - value)
            if err > tol:
                return TraceValidation(False, i + 1, name, err)
        for name, wname in (("xe", "w1"), ("ye", "w2")):
            err = abs(float(c[name][i + 1]) - (float(c[name][i]) + float(c[wname][i])))
            if err > tol:
                return TraceValidation(False, i + 1, name, err)
    return TraceValidation(True)


# ---------------------------------------------------------------------------
# Trace CSV format: header t,x,y,vx,vy,xe,ye[,ax,ay,w1,w2]; times in seconds
# with six decimal places (exact in ticks); UTF-8 with LF line endings.


def write_trace_csv(trace: Signal, path) -> None:
    extras = [n for n in EXTRA_COMPONENTS if n in trace.components]
    header = ["t", *STATE_COMPONENTS, *extras]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(len(trace)):
            row = [f"{to_seconds(trace.t(i)):.6f}"]
            row += [repr(float(trace.components[n][i])) for n in STATE_COMPONENTS]
            row += [repr(float(trace.components[n][i])) for n in extras]
            writer.writerow(row)


def read_trace_csv(path) -> Signal:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "t":
            raise ValueError(f"{path}: not a trace CSV (missing 't' column)")
        names = header[1:]
        times = []
        columns: list[list[float]] = [[] for _ in names]
        for row in reader:
            if not row:
                continue
            times.append(to_ticks(float(row[0])))
            for col, cell in zip(columns, row[1:]):
                col.append(float(cell))
    if not times:
        raise ValueError(f"{path}: trace contains no samples")
    return Signal(np.array(times, dtype=np.int64), {n: np.array(c) for n, c in zip(names, columns)})
