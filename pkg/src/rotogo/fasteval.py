"""Vectorized robustness evaluation over whole signals.

The reference evaluator in :mod:`rotogo.semantics` recurses per time point;
this module instead computes, for each subformula, the robustness at every
sample index in one numpy pass, optionally batched over many candidate
signals that share the same timestamps.  That is what makes the planner's
inner loop affordable: one model-predictive replan evaluates hundreds of
candidate trajectories against the same formula.

The two evaluators agree bit for bit: boolean connectives are pure min/max
selections, and predicate expressions execute the identical sequence of
IEEE-754 operations whether applied to scalars or arrays.  The equivalence
is enforced on randomized corpora by the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .formula import (
    And,
    Bottom,
    Formula,
    Interval,
    Not,
    Or,
    Pred,
    Top,
    Until,
)
from .signals import Signal

NEG_INF = -math.inf
POS_INF = math.inf


@dataclass
class TouchCounter:
    """Counts how much signal an evaluation had to look at.

    ``samples`` is the number of distinct sample slots visited (the length
    of the evaluated signal); ``reads`` counts individual predicate-sample
    evaluations.
    """

    samples: int = 0
    reads: int = 0

    def visit(self, n_samples: int, n_reads: int) -> None:
        self.samples = max(self.samples, n_samples)
        self.reads += n_reads


def eval_robustness_all(signal: Signal, f: Formula, counter: TouchCounter | None = None) -> np.ndarray:
    """Robustness of ``f`` at every sample time of ``signal``; shape (n,)."""
    comps = {name: col[np.newaxis, :] for name, col in signal.components.items()}
    return eval_robustness_arrays(signal.times, comps, f, counter)[0]


def eval_robustness(signal: Signal, t, f: Formula, counter: TouchCounter | None = None) -> float:
    """Robustness of ``f`` at sample time ``t``; matches the reference evaluator."""
    return float(eval_robustness_all(signal, f, counter)[signal.index_of(t)])


def eval_robustness_arrays(
    times: np.ndarray,
    components: dict[str, np.ndarray],
    f: Formula,
    counter: TouchCounter | None = None,
) -> np.ndarray:
    """Batched robustness table.

    ``times`` has shape (n,) and every component array shape (B, n), one row
    per candidate signal sharing those timestamps.  Returns a (B, n) array of
    robustness values, value[b, j] being the robustness of ``f`` over
    candidate b at sample j.
    """
    times = np.ascontiguousarray(times, dtype=np.int64)
    return _Evaluator(times, components, counter).run(f)


class _Evaluator:
    def __init__(self, times, components, counter):
        self.times = times
        self.components = components
        self.counter = counter
        self.n = times.shape[0]
        self.batch = next(iter(components.values())).shape[0]

    def run(self, f: Formula) -> np.ndarray:
        if isinstance(f, Top):
            return np.full((self.batch, self.n), POS_INF)
        if isinstance(f, Bottom):
            return np.full((self.batch, self.n), NEG_INF)
        if isinstance(f, Pred):
            if self.counter is not None:
                self.counter.visit(self.n, self.batch * self.n)
            out = f.fn.eval(self.components)
            return np.broadcast_to(np.asarray(out, dtype=np.float64), (self.batch, self.n)).copy() if np.ndim(out) == 0 else np.asarray(out, dtype=np.float64)
        if isinstance(f, Not):
            return -self.run(f.child)
        if isinstance(f, And):
            return np.minimum(self.run(f.left), self.run(f.right))
        if isinstance(f, Or):
            return np.maximum(self.run(f.left), self.run(f.right))
        if isinstance(f, Until):
            return self._until(f)
        raise TypeError(f"not a formula: {f!r}")

    def _window(self, interval: Interval) -> tuple[np.ndarray, np.ndarray]:
        """Per-index half-open index windows of samples inside interval + t_j."""
        lo_bounds = self.times + interval.lower
        lo = np.searchsorted(self.times, lo_bounds, side="left" if interval.lower_closed else "right")
        if interval.upper == math.inf:
            hi = np.full(self.n, self.n, dtype=np.int64)
        else:
            hi_bounds = self.times + int(interval.upper)
            hi = np.searchsorted(self.times, hi_bounds, side="right" if interval.upper_closed else "left")
        return lo.astype(np.int64), np.maximum(lo, hi).astype(np.int64)

    def _until(self, f: Until) -> np.ndarray:
        right = self.run(f.right)
        lo, hi = self._window(f.interval)
        if isinstance(f.left, Top):
            # The inner infimum over the left operand is +inf everywhere, so
            # this reduces to a windowed maximum of the right operand.
            return _windowed_max(right, lo, hi)
        left = self.run(f.left)
        return _until_general(left, right, lo, hi)


def _windowed_max(values: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """out[:, j] = max(values[:, lo[j]:hi[j]]), -inf on empty windows.

    Sparse-table range maxima: O(n log n) build, all queries answered with
    two overlapping power-of-two blocks.  Max is a selection, so results are
    exactly the same floats the reference evaluator produces.
    """
    batch, n = values.shape
    out = np.full((batch, n), NEG_INF)
    width = hi - lo
    if not (width > 0).any():
        return out
    max_width = int(width.max())
    levels = [values]
    while (1 << len(levels)) <= max_width:
        prev = levels[-1]
        half = 1 << (len(levels) - 1)
        levels.append(np.maximum(prev[:, : prev.shape[1] - half], prev[:, half:]))
    exponents = np.frexp(np.maximum(width, 1).astype(np.float64))[1] - 1
    for p in np.unique(exponents[width > 0]):
        mask = (exponents == p) & (width > 0)
        table = levels[int(p)]
        a = table[:, lo[mask]]
        b = table[:, hi[mask] - (1 << int(p))]
        out[:, mask] = np.maximum(a, b)
    return out


def _until_general(left: np.ndarray, right: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Until tables for a non-trivial left operand.

    Quadratic in signal length; only exercised by formulas whose until has a
    non-true left side, which the planner's specifications never produce.
    """
    batch, n = left.shape
    out = np.full((batch, n), NEG_INF)
    for j in range(n):
        lo_j, hi_j = int(lo[j]), int(hi[j])
        if hi_j <= lo_j:
            continue
        vals = right[:, lo_j:hi_j].copy()
        if hi_j - 1 > j:
            # Running minimum of the left operand over [t_j, t_k); the k == j
            # column keeps an empty infimum (+inf), i.e. stays untouched.
            run_min = np.minimum.accumulate(left[:, j : hi_j - 1], axis=1)
            ks = np.arange(lo_j, hi_j)
            sel = ks > j
            vals[:, sel] = np.minimum(vals[:, sel], run_min[:, ks[sel] - j - 1])
        out[:, j] = vals.max(axis=1)
    return out
