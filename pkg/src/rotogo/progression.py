"""Formula progression: rewrite a formula after observing one sample.

Progressing a formula by a time step consumes the current observation, so
that evaluating the progressed formula over the remaining suffix is
equivalent to evaluating the original formula over the whole signal.
Quantitatively, the robustness of the progressed formula at the next sample
time equals the robustness-to-go of the original formula with the cut placed
at the consumed sample; the self-test suite checks this identity exactly on
randomized corpora.

Until operators are rewritten by shifting their interval earlier by the step
and clipping at zero; an until whose interval becomes empty resolves to
false.  Each progression step runs the result through :func:`simplify`,
without which the rewritten formula grows by a constant factor per step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .formula import (
    And,
    BOTTOM,
    Bottom,
    Formula,
    Not,
    Or,
    Pred,
    TOP,
    TimePoint,
    Top,
    Until,
    node_count,
)
from .semantics import robustness
from .signals import Signal

#: Hard cap on progressed-formula size, guarding against pathological nesting.
MAX_PROGRESSED_NODES = 10_000


class FormulaSizeError(RuntimeError):
    pass


def progress(f: Formula, delta: TimePoint, state: Mapping[str, float]) -> Formula:
    """Progress ``f`` by ``delta`` ticks given the observed ``state``.

    The result is simplified.  ``delta`` must be positive.
    """
    if delta <= 0:
        raise ValueError("progression requires delta > 0")
    out = simplify(_progress(f, delta, state))
    if node_count(out) > MAX_PROGRESSED_NODES:
        raise FormulaSizeError(f"progressed formula exceeds {MAX_PROGRESSED_NODES} nodes")
    return out


def _progress(f: Formula, delta: TimePoint, state: Mapping[str, float]) -> Formula:
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Pred):
        return TOP if f.fn.eval(state) > 0 else BOTTOM
    if isinstance(f, Not):
        return Not(_progress(f.child, delta, state))
    if isinstance(f, And):
        return And(_progress(f.left, delta, state), _progress(f.right, delta, state))
    if isinstance(f, Or):
        return Or(_progress(f.left, delta, state), _progress(f.right, delta, state))
    if isinstance(f, Until):
        shifted = f.interval.shift_truncate(delta)
        tail: Formula = BOTTOM if shifted.is_empty() else Until(f.left, shifted, f.right)
        left_now = _progress(f.left, delta, state)
        if f.interval.strictly_positive():
            return And(left_now, tail)
        # 0 lies in the interval: the right operand may already hold now.
        return Or(_progress(f.right, delta, state), And(left_now, tail))
    raise TypeError(f"not a formula: {f!r}")


def simplify(f: Formula) -> Formula:
    """Remove true/false constants and double negations, bottom-up.

    Rewrites preserve robustness (and robustness-to-go) exactly on every
    signal: each rule only discards operands that are absorbed by min/max
    against an infinity.
    """
    if isinstance(f, Not):
        c = simplify(f.child)
        if isinstance(c, Top):
            return BOTTOM
        if isinstance(c, Bottom):
            return TOP
        if isinstance(c, Not):
            return c.child
        return Not(c)
    if isinstance(f, And):
        l = simplify(f.left)
        r = simplify(f.right)
        if isinstance(l, Bottom) or isinstance(r, Bottom):
            return BOTTOM
        if isinstance(l, Top):
            return r
        if isinstance(r, Top):
            return l
        return And(l, r)
    if isinstance(f, Or):
        l = simplify(f.left)
        r = simplify(f.right)
        if isinstance(l, Top) or isinstance(r, Top):
            return TOP
        if isinstance(l, Bottom):
            return r
        if isinstance(r, Bottom):
            return l
        return Or(l, r)
    if isinstance(f, Until):
        l = simplify(f.left)
        r = simplify(f.right)
        if f.interval.is_empty():
            return BOTTOM
        if isinstance(l, Bottom) and not f.interval.contains_zero():
            return BOTTOM
        return Until(l, f.interval, r)
    return f


# ---------------------------------------------------------------------------
# Incremental monitor


@dataclass(frozen=True)
class MonitorState:
    """A progressed formula together with the time it is anchored at.

    ``current`` is the fold of :func:`progress` over all consumed samples,
    and ``anchor_time`` is the timestamp the next observation is expected
    at.  Once ``current`` reaches true or false the verdict is absorbing.
    """

    current: Formula
    anchor_time: TimePoint
    original: Formula
    step_count: int = 0

    @property
    def verdict(self) -> str:
        if isinstance(self.current, Top):
            return "satisfied"
        if isinstance(self.current, Bottom):
            return "violated"
        return "undecided"


def start_monitor(f: Formula, t0: TimePoint) -> MonitorState:
    return MonitorState(current=f, anchor_time=t0, original=f, step_count=0)


def monitor_step(m: MonitorState, next_sample_time: TimePoint, state: Mapping[str, float]) -> MonitorState:
    """Consume the observation at ``m.anchor_time`` and advance the anchor."""
    if next_sample_time <= m.anchor_time:
        raise ValueError("monitor time must be strictly increasing")
    if isinstance(m.current, (Top, Bottom)):
        progressed = m.current  # absorbing verdict, skip the recursion
    else:
        progressed = progress(m.current, next_sample_time - m.anchor_time, state)
    return MonitorState(progressed, next_sample_time, m.original, m.step_count + 1)


def progress_along(f0: Formula, signal: Signal, upto_index: int) -> Formula:
    """Fold :func:`progress` over samples 0..upto_index of ``signal``."""
    f = f0
    for k in range(upto_index + 1):
        f = progress(f, signal.t(k + 1) - signal.t(k), signal.state(k))
    return f


def rotogo_via_progression(signal: Signal, cut_index: int, f0: Formula) -> float:
    """Robustness-to-go with the cut at sample ``cut_index``, via progression.

    Progresses ``f0`` through samples 0..cut_index and evaluates the result's
    robustness at the following sample time.  Equals the direct
    robustness-to-go of ``f0`` from the signal start with the cut at
    ``t(cut_index)``.
    """
    if not 0 <= cut_index < len(signal) - 1:
        raise IndexError(f"cut_index {cut_index} out of range for {len(signal)} samples")
    progressed = progress_along(f0, signal, cut_index)
    return robustness(signal, signal.t(cut_index + 1), progressed)
