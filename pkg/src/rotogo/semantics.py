"""Reference evaluators: boolean satisfaction, robustness, robustness-to-go.

All three recurse directly over the formula tree with quantifiers ranging
over sample timestamps, one subterm at a time.  This module is deliberately
naive (no memoization or vectorization): it doubles as the brute-force
oracle that the fast evaluator in :mod:`rotogo.fasteval` is checked against,
bit for bit.

Values are extended reals represented as Python floats: ``-inf`` and
``+inf`` are ordinary IEEE infinities, which already satisfy the required
algebra (total order, exact negation, min/max absorption).  The supremum
over an empty set is ``-inf`` and the infimum over an empty set is ``+inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .formula import (
    And,
    Bottom,
    Expr,
    Formula,
    Not,
    Or,
    Pred,
    TimePoint,
    Top,
    Until,
)
from .signals import Signal

NEG_INF = -math.inf
POS_INF = math.inf


def inf_sign(value: float) -> float:
    """``+inf`` for positive values, else ``-inf``.

    Used to mask predicate contributions at or before the cut time: a zero
    value counts as a violation, consistent with strict satisfaction
    ``f(state) > 0``, so it maps to ``-inf``.
    """
    return POS_INF if value > 0 else NEG_INF


# ---------------------------------------------------------------------------
# Boolean satisfaction


def sat(signal: Signal, t: TimePoint, f: Formula) -> bool:
    """Pointwise boolean satisfaction of ``f`` over ``signal`` at time ``t``."""
    signal.index_of(t)  # raises NoSampleError when t is not a sample time
    return _sat(signal, t, f)


def _sat(signal: Signal, t: TimePoint, f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Pred):
        return f.fn.eval(signal.value_at(t)) > 0
    if isinstance(f, Not):
        return not _sat(signal, t, f.child)
    if isinstance(f, And):
        return _sat(signal, t, f.left) and _sat(signal, t, f.right)
    if isinstance(f, Or):
        return _sat(signal, t, f.left) or _sat(signal, t, f.right)
    if isinstance(f, Until):
        for tp in signal.times_in(f.interval, offset=t):
            if _sat(signal, tp, f.right) and all(
                _sat(signal, tpp, f.left) for tpp in signal.times_between(t, tp)
            ):
                return True
        return False
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Robustness


def robustness(signal: Signal, t: TimePoint, f: Formula) -> float:
    """Robust satisfaction value of ``f`` over ``signal`` at time ``t``."""
    signal.index_of(t)
    return _rob(signal, t, f)


def _rob(signal: Signal, t: TimePoint, f: Formula) -> float:
    if isinstance(f, Top):
        return POS_INF
    if isinstance(f, Bottom):
        return NEG_INF
    if isinstance(f, Pred):
        return f.fn.eval(signal.value_at(t))
    if isinstance(f, Not):
        return -_rob(signal, t, f.child)
    if isinstance(f, And):
        return min(_rob(signal, t, f.left), _rob(signal, t, f.right))
    if isinstance(f, Or):
        return max(_rob(signal, t, f.left), _rob(signal, t, f.right))
    if isinstance(f, Until):
        best = NEG_INF
        for tp in signal.times_in(f.interval, offset=t):
            v = _rob(signal, tp, f.right)
            for tpp in signal.times_between(t, tp):
                v = min(v, _rob(signal, tpp, f.left))
            best = max(best, v)
        return best
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Robustness-to-go


def rotogo(signal: Signal, t: TimePoint, t_hat: TimePoint, f: Formula) -> float:
    """Robustness-to-go of ``f`` from cut time ``t_hat``, evaluated at ``t``.

    Identical to :func:`robustness` except at predicate leaves: a predicate
    evaluated at a time at or before ``t_hat`` contributes only its sign,
    scaled to infinity, so the value isolates the suffix's contribution.
    """
    signal.index_of(t)
    return _rtg(signal, t, t_hat, f)


def _rtg(signal: Signal, t: TimePoint, t_hat: TimePoint, f: Formula) -> float:
    if isinstance(f, Top):
        return POS_INF
    if isinstance(f, Bottom):
        return NEG_INF
    if isinstance(f, Pred):
        value = f.fn.eval(signal.value_at(t))
        return value if t > t_hat else inf_sign(value)
    if isinstance(f, Not):
        return -_rtg(signal, t, t_hat, f.child)
    if isinstance(f, And):
        return min(_rtg(signal, t, t_hat, f.left), _rtg(signal, t, t_hat, f.right))
    if isinstance(f, Or):
        return max(_rtg(signal, t, t_hat, f.left), _rtg(signal, t, t_hat, f.right))
    if isinstance(f, Until):
        best = NEG_INF
        for tp in signal.times_in(f.interval, offset=t):
            v = _rtg(signal, tp, t_hat, f.right)
            for tpp in signal.times_between(t, tp):
                v = min(v, _rtg(signal, tpp, t_hat, f.left))
            best = max(best, v)
        return best
    raise TypeError(f"not a formula: {f!r}")


def sign_consistency_check(signal: Signal, f: Formula, t_hat: TimePoint) -> bool:
    """Satisfaction at the first sample agrees with positive robustness-to-go.

    This must hold for every signal, formula, and cut time; the randomized
    self-test suite exercises it across the generated corpus.
    """
    t0 = signal.t0
    return (rotogo(signal, t0, t_hat, f) > 0) == sat(signal, t0, f)


# ---------------------------------------------------------------------------
# Witness-reporting robustness
#
# A finite robustness is always attained by some (possibly negated)
# predicate at some sample time.  The instrumented evaluator reports that
# witness so tests can re-evaluate it independently.


@dataclass(frozen=True)
class Witness:
    fn: Expr
    time: TimePoint
    sign: int  # +1 or -1

    def value(self, signal: Signal) -> float:
        raw = self.fn.eval(signal.value_at(self.time))
        return raw if self.sign > 0 else -raw


def robustness_witness(signal: Signal, t: TimePoint, f: Formula) -> tuple[float, Optional[Witness]]:
    signal.index_of(t)
    return _rob_wit(signal, t, f)


def _rob_wit(signal: Signal, t: TimePoint, f: Formula) -> tuple[float, Optional[Witness]]:
    if isinstance(f, Top):
        return POS_INF, None
    if isinstance(f, Bottom):
        return NEG_INF, None
    if isinstance(f, Pred):
        return f.fn.eval(signal.value_at(t)), Witness(f.fn, t, +1)
    if isinstance(f, Not):
        v, w = _rob_wit(signal, t, f.child)
        return -v, None if w is None else Witness(w.fn, w.time, -w.sign)
    if isinstance(f, And):
        lv = _rob_wit(signal, t, f.left)
        rv = _rob_wit(signal, t, f.right)
        return min(lv, rv, key=lambda p: p[0])
    if isinstance(f, Or):
        lv = _rob_wit(signal, t, f.left)
        rv = _rob_wit(signal, t, f.right)
        return max(lv, rv, key=lambda p: p[0])
    if isinstance(f, Until):
        best: tuple[float, Optional[Witness]] = (NEG_INF, None)
        for tp in signal.times_in(f.interval, offset=t):
            v = _rob_wit(signal, tp, f.right)
            for tpp in signal.times_between(t, tp):
                v = min(v, _rob_wit(signal, tpp, f.left), key=lambda p: p[0])
            best = max(best, v, key=lambda p: p[0])
        return best
    raise TypeError(f"not a formula: {f!r}")
