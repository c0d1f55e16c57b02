"""Randomized formulas and signals for the property suites.

Signals carry x/y components drawn from a mixture of broad uniforms and
values parked just next to predicate thresholds, so that robustness values
land near zero and sign boundaries get stressed.  Generated predicate values
are never exactly zero at a sample (instances that produce one are
redrawn): strict satisfaction makes zero a violation, and an exact zero
under an odd number of negations is the one measure-zero point where sign
consistency cannot hold.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .formula import (
    And,
    BinOp,
    BOTTOM,
    Const,
    Formula,
    Interval,
    Not,
    Or,
    Pow,
    Pred,
    TOP,
    Until,
    Var,
    formula_predicates,
    to_ticks,
)
from .signals import Signal

_VARS = ("x", "y")


def random_interval(rng: np.random.Generator, span_s: float = 10.0) -> Interval:
    if rng.random() < 0.25:
        lower = 0
    else:
        lower = int(rng.integers(0, to_ticks(span_s * 0.8)))
    if rng.random() < 0.05:
        upper: float = math.inf
    else:
        upper = int(rng.integers(lower + 1, to_ticks(span_s) + 1))
    lower_closed = bool(rng.random() < 0.7)
    upper_closed = upper != math.inf and bool(rng.random() < 0.7)
    return Interval(lower, upper, lower_closed, upper_closed)


def random_predicate(rng: np.random.Generator) -> Pred:
    kind = rng.random()
    var = Var(str(rng.choice(_VARS)))
    if kind < 0.5:
        c = Const(float(rng.normal(0.0, 1.0)))
        return Pred(BinOp("-", var, c) if rng.random() < 0.5 else BinOp("-", c, var))
    if kind < 0.8:
        other = Var(str(rng.choice(_VARS)))
        a = Const(float(rng.normal(0.0, 1.0)))
        return Pred(BinOp("-", BinOp("+", var, BinOp("*", a, other)), Const(float(rng.normal(0.0, 1.0)))))
    # quadratic ring predicate, exercises integer powers
    cx = Const(float(rng.normal(0.0, 1.0)))
    r2 = Const(float(rng.uniform(0.05, 2.0)))
    return Pred(BinOp("-", r2, Pow(BinOp("-", var, cx), 2)))


def random_formula(
    rng: np.random.Generator,
    max_depth: int = 4,
    max_temporal: int = 3,
    interval_span_s: float = 10.0,
) -> Formula:
    budget = [max_temporal]

    def build(depth: int) -> Formula:
        if depth >= max_depth:
            roll = rng.random()
            if roll < 0.85:
                return random_predicate(rng)
            return TOP if roll < 0.925 else BOTTOM
        roll = rng.random()
        if roll < 0.30:
            return random_predicate(rng)
        if roll < 0.45:
            return Not(build(depth + 1))
        if roll < 0.60:
            return And(build(depth + 1), build(depth + 1))
        if roll < 0.72:
            return Or(build(depth + 1), build(depth + 1))
        if budget[0] > 0:
            budget[0] -= 1
            interval = random_interval(rng, interval_span_s)
            kind = rng.random()
            if kind < 0.4:
                return Until(build(depth + 1), interval, build(depth + 1))
            if kind < 0.7:
                return Until(TOP, interval, build(depth + 1))
            return Not(Until(TOP, interval, Not(build(depth + 1))))
        if roll < 0.86:
            return random_predicate(rng)
        return Not(build(depth + 1))

    return build(0)


def random_times(rng: np.random.Generator, length: int) -> np.ndarray:
    if rng.random() < 0.5:
        # grid-aligned: multiples of a fixed period
        period = int(rng.choice([to_ticks(0.1), to_ticks(0.5), to_ticks(1.0)]))
        start = int(rng.integers(0, 3)) * period
        return start + period * np.arange(length, dtype=np.int64)
    gaps = rng.integers(to_ticks(0.05), to_ticks(3.0), size=length - 1) if length > 1 else np.array([], dtype=np.int64)
    start = int(rng.integers(0, to_ticks(2.0)))
    return np.concatenate([[start], start + np.cumsum(gaps)]).astype(np.int64)


def random_signal(rng: np.random.Generator, min_len: int = 3, max_len: int = 10) -> Signal:
    length = int(rng.integers(min_len, max_len + 1))
    times = random_times(rng, length)
    comps = {}
    for name in _VARS:
        broad = rng.uniform(-5.0, 5.0, size=length)
        near = rng.normal(0.0, 0.05, size=length)
        pick = rng.random(size=length) < 0.5
        comps[name] = np.where(pick, near, broad)
    return Signal(times, comps)


def random_instance(
    rng: np.random.Generator,
    max_depth: int = 4,
    max_temporal: int = 3,
    min_len: int = 3,
    max_len: int = 10,
) -> tuple[Formula, Signal]:
    """A (formula, signal) pair with no predicate hitting exactly zero."""
    while True:
        f = random_formula(rng, max_depth=max_depth, max_temporal=max_temporal)
        s = random_signal(rng, min_len=min_len, max_len=max_len)
        if not _has_exact_zero(f, s):
            return f, s


def _has_exact_zero(f: Formula, s: Signal) -> bool:
    preds = formula_predicates(f)
    if not preds:
        return False
    for p in preds:
        values = p.fn.eval(s.components)
        if np.ndim(values) == 0:
            if values == 0.0:
                return True
        elif np.any(values == 0.0):
            return True
    return False


# ---------------------------------------------------------------------------
# Counterexample shrinking: greedy subtree replacement with true/false plus
# signal truncation from the end.


def _subtree_paths(f: Formula) -> list[tuple[str, ...]]:
    paths: list[tuple[str, ...]] = []

    def walk(g: Formula, path: tuple[str, ...]) -> None:
        paths.append(path)
        if isinstance(g, Not):
            walk(g.child, path + ("child",))
        elif isinstance(g, (And, Or)):
            walk(g.left, path + ("left",))
            walk(g.right, path + ("right",))
        elif isinstance(g, Until):
            walk(g.left, path + ("left",))
            walk(g.right, path + ("right",))

    walk(f, ())
    return paths


def _replace(f: Formula, path: tuple[str, ...], new: Formula) -> Formula:
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(f, Not):
        return Not(_replace(f.child, rest, new))
    if isinstance(f, And):
        if head == "left":
            return And(_replace(f.left, rest, new), f.right)
        return And(f.left, _replace(f.right, rest, new))
    if isinstance(f, Or):
        if head == "left":
            return Or(_replace(f.left, rest, new), f.right)
        return Or(f.left, _replace(f.right, rest, new))
    if isinstance(f, Until):
        if head == "left":
            return Until(_replace(f.left, rest, new), f.interval, f.right)
        return Until(f.left, f.interval, _replace(f.right, rest, new))
    raise ValueError(f"bad path {path} into {f!r}")


def shrink_instance(
    f: Formula,
    s: Signal,
    still_failing: Callable[[Formula, Signal], bool],
    min_samples: int = 2,
) -> tuple[Formula, Signal]:
    """Greedy minimization of a failing (formula, signal) instance."""
    changed = True
    while changed:
        changed = False
        while len(s) > min_samples:
            shorter = s.prefix(len(s) - 2)
            if still_failing(f, shorter):
                s = shorter
                changed = True
            else:
                break
        for path in _subtree_paths(f):
            if not path:
                continue
            for repl in (TOP, BOTTOM):
                candidate = _replace(f, path, repl)
                if candidate != f and still_failing(candidate, s):
                    f = candidate
                    changed = True
                    break
            if changed:
                break
    return f, s
