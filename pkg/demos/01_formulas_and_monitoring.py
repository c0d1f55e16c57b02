"""Formulas, signals, and the three evaluators.

Builds a small timed signal, parses a temporal formula over it, and compares
plain robustness with robustness-to-go as the cut time moves forward.
"""
import numpy as np

from rotogo import (
    Signal,
    format_formula,
    horizon,
    parse_formula,
    robustness,
    rotogo,
    sat,
    to_seconds,
    to_ticks,
)

# ---------------------------------------------------------------------------
# A signal is a finite set of timed samples; there is no interpolation.
# Sample the x position of something drifting right, 1 Hz for 6 seconds.

times = np.arange(6, dtype=np.int64) * to_ticks(1.0)
signal = Signal(times, {"x": np.array([-0.4, -0.1, 0.3, 0.8, 1.6, 2.9])})
print("signal:", signal)

# ---------------------------------------------------------------------------
# Parse a formula: eventually reach x > 2, while staying above -0.5 throughout.

phi = parse_formula("G[0,5] (x > -0.5) & F[0,5] (x > 2)")
print("formula:", format_formula(phi))
print("horizon:", to_seconds(horizon(phi)), "s")

print("satisfied:", sat(signal, 0, phi))
print("robustness:", robustness(signal, 0, phi))
# The margin 0.1 comes from the tightest moment: x = -0.4 at t = 0 sits only
# 0.1 above the -0.5 floor.

# ---------------------------------------------------------------------------
# Robustness-to-go masks everything at or before the cut time t_hat: past
# samples contribute only their boolean verdict (as +/- infinity), so the
# score isolates what the remaining suffix contributes.

for cut_s in (-1.0, 0.0, 1.0, 3.0):
    value = rotogo(signal, 0, to_ticks(cut_s), phi)
    print(f"rotogo with cut at {cut_s:5.1f}s: {value}")

# With the cut at 1.0 s the weak early samples are forgotten and the score
# is set by the suffix margin instead; a cut before the signal reproduces
# plain robustness exactly.

# ---------------------------------------------------------------------------
# If the past already violated a safety part, no suffix can repair it: the
# robustness-to-go collapses to -inf, mirroring the boolean verdict.

crashed = Signal(times[:3], {"x": np.array([-5.0, 0.3, 0.7])})
g = parse_formula("G[0,2] (x > 0)")
print("violated past, rotogo:", rotogo(crashed, 0, 0, g))
print("violated past, satisfied:", sat(crashed, 0, g))
