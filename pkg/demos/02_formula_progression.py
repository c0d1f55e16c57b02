"""Formula progression: consuming a signal one sample at a time.

Progression rewrites a formula after each observation so that the rewritten
formula, evaluated over the remaining suffix, says the same thing as the
original formula over the whole signal.  That turns robustness-to-go into a
plain robustness computation over the suffix, which is what makes it cheap
inside a replanning loop.
"""
import numpy as np

from rotogo import (
    Signal,
    format_formula,
    monitor_step,
    parse_formula,
    robustness,
    rotogo,
    rotogo_via_progression,
    start_monitor,
    to_seconds,
    to_ticks,
)

times = np.arange(5, dtype=np.int64) * to_ticks(1.0)
signal = Signal(times, {"x": np.array([0.2, 0.6, -0.1, 1.4, 2.2])})
phi = parse_formula("G[0,4] (x > -0.5) & F[0,4] (x > 2)")
print("phi_0:", format_formula(phi))

# ---------------------------------------------------------------------------
# Watch the formula rewrite itself as samples arrive.  The windows shrink by
# the elapsed time; resolved parts collapse to true or false and vanish.

monitor = start_monitor(phi, signal.t0)
for i in range(len(signal) - 1):
    monitor = monitor_step(monitor, signal.t(i + 1), signal.state(i))
    anchor = to_seconds(monitor.anchor_time)
    print(f"after sample {i} (anchor {anchor:.0f}s): {format_formula(monitor.current)}")
print("verdict:", monitor.verdict)

# ---------------------------------------------------------------------------
# The central identity: progressing through samples 0..k and evaluating the
# robustness of the result at the next sample equals the robustness-to-go of
# the original formula with the cut at sample k.  Exactly, including signs
# of infinities.

for cut in range(len(signal) - 1):
    via_progression = rotogo_via_progression(signal, cut, phi)
    direct = rotogo(signal, signal.t0, signal.t(cut), phi)
    print(f"cut {cut}: progression {via_progression!r:>8}  direct {direct!r:>8}  equal={via_progression == direct}")

# ---------------------------------------------------------------------------
# Because the progressed formula only mentions the future, its robustness is
# untouched by anything that happened before the anchor: mutate the already
# consumed samples arbitrarily and the value cannot change.

from rotogo.progression import progress_along

progressed = progress_along(phi, signal, 2)
base = robustness(signal, signal.t(3), progressed)
vandalized = signal.replaced(0, {"x": 999.0}).replaced(1, {"x": -999.0})
print("suffix robustness before mutation:", base)
print("suffix robustness after mutation: ", robustness(vandalized, vandalized.t(3), progressed))
