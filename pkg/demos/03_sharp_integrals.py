# Sharp integrals: means of a function over shrinking neighborhoods of a
# feature.  Continuous integrands recover their point value; oscillating
# ones produce the full interval between their essential bounds, and those
# bounds are attained by restricting the reference weight; essentially
# unbounded integrands are flagged instead of silently averaged.

import numpy as np

from puremeasure.density_engine import DeltaSchedule, action_interval, sharp_integral
from puremeasure.geometry import PointFeature, interval
from puremeasure.quadrature import SampleSpec

spec = SampleSpec(n=200_000, seed=2)

omega = interval(-1.0, 1.0)
origin = PointFeature((0.0,))
schedule = DeltaSchedule.auto(origin, omega)

smooth = sharp_integral(lambda p: np.cos(p[:, 0]), origin, omega, schedule, spec)
print(f"sharp integral of cos at 0: {smooth.limit.mid:.5f}  ({smooth.verdict})")

# an oscillating integrand has no limit; the action interval captures the
# exact set of values density measures can assign
half = interval(0.0, 1.0)
half_sched = DeltaSchedule.auto(origin, half)
fn = lambda p: np.sin(1.0 / p[:, 0])
bounds = action_interval(fn, origin, half, half_sched, spec, tol=0.05)
print(f"action interval of sin(1/x) at 0: [{bounds.lo:.3f}, {bounds.hi:.3f}]")

# the upper bound is sharp: weighting the reference toward the near-maximal
# set pushes the mean against it
eps = 0.1
weight = lambda p: (fn(p) >= 1.0 - eps).astype(float)
pushed = sharp_integral(fn, origin, half, half_sched, spec, weight=weight)
print(f"weighted toward {{sin(1/x) >= {1-eps}}}: mean {pushed.limit.mid:.4f} > {1 - 2*eps}")

# sign(x)/sqrt|x|: the symmetric means vanish, yet the function is not
# integrable against any density measure at 0; the engine flags it
odd = sharp_integral(
    lambda p: np.sign(p[:, 0]) / np.sqrt(np.abs(p[:, 0])), origin, omega, schedule, spec
)
print("\nsign(x)/sqrt|x| near 0:")
print("  symmetric mean profile:", [round(l.value, 6) for l in odd.series[-4:]])
print("  unintegrable flag:", odd.unintegrable)
print("  capped samples per level:", [l.capped for l in odd.series[-4:]])
