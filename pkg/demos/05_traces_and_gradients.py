# Applications of density probes: boundary traces of functions via
# shrinking half-ball means, and a set-valued gradient for Lipschitz
# functions with its calculus rules.

import numpy as np

from puremeasure.density_engine import DeltaSchedule
from puremeasure.geometry import Box, PointFeature, interval
from puremeasure.quadrature import SampleSpec
from puremeasure.trace_gradient import (
    ScalarField,
    boundary_trace,
    calculus_rule_check,
    density_gradient,
)

spec = SampleSpec(n=100_000, seed=4)

square = Box((0.0, 0.0), (1.0, 1.0))
edge = (0.0, 0.5)
sched = DeltaSchedule.auto(PointFeature(edge), square)

trace = boundary_trace(lambda p: p[:, 0] + p[:, 1], square, edge, sched, spec)
print(f"trace of x+y at (0, 0.5): {trace.limit.mid:.4f}  ({trace.verdict})")

jumpy = boundary_trace(lambda p: (p[:, 1] > p[:, 0]).astype(float), square, edge, sched, spec)
print(f"trace of 1{{y > x}} at (0, 0.5): {jumpy.limit.mid:.4f}  (locally constant inside)")

bad = boundary_trace(lambda p: 1.0 / np.sqrt(p[:, 0]), square, edge, sched, spec)
print(f"trace of 1/sqrt(x): verdict {bad.verdict}, unintegrable flag {bad.unintegrable}")

# gradients: |x| has the full interval [-1, 1] at its kink, a point at 0.5
line = interval(-1.0, 1.0)
line_sched = DeltaSchedule.auto(PointFeature((0.0,)), line)

kink = density_gradient(line, (0.0,), line_sched, spec, grad=lambda p: np.sign(p))
iv = kink.box.intervals[0]
print(f"\ngradient of |x| at 0:   [{iv.lo:.3f}, {iv.hi:.3f}]")

smooth = density_gradient(line, (0.0,), line_sched, spec,
                          field=ScalarField(f=lambda p: p[:, 0] ** 2, grad=lambda p: 2 * p))
iv = smooth.box.intervals[0]
print(f"gradient of x^2 at 0:   [{iv.lo:.5f}, {iv.hi:.5f}]  (collapses at smooth points)")

# the sum rule: gradients of a sum sit inside the sum of the gradient boxes
f1 = ScalarField(f=lambda p: np.abs(p[:, 0]), grad=lambda p: np.sign(p))
f2 = ScalarField(f=lambda p: -np.abs(p[:, 0]), grad=lambda p: -np.sign(p))
rule = calculus_rule_check("sum", f1, f2, (0.0,), line, line_sched, spec)
lhs, rhs = rule.lhs.intervals[0], rule.rhs.intervals[0]
print(f"\nsum rule for |x| + (-|x|):")
print(f"  gradient of the sum: [{lhs.lo:.3f}, {lhs.hi:.3f}]  (cancellation)")
print(f"  sum of the boxes:    [{rhs.lo:.3f}, {rhs.hi:.3f}]")
print(f"  containment holds:   {rule.contained}")
