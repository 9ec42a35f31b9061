# Cone densities probe how mass concentrates along directions at a point.
# In a disk the density of a cone is its angular fraction; at the tip of a
# power cusp all mass concentrates along the cusp axis, the behaviour a
# directionally concentrated (extremal) density measure would certify.

import numpy as np

from puremeasure.density_engine import DeltaSchedule, cone_density
from puremeasure.geometry import Ball, Cusp, PointFeature
from puremeasure.quadrature import SampleSpec

spec = SampleSpec(n=100_000, seed=3)

disk = Ball((0.0, 0.0), 1.0)
center = PointFeature((0.0, 0.0))
sched = DeltaSchedule.auto(center, disk)

for alpha, label in [(np.pi / 4, "pi/4"), (np.pi / 6, "pi/6"), (np.pi / 3, "pi/3")]:
    probe = cone_density((0.0, 0.0), (1.0, 0.0), alpha, disk, sched, spec)
    print(f"disk sector, aperture {label:>4}: density {probe.limit.mid:.4f}"
          f"  (angular fraction {alpha / np.pi:.4f})")

cusp = Cusp(2.0)
tip = PointFeature((0.0, 0.0))
cusp_sched = DeltaSchedule.auto(tip, cusp)

along = cone_density((0.0, 0.0), (1.0, 0.0), np.pi / 4, cusp, cusp_sched, spec)
against = cone_density((0.0, 0.0), (-1.0, 0.0), np.pi / 4, cusp, cusp_sched, spec)
sideways = cone_density((0.0, 0.0), (0.0, 1.0), np.pi / 4, cusp, cusp_sched, spec)

print(f"\ncusp x2^2 < x1, tip at the origin:")
print(f"  cone along the axis:   density {along.limit.mid:.4f}")
print(f"  cone against the axis: density {against.limit.mid:.4f}")
print(f"  cone sideways:         density {sideways.limit.mid:.4f}")
print("all mass sits in every cone around the cusp axis; the report is")
print("evidence of directional concentration, not an extremality proof.")
