# The density at zero: the volume fraction a set occupies in shrinking
# balls around the origin.  The limit defines a normalized, finitely
# additive set function that no countably additive measure can reproduce,
# which the disjoint slab family below makes visible.


from puremeasure.density_engine import DeltaSchedule, density_probe, sigma_probe
from puremeasure.geometry import Ball, Box, PointFeature, interval
from puremeasure.quadrature import SampleSpec

spec = SampleSpec(n=100_000, seed=1)

# one dimension: Omega = (-1, 1), feature {0}, probed set (0, 1)
omega = interval(-1.0, 1.0)
origin = PointFeature((0.0,))
probe = density_probe(interval(0.0, 1.0), origin, omega, DeltaSchedule.auto(origin, omega), spec)

print("density of (0,1) at 0 inside (-1,1):")
print(f"  {'delta':>10}  {'ratio':>8}  {'stderr':>8}  hits")
for row in probe.series:
    print(f"  {row.delta:10.5f}  {row.value:8.4f}  {row.stderr:8.4f}  {row.hits}")
print(f"  verdict: {probe.verdict}, limit ~ {probe.limit.mid:.4f}")

# two dimensions: slabs accumulating at the origin break countable additivity
disk = Ball((0.0, 0.0), 1.0)
center = PointFeature((0.0, 0.0))
members = [Box((1.0 / (k + 2), -1.0), (1.0 / (k + 1), 1.0)) for k in range(1, 9)]
union = Box((0.0, -1.0), (0.5, 1.0))

report = sigma_probe(members, union, center, disk, DeltaSchedule.auto(center, disk), spec)
print("\nslab family inside the unit disk:")
print("  member density limits:", [round(float(r.limit.mid), 4) for r in report.members])
print(f"  sum of member limits:  {report.member_sum:.4f}")
print(f"  density of the union:  {report.union_value:.4f}")
print(f"  countable additivity violated: {report.violation}")
