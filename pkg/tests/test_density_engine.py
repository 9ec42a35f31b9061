import numpy as np
import pytest

from puremeasure.density_engine import (
    CONVERGED,
    INSUFFICIENT,
    OSCILLATING,
    DeltaSchedule,
    Interval,
    TooShort,
    VanishingReference,
    action_interval,
    action_profile,
    aura_report,
    cone_density,
    density_probe,
    density_ratio,
    limit_estimate,
    sharp_integral,
    sigma_probe,
)
from puremeasure.geometry import (
    Ball,
    Box,
    Cusp,
    PointFeature,
    RegionBoundary,
    Union,
    interval,
)
from puremeasure.quadrature import SampleSpec

OMEGA1 = interval(-1.0, 1.0)
ORIGIN1 = PointFeature((0.0,))
DISK = Ball((0.0, 0.0), 1.0)
ORIGIN2 = PointFeature((0.0, 0.0))


def sched(feature, omega, count=12):
    return DeltaSchedule.auto(feature, omega, count=count)


# ----------------------------------------------------------- delta schedules

def test_schedule_validation():
    with pytest.raises(ValueError):
        DeltaSchedule(0.0)
    with pytest.raises(ValueError):
        DeltaSchedule(1.0, ratio=1.5)
    with pytest.raises(ValueError):
        DeltaSchedule(1.0, count=2)
    s = DeltaSchedule(1.0, 0.5, 4)
    assert s.deltas() == [1.0, 0.5, 0.25, 0.125]


def test_schedule_auto_falls_back_to_domain():
    s = DeltaSchedule.auto(ORIGIN1, OMEGA1)
    assert s.delta0 == pytest.approx(1.0)  # half the domain diagonal
    shell = RegionBoundary(DISK)
    s2 = DeltaSchedule.auto(shell, DISK)
    assert s2.delta0 == pytest.approx(np.sqrt(2))


# ------------------------------------------------------------ density ratio

def test_density_ratio_half_by_symmetry():
    est = density_ratio(interval(0.0, 1.0), ORIGIN1, OMEGA1, 0.1, SampleSpec(n=50_000, seed=1))
    assert est.value == pytest.approx(0.5, abs=1e-12)  # antithetic pairs split evenly


def test_density_ratio_restricted_reference():
    step = lambda p: (p[:, 0] > 0).astype(float)
    est = density_ratio(
        interval(0.0, 1.0), ORIGIN1, OMEGA1, 0.1, SampleSpec(n=50_000, seed=2), weight=step
    )
    assert est.value == pytest.approx(1.0, abs=1e-12)


def test_density_ratio_normalization_exact():
    for delta in (0.5, 0.1, 0.01):
        est = density_ratio(OMEGA1, ORIGIN1, OMEGA1, delta, SampleSpec(n=20_000, seed=3))
        assert est.value == 1.0


def test_density_ratio_range():
    rng_regions = [interval(-1.0, -0.3), interval(-0.2, 0.4), interval(0.0, 1.0)]
    for i, a in enumerate(rng_regions):
        est = density_ratio(a, ORIGIN1, OMEGA1, 0.3, SampleSpec(n=30_000, seed=4 + i))
        assert -2 * est.stderr <= est.value <= 1 + 2 * est.stderr


def test_density_ratio_vanishing_reference():
    far = PointFeature((5.0,))
    with pytest.raises(VanishingReference):
        density_ratio(interval(0.0, 1.0), far, OMEGA1, 0.5, SampleSpec(n=1000, seed=5))


# ------------------------------------------------------------ limit estimate

def test_limit_estimate_converged():
    deltas = [0.5 * 0.5**k for k in range(12)]
    series = [(d, 0.5 + d, 0.0) for d in deltas]
    iv, verdict = limit_estimate(series, 0.02)
    assert verdict == CONVERGED
    assert iv.mid == pytest.approx(0.5, abs=0.01)


def test_limit_estimate_oscillating():
    deltas = [0.5 * 0.5**k for k in range(30)]
    series = [(d, np.sin(1.0 / d), 0.0) for d in deltas]
    iv, verdict = limit_estimate(series, 0.05)
    assert verdict == OSCILLATING
    assert -1.1 <= iv.lo <= iv.hi <= 1.1
    assert iv.width > 1.0


def test_limit_estimate_insufficient_on_divergence():
    deltas = [0.5 * 0.5**k for k in range(12)]
    series = [(d, 1.0 / np.sqrt(d), 0.0) for d in deltas]
    _, verdict = limit_estimate(series, 0.02)
    assert verdict == INSUFFICIENT


def test_limit_estimate_too_short():
    with pytest.raises(TooShort):
        limit_estimate([(0.5, 1.0, 0.0), (0.25, 1.0, 0.0)], 0.02)


# ------------------------------------------------------------ sharp integral

def test_sharp_integral_continuous_point_value():
    r = sharp_integral(
        lambda p: np.cos(p[:, 0]), ORIGIN1, OMEGA1, sched(ORIGIN1, OMEGA1), SampleSpec(n=50_000, seed=6)
    )
    assert r.verdict == CONVERGED
    assert r.limit.mid == pytest.approx(1.0, abs=0.01)
    assert not r.unintegrable


def test_sharp_integral_over_cusp():
    cusp = Cusp(2.0)
    tip = PointFeature((0.0, 0.0))
    r = sharp_integral(lambda p: p[:, 0], tip, cusp, sched(tip, cusp), SampleSpec(n=100_000, seed=7))
    assert r.verdict == CONVERGED
    assert abs(r.limit.mid) <= 0.02


def test_sharp_integral_unintegrable_with_symmetric_mean():
    fn = lambda p: np.sign(p[:, 0]) / np.sqrt(np.abs(p[:, 0]))
    r = sharp_integral(fn, ORIGIN1, OMEGA1, sched(ORIGIN1, OMEGA1), SampleSpec(n=200_000, seed=8))
    assert r.unintegrable
    # center-symmetric pairs cancel the odd integrand identically
    assert all(abs(l.value) <= 0.05 for l in r.series)
    assert any(l.capped > 0 for l in r.series)


def test_sandwich_between_essential_bounds():
    spec = SampleSpec(n=50_000, seed=9)
    s = sched(ORIGIN1, OMEGA1)
    for fn in (lambda p: np.cos(p[:, 0]), lambda p: p[:, 0] ** 2 + 0.25):
        r = sharp_integral(fn, ORIGIN1, OMEGA1, s, spec)
        iv = action_interval(fn, ORIGIN1, OMEGA1, s, spec)
        assert r.verdict == CONVERGED
        assert iv.contains(r.limit.mid, slack=iv.tol)


def test_sharpness_of_essential_bounds():
    omega = interval(0.0, 1.0)
    origin = PointFeature((0.0,))
    s = sched(origin, omega)
    eps = 0.1
    fixtures = [
        (lambda p: np.sin(1.0 / p[:, 0]), 12),
        (lambda p: p[:, 0] * np.sign(np.sin(1.0 / p[:, 0])), 13),
    ]
    for fn, seed in fixtures:
        spec = SampleSpec(n=200_000, seed=seed)
        upper = action_interval(fn, origin, omega, s, spec, tol=0.05).hi
        weight = lambda p: (fn(p) >= upper - eps).astype(float)
        r = sharp_integral(fn, origin, omega, s, spec, weight=weight)
        assert r.limit.mid > upper - 2 * eps


# ----------------------------------------------------------- action interval

def test_action_interval_oscillation():
    omega = interval(0.0, 1.0)
    origin = PointFeature((0.0,))
    iv = action_interval(
        lambda p: np.sin(1.0 / p[:, 0]), origin, omega, sched(origin, omega),
        SampleSpec(n=200_000, seed=10), tol=0.05,
    )
    assert iv.lo == pytest.approx(-1.0, abs=0.05)
    assert iv.hi == pytest.approx(1.0, abs=0.05)


def test_action_interval_constant_and_continuous():
    spec = SampleSpec(n=30_000, seed=11)
    s = sched(ORIGIN1, OMEGA1)
    const = action_interval(lambda p: np.full(len(p), 3.5), ORIGIN1, OMEGA1, s, spec)
    assert const.lo == pytest.approx(3.5) and const.hi == pytest.approx(3.5)
    linear = action_interval(lambda p: p[:, 0], ORIGIN1, OMEGA1, s, spec)
    assert abs(linear.lo) <= 0.02 and abs(linear.hi) <= 0.02


def test_action_profile_envelopes_monotone():
    spec = SampleSpec(n=30_000, seed=12)
    prof = action_profile(lambda p: p[:, 0] ** 2, ORIGIN1, OMEGA1, sched(ORIGIN1, OMEGA1), spec)
    uppers = [l.hi_envelope for l in prof.levels]
    lowers = [l.lo_envelope for l in prof.levels]
    assert all(a >= b for a, b in zip(uppers, uppers[1:]))
    assert all(a <= b for a, b in zip(lowers, lowers[1:]))
    assert not prof.unbounded_lo and not prof.unbounded_hi


def test_action_profile_flags_unbounded():
    omega = interval(0.0, 1.0)
    origin = PointFeature((0.0,))
    prof = action_profile(
        lambda p: 1.0 / np.sqrt(p[:, 0]), origin, omega, sched(origin, omega),
        SampleSpec(n=100_000, seed=13),
    )
    assert prof.unbounded_hi
    assert prof.interval.hi == np.inf


# ------------------------------------------------------------- cone density

def test_cone_density_disk_sector():
    r = cone_density(
        (0.0, 0.0), (1.0, 0.0), np.pi / 4, DISK, sched(ORIGIN2, DISK), SampleSpec(n=100_000, seed=14)
    )
    assert r.verdict == CONVERGED
    assert r.limit.mid == pytest.approx(0.25, abs=0.02)


def test_cone_density_cusp_axis_and_anti_axis():
    cusp = Cusp(2.0)
    tip = PointFeature((0.0, 0.0))
    s = sched(tip, cusp)
    along = cone_density((0.0, 0.0), (1.0, 0.0), np.pi / 4, cusp, s, SampleSpec(n=100_000, seed=15))
    assert along.limit.mid == pytest.approx(1.0, abs=0.02)
    against = cone_density((0.0, 0.0), (-1.0, 0.0), np.pi / 4, cusp, s, SampleSpec(n=100_000, seed=16))
    assert against.limit.mid == pytest.approx(0.0, abs=0.02)


def test_cone_aperture_validated():
    with pytest.raises(ValueError):
        cone_density((0.0, 0.0), (1.0, 0.0), 2.0, DISK, sched(ORIGIN2, DISK), SampleSpec(n=1000, seed=0))


# -------------------------------------------------------------- sigma probe

def test_sigma_probe_slab_family_violation():
    members = [Box((1.0 / (k + 2), -1.0), (1.0 / (k + 1), 1.0)) for k in range(1, 9)]
    union = Box((0.0, -1.0), (0.5, 1.0))
    rep = sigma_probe(members, union, ORIGIN2, DISK, sched(ORIGIN2, DISK), SampleSpec(n=100_000, seed=17))
    assert all(abs(r.limit.mid) <= 0.02 for r in rep.members)
    assert rep.union_value == pytest.approx(0.5, abs=0.03)
    assert rep.violation


def test_sigma_probe_single_member_no_violation():
    a = Box((0.0, -1.0), (0.5, 1.0))
    rep = sigma_probe([a], a, ORIGIN2, DISK, sched(ORIGIN2, DISK), SampleSpec(n=50_000, seed=18))
    assert rep.member_sum == rep.union_value
    assert not rep.violation


def test_sigma_probe_empty_family():
    empty = Box((2.0, 2.0), (3.0, 3.0))  # disjoint from the domain
    rep = sigma_probe([empty, empty], empty, ORIGIN2, DISK, sched(ORIGIN2, DISK), SampleSpec(n=20_000, seed=19))
    assert rep.member_sum == 0.0
    assert rep.union_value == 0.0
    assert not rep.violation


# -------------------------------------------------------------- aura report

def test_aura_interval_volumes():
    rep = aura_report(ORIGIN1, OMEGA1, sched(ORIGIN1, OMEGA1), SampleSpec(n=50_000, seed=20))
    assert rep.decreasing
    for level in rep.levels:
        assert level.mass == 1.0
        # F_delta ∩ Omega = (-delta, delta) fills its own sampling box exactly
        assert level.volume == pytest.approx(2 * level.delta, rel=1e-12)


def test_aura_collar_volumes_decrease():
    shell = RegionBoundary(DISK)
    rep = aura_report(shell, DISK, sched(shell, DISK), SampleSpec(n=100_000, seed=21))
    assert rep.decreasing
    annulus = [l.volume for l in rep.levels]
    assert annulus[-1] < 0.05 * annulus[0]


def test_aura_vanishing_reference():
    far = PointFeature((5.0,))
    with pytest.raises(VanishingReference):
        aura_report(far, OMEGA1, DeltaSchedule(0.5, 0.5, 3), SampleSpec(n=1000, seed=22))


# ------------------------------------------------------ cross-op invariants

def test_additivity_at_the_limit_and_monotonicity():
    a, b = interval(0.0, 1.0), interval(-1.0, -0.5)
    both = Union((a, b))
    spec = SampleSpec(n=50_000, seed=23)
    s = sched(ORIGIN1, OMEGA1)
    pa = density_probe(a, ORIGIN1, OMEGA1, s, spec)
    pb = density_probe(b, ORIGIN1, OMEGA1, s, spec)
    pab = density_probe(both, ORIGIN1, OMEGA1, s, spec)
    assert pab.limit.mid == pytest.approx(pa.limit.mid + pb.limit.mid, abs=pa.limit.tol + pb.limit.tol)
    # shared stream: per-level monotone, and hits nest exactly
    for ra, rab in zip(pa.series, pab.series):
        assert ra.value <= rab.value + 1e-15
        assert ra.hits <= rab.hits


def test_core_containment_zero_at_positive_distance():
    away = interval(0.25, 0.75)
    probe = density_probe(away, ORIGIN1, OMEGA1, sched(ORIGIN1, OMEGA1), SampleSpec(n=50_000, seed=24))
    for level in probe.series:
        if level.delta < 0.25:
            assert level.value == 0.0


def test_interval_invariant():
    with pytest.raises(ValueError):
        Interval(1.0, 0.5, tol=0.1)
    iv = Interval(0.4, 0.6, tol=0.02)
    assert iv.mid == pytest.approx(0.5)
    assert iv.width == pytest.approx(0.2)
