import numpy as np
import pytest

from puremeasure.density_engine import CONVERGED, INSUFFICIENT, DeltaSchedule, sharp_integral
from puremeasure.geometry import Ball, Box, PointFeature, interval
from puremeasure.quadrature import SampleSpec
from puremeasure.trace_gradient import (
    GradientBox,
    NotOnBoundary,
    ScalarField,
    boundary_trace,
    calculus_rule_check,
    density_gradient,
)

SQUARE = Box((0.0, 0.0), (1.0, 1.0))
EDGE_POINT = (0.0, 0.5)
LINE = interval(-1.0, 1.0)


def edge_schedule():
    return DeltaSchedule.auto(PointFeature(EDGE_POINT), SQUARE)


def line_schedule():
    return DeltaSchedule.auto(PointFeature((0.0,)), LINE)


# ------------------------------------------------------------------- traces

def test_trace_of_continuous_function():
    r = boundary_trace(lambda p: p[:, 0] + p[:, 1], SQUARE, EDGE_POINT, edge_schedule(),
                       SampleSpec(n=100_000, seed=30))
    assert r.verdict == CONVERGED
    assert r.limit.mid == pytest.approx(0.5, abs=0.02)


def test_trace_of_locally_constant_step():
    u = lambda p: (p[:, 1] > p[:, 0]).astype(float)
    r = boundary_trace(u, SQUARE, EDGE_POINT, edge_schedule(), SampleSpec(n=100_000, seed=31))
    assert r.verdict == CONVERGED
    assert r.limit.mid == pytest.approx(1.0, abs=0.02)


def test_trace_diverges_for_unbounded_integrand():
    u = lambda p: 1.0 / np.sqrt(p[:, 0])
    r = boundary_trace(u, SQUARE, EDGE_POINT, edge_schedule(), SampleSpec(n=100_000, seed=32))
    assert r.verdict == INSUFFICIENT
    assert r.unintegrable


def test_trace_rejects_interior_point():
    with pytest.raises(NotOnBoundary):
        boundary_trace(lambda p: p[:, 0], SQUARE, (0.5, 0.5), edge_schedule(),
                       SampleSpec(n=1000, seed=0))


def test_trace_matches_point_value_on_smooth_fixture_suite():
    points = [(0.0, 0.25), (1.0, 0.75), (0.5, 0.0), (0.5, 1.0)]
    u = lambda p: np.cos(p[:, 0]) * np.exp(p[:, 1])
    for i, pt in enumerate(points):
        sched = DeltaSchedule.auto(PointFeature(pt), SQUARE)
        r = boundary_trace(u, SQUARE, pt, sched, SampleSpec(n=60_000, seed=40 + i))
        expected = float(np.cos(pt[0]) * np.exp(pt[1]))
        assert r.limit.mid == pytest.approx(expected, abs=0.02)


def test_trace_at_jump_point_gives_one_sided_mean():
    # informational fixture: interior jump, the mean of the one-sided traces
    omega = interval(0.0, 1.0)
    sched = DeltaSchedule(0.25, 0.5, 10)
    u = lambda p: (p[:, 0] > 0.5).astype(float)
    r = sharp_integral(u, PointFeature((0.5,)), omega, sched, SampleSpec(n=50_000, seed=37))
    assert r.limit.mid == pytest.approx(0.5, abs=0.05)


# ---------------------------------------------------------------- gradients

def test_gradient_of_abs_at_kink():
    rep = density_gradient(LINE, (0.0,), line_schedule(), SampleSpec(n=50_000, seed=33),
                           grad=lambda p: np.sign(p))
    iv = rep.box.intervals[0]
    assert iv.lo == pytest.approx(-1.0, abs=0.05)
    assert iv.hi == pytest.approx(1.0, abs=0.05)


def test_gradient_finite_difference_matches_analytic():
    analytic = density_gradient(LINE, (0.0,), line_schedule(), SampleSpec(n=50_000, seed=34),
                                grad=lambda p: np.sign(p))
    fd = density_gradient(LINE, (0.0,), line_schedule(), SampleSpec(n=50_000, seed=34),
                          field=ScalarField(f=lambda p: np.abs(p[:, 0])))
    for a, b in zip(analytic.box.intervals, fd.box.intervals):
        assert a.lo == pytest.approx(b.lo, abs=0.05)
        assert a.hi == pytest.approx(b.hi, abs=0.05)


def test_gradient_collapses_at_smooth_point():
    rep = density_gradient(LINE, (0.0,), line_schedule(), SampleSpec(n=50_000, seed=35),
                           field=ScalarField(f=lambda p: p[:, 0] ** 2, grad=lambda p: 2 * p))
    assert rep.box.intervals[0].width <= 0.05


def test_gradient_away_from_kink():
    omega = interval(-0.25, 1.25)
    sched = DeltaSchedule.auto(PointFeature((0.5,)), omega)
    rep = density_gradient(omega, (0.5,), sched, SampleSpec(n=50_000, seed=36),
                           grad=lambda p: np.sign(p))
    iv = rep.box.intervals[0]
    assert iv.lo == pytest.approx(1.0, abs=0.05) and iv.hi == pytest.approx(1.0, abs=0.05)


def test_gradient_respects_lipschitz_bound():
    rep = density_gradient(LINE, (0.0,), line_schedule(), SampleSpec(n=50_000, seed=37),
                           grad=lambda p: np.sign(p))
    assert rep.box.within_bound(1.0, slack=0.05)


def test_gradient_in_two_dimensions():
    disk = Ball((0.0, 0.0), 1.0)
    sched = DeltaSchedule.auto(PointFeature((0.0, 0.0)), disk)
    # f(x, y) = |x| + y: gradient = (sign(x), 1) a.e.
    grad = lambda p: np.column_stack([np.sign(p[:, 0]), np.ones(len(p))])
    rep = density_gradient(disk, (0.0, 0.0), sched, SampleSpec(n=60_000, seed=38), grad=grad)
    gx, gy = rep.box.intervals
    assert gx.lo == pytest.approx(-1.0, abs=0.05) and gx.hi == pytest.approx(1.0, abs=0.05)
    assert gy.lo == pytest.approx(1.0, abs=0.05) and gy.hi == pytest.approx(1.0, abs=0.05)


# ----------------------------------------------------------- calculus rules

def test_sum_rule_with_cancellation():
    f1 = ScalarField(f=lambda p: np.abs(p[:, 0]), grad=lambda p: np.sign(p))
    f2 = ScalarField(f=lambda p: -np.abs(p[:, 0]), grad=lambda p: -np.sign(p))
    rep = calculus_rule_check("sum", f1, f2, (0.0,), LINE, line_schedule(),
                              SampleSpec(n=50_000, seed=39))
    assert rep.contained
    lhs = rep.lhs.intervals[0]
    assert abs(lhs.lo) <= 0.05 and abs(lhs.hi) <= 0.05
    rhs = rep.rhs.intervals[0]
    assert rhs.lo == pytest.approx(-2.0, abs=0.1) and rhs.hi == pytest.approx(2.0, abs=0.1)


def test_sum_rule_equality_for_smooth_fields():
    f1 = ScalarField(f=lambda p: p[:, 0] ** 2, grad=lambda p: 2 * p)
    f2 = ScalarField(f=lambda p: 3 * p[:, 0], grad=lambda p: np.full_like(p, 3.0))
    rep = calculus_rule_check("sum", f1, f2, (0.0,), LINE, line_schedule(),
                              SampleSpec(n=50_000, seed=40))
    assert rep.contained
    lhs, rhs = rep.lhs.intervals[0], rep.rhs.intervals[0]
    assert lhs.mid == pytest.approx(rhs.mid, abs=2 * rep.tol)


def test_product_rule_at_kink():
    fx = ScalarField(f=lambda p: p[:, 0], grad=lambda p: np.ones_like(p))
    fabs = ScalarField(f=lambda p: np.abs(p[:, 0]), grad=lambda p: np.sign(p))
    rep = calculus_rule_check("product", fx, fabs, (0.0,), LINE, line_schedule(),
                              SampleSpec(n=50_000, seed=41))
    assert rep.contained


def test_rule_name_validated():
    f = ScalarField(f=lambda p: p[:, 0], grad=lambda p: np.ones_like(p))
    with pytest.raises(ValueError):
        calculus_rule_check("chain", f, f, (0.0,), LINE, line_schedule(), SampleSpec(n=100, seed=0))


def test_gradient_box_containment_helper():
    from puremeasure.density_engine import Interval

    small = GradientBox((Interval(-0.5, 0.5),))
    big = GradientBox((Interval(-1.0, 1.0),))
    assert small.contained_in(big)
    assert not big.contained_in(small)
    assert big.within_bound(1.0)
