"""Boundary traces and set-valued gradients built on density probes.

The trace of a function at a boundary point is the limit of its means over
shrinking half-balls inside the domain.  The set-valued gradient of a
Lipschitz function collects, coordinate by coordinate, the essential range
of the (almost everywhere defined) gradient near the point; at points of
differentiability every coordinate interval collapses to the classical
partial derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .density_engine import (
    DEFAULT_TOL,
    ActionProfile,
    DeltaSchedule,
    Interval,
    ProbeResult,
    _action_profile_per_level,
    sharp_integral,
)
from .geometry import PointFeature, Region, as_points
from .quadrature import MAGNITUDE_CAP, SampleSpec

BOUNDARY_TOL = 1e-9
FD_RATIO = 0.1  # finite-difference step as a fraction of the current delta


class NotOnBoundary(ValueError):
    """The probe point is too far from the domain boundary."""


@dataclass(frozen=True)
class ScalarField:
    """Scalar field with an optional analytic gradient field.

    Without an analytic gradient, gradients are formed by central differences
    whose step is tied to the probing scale (h = delta * fd_ratio), so the
    difference quotient resolves structure at the scale being examined.
    """

    f: Callable | None = None
    grad: Callable | None = None

    def __post_init__(self):
        if self.f is None and self.grad is None:
            raise ValueError("need a function or a gradient field")

    def value_at(self, point: Sequence[float]) -> float:
        if self.f is None:
            raise ValueError("no function values available")
        pts = as_points(point, len(tuple(point)))
        return float(np.asarray(self.f(pts), dtype=float)[0])

    def gradient_at_scale(self, delta: float, fd_ratio: float = FD_RATIO) -> Callable:
        if self.grad is not None:
            return self.grad
        h = delta * fd_ratio

        def g(pts):
            pts = np.asarray(pts, dtype=float)
            out = np.empty_like(pts)
            for i in range(pts.shape[1]):
                step = np.zeros(pts.shape[1])
                step[i] = h
                with np.errstate(all="ignore"):
                    out[:, i] = (np.asarray(self.f(pts + step), dtype=float)
                                 - np.asarray(self.f(pts - step), dtype=float)) / (2 * h)
            return out

        return g


@dataclass(frozen=True)
class GradientBox:
    """Per-coordinate intervals bounding the set-valued gradient."""

    intervals: tuple[Interval, ...]

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def contained_in(self, other: "GradientBox", slack: float = 0.0) -> bool:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return all(
            o.lo - slack <= s.lo and s.hi <= o.hi + slack
            for s, o in zip(self.intervals, other.intervals)
        )

    def within_bound(self, bound: float, slack: float = 0.0) -> bool:
        return all(
            -bound - slack <= iv.lo and iv.hi <= bound + slack for iv in self.intervals
        )


@dataclass(frozen=True)
class GradientReport:
    point: tuple[float, ...]
    box: GradientBox
    profiles: tuple[ActionProfile, ...]


def boundary_trace(
    u: Callable,
    omega: Region,
    point: Sequence[float],
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
    boundary_tol: float = BOUNDARY_TOL,
) -> ProbeResult:
    """Trace of u at a boundary point: means over shrinking half-balls in Omega.

    For trace-admissible u the converged limit is the boundary value; at jump
    points the mean of the one-sided values is obtained.
    """
    pts = as_points(point, omega.dim)
    gap = float(np.abs(omega.sdf(pts))[0])
    if gap > boundary_tol:
        raise NotOnBoundary(f"point is {gap:g} away from the boundary (tol {boundary_tol:g})")
    return sharp_integral(u, PointFeature(tuple(pts[0])), omega, schedule, spec, tol=tol)


def density_gradient(
    omega: Region,
    point: Sequence[float],
    schedule: DeltaSchedule,
    spec: SampleSpec,
    field: ScalarField | None = None,
    grad: Callable | None = None,
    fd_ratio: float = FD_RATIO,
    tol: float = DEFAULT_TOL,
    cap: float = MAGNITUDE_CAP,
) -> GradientReport:
    """Set-valued gradient at a point: per-coordinate action intervals.

    `grad` is an analytic gradient field (points -> (N, n) array); otherwise
    `field` supplies function values differentiated at the probing scale.
    """
    if field is None:
        if grad is None:
            raise ValueError("need a gradient field or a scalar field")
        field = ScalarField(grad=grad)
    elif grad is not None:
        field = ScalarField(f=field.f, grad=grad)
    pts = as_points(point, omega.dim)
    feature = PointFeature(tuple(pts[0]))
    profiles = []
    for i in range(omega.dim):
        def fn_at(delta, _i=i):
            g = field.gradient_at_scale(delta, fd_ratio)
            return lambda sample: np.asarray(g(sample), dtype=float)[:, _i]

        profiles.append(
            _action_profile_per_level(fn_at, feature, omega, schedule, spec, tol=tol, cap=cap)
        )
    box = GradientBox(tuple(p.interval for p in profiles))
    return GradientReport(tuple(pts[0]), box, tuple(profiles))


def _interval_sum(a: Interval, b: Interval, tol: float) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi, tol)


def _interval_scale(c: float, iv: Interval, tol: float) -> Interval:
    lo, hi = sorted((c * iv.lo, c * iv.hi))
    return Interval(lo, hi, tol)


@dataclass(frozen=True)
class RuleCheckReport:
    rule: str
    lhs: GradientBox
    rhs: GradientBox
    contained: bool
    tol: float


def calculus_rule_check(
    rule: str,
    f1: ScalarField,
    f2: ScalarField,
    point: Sequence[float],
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
    fd_ratio: float = FD_RATIO,
) -> RuleCheckReport:
    """Containment check for the sum or product rule of set-valued gradients.

    sum:     grad(f1 + f2) box  must lie in  box(f1) + box(f2)
    product: grad(f1 * f2) box  must lie in  f1(x) * box(f2) + f2(x) * box(f1)
    widened by tol per coordinate.
    """
    if rule not in ("sum", "product"):
        raise ValueError(f"unknown rule {rule!r}")
    box1 = density_gradient(omega, point, schedule, spec, field=f1, fd_ratio=fd_ratio, tol=tol).box
    box2 = density_gradient(omega, point, schedule, spec, field=f2, fd_ratio=fd_ratio, tol=tol).box
    if rule == "sum":
        combined = _combine_sum(f1, f2)
        rhs = GradientBox(tuple(_interval_sum(a, b, tol) for a, b in zip(box1.intervals, box2.intervals)))
    else:
        combined = _combine_product(f1, f2)
        c1 = f1.value_at(point)
        c2 = f2.value_at(point)
        rhs = GradientBox(
            tuple(
                _interval_sum(_interval_scale(c1, b, tol), _interval_scale(c2, a, tol), tol)
                for a, b in zip(box1.intervals, box2.intervals)
            )
        )
    lhs = density_gradient(omega, point, schedule, spec, field=combined, fd_ratio=fd_ratio, tol=tol).box
    return RuleCheckReport(rule, lhs, rhs, lhs.contained_in(rhs, slack=tol), tol)


@dataclass(frozen=True)
class _DerivedField(ScalarField):
    """Field whose per-scale gradient comes from a factory instead of f/grad."""

    factory: Callable | None = None

    def __post_init__(self):
        if self.factory is None:
            raise ValueError("derived field needs a gradient factory")

    def gradient_at_scale(self, delta: float, fd_ratio: float = FD_RATIO) -> Callable:
        return self.factory(delta, fd_ratio)


def _combine_sum(f1: ScalarField, f2: ScalarField) -> ScalarField:
    f = None
    if f1.f is not None and f2.f is not None:
        f = lambda pts: np.asarray(f1.f(pts), dtype=float) + np.asarray(f2.f(pts), dtype=float)

    def factory(delta, ratio):
        g1 = f1.gradient_at_scale(delta, ratio)
        g2 = f2.gradient_at_scale(delta, ratio)
        return lambda pts: np.asarray(g1(pts), dtype=float) + np.asarray(g2(pts), dtype=float)

    return _DerivedField(f=f, factory=factory)


def _combine_product(f1: ScalarField, f2: ScalarField) -> ScalarField:
    if f1.f is None or f2.f is None:
        raise ValueError("the product rule needs function values for both factors")
    f = lambda pts: np.asarray(f1.f(pts), dtype=float) * np.asarray(f2.f(pts), dtype=float)

    def factory(delta, ratio):
        g1 = f1.gradient_at_scale(delta, ratio)
        g2 = f2.gradient_at_scale(delta, ratio)

        def g(pts):
            v1 = np.asarray(f1.f(pts), dtype=float)[:, None]
            v2 = np.asarray(f2.f(pts), dtype=float)[:, None]
            return v1 * np.asarray(g2(pts), dtype=float) + v2 * np.asarray(g1(pts), dtype=float)

        return g

    return _DerivedField(f=f, factory=factory)
