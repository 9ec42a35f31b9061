"""Numerical evaluation of density measures.

A density measure for a feature set F inside a domain Omega assigns to a set
A the limit, as delta shrinks, of the weighted volume ratio

    ratio(delta) = integral over A ∩ F_delta ∩ Omega  /  integral over F_delta ∩ Omega

with F_delta the open delta-neighborhood of F.  The limit functional exists
only abstractly; this engine computes the canonical ratio profile along a
geometric delta schedule, estimates the limit from the tail of the profile,
and reports when no limit exists (the [liminf, limsup] interval is then the
honest answer).  Numerator and denominator of every ratio share one sample
stream per level, which makes normalization and set monotonicity exact
rather than statistical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import (
    Bbox,
    Cone,
    Feature,
    Intersection,
    PointFeature,
    Region,
    bbox_diagonal,
    bbox_inflate,
    bbox_intersect,
    bbox_is_finite,
    bbox_volume,
    neighborhood_region,
)
from .quadrature import (
    ESS_QUANTILE,
    MAGNITUDE_CAP,
    Estimate,
    SampleSpec,
    UnboundedRegion,
    ess_range,
    mc_volume,
    mc_weighted_mean,
)

DEFAULT_TOL = 0.02

CONVERGED = "converged"
OSCILLATING = "oscillating"
INSUFFICIENT = "insufficient"


class VanishingReference(RuntimeError):
    """The reference mass of F_delta ∩ Omega is indistinguishable from zero."""


class TooShort(ValueError):
    """Limit estimation needs at least three profile entries."""


@dataclass(frozen=True)
class DeltaSchedule:
    """Geometric schedule delta0 * ratio**k, k = 0..count-1."""

    delta0: float
    ratio: float = 0.5
    count: int = 12

    def __post_init__(self):
        if self.delta0 <= 0:
            raise ValueError("delta0 must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 3:
            raise ValueError("need at least three levels")

    def deltas(self) -> list[float]:
        return [self.delta0 * self.ratio**k for k in range(self.count)]

    @classmethod
    def auto(cls, feature: Feature, omega: Region, ratio: float = 0.5, count: int = 12) -> "DeltaSchedule":
        """Half the feature's bbox diagonal, falling back to the domain's when degenerate."""
        d = bbox_diagonal(feature.bbox)
        if not np.isfinite(d) or d <= 0:
            if not bbox_is_finite(omega.bbox):
                raise UnboundedRegion("cannot derive a schedule from an unbounded domain")
            d = bbox_diagonal(omega.bbox)
        return cls(d / 2.0, ratio, count)


@dataclass(frozen=True)
class Interval:
    """Closed interval with tolerance metadata."""

    lo: float
    hi: float
    tol: float = 0.0

    def __post_init__(self):
        if np.isfinite(self.lo) and np.isfinite(self.hi) and not self.lo <= self.hi + self.tol:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}] at tol {self.tol}")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass(frozen=True)
class LevelEstimate:
    """One row of a delta profile."""

    delta: float
    value: float
    stderr: float
    hits: int
    capped: int = 0


@dataclass(frozen=True)
class ProbeResult:
    series: tuple[LevelEstimate, ...]
    limit: Interval
    verdict: str
    unintegrable: bool = False


def limit_estimate(series: Sequence, tol: float) -> tuple[Interval, str]:
    """Estimate the limit of a profile sorted by decreasing delta.

    The tail window holds the last ceil(K/3) entries; its stderr-widened
    min/max give the reported interval.  Converged means the spread fits in
    tol; oscillating means the spread exceeds tol but agrees with the
    previous window (a stable envelope); everything else is insufficient.
    """
    rows = [_as_row(r) for r in series]
    if len(rows) < 3:
        raise TooShort("need at least three profile entries")
    w = math.ceil(len(rows) / 3)
    lo, hi = _window_range(rows[-w:])
    interval = Interval(lo, hi, tol)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        return interval, INSUFFICIENT
    spread = hi - lo
    if spread <= tol:
        return interval, CONVERGED
    if len(rows) >= 2 * w:
        lo2, hi2 = _window_range(rows[-2 * w:-w])
        if np.isfinite(lo2) and np.isfinite(hi2):
            spread2 = hi2 - lo2
            margin = max(tol, 0.25 * max(spread, spread2))
            mids_close = abs(interval.mid - 0.5 * (lo2 + hi2)) <= margin
            if abs(spread - spread2) <= margin and mids_close:
                return interval, OSCILLATING
    return interval, INSUFFICIENT


def _as_row(r) -> tuple[float, float, float]:
    if isinstance(r, LevelEstimate):
        return r.delta, r.value, r.stderr
    delta, value, stderr = r
    return float(delta), float(value), float(stderr)


def _window_range(rows) -> tuple[float, float]:
    lo = min(v - se for _, v, se in rows)
    hi = max(v + se for _, v, se in rows)
    return lo, hi


# ----------------------------------------------------------- ratio machinery

def _level_bbox(feature: Feature, omega: Region, delta: float) -> Bbox:
    if not bbox_is_finite(omega.bbox):
        raise UnboundedRegion("the domain must have a finite bounding box")
    bbox = bbox_intersect(bbox_inflate(feature.bbox, delta), omega.bbox)
    if bbox_volume(bbox) == 0.0:
        raise VanishingReference(f"F_delta ∩ Omega has an empty bounding box at delta={delta}")
    return bbox


def _reference_weight(feature: Feature, omega: Region, delta: float, weight: Callable | None) -> Callable:
    def w(pts):
        mask = (feature.distance(pts) < delta) & omega.contains(pts)
        if weight is None:
            return mask.astype(float)
        with np.errstate(all="ignore"):
            base = np.asarray(weight(pts), dtype=float)
        return np.where(mask & np.isfinite(base) & (base > 0), base, 0.0)

    return w


def density_ratio(
    a: Region,
    feature: Feature,
    omega: Region,
    delta: float,
    spec: SampleSpec,
    weight: Callable | None = None,
    stream: int = 0,
) -> Estimate:
    """Weighted volume ratio of A within F_delta ∩ Omega at a single delta."""
    bbox = _level_bbox(feature, omega, delta)
    wm = mc_weighted_mean(
        lambda pts: a.contains(pts).astype(float),
        _reference_weight(feature, omega, delta, weight),
        bbox,
        spec,
        stream=stream,
    )
    if wm.hits == 0 or not wm.weight > 0:
        raise VanishingReference(f"no reference mass at delta={delta}")
    return Estimate(wm.value, wm.stderr, wm.hits, wm.n)


def density_probe(
    a: Region,
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    weight: Callable | None = None,
    tol: float = DEFAULT_TOL,
) -> ProbeResult:
    """Density ratio profile over the schedule plus its limit estimate."""
    series = []
    for k, delta in enumerate(schedule.deltas()):
        est = density_ratio(a, feature, omega, delta, spec, weight, stream=k)
        series.append(LevelEstimate(delta, est.value, est.stderr, est.hits))
    limit, verdict = limit_estimate(series, tol)
    return ProbeResult(tuple(series), limit, verdict)


def sharp_integral(
    fn: Callable,
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    weight: Callable | None = None,
    tol: float = DEFAULT_TOL,
    cap: float = MAGNITUDE_CAP,
    max_capped_fraction: float = 0.0,
) -> ProbeResult:
    """Weighted means of fn over F_delta ∩ Omega along the schedule.

    For fn continuous at a singleton feature the converged limit is the
    point value.  Samples beyond the magnitude cap witness an essentially
    unbounded integrand; when their share of the hits exceeds
    `max_capped_fraction` at any level the result carries the unintegrable
    flag (integration against a density measure is then meaningless even if
    the symmetric mean profile happens to settle).
    """
    series = []
    unintegrable = False
    for k, delta in enumerate(schedule.deltas()):
        bbox = _level_bbox(feature, omega, delta)
        wm = mc_weighted_mean(
            fn,
            _reference_weight(feature, omega, delta, weight),
            bbox,
            spec,
            stream=k,
            cap=cap,
        )
        if wm.hits == 0 or not (wm.weight > 0 or wm.capped > 0):
            raise VanishingReference(f"no reference mass at delta={delta}")
        if wm.capped > max_capped_fraction * wm.hits:
            unintegrable = True
        series.append(LevelEstimate(delta, wm.value, wm.stderr, wm.hits, wm.capped))
    limit, verdict = limit_estimate(series, tol)
    return ProbeResult(tuple(series), limit, verdict, unintegrable)


@dataclass(frozen=True)
class ActionLevel:
    delta: float
    lo: float
    hi: float
    lo_envelope: float
    hi_envelope: float
    hits: int


@dataclass(frozen=True)
class ActionProfile:
    levels: tuple[ActionLevel, ...]
    interval: Interval
    unbounded_lo: bool
    unbounded_hi: bool


def action_profile(
    fn: Callable,
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
    q: float = ESS_QUANTILE,
    cap: float = MAGNITUDE_CAP,
) -> ActionProfile:
    """Essential-range profile of fn near the feature, with monotone envelopes.

    The essential supremum over F_delta ∩ Omega is nondecreasing in delta, so
    the upper envelope is the running minimum over shrinking deltas (and the
    lower envelope the running maximum); the envelopes at the smallest delta
    estimate the action interval.
    """
    return _action_profile_per_level(lambda _delta: fn, feature, omega, schedule, spec, tol, q, cap)


def _action_profile_per_level(
    fn_at: Callable[[float], Callable],
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
    q: float = ESS_QUANTILE,
    cap: float = MAGNITUDE_CAP,
) -> ActionProfile:
    levels = []
    lo_env, hi_env = -np.inf, np.inf
    seen_lo = seen_hi = False
    for k, delta in enumerate(schedule.deltas()):
        bbox = _level_bbox(feature, omega, delta)
        region = Intersection((neighborhood_region(feature, delta), omega))
        level_spec = SampleSpec(spec.n, spec.seed, bbox)
        r = ess_range(fn_at(delta), region, level_spec, q=q, cap=cap, stream=k)
        if r.hits == 0:
            raise VanishingReference(f"no reference mass at delta={delta}")
        seen_lo |= not np.isfinite(r.lo)
        seen_hi |= not np.isfinite(r.hi)
        if np.isfinite(r.lo):
            lo_env = max(lo_env, r.lo)
        if np.isfinite(r.hi):
            hi_env = min(hi_env, r.hi)
        levels.append(ActionLevel(delta, r.lo, r.hi, lo_env, hi_env, r.hits))
    lo = -np.inf if seen_lo else lo_env
    hi = np.inf if seen_hi else hi_env
    if np.isfinite(lo) and np.isfinite(hi) and lo > hi:
        lo, hi = hi, lo  # envelopes crossed within sampling noise; keep ordered
    return ActionProfile(tuple(levels), Interval(lo, hi, tol), seen_lo, seen_hi)


def action_interval(
    fn: Callable,
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
    q: float = ESS_QUANTILE,
    cap: float = MAGNITUDE_CAP,
) -> Interval:
    """[lim ess inf, lim ess sup] of fn near the feature (quantile surrogate)."""
    return action_profile(fn, feature, omega, schedule, spec, tol, q, cap).interval


def cone_density(
    x: Sequence[float],
    v: Sequence[float],
    alpha: float,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
) -> ProbeResult:
    """Density profile of the open cone with apex x, axis v and aperture alpha.

    A directionally concentrated (extremal, 0-1 valued) density measure puts
    full mass on one such cone; the Lebesgue-reference value reported here is
    evidence about concentration directions, never an extremality verdict.
    """
    cone = Cone(tuple(x), tuple(v), float(alpha))
    return density_probe(cone, PointFeature(tuple(x)), omega, schedule, spec, tol=tol)


@dataclass(frozen=True)
class SigmaProbeReport:
    members: tuple[ProbeResult, ...]
    union: ProbeResult
    member_sum: float
    union_value: float
    combined_tol: float
    violation: bool


def sigma_probe(
    members: Sequence[Region],
    union: Region,
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
    tol: float = DEFAULT_TOL,
) -> SigmaProbeReport:
    """Countable-additivity probe for a disjoint family with a known union.

    Members are probed individually; their limits are summed and compared to
    the limit on the full union (a closed form for the infinite family the
    finitely many members come from).  A gap beyond the combined tolerance
    flags that no countably additive measure can produce these densities.
    """
    member_results = tuple(
        density_probe(a, feature, omega, schedule, spec, tol=tol) for a in members
    )
    union_result = density_probe(union, feature, omega, schedule, spec, tol=tol)
    member_sum = float(sum(r.limit.mid for r in member_results))
    union_value = union_result.limit.mid
    combined = tol + 0.5 * union_result.limit.width + sum(
        0.5 * r.limit.width for r in member_results
    )
    violation = abs(member_sum - union_value) > combined
    return SigmaProbeReport(member_results, union_result, member_sum, union_value, combined, violation)


@dataclass(frozen=True)
class AuraLevel:
    delta: float
    volume: float
    volume_stderr: float
    hits: int
    mass: float


@dataclass(frozen=True)
class AuraReport:
    levels: tuple[AuraLevel, ...]
    decreasing: bool


def aura_report(
    feature: Feature,
    omega: Region,
    schedule: DeltaSchedule,
    spec: SampleSpec,
) -> AuraReport:
    """Volumes and engine mass of the sets F_delta ∩ Omega along the schedule.

    The volumes must decrease toward zero (within stderr) while the engine
    assigns each set full mass 1; together the levels witness a shrinking
    sequence of sets that carries all of the limit functional's mass.
    """
    levels = []
    for k, delta in enumerate(schedule.deltas()):
        bbox = _level_bbox(feature, omega, delta)
        region = Intersection((neighborhood_region(feature, delta), omega))
        level_spec = SampleSpec(spec.n, spec.seed, bbox)
        vol = mc_volume(region, level_spec, stream=k)
        if vol.hits == 0:
            raise VanishingReference(f"F_delta ∩ Omega carries no volume at delta={delta}")
        wm = mc_weighted_mean(
            lambda pts: np.ones(len(pts)),
            _reference_weight(feature, omega, delta, None),
            bbox,
            level_spec,
            stream=k,
        )
        levels.append(AuraLevel(delta, vol.value, vol.stderr, vol.hits, wm.value))
    decreasing = all(
        levels[i + 1].volume <= levels[i].volume + levels[i].volume_stderr + levels[i + 1].volume_stderr
        for i in range(len(levels) - 1)
    )
    return AuraReport(tuple(levels), decreasing)
