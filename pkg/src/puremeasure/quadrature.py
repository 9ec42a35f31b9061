"""Seeded Monte Carlo estimation over regions.

The sample stream is generated by the counter-based Philox generator in
fixed-size chunks, so identical specs give bit-identical estimates and
chunks could be evaluated in parallel and combined in order without
changing the result.  Within each chunk, points come in center-symmetric
pairs (x, lo+hi-x); pair averages are the unit of the variance estimate.
The pairing makes estimates of odd integrands over symmetric boxes vanish
identically instead of merely on average, which the density engine relies
on for its cancellation fixtures.

Integrand samples that are non-finite or exceed the magnitude cap are
tallied and dropped from averages, never averaged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .geometry import Bbox, Region, bbox_is_finite, bbox_volume

CHUNK_PAIRS = 1 << 15
MAGNITUDE_CAP = 1.0e3
ESS_QUANTILE = 1.0e-3
CONFIDENCE = 1.96


class UnboundedRegion(ValueError):
    """Volume estimation needs a finite bounding box."""


class NoHits(RuntimeError):
    """The region received no samples at this resolution."""


@dataclass(frozen=True)
class SampleSpec:
    """Sampling plan: count, seed, optional bounding-box override.

    Sample counts are rounded up to the next even number so that the stream
    consists of whole antithetic pairs.
    """

    n: int = 200_000
    seed: int = 0
    bbox: Bbox | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one sample")

    @property
    def pairs(self) -> int:
        return (self.n + 1) // 2


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    hits: int
    n: int
    nonfinite: int = 0


def _pair_chunks(seed: int, stream: int, pairs: int, bbox: Bbox) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    lo, hi = np.asarray(bbox[0], float), np.asarray(bbox[1], float)
    width = hi - lo
    base = np.random.Philox(seed=np.random.SeedSequence(entropy=(int(seed), int(stream))))
    produced = 0
    chunk = 0
    while produced < pairs:
        m = min(CHUNK_PAIRS, pairs - produced)
        gen = np.random.Generator(base.jumped(chunk))
        u = gen.random((m, lo.size))
        yield lo + u * width, hi - u * width
        produced += m
        chunk += 1


def _resolve_bbox(region: Region, spec: SampleSpec) -> Bbox:
    bbox = spec.bbox if spec.bbox is not None else region.bbox
    if not bbox_is_finite(bbox):
        raise UnboundedRegion("sampling requires a finite bounding box")
    return bbox


def mc_volume(region: Region, spec: SampleSpec, stream: int = 0) -> Estimate:
    """Unbiased Lebesgue volume estimate; deterministic for a fixed spec."""
    bbox = _resolve_bbox(region, spec)
    vol = bbox_volume(bbox)
    m = spec.pairs
    if vol == 0.0:
        return Estimate(0.0, 0.0, 0, 2 * m)
    s = s2 = 0.0
    hits = 0
    for a, b in _pair_chunks(spec.seed, stream, m, bbox):
        ia = region.contains(a)
        ib = region.contains(b)
        hits += int(ia.sum()) + int(ib.sum())
        z = 0.5 * vol * (ia.astype(float) + ib.astype(float))
        s += float(z.sum())
        s2 += float((z * z).sum())
    mean = s / m
    var = max(s2 - s * s / m, 0.0) / (m - 1) if m > 1 else 0.0
    return Estimate(float(mean), float(CONFIDENCE * np.sqrt(var / m)), hits, 2 * m)


def mc_integral(f: Callable, region: Region, spec: SampleSpec, stream: int = 0) -> Estimate:
    """Volume-weighted mean estimate of the integral of f over the region."""
    bbox = _resolve_bbox(region, spec)
    vol = bbox_volume(bbox)
    m = spec.pairs
    if vol == 0.0:
        return Estimate(0.0, 0.0, 0, 2 * m)
    su = suu = sv = svv = suv = 0.0
    hits = 0
    nonfinite = 0
    for a, b in _pair_chunks(spec.seed, stream, m, bbox):
        uj = np.zeros(a.shape[0])
        vj = np.zeros(a.shape[0])
        for pts in (a, b):
            inside = region.contains(pts)
            hits += int(inside.sum())
            with np.errstate(all="ignore"):
                fv = np.asarray(f(pts), dtype=float)
            bad = inside & ~np.isfinite(fv)
            nonfinite += int(bad.sum())
            kept = ~bad
            y = np.where(inside & kept, np.where(np.isfinite(fv), fv, 0.0), 0.0)
            uj += 0.5 * y
            vj += 0.5 * kept
        su += float(uj.sum())
        suu += float((uj * uj).sum())
        sv += float(vj.sum())
        svv += float((vj * vj).sum())
        suv += float((uj * vj).sum())
    if sv <= 0:
        return Estimate(0.0, 0.0, hits, 2 * m, nonfinite)
    ratio = su / sv
    mean_v = sv / m
    resid2 = max(suu - 2 * ratio * suv + ratio * ratio * svv, 0.0)
    se = CONFIDENCE * np.sqrt(resid2 / (m * (m - 1))) / mean_v if m > 1 else 0.0
    return Estimate(float(vol * ratio), float(vol * se), hits, 2 * m, nonfinite)


@dataclass(frozen=True)
class WeightedMean:
    """Ratio estimate of (integral of w*v) / (integral of w) over a box."""

    value: float
    stderr: float
    hits: int
    weight: float
    capped: int
    n: int


def mc_weighted_mean(
    values: Callable,
    weight: Callable,
    bbox: Bbox,
    spec: SampleSpec,
    stream: int = 0,
    cap: float = MAGNITUDE_CAP,
) -> WeightedMean:
    """Weighted mean of `values` under the sample-weight field `weight`.

    Numerator and denominator share one sample stream, so ratios of nested
    sets are exact (a subset never collects more weighted hits than its
    superset) and the mean of the constant 1 is exactly 1.  Samples whose
    value is non-finite or exceeds `cap` in magnitude are tallied in
    `capped` and dropped from both sums.
    """
    m = spec.pairs
    su = suu = sv = svv = suv = 0.0
    hits = 0
    capped = 0
    for a, b in _pair_chunks(spec.seed, stream, m, bbox):
        uj = np.zeros(a.shape[0])
        vj = np.zeros(a.shape[0])
        for pts in (a, b):
            with np.errstate(all="ignore"):
                w = np.asarray(weight(pts), dtype=float)
            active = w > 0
            hits += int(active.sum())
            with np.errstate(all="ignore"):
                v = np.asarray(values(pts), dtype=float)
            bad = active & (~np.isfinite(v) | (np.abs(v) > cap))
            capped += int(bad.sum())
            keep = active & ~bad
            uj += 0.5 * np.where(keep, w * np.where(np.isfinite(v), v, 0.0), 0.0)
            vj += 0.5 * np.where(keep, w, 0.0)
        su += float(uj.sum())
        suu += float((uj * uj).sum())
        sv += float(vj.sum())
        svv += float((vj * vj).sum())
        suv += float((uj * vj).sum())
    if sv <= 0:
        return WeightedMean(float("nan"), float("nan"), hits, sv, capped, 2 * m)
    ratio = su / sv
    mean_v = sv / m
    resid2 = max(suu - 2 * ratio * suv + ratio * ratio * svv, 0.0)
    se = CONFIDENCE * np.sqrt(resid2 / (m * (m - 1))) / mean_v if m > 1 else 0.0
    return WeightedMean(float(ratio), float(se), hits, float(sv), capped, 2 * m)


@dataclass(frozen=True)
class EssRange:
    """Empirical essential-range surrogate: extreme quantiles of hit samples.

    Endpoints are +-inf when samples beyond the magnitude cap (or non-finite
    ones) witness essential unboundedness on that side.
    """

    lo: float
    hi: float
    hits: int

    @property
    def bounded(self) -> bool:
        return bool(np.isfinite(self.lo) and np.isfinite(self.hi))


def ess_range(
    f: Callable,
    region: Region,
    spec: SampleSpec,
    q: float = ESS_QUANTILE,
    cap: float = MAGNITUDE_CAP,
    stream: int = 0,
) -> EssRange:
    """Robust surrogate for (ess inf, ess sup) of f over the region."""
    if not 0 < q < 0.5:
        raise ValueError("quantile must lie in (0, 0.5)")
    bbox = _resolve_bbox(region, spec)
    if bbox_volume(bbox) == 0.0:
        raise NoHits("region has an empty bounding box")
    collected = []
    hits = 0
    unbounded_hi = unbounded_lo = False
    for a, b in _pair_chunks(spec.seed, stream, spec.pairs, bbox):
        for pts in (a, b):
            inside = region.contains(pts)
            hits += int(inside.sum())
            if not inside.any():
                continue
            with np.errstate(all="ignore"):
                fv = np.asarray(f(pts[inside]), dtype=float)
            nan = np.isnan(fv)
            unbounded_hi |= bool(np.any(fv > cap) or nan.any())
            unbounded_lo |= bool(np.any(fv < -cap) or nan.any())
            finite = fv[np.isfinite(fv)]
            if finite.size:
                collected.append(finite)
    if hits == 0:
        raise NoHits("no samples landed in the region")
    if collected:
        vals = np.concatenate(collected)
        lo, hi = np.quantile(vals, [q, 1.0 - q])
    else:
        lo, hi = -np.inf, np.inf
    return EssRange(
        float(-np.inf if unbounded_lo else lo),
        float(np.inf if unbounded_hi else hi),
        hits,
    )
