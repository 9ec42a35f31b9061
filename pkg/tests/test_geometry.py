import numpy as np
import pytest

from puremeasure.geometry import (
    Ball,
    Box,
    Complement,
    Cone,
    Cusp,
    Difference,
    DimensionMismatch,
    Halfspace,
    NonpositiveDelta,
    PointFeature,
    RegionBoundary,
    SegmentFeature,
    Union,
    as_points,
    bbox_volume,
    csg,
    feature_from_json,
    interval,
    neighborhood_region,
    region_from_json,
    signed_distance,
)


def test_signed_distance_examples():
    ball = Ball((0.0, 0.0), 1.0)
    assert signed_distance(ball, (2.0, 0.0)) == pytest.approx(1.0)
    assert signed_distance(ball, (0.5, 0.0)) == pytest.approx(-0.5)
    origin = PointFeature((0.0, 0.0))
    assert signed_distance(origin, (3.0, 4.0)) == pytest.approx(5.0)


def test_dimension_checks():
    ball = Ball((0.0, 0.0), 1.0)
    with pytest.raises(DimensionMismatch):
        signed_distance(ball, (1.0, 2.0, 3.0))
    with pytest.raises(DimensionMismatch):
        csg("union", ball, Ball((0.0,), 1.0))


def test_membership_sdf_consistency_on_primitives():
    rng = np.random.default_rng(5)
    regions = [
        Ball((0.3, -0.2), 0.8),
        Box((-1.0, 0.0), (0.5, 2.0)),
        Halfspace((1.0, 2.0), 0.5),
        Cone((0.0, 0.0), (1.0, 0.0), 0.7),
    ]
    pts = rng.uniform(-2, 2, size=(4000, 2))
    for region in regions:
        inside = region.contains(pts)
        d = region.sdf(pts)
        assert np.array_equal(inside, d < 0)


def test_primitive_sdf_is_1_lipschitz():
    rng = np.random.default_rng(6)
    pts = rng.uniform(-2, 2, size=(500, 2))
    qts = pts + rng.normal(scale=0.3, size=pts.shape)
    for region in [Ball((0.1, 0.2), 0.9), Box((-1, -1), (1, 0.5)), Halfspace((0.0, 1.0), 0.2)]:
        gap = np.abs(region.sdf(pts) - region.sdf(qts))
        step = np.linalg.norm(pts - qts, axis=1)
        assert np.all(gap <= step + 1e-12)


def test_csg_membership_examples():
    carved = Difference(Box((0.0, 0.0), (1.0, 1.0)), Ball((0.0, 0.0), 0.5))
    assert carved.contains([(0.9, 0.9)])[0]
    assert not carved.contains([(0.1, 0.1)])[0]
    ball = Ball((0.0, 0.0), 1.0)
    doubled = Union((ball, ball))
    pts = np.random.default_rng(0).uniform(-2, 2, size=(500, 2))
    assert np.array_equal(doubled.contains(pts), ball.contains(pts))
    outside = Complement(ball)
    assert outside.contains([(2.0, 0.0)])[0]


def _boundary_cloud(region, n=400):
    """Dense cloud of near-boundary points found by sign changes on a grid."""
    lo, hi = region.bbox
    xs = np.linspace(lo[0] - 0.2, hi[0] + 0.2, n)
    ys = np.linspace(lo[1] - 0.2, hi[1] + 0.2, n)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = region.contains(pts).reshape(n, n)
    flip = np.zeros_like(inside)
    flip[:-1, :] |= inside[:-1, :] != inside[1:, :]
    flip[:, :-1] |= inside[:, :-1] != inside[:, 1:]
    h = float(max(xs[1] - xs[0], ys[1] - ys[0]))
    return pts[flip.ravel()], h


@pytest.mark.parametrize(
    "region",
    [
        Difference(Box((0.0, 0.0), (1.0, 1.0)), Ball((0.0, 0.0), 0.5)),
        Union((Ball((-0.4, 0.0), 0.5), Ball((0.4, 0.0), 0.5))),
        Cusp(2.0),
    ],
)
def test_pseudo_sdf_is_conservative(region):
    cloud, h = _boundary_cloud(region)
    rng = np.random.default_rng(9)
    lo, hi = region.bbox
    pts = rng.uniform(lo - 0.1, hi + 0.1, size=(300, 2))
    pseudo = np.abs(region.sdf(pts))
    for p, mag in zip(pts, pseudo):
        true = np.min(np.linalg.norm(cloud - p, axis=1))
        assert mag <= true + 2 * h


def test_neighborhood_examples():
    f = PointFeature((0.0,))
    nb = neighborhood_region(f, 0.3)
    assert nb.contains([(0.2,)])[0]
    assert not nb.contains([(0.4,)])[0]
    shell = RegionBoundary(Ball((0.0, 0.0), 1.0))
    collar = neighborhood_region(shell, 0.1)
    assert collar.contains([(1.05, 0.0)])[0]
    assert not collar.contains([(0.5, 0.0)])[0]


def test_neighborhood_monotone_in_delta():
    f = SegmentFeature((0.0, 0.0), (1.0, 0.0))
    small = neighborhood_region(f, 0.1)
    big = neighborhood_region(f, 0.3)
    pts = np.random.default_rng(2).uniform(-1, 2, size=(2000, 2))
    inside_small = small.contains(pts)
    inside_big = big.contains(pts)
    assert np.all(~inside_small | inside_big)


def test_neighborhood_rejects_nonpositive_delta():
    with pytest.raises(NonpositiveDelta):
        neighborhood_region(PointFeature((0.0,)), 0.0)


def test_cusp_membership():
    cusp = Cusp(2.0)
    assert cusp.contains([(0.5, 0.2)])[0]
    assert not cusp.contains([(0.5, 0.3)])[0]
    assert not cusp.contains([(-0.1, 0.0)])[0]
    assert not cusp.contains([(0.5, -0.26)])[0]


def test_cone_geometry():
    cone = Cone((0.0, 0.0), (1.0, 0.0), np.pi / 4)
    assert cone.contains([(1.0, 0.5)])[0]
    assert not cone.contains([(1.0, 1.5)])[0]
    assert not cone.contains([(-1.0, 0.0)])[0]
    assert not cone.contains([(0.0, 0.0)])[0]  # apex excluded
    # on-axis point: inside at full depth
    assert signed_distance(cone, (2.0, 0.0)) == pytest.approx(-2.0 * np.sin(np.pi / 4))


def test_segment_distance():
    seg = SegmentFeature((0.0, 0.0), (1.0, 0.0))
    d = seg.distance([(0.5, 0.4), (2.0, 0.0), (-1.0, 0.0)])
    assert d == pytest.approx([0.4, 1.0, 1.0])


def test_region_json_grammar():
    spec = {
        "difference": [
            {"box": {"lo": [0, 0], "hi": [1, 1]}},
            {"ball": {"c": [0, 0], "r": 0.5}},
        ]
    }
    region = region_from_json(spec)
    assert region.contains([(0.9, 0.9)])[0]
    assert not region.contains([(0.1, 0.1)])[0]

    for spec in [
        {"halfspace": {"normal": [1, 0], "offset": 0.0}},
        {"cusp": {"p": 2}},
        {"union": [{"ball": {"c": [0, 0], "r": 1}}, {"box": {"lo": [0, 0], "hi": [2, 2]}}]},
        {"intersection": [{"ball": {"c": [0, 0], "r": 1}}, {"box": {"lo": [0, 0], "hi": [2, 2]}}]},
        {"complement": {"ball": {"c": [0, 0], "r": 1}}},
    ]:
        region_from_json(spec)

    with pytest.raises(ValueError):
        region_from_json({"pyramid": {}})


def test_feature_json_grammar():
    assert isinstance(feature_from_json({"point": {"c": [0, 0]}}), PointFeature)
    assert isinstance(feature_from_json({"segment": {"a": [0, 0], "b": [1, 0]}}), SegmentFeature)
    boundary = feature_from_json({"boundary_of": {"ball": {"c": [0, 0], "r": 1}}})
    assert isinstance(boundary, RegionBoundary)
    as_set = feature_from_json({"ball": {"c": [0, 0], "r": 1}})
    assert as_set.distance([(3.0, 0.0)])[0] == pytest.approx(2.0)
    assert as_set.distance([(0.5, 0.0)])[0] == 0.0


def test_interval_helper_and_bbox_volume():
    omega = interval(-1.0, 1.0)
    assert omega.contains([(0.0,)])[0]
    assert not omega.contains([(1.5,)])[0]
    assert bbox_volume(omega.bbox) == pytest.approx(2.0)


def test_as_points_promotes_single_point():
    pts = as_points((1.0, 2.0), 2)
    assert pts.shape == (1, 2)
