import math

import numpy as np
import pytest
from sklearn.base import clone

from qhgeo import (
    DisconnectedError,
    DistanceField,
    HalfSpace,
    InputError,
    NormSpec,
    Polyline,
    PreconditionError,
    PuncturedSpace,
    QuasihyperbolicDistance,
    QuasihyperbolicField,
    SolverParams,
    qh_distance,
    qh_polyline_length,
    rectangle_union,
)
from qhgeo.geodesic import grid_shortest_path, refine_polyline
from qhgeo.oracles import punctured_plane_qh_distance
from qhgeo.paths import j_distance

L2, LINF = NormSpec(2.0), NormSpec(math.inf)
LOWER = HalfSpace([0.0, 1.0], 0.0)
ORIGIN = PuncturedSpace([[0.0, 0.0]])
A, B = np.array([-1.0, -2.0]), np.array([1.0, -2.0])
# coarser settings for the many-solve property checks
FAST = SolverParams(grid_spacing=0.1, refine_rounds=60)


def test_params_validation():
    with pytest.raises(InputError):
        SolverParams(grid_spacing=0.0)
    with pytest.raises(InputError):
        SolverParams(neighbor_stencil=12)
    with pytest.raises(InputError):
        SolverParams(refine_step=-1.0)
    scaled = SolverParams().scaled(2.0)
    assert scaled.grid_spacing == 0.1 and scaled.refine_step == 0.02 and scaled.grid_margin == 4.0


def test_grid_vertical_half_plane():
    path = grid_shortest_path(LOWER, L2, (0, -1), (0, -2))
    w = qh_polyline_length(LOWER, L2, path)
    assert math.log(2.0) - 1e-9 <= w <= math.log(2.0) + 0.01


def test_grid_counterexample_chord():
    path = grid_shortest_path(LOWER, LINF, A, B)
    assert qh_polyline_length(LOWER, LINF, path) <= math.log(9 / 4) + 0.02


def test_grid_same_point():
    path = grid_shortest_path(LOWER, L2, (0, -1), (0, -1))
    assert qh_polyline_length(LOWER, L2, path) == 0.0


def test_refine_keeps_geodesic():
    seg = Polyline([(0, -1), (0, -2)])
    out = refine_polyline(LOWER, L2, seg)
    assert qh_polyline_length(LOWER, L2, out) == pytest.approx(math.log(2.0), abs=1e-6)
    assert np.max(np.abs(out.vertices[:, 0])) <= 1e-6


def test_refine_chord_of_counterexample():
    out = refine_polyline(LOWER, LINF, Polyline([A, B]))
    assert qh_polyline_length(LOWER, LINF, out) <= math.log(9 / 4) + 1e-3


def test_refine_zero_rounds_is_identity():
    path = Polyline([A, (0, -2.5), B])
    assert refine_polyline(LOWER, LINF, path, SolverParams(refine_rounds=0)) is path


def test_refine_is_monotone():
    hist = []
    start = Polyline([(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    refine_polyline(ORIGIN, L2, start, SolverParams(refine_rounds=40), history=hist)
    before = [qh_polyline_length(ORIGIN, L2, start)] + hist
    assert all(b <= a + 1e-8 for a, b in zip(before, before[1:]))


@pytest.mark.parametrize("y, want", [((0.0, 1.0), math.pi / 2), ((math.e, 0.0), 1.0)])
def test_punctured_examples(y, want):
    est = qh_distance(ORIGIN, L2, (1.0, 0.0), y)
    assert est.upper == pytest.approx(want, abs=1e-2)
    assert est.lower <= est.upper
    assert est.lower == j_distance(ORIGIN, L2, (1.0, 0.0), y)
    assert est.upper == pytest.approx(qh_polyline_length(ORIGIN, L2, est.path), abs=1e-8)


def test_same_point_estimate():
    est = qh_distance(ORIGIN, L2, (1.0, 2.0), (1.0, 2.0))
    assert est.lower == est.upper == 0.0


def test_endpoints_outside():
    with pytest.raises(PreconditionError):
        qh_distance(LOWER, L2, (0.0, 1.0), (0.0, -1.0))


def test_planar_only():
    with pytest.raises(InputError):
        qh_distance(PuncturedSpace([[0.0, 0.0, 0.0]]), NormSpec(2.0, 3), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0))


def test_disconnected_at_coarse_resolution():
    # arms 0.02 wide leave no lattice node with enough clearance, and the
    # chord between the arm ends leaves the domain
    thin = rectangle_union([(0, 0, 3, 0.02), (0, 0, 0.02, 3)])
    with pytest.raises(DisconnectedError):
        grid_shortest_path(thin, L2, (2.5, 0.01), (0.01, 2.5), SolverParams(refine_rounds=0))


def _pairs(rng, n):
    out = []
    while len(out) < n:
        r = rng.uniform(0.5, 2.0, 2)
        th = rng.uniform(0, 2 * math.pi, 2)
        x = r[0] * np.array([math.cos(th[0]), math.sin(th[0])])
        y = r[1] * np.array([math.cos(th[1]), math.sin(th[1])])
        out.append((x, y))
    return out


def test_bracket_and_oracle_on_random_pairs(rng):
    for x, y in _pairs(rng, 8):
        est = qh_distance(ORIGIN, L2, x, y, FAST)
        assert est.lower <= est.upper
        assert est.upper == pytest.approx(punctured_plane_qh_distance(x, y), abs=1e-2)


def test_scaling_isometry_and_symmetry(rng):
    for x, y in _pairs(rng, 50):
        base = qh_distance(ORIGIN, L2, x, y, FAST).upper
        for lam in (0.5, 2.0, 10.0):
            scaled = qh_distance(ORIGIN, L2, lam * x, lam * y, FAST.scaled(lam)).upper
            assert abs(scaled - base) <= 2e-2
        assert abs(qh_distance(ORIGIN, L2, y, x, FAST).upper - base) <= 1e-2


def test_domain_monotonicity(rng):
    two = PuncturedSpace([[0.0, 0.0], [1.5, 0.5]])
    for x, y in _pairs(rng, 10):
        if not (two.contains(x) and two.contains(y)):
            continue
        assert qh_distance(ORIGIN, L2, x, y, FAST).upper <= qh_distance(two, L2, x, y, FAST).upper + 1e-2


def test_distance_field_bounds():
    field = DistanceField(ORIGIN, L2, (1.0, 0.0), 2.0)
    Y = np.array([[0.0, 1.0], [2.0, 0.0], [-1.0, 0.5], [0.0, 0.0]])
    lower, upper = field.bracket(Y)
    assert upper[-1] == math.inf
    for y, lo, up in zip(Y[:3], lower[:3], upper[:3]):
        assert lo <= up
        assert up >= punctured_plane_qh_distance((1.0, 0.0), y) - 1e-9
        assert up == pytest.approx(punctured_plane_qh_distance((1.0, 0.0), y), abs=3e-2)


def test_distance_field_counterexample_face():
    field = DistanceField(LOWER, LINF, (0.0, -1.0), 2.5)
    ys = np.column_stack([np.linspace(-1, 1, 9), np.full(9, -2.0)])
    np.testing.assert_allclose(field.upper(ys), math.log(2.0), atol=1e-12)


def test_estimators():
    est = QuasihyperbolicDistance(ORIGIN, L2, params=FAST).fit()
    X = np.array([[1.0, 0.0, 0.0, 1.0], [1.0, 0.0, math.e, 0.0]])
    br = est.predict_bracket(X)
    assert np.all(br[:, 0] <= br[:, 1])
    np.testing.assert_allclose(est.predict(X), [math.pi / 2, 1.0], atol=1e-2)
    j = clone(est).set_params(metric="j").fit()
    assert j.predict(X[1:])[0] == pytest.approx(math.log(math.e))
    field = QuasihyperbolicField(ORIGIN, L2, extent=2.0).fit([1.0, 0.0])
    assert field.predict([[0.0, 1.0]])[0] == pytest.approx(math.pi / 2, abs=3e-2)
    with pytest.raises(InputError):
        QuasihyperbolicDistance().fit()
