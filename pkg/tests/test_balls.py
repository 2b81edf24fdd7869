import math

import numpy as np
import pytest

from qhgeo import (
    CheckReport,
    ConvexPolytope,
    HalfSpace,
    NormSpec,
    PuncturedSpace,
    SolverParams,
    Violation,
    convexity_check,
    find_nonconvex_witness,
    first_crossing_along_ray,
    j_distance,
    starlike_check,
    trace_ball,
)
from qhgeo.balls import J_TOL, MetricEvaluator, l_shape
from qhgeo._validation import InputError, PreconditionError

L2 = NormSpec(2.0)
LINF = NormSpec(math.inf)
LN2 = math.log(2.0)
LOWER = HalfSpace((0.0, 1.0), 0.0)
ORIGIN = PuncturedSpace([[0.0, 0.0]])
SQUARE = ConvexPolytope([((1, 0), -2), ((-1, 0), -2), ((0, 1), -2), ((0, -1), -2)])


def test_j_crossing_punctured_radial():
    c = first_crossing_along_ray(ORIGIN, L2, "j", (1.0, 0.0), (1.0, 0.0), LN2)
    assert c.t_star == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(c.point, (2.0, 0.0), atol=1e-8)
    assert not c.clipped


def test_k_crossing_half_plane_vertical():
    c = first_crossing_along_ray(LOWER, L2, "k", (0.0, -1.0), (0.0, -1.0), LN2)
    assert np.allclose(c.point, (0.0, -2.0), atol=1e-2)


def test_crossing_shrinks_with_radius():
    ts = [first_crossing_along_ray(ORIGIN, L2, "j", (1.0, 0.0), (0.0, 1.0), r).t_star for r in (1e-2, 1e-4, 1e-6)]
    assert ts[0] > ts[1] > ts[2] > 0
    assert ts[2] < 1e-5


def test_crossing_rejects_bad_input():
    with pytest.raises(InputError):
        first_crossing_along_ray(ORIGIN, L2, "j", (1.0, 0.0), (0.0, 0.0), 0.5)
    with pytest.raises(PreconditionError):
        first_crossing_along_ray(LOWER, L2, "j", (0.0, 1.0), (1.0, 0.0), 0.5)
    with pytest.raises(InputError):
        first_crossing_along_ray(ORIGIN, L2, "j", (1.0, 0.0), (1.0, 0.0), -1.0)


def test_crossing_clipped_by_boundary():
    # j blows up at the puncture, so a crossing exists for any r in exact arithmetic;
    # at r = 50 it lies closer than float spacing and the ray exits first
    c = first_crossing_along_ray(ORIGIN, L2, "j", (1.0, 0.0), (-1.0, 0.0), 50.0)
    assert c.clipped
    assert c.t_star == pytest.approx(1.0, abs=1e-6)


def test_k_trace_touches_flat_face_linf():
    tr = trace_ball(LOWER, LINF, "k", (0.0, -1.0), LN2, n_rays=32)
    P = tr.points
    low = P[P[:, 1] < -1.9]
    assert len(low) >= 3
    # the lowest rays land on {(t, -2) : |t| <= 1}
    assert np.all(np.abs(low[:, 1] + 2.0) < 2e-2)
    assert np.all(np.abs(low[:, 0]) <= 1.0 + 2e-2)


@pytest.mark.parametrize("domain,center", [(ORIGIN, (1.0, 0.5)), (LOWER, (0.3, -1.2)), (SQUARE, (0.4, -0.1))])
def test_small_j_ball_is_norm_ball(domain, center):
    r = 0.01
    tr = trace_ball(domain, L2, "j", center, r, n_rays=16)
    d = domain.boundary_distance(L2, np.asarray(center))
    radii = np.linalg.norm(tr.points - np.asarray(center), axis=1)
    assert np.allclose(radii / d, r, rtol=2e-2)


def test_four_rays_symmetric():
    tr = trace_ball(ORIGIN, L2, "j", (3.0, 0.0), 0.3, n_rays=4)
    t = np.array([c.t_star for c in tr.rays])
    # symmetric about the x-axis: up and down rays agree
    assert t[1] == pytest.approx(t[3], rel=1e-9)
    assert len(tr.rays) == 4 and np.all(t > 0)


def test_trace_points_on_sphere():
    for metric, center, tol in (("j", (1.0, 1.0), 1e-9), ("k", (0.5, -1.0), 1e-4)):
        domain = ORIGIN if metric == "j" else LOWER
        tr = trace_ball(domain, L2, metric, center, 0.5, n_rays=12)
        dists = np.array([c.distance for c in tr.rays])
        assert np.all(np.abs(dists - 0.5) <= tol + 1e-12)
        if metric == "j":
            exact = [j_distance(domain, L2, center, p) for p in tr.points]
            assert np.allclose(exact, 0.5, atol=tol + 1e-12)


def test_trace_is_planar_only():
    dom3 = PuncturedSpace([[0.0, 0.0, 0.0]])
    with pytest.raises(InputError):
        trace_ball(dom3, NormSpec(2.0, 3), "j", (1.0, 0.0, 0.0), 0.2)


def test_nested_balls():
    ev = MetricEvaluator(ORIGIN, LINF, "j", (1.0, 0.4), 0.6)
    for small in (0.1, 0.3, 0.5):
        tr = trace_ball(ORIGIN, LINF, "j", (1.0, 0.4), small, n_rays=24)
        assert np.all(ev.certified(tr.points) <= 0.6 + J_TOL)


def test_starlike_punctured_log2():
    for center in ((1.0, 0.0), (-0.3, 2.0), (0.01, -0.02)):
        rep = starlike_check(ORIGIN, L2, "j", center, LN2)
        assert rep.passed and rep.max_excess <= 0


def test_starlike_polytope_large_radius():
    assert starlike_check(SQUARE, L2, "j", (0.5, -0.7), 5.0).passed


def test_starlike_k_half_plane():
    rep = starlike_check(LOWER, L2, "k", (0.0, -1.0), LN2)
    assert rep.passed


def test_convex_j_half_plane():
    rep = convexity_check(LOWER, L2, "j", (0.2, -0.8), 1.0)
    assert rep.passed
    assert rep.notes["min_midpoint_margin"] > 0


def test_convex_k_polytope_l3():
    rep = convexity_check(SQUARE, NormSpec(3.0), "k", (0.3, 0.2), 0.8, tol=1e-2)
    assert rep.passed


def test_convex_j_punctured_linf_fails_near_diagonal():
    w = find_nonconvex_witness([0.2], LINF, seed=0)[0]
    rep = convexity_check(ORIGIN, LINF, "j", w.center, 0.2)
    assert not rep.passed
    assert rep.max_excess > 0
    v = rep.violations[0]
    assert j_distance(ORIGIN, LINF, v.center, v.point) > v.radius + J_TOL


@pytest.mark.parametrize("r", [0.2, 0.05])
def test_witness_found(r):
    (w,) = find_nonconvex_witness([r], LINF, seed=0)
    assert w is not None
    assert w.excess > 1e-9
    assert j_distance(ORIGIN, LINF, w.center, w.point) == pytest.approx(w.distance)
    assert np.allclose(w.point, w.s * w.y + (1 - w.s) * w.z)
    # the chord endpoints sit on the traced sphere
    for q in (w.y, w.z):
        assert abs(j_distance(ORIGIN, LINF, w.center, q) - r) <= 1e-8


def test_no_witness_euclidean():
    found = find_nonconvex_witness([LN2, 0.2, 0.05], L2, budget=20, seed=0)
    assert found == [None, None, None]


def test_l_shape_starlike_from_unit_square():
    dom = l_shape()
    rep = starlike_check(dom, L2, "j", (0.6, 0.5), 1.0)
    assert rep.passed


def test_check_report_merge():
    v = Violation(np.zeros(2), np.ones(2), np.ones(2), 0.5, np.ones(2), 1.2, 1.0)
    a = CheckReport("s", 2, max_excess=-0.5)
    b = CheckReport("s", 3, [v], 0.2)
    m = CheckReport.merge("all", [a, b], {"k": 1})
    assert m.configurations == 5
    assert m.max_excess == 0.2
    assert not m.passed and len(m.violations) == 1
    assert v.excess == pytest.approx(0.2)
    clean = CheckReport.merge("all", [a])
    assert clean.passed and clean.max_excess <= 0


def test_k_params_are_respected():
    coarse = SolverParams(grid_spacing=0.1)
    tr = trace_ball(LOWER, L2, "k", (0.0, -1.0), 0.3, n_rays=8, params=coarse)
    assert np.all(np.abs([c.distance - 0.3 for c in tr.rays]) <= 1e-4)
