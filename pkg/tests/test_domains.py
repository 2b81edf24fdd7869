import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from qhgeo import ConvexPolytope, HalfSpace, InputError, NormSpec, Polygon, PreconditionError, PuncturedSpace
from qhgeo.domains import boundary_distance, contains, min_boundary_distance_on_segment, rectangle_union

L1, L2, L3, LINF = NormSpec(1.0), NormSpec(2.0), NormSpec(3.0), NormSpec(math.inf)
NORMS = [L1, L2, L3, LINF, NormSpec(2.0, 2, (1.0, 2.5))]
LOWER = HalfSpace([0.0, 1.0], 0.0)
SQUARE = ConvexPolytope([([1.0, 0.0], -1.0), ([-1.0, 0.0], -1.0), ([0.0, 1.0], -1.0), ([0.0, -1.0], -1.0)])
TILTED = HalfSpace([1.0, 2.0], -0.5)


def test_contains_examples():
    origin = PuncturedSpace([[0.0, 0.0]])
    assert contains(origin, [1.0, 0.0])
    assert not contains(LOWER, [0.0, 0.0])
    assert not contains(origin, [0.0, 0.0])
    np.testing.assert_array_equal(contains(LOWER, [[0.0, -1.0], [0.0, 1.0]]), [True, False])


def test_contains_dimension_mismatch():
    with pytest.raises(InputError):
        contains(LOWER, [0.0, -1.0, 2.0])


def test_boundary_distance_examples():
    assert boundary_distance(PuncturedSpace([[0.0, 0.0]]), L2, [3.0, 4.0]) == pytest.approx(5.0)
    assert boundary_distance(LOWER, LINF, [0.0, -1.0]) == pytest.approx(1.0)
    assert boundary_distance(LOWER, L2, [0.0, -2.0]) == pytest.approx(2.0)


def test_boundary_distance_outside():
    with pytest.raises(PreconditionError):
        boundary_distance(LOWER, L2, [0.0, 1.0])


def test_constructor_errors():
    with pytest.raises(InputError):
        HalfSpace([0.0, 0.0], 1.0)
    with pytest.raises(InputError):
        PuncturedSpace([[0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(InputError):
        ConvexPolytope([([1.0, 0.0], 1.0), ([-1.0, 0.0], 1.0)])
    with pytest.raises(InputError):
        ConvexPolytope([])


@pytest.mark.parametrize(
    "domain, norm, p, q, dist, t",
    [
        (LOWER, LINF, (-1.0, -2.0), (0.0, -3.0), 2.0, 0.0),
        (PuncturedSpace([[0.0, 0.0]]), L2, (1.0, -1.0), (1.0, 1.0), 1.0, 0.5),
        (PuncturedSpace([[0.0, 0.0]]), L2, (1.0, 0.0), (2.0, 0.0), 1.0, 0.0),
    ],
)
def test_segment_clearance_examples(domain, norm, p, q, dist, t):
    res = min_boundary_distance_on_segment(domain, norm, p, q)
    assert res.min_distance == pytest.approx(dist, abs=1e-12)
    assert res.argmin_parameter == pytest.approx(t, abs=1e-9)


def test_segment_through_puncture_has_zero_clearance():
    res = min_boundary_distance_on_segment(PuncturedSpace([[0.0, 0.0]]), LINF, (-1.0, 0.0), (1.0, 0.0))
    assert res.min_distance == 0.0
    assert res.argmin_parameter == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("norm", NORMS, ids=lambda s: s.label())
@pytest.mark.parametrize("domain", [LOWER, TILTED, SQUARE], ids=["half", "tilted", "square"])
def test_halfspace_distance_matches_brute_force(domain, norm, rng):
    # minimize ||x - y|| over a dense sample of the boundary
    for _ in range(5):
        x = rng.uniform(-0.9, 0.9, 2)
        if not domain.contains(x):
            continue
        best = math.inf
        for a, b in zip(domain.A, domain.b):
            t = np.array([-a[1], a[0]]) / np.hypot(*a)
            foot = -b * a / (a @ a)
            grid = np.linspace(-6, 6, 20001)
            vals = norm(foot + grid[:, None] * t - x)
            k = int(np.argmin(vals))
            # the distance along the line is convex, polish the grid minimum
            res = minimize_scalar(
                lambda u: norm(foot + u * t - x), bounds=(grid[k] - 1e-3, grid[k] + 1e-3), method="bounded",
                options={"xatol": 1e-12},
            )
            best = min(best, float(vals[k]), float(res.fun))
        assert boundary_distance(domain, norm, x) == pytest.approx(best, abs=1e-6)


def _random_inside(domain, rng, n, box=3.0):
    pts = rng.uniform(-box, box, (4 * n, 2))
    pts = pts[domain.contains(pts)]
    return pts[:n]


@pytest.mark.parametrize("norm", NORMS, ids=lambda s: s.label())
@pytest.mark.parametrize(
    "domain",
    [LOWER, TILTED, SQUARE, PuncturedSpace([[0.0, 0.0], [1.0, 1.0]]), rectangle_union([(0, 0, 3, 1), (0, 0, 1, 3)])],
    ids=["half", "tilted", "square", "punctured", "lshape"],
)
def test_one_lipschitz(domain, norm, rng):
    x = _random_inside(domain, rng, 10_000)
    y = _random_inside(domain, rng, len(x))
    x = x[: len(y)]
    gap = np.abs(domain.boundary_distance(norm, x) - domain.boundary_distance(norm, y))
    assert np.all(gap <= norm(x - y) + 1e-12)


@pytest.mark.parametrize("norm", NORMS, ids=lambda s: s.label())
@pytest.mark.parametrize("domain", [LOWER, TILTED, SQUARE], ids=["half", "tilted", "square"])
def test_concave_on_convex_domains(domain, norm, rng):
    u = _random_inside(domain, rng, 10_000)
    v = _random_inside(domain, rng, len(u))
    u = u[: len(v)]
    s = rng.uniform(0, 1, (len(u), 1))
    mid = s * u + (1 - s) * v
    lhs = domain.boundary_distance(norm, mid)
    rhs = s[:, 0] * domain.boundary_distance(norm, u) + (1 - s[:, 0]) * domain.boundary_distance(norm, v)
    assert np.all(lhs >= rhs - 1e-12)


@pytest.mark.parametrize("norm", NORMS, ids=lambda s: s.label())
def test_starlike_scaling_bound(norm, rng):
    # d(s x + (1 - s) x0) >= s d(x) for x0 in a convex domain
    x0 = np.array([0.1, -0.2])
    x = _random_inside(SQUARE, rng, 2000)
    s = rng.uniform(0, 1, (len(x), 1))
    lhs = SQUARE.boundary_distance(norm, s * x + (1 - s) * x0)
    assert np.all(lhs >= s[:, 0] * SQUARE.boundary_distance(norm, x) - 1e-12)


def test_starlike_scaling_bound_punctured_with_clearance(rng):
    dom = PuncturedSpace([[0.0, 0.0]])
    x0 = np.array([2.0, 0.5])
    checked = 0
    for x in rng.uniform(-3, 3, (2000, 2)):
        # the guard: the whole segment [x0, x] stays at least d(x) away from the
        # puncture, so the cone over B(x, d(x)) with apex x0 misses it
        if min_boundary_distance_on_segment(dom, L2, x0, x).min_distance < dom.boundary_distance(L2, x):
            continue
        for s in (0.25, 0.5, 0.75):
            d = dom.boundary_distance(L2, s * x + (1 - s) * x0)
            assert d >= s * dom.boundary_distance(L2, x) - 1e-12
        checked += 1
    assert checked > 100


@given(
    st.floats(-3, 3),
    st.floats(-3, -0.01),
    st.sampled_from([1.0, 2.0, 3.0, math.inf]),
)
def test_halfspace_distance_is_depth(x, y, p):
    # for the normal (0, 1) every p-norm gives the plain depth
    assert boundary_distance(LOWER, NormSpec(p), [x, y]) == pytest.approx(-y)


def test_l_shape():
    dom = rectangle_union([(0, 0, 3, 1), (0, 0, 1, 3)])
    assert isinstance(dom, Polygon)
    assert contains(dom, [0.5, 2.5]) and contains(dom, [2.5, 0.5])
    assert not contains(dom, [2.0, 2.0])
    # nearest boundary point is the reflex corner (1, 1)
    assert boundary_distance(dom, L2, [0.8, 0.8]) == pytest.approx(math.sqrt(0.08))
    # segment across the missing block
    assert min_boundary_distance_on_segment(dom, L2, [0.5, 2.5], [2.5, 0.5]).min_distance == pytest.approx(0.0)
    assert min_boundary_distance_on_segment(dom, L2, [0.5, 2.5], [0.5, 0.5]).min_distance == pytest.approx(0.5)
