"""Tracing metric balls along rays and sampling them for starlikeness and convexity.

Distances are evaluated in two flavours. ``estimate`` is what the tracer
inverts: the exact j-metric, or a solver upper bound for the quasihyperbolic
metric. ``certified`` is what violation decisions use: the exact j-metric in
both cases, since it never exceeds the quasihyperbolic distance. A k-ball
violation is therefore only reported when it is certain.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import InputError, PreconditionError, check_point, check_positive
from .domains import ConvexPolytope, HalfSpace, PuncturedSpace, rectangle_union
from .geodesic import DistanceField, SolverParams
from .norms import NormSpec
from .paths import MetricKind, j_distance, j_distances

J_TOL = 1e-9
K_TOL = 1e-4


@dataclass(frozen=True)
class RayCrossing:
    direction: np.ndarray
    t_star: float
    point: np.ndarray
    distance: float
    clipped: bool = False


@dataclass(frozen=True)
class BallTrace:
    center: np.ndarray
    radius: float
    metric: MetricKind
    rays: tuple

    @property
    def points(self):
        return np.array([c.point for c in self.rays])

    @property
    def angles(self):
        return np.array([math.atan2(c.direction[1], c.direction[0]) % (2 * math.pi) for c in self.rays])

    @property
    def clipped(self):
        return np.array([c.clipped for c in self.rays], dtype=bool)


@dataclass(frozen=True)
class Violation:
    center: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: float
    point: np.ndarray
    distance: float
    radius: float

    @property
    def excess(self):
        return self.distance - self.radius


@dataclass
class CheckReport:
    """Outcome of a sampling check; ``max_excess`` is ``max(dist - r - tol)`` over all samples."""

    suite: str
    configurations: int
    violations: list = field(default_factory=list)
    max_excess: float = -math.inf
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.violations

    @classmethod
    def merge(cls, suite, reports, notes=None):
        reports = list(reports)
        out = cls(suite, sum(r.configurations for r in reports))
        for r in reports:
            out.violations.extend(r.violations)
            out.max_excess = max(out.max_excess, r.max_excess)
        out.notes = dict(notes or {})
        return out


class MetricEvaluator:
    """Distance-to-center evaluation for one ball.

    For the quasihyperbolic metric a single-source :class:`DistanceField` is
    built over a box that contains the j-ball of radius ``radius``; since the
    k-ball lies inside the j-ball, that box covers every point the tracer visits.
    """

    def __init__(self, domain, norm, metric, center, radius, params=None):
        self.domain = domain
        self.norm = norm
        self.metric = MetricKind.parse(metric)
        self.center = check_point(center, domain.dim, "center")
        if not domain.contains(self.center):
            raise PreconditionError("the ball center must lie in the domain")
        self.radius = check_positive(radius, "radius")
        self.d_center = float(domain.boundary_distance(norm, self.center))
        self.field = None
        if self.metric is MetricKind.QUASIHYPERBOLIC:
            reach = math.expm1(self.radius) * self.d_center
            if norm.weights is not None:
                reach /= min(norm.weights)
            params = params or SolverParams()
            h = min(params.grid_spacing, reach / 60.0)
            params = SolverParams(grid_spacing=h, neighbor_stencil=params.neighbor_stencil,
                                  quad_tol=params.quad_tol)
            self.field = DistanceField(domain, norm, self.center, reach + 3 * h, params)

    @property
    def tol(self):
        return J_TOL if self.metric is MetricKind.DISTANCE_RATIO else K_TOL

    def certified(self, Y):
        return j_distances(self.domain, self.norm, self.center, Y)

    def estimate(self, Y):
        if self.field is None:
            return self.certified(Y)
        return self.field.upper(Y)


def _unit(norm, U):
    U = np.atleast_2d(np.asarray(U, dtype=float))
    n = norm(U)
    if np.any(n == 0):
        raise InputError("ray directions must be non-zero")
    return U / n[:, None]


def _crossings(ev, U, tol, max_steps=400):
    # Vectorized over rays: geometric march until the estimate exceeds r or the
    # ray leaves the domain, then bisection on that combined predicate.
    domain, c, r = ev.domain, ev.center, ev.radius
    m = U.shape[0]

    def bad(t, idx):
        # [c, c + lo u] is already known to be feasible; only the step is checked
        P = c + t[:, None] * U[idx]
        out = ~domain.segment_feasible(ev.norm, c + lo[idx, None] * U[idx], P)
        vals = np.full(len(t), math.inf)
        ok = ~out
        if np.any(ok):
            vals[ok] = ev.estimate(P[ok])
        return out | (vals > r), out, vals

    lo = np.zeros(m)
    f_lo = np.zeros(m)
    hi = np.full(m, math.nan)
    t = np.full(m, r * ev.d_center / 8.0)
    active = np.ones(m, dtype=bool)
    for _ in range(max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        b, _, vals = bad(t[idx], idx)
        hi[idx[b]] = t[idx[b]]
        good = idx[~b]
        lo[good] = t[good]
        f_lo[good] = vals[~b]
        t[good] *= 1.5
        active[idx[b]] = False
    if np.any(active):
        raise RuntimeError("ray march did not leave the ball")
    # bisection until the inside endpoint is within tol of r (or the bracket collapses)
    for _ in range(200):
        idx = np.flatnonzero((f_lo < r - tol) & (hi - lo > 1e-14 * np.maximum(1.0, hi)))
        if idx.size == 0:
            break
        mid = 0.5 * (lo[idx] + hi[idx])
        b, _, vals = bad(mid, idx)
        hi[idx[b]] = mid[b]
        lo[idx[~b]] = mid[~b]
        f_lo[idx[~b]] = vals[~b]
    _, out_hi, _ = bad(hi, np.arange(m))
    clipped = out_hi & (f_lo < r - tol)
    return lo, f_lo, clipped


def first_crossing_along_ray(domain, norm, metric, center, direction, r, tol=None, params=None, evaluator=None):
    """First parameter ``t*`` (in norm length) where the distance along the ray reaches ``r``.

    The march starts at ``r * d(center) / 8`` and grows by 1.5 per step. The
    returned point is the inside end of the final bisection bracket, so its
    distance lies in ``[r - tol, r]``. If the ray leaves the domain first,
    the crossing is flagged ``clipped`` and ``t*`` is the exit parameter.
    """
    ev = evaluator or MetricEvaluator(domain, norm, metric, center, r, params)
    tol = ev.tol if tol is None else float(tol)
    u = _unit(norm, direction)
    lo, f_lo, clipped = _crossings(ev, u, tol)
    return RayCrossing(u[0], float(lo[0]), ev.center + lo[0] * u[0], float(f_lo[0]), bool(clipped[0]))


def ray_directions(n_rays):
    theta = 2.0 * math.pi * np.arange(int(n_rays)) / int(n_rays)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def trace_ball(domain, norm, metric, center, r, n_rays=32, tol=None, params=None, evaluator=None):
    """Boundary points of the ball on ``n_rays`` rays at uniformly spaced angles (planar)."""
    if domain.dim != 2:
        raise InputError("ball tracing is planar only")
    if int(n_rays) < 1:
        raise InputError("n_rays must be positive")
    ev = evaluator or MetricEvaluator(domain, norm, metric, center, r, params)
    tol = ev.tol if tol is None else float(tol)
    U = _unit(norm, ray_directions(n_rays))
    lo, f_lo, clipped = _crossings(ev, U, tol)
    rays = tuple(
        RayCrossing(U[i], float(lo[i]), ev.center + lo[i] * U[i], float(f_lo[i]), bool(clipped[i]))
        for i in range(len(U))
    )
    return BallTrace(ev.center, ev.radius, ev.metric, rays)


def _chord_grid(n_chord):
    return np.arange(1, int(n_chord) + 1) / (int(n_chord) + 1.0)


def _assess(ev, suite, Y, Z, S, tol, limit=50):
    # Chord points s*y + (1-s)*z; violation when the certified distance exceeds r + tol.
    P = S[:, None] * Y + (1.0 - S[:, None]) * Z
    cert = ev.certified(P)
    excess = cert - ev.radius - tol
    rep = CheckReport(suite, 1)
    if P.shape[0]:
        rep.max_excess = float(np.max(excess))
    for i in np.flatnonzero(excess > 0)[:limit]:
        rep.violations.append(Violation(ev.center, Y[i], Z[i], float(S[i]), P[i], float(cert[i]), ev.radius))
    rep.notes["violation_count"] = int(np.sum(excess > 0))
    if ev.field is not None:
        rep.notes["max_upper_excess"] = float(np.max(ev.estimate(P) - ev.radius)) if P.shape[0] else -math.inf
    return rep, P


def starlike_check(domain, norm, metric, center, r, n_rays=32, n_chord=8, tol=None, params=None, evaluator=None):
    """Sample segments from the center to traced boundary points."""
    ev = evaluator or MetricEvaluator(domain, norm, metric, center, r, params)
    tol = (J_TOL if ev.metric is MetricKind.DISTANCE_RATIO else 1e-2) if tol is None else float(tol)
    tr = trace_ball(domain, norm, ev.metric, ev.center, r, n_rays, evaluator=ev)
    B = tr.points[~tr.clipped]
    s = _chord_grid(n_chord)
    Y = np.repeat(B, len(s), axis=0)
    S = np.tile(s, len(B))
    Z = np.repeat(ev.center[None, :], len(Y), axis=0)
    rep, _ = _assess(ev, "starlike", Y, Z, S, tol)
    rep.notes["clipped_rays"] = int(tr.clipped.sum())
    return rep


def convexity_check(domain, norm, metric, center, r, n_rays=24, n_chord=8, tol=None, params=None, evaluator=None):
    """Sample chords between every pair of traced boundary points.

    Also records the smallest midpoint margin ``r - estimate(midpoint)`` as a
    strict-convexity probe; a non-positive margin is noted, not failed.
    """
    ev = evaluator or MetricEvaluator(domain, norm, metric, center, r, params)
    tol = (J_TOL if ev.metric is MetricKind.DISTANCE_RATIO else 1e-2) if tol is None else float(tol)
    tr = trace_ball(domain, norm, ev.metric, ev.center, r, n_rays, evaluator=ev)
    B = tr.points[~tr.clipped]
    i, k = np.triu_indices(len(B), 1)
    s = _chord_grid(n_chord)
    Y = np.repeat(B[i], len(s), axis=0)
    Z = np.repeat(B[k], len(s), axis=0)
    S = np.tile(s, len(i))
    rep, _ = _assess(ev, "convex", Y, Z, S, tol)
    if len(i):
        mids = 0.5 * (B[i] + B[k])
        rep.notes["min_midpoint_margin"] = float(np.min(ev.radius - ev.estimate(mids)))
    rep.notes["clipped_rays"] = int(tr.clipped.sum())
    return rep


@dataclass(frozen=True)
class Witness:
    center: np.ndarray
    radius: float
    y: np.ndarray
    z: np.ndarray
    s: float
    point: np.ndarray
    distance: float

    @property
    def excess(self):
        return self.distance - self.radius


def _witness_centers(r, budget, rng):
    # Centers (1, b) with b just below 1: the l-infinity sphere around the
    # puncture has its corner on the diagonal, and the j-ball boundary there
    # turns reflex for b in (1/(1 + c), 1), c = e^r - 1.
    c = math.expm1(r)
    b0 = 1.0 / (1.0 + c)
    out = []
    for lam in (1.0, 2.0, 0.5):
        for f in (0.5, 0.25, 0.75, 0.1, 0.9):
            out.append(lam * np.array([1.0, b0 + f * (1.0 - b0)]))
    while len(out) < budget:
        out.append(np.array([1.0, rng.uniform(0.0, 1.0)]) * rng.uniform(0.5, 2.0))
    return out[:budget]


def find_nonconvex_witness(radii, norm=None, budget=40, n_rays=720, window=24, seed=0):
    """Search punctured-plane j-balls for a chord point outside the ball.

    Returns one entry per radius: a :class:`Witness` (re-verified by a scalar
    j evaluation with excess above ``1e-9``) or ``None`` if ``budget``
    centers produced nothing.
    """
    norm = norm or NormSpec(math.inf)
    domain = PuncturedSpace([[0.0, 0.0]])
    rng = np.random.default_rng(seed)
    s = np.array([0.25, 0.5, 0.75])
    found = []
    for r in radii:
        r = check_positive(r, "radius")
        hit = None
        for center in _witness_centers(r, int(budget), rng):
            ev = MetricEvaluator(domain, norm, MetricKind.DISTANCE_RATIO, center, r)
            B = trace_ball(domain, norm, ev.metric, center, r, n_rays, evaluator=ev).points
            n = len(B)
            i = np.repeat(np.arange(n), window)
            k = (i + np.tile(np.arange(1, window + 1), n)) % n
            Y = np.repeat(B[i], len(s), axis=0)
            Z = np.repeat(B[k], len(s), axis=0)
            S = np.tile(s, len(i))
            P = S[:, None] * Y + (1.0 - S[:, None]) * Z
            vals = ev.certified(P)
            best = int(np.argmax(vals))
            if vals[best] > r + 1e-9:
                dist = j_distance(domain, norm, center, P[best])
                if dist > r + 1e-9:
                    hit = Witness(center, r, Y[best], Z[best], float(S[best]), P[best], dist)
                    break
        found.append(hit)
    return found


# --- randomized suites -----------------------------------------------------

SUITE_NORMS = (1.0, 2.0, 3.0, math.inf)


def random_polytope(rng, n_faces=None):
    """A bounded polygon around the origin: faces at sorted random angles and offsets in [1, 3]."""
    n = int(n_faces or rng.integers(3, 7))
    while True:
        ang = np.sort(rng.uniform(0, 2 * math.pi, n))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
        if gaps.max() < math.pi * 0.9:
            break
    normals = np.column_stack([np.cos(ang), np.sin(ang)])
    offsets = -rng.uniform(1.0, 3.0, n)
    return ConvexPolytope(list(zip(normals, offsets)))


def random_half_plane(rng):
    a = rng.standard_normal(2)
    return HalfSpace(a / np.linalg.norm(a), -rng.uniform(0.5, 2.0))


def random_punctured(rng):
    k = int(rng.integers(1, 4))
    return PuncturedSpace(rng.uniform(-2, 2, (k, 2)))


def random_inside(rng, domain, box=3.0, d_min=0.05, norm=None):
    norm = norm or NormSpec(2.0)
    for _ in range(10000):
        x = rng.uniform(-box, box, 2)
        if domain.contains(x) and domain.boundary_distance(norm, x) > d_min:
            return x
    raise RuntimeError("could not sample an interior point")


def l_shape():
    """Union of ``[0,2]x[0,1]`` and ``[0,1]x[0,2]``; starlike with respect to the unit square."""
    return rectangle_union([(0, 0, 2, 1), (0, 0, 1, 2)])


def _config_label(domain, norm, center, r, metric):
    return f"{domain!r} {norm.label()} center={np.round(center, 6).tolist()} r={r:.6g} {MetricKind.parse(metric).value}"


def starlike_suite(n_configs=100, seed=0, r=math.log(2), n_rays=32, n_chord=8, probe_radii=(1.0, 2.0)):
    """Random j-ball starlikeness checks at ``r`` over punctured, half-plane and polytope domains.

    For each configuration the largest of ``(r,) + probe_radii`` with no
    violation is recorded in ``notes["largest_clean_radius"]``; it is not asserted.
    """
    rng = np.random.default_rng(seed)
    makers = (random_punctured, random_half_plane, random_polytope)
    reports, clean = [], []
    for i in range(int(n_configs)):
        domain = makers[i % 3](rng)
        norm = NormSpec(SUITE_NORMS[(i // 3) % 4])
        center = random_inside(rng, domain, norm=norm)
        rep = starlike_check(domain, norm, "j", center, r, n_rays, n_chord)
        for v in rep.violations:
            v_label = _config_label(domain, norm, center, r, "j")
            rep.notes.setdefault("labels", []).append(v_label)
        reports.append(rep)
        best = r if rep.passed else 0.0
        for big in probe_radii:
            if starlike_check(domain, norm, "j", center, big, 16, 4).passed:
                best = max(best, big)
        clean.append(best)
    return CheckReport.merge("thm31", reports, {"largest_clean_radius": clean})


def convexity_suite(n_configs=25, seed=0, include_k=True, n_rays=16, n_chord=6, params=None):
    """j-ball (exact) and k-ball (certified lower bound, tol 1e-2) convexity on convex domains."""
    rng = np.random.default_rng(seed)
    reports, upper_excess, margins = [], [], []
    for i in range(int(n_configs)):
        domain = random_half_plane(rng) if i % 2 == 0 else random_polytope(rng)
        norm = NormSpec(SUITE_NORMS[i % 4])
        center = random_inside(rng, domain, d_min=0.2, norm=norm)
        rj = float(rng.uniform(0.2, 3.0))
        reports.append(convexity_check(domain, norm, "j", center, rj, n_rays, n_chord))
        margins.append(reports[-1].notes.get("min_midpoint_margin", math.nan))
        if include_k:
            rk = float(rng.uniform(0.3, 1.0))
            rep = convexity_check(domain, norm, "k", center, rk, n_rays, n_chord, tol=1e-2, params=params)
            upper_excess.append(rep.notes["max_upper_excess"])
            reports.append(rep)
    notes = {"k_max_upper_excess": upper_excess, "j_min_midpoint_margin": margins}
    rep = CheckReport.merge("thm41", reports, notes)
    rep.configurations = int(n_configs)
    return rep


def star_domain_suite(n_polytopes=8, n_lshape=4, seed=0, include_k=True, n_rays=24, n_chord=8, params=None):
    """Starlikeness of balls centered at a star center: polytopes and the L-shaped union."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(int(n_polytopes)):
        domain = random_polytope(rng)
        norm = NormSpec(SUITE_NORMS[i % 4])
        cases.append((domain, norm, random_inside(rng, domain, d_min=0.2, norm=norm)))
    L = l_shape()
    for i in range(int(n_lshape)):
        cases.append((L, NormSpec(SUITE_NORMS[i % 4]), rng.uniform(0.15, 0.85, 2)))
    reports = []
    for domain, norm, center in cases:
        rj = float(rng.uniform(0.5, 4.0))
        reports.append(starlike_check(domain, norm, "j", center, rj, n_rays, n_chord))
        if include_k:
            rk = float(rng.uniform(0.3, 1.2))
            reports.append(starlike_check(domain, norm, "k", center, rk, n_rays, n_chord, tol=1e-2, params=params))
    rep = CheckReport.merge("thm44", reports)
    rep.configurations = len(cases)
    return rep


__all__ = [
    "BallTrace",
    "CheckReport",
    "MetricEvaluator",
    "RayCrossing",
    "Violation",
    "Witness",
    "convexity_check",
    "convexity_suite",
    "find_nonconvex_witness",
    "first_crossing_along_ray",
    "l_shape",
    "star_domain_suite",
    "starlike_check",
    "starlike_suite",
    "trace_ball",
]
