"""Polyline paths, their norm and quasihyperbolic lengths, and the j-metric."""

import enum
import math

import numpy as np
from scipy.optimize import brentq

from ._validation import InputError, PreconditionError, check_point
from .quadrature import adaptive_simpson, adaptive_simpson_batch, gauss_legendre

DEFAULT_TOL = 1e-8


class MetricKind(enum.Enum):
    QUASIHYPERBOLIC = "k"
    DISTANCE_RATIO = "j"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for m in cls:
            if key in (m.value, m.name.lower()):
                return m
        aliases = {"qh": cls.QUASIHYPERBOLIC, "quasihyperbolic": cls.QUASIHYPERBOLIC, "distance-ratio": cls.DISTANCE_RATIO}
        if key in aliases:
            return aliases[key]
        raise InputError(f"unknown metric {value!r}")


class Polyline:
    """A path given by its vertex list, traversed at constant speed per segment.

    With ``strict=True`` consecutive vertices must be distinct. Constant and
    endpoint-padded paths (used when averaging) need ``strict=False``.
    """

    def __init__(self, vertices, strict=True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise InputError("a polyline needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise InputError("polyline vertices must be finite")
        if strict and np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise InputError("consecutive polyline vertices must be distinct")
        v.setflags(write=False)
        self.vertices = v

    @classmethod
    def constant(cls, x, n_vertices=2):
        x = check_point(x)
        return cls(np.repeat(x[None, :], n_vertices, axis=0), strict=False)

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def __len__(self):
        return self.vertices.shape[0]

    def __repr__(self):
        return f"Polyline({len(self)} vertices, {self.start.tolist()} -> {self.end.tolist()})"

    def reversed(self):
        return Polyline(self.vertices[::-1], strict=False)

    def segments(self):
        return self.vertices[:-1], self.vertices[1:]

    def deduplicated(self):
        keep = np.ones(len(self), dtype=bool)
        keep[1:] = np.any(self.vertices[1:] != self.vertices[:-1], axis=1)
        v = self.vertices[keep]
        if len(v) == 1:
            return Polyline.constant(v[0])
        return Polyline(v)


def concat(first, second):
    if not np.array_equal(first.end, second.start):
        raise InputError("paths must share the junction vertex")
    return Polyline(np.vstack([first.vertices, second.vertices[1:]]), strict=False)


def norm_length(spec, path):
    p, q = path.segments()
    return float(np.sum(spec(q - p)))


def cumulative_norm_length(spec, path):
    p, q = path.segments()
    return np.concatenate([[0.0], np.cumsum(spec(q - p))])


def _interpolate(vertices, cum, targets):
    # position at cumulative parameter values ``targets``; ``cum`` non-decreasing
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(cum) - 2)
    span = cum[idx + 1] - cum[idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (targets - cum[idx]) / span, 0.0)
    frac = np.clip(frac, 0.0, 1.0)
    return vertices[idx] + frac[:, None] * (vertices[idx + 1] - vertices[idx])


def arclength_reparameterize(spec, path, n):
    """Resample ``path`` at ``n + 1`` points equally spaced in norm arclength."""
    if int(n) < 1:
        raise InputError("segment count must be at least 1")
    cum = cumulative_norm_length(spec, path)
    total = cum[-1]
    if total <= 0:
        raise InputError("cannot reparameterize a zero-length path")
    targets = np.linspace(0.0, total, int(n) + 1)
    pts = _interpolate(path.vertices, cum, targets)
    pts[0], pts[-1] = path.start, path.end
    return Polyline(pts, strict=False)


def qh_segment_length(domain, spec, p, q, tol=DEFAULT_TOL):
    """Quasihyperbolic length of the segment ``[p, q]``; ``inf`` if it touches the boundary.

    Adaptive Simpson to absolute error ``tol``, or the exact integral when the
    domain provides one.
    """
    p = check_point(p, domain.dim, "p")
    q = check_point(q, domain.dim, "q")
    if not (domain.contains(p) and domain.contains(q)):
        raise PreconditionError("segment endpoints must lie in the domain")
    length = spec(q - p)
    if length == 0.0:
        return 0.0
    clearance, _ = domain.segment_clearance(spec, p, q)
    if not clearance > 0.0:
        return math.inf
    v = q - p
    exact = getattr(domain, "inverse_distance_integral", None)
    if exact is not None:
        return length * float(exact(spec, p, q)[0])

    def inv_d(t):
        return 1.0 / domain.distance_unchecked(spec, p + t[:, None] * v)

    return length * adaptive_simpson(inv_d, 0.0, 1.0, tol / length)


def qh_segment_lengths(domain, spec, P, Q, tol=DEFAULT_TOL, clearance=None):
    """Vectorized segment lengths for many segments at once.

    A 12-point Gauss-Legendre rule is compared against a 24-point rule, first on
    the whole segment and then as composite rules on 4 and 16 pieces; segments
    where they still disagree by more than ``tol`` fall back to adaptive Simpson.
    Segments with zero clearance get ``inf``. Domains that integrate ``1/d``
    exactly along segments (polytopes) skip quadrature altogether.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    out = np.full(P.shape[0], math.inf)
    if clearance is None:
        clearance, _ = domain.segment_clearance(spec, P, Q)
    ok = np.asarray(clearance) > 0.0
    if not np.any(ok):
        return out
    p, q = P[ok], Q[ok]
    v = q - p
    length = spec(v)
    exact = getattr(domain, "inverse_distance_integral", None)
    if exact is not None:
        out[ok] = length * exact(spec, p, q)
        return out

    def rule(sel, n, pieces):
        # composite rule: ``pieces`` equal sub-intervals, ``n`` nodes each
        t, w = gauss_legendre(n)
        t = ((np.arange(pieces)[:, None] + t[None, :]) / pieces).ravel()
        w = np.tile(w, pieces) / pieces
        pts = p[sel, None, :] + t[None, :, None] * v[sel, None, :]
        d = domain.distance_unchecked(spec, pts.reshape(-1, P.shape[1])).reshape(len(sel), t.size)
        return length[sel] * ((1.0 / d) @ w)

    vals = np.empty(len(p))
    todo = np.arange(len(p))
    for pieces in (1, 4, 16):
        coarse = rule(todo, 12, pieces)
        fine = rule(todo, 24, pieces)
        good = np.abs(fine - coarse) <= tol
        vals[todo[good]] = fine[good]
        todo = todo[~good]
        if todo.size == 0:
            break
    if todo.size:
        def inv_d(owner, t):
            seg = todo[owner]
            return 1.0 / domain.distance_unchecked(spec, p[seg] + t[:, None] * v[seg])

        vals[todo] = length[todo] * adaptive_simpson_batch(inv_d, todo.size, tol / length[todo].max())
    out[ok] = vals
    return out


def qh_segment_profile(domain, spec, path, tol=DEFAULT_TOL):
    """Per-segment quasihyperbolic lengths of ``path`` (each to ``tol / #segments``)."""
    P, Q = path.segments()
    share = tol / len(P)
    return np.array([qh_segment_length(domain, spec, p, q, share) for p, q in zip(P, Q)])


def qh_polyline_length(domain, spec, path, tol=DEFAULT_TOL):
    """Sum of segment quasihyperbolic lengths; ``inf`` if any segment is infeasible."""
    return float(np.sum(qh_segment_profile(domain, spec, path, tol)))


def qh_arclength_reparameterize(domain, spec, path, n, tol=DEFAULT_TOL, oversample=16):
    """Resample at ``n + 1`` points equally spaced in quasihyperbolic arclength.

    Each segment is split into ``oversample`` pieces, cumulative quasihyperbolic
    length is tabulated on the pieces, and the targets are found by inverse
    linear interpolation.
    """
    if int(n) < 1:
        raise InputError("segment count must be at least 1")
    P, Q = path.segments()
    t = np.linspace(0.0, 1.0, oversample + 1)
    fine = np.vstack([P[i] + t[:-1, None] * (Q[i] - P[i]) for i in range(len(P))] + [path.end[None, :]])
    fine_path = Polyline(fine, strict=False)
    prof = qh_segment_profile(domain, spec, fine_path, tol)
    if not np.all(np.isfinite(prof)):
        raise PreconditionError("path leaves the domain")
    cum = np.concatenate([[0.0], np.cumsum(prof)])
    if cum[-1] <= 0:
        raise InputError("cannot reparameterize a zero-length path")
    pts = _interpolate(fine, cum, np.linspace(0.0, cum[-1], int(n) + 1))
    pts[0], pts[-1] = path.start, path.end
    return Polyline(pts, strict=False)


def j_distance(domain, spec, x, y):
    """``log(1 + ||x - y|| / min(d(x), d(y)))``."""
    x = check_point(x, domain.dim, "x")
    y = check_point(y, domain.dim, "y")
    if not (domain.contains(x) and domain.contains(y)):
        raise PreconditionError("j_distance needs both points in the domain")
    gap = spec(x - y)
    if gap == 0.0:
        return 0.0
    dmin = min(domain.boundary_distance(spec, x), domain.boundary_distance(spec, y))
    return math.log1p(gap / dmin)


def j_distances(domain, spec, x, Y):
    """j-distance from ``x`` to each row of ``Y``; ``inf`` for rows outside the domain."""
    x = check_point(x, domain.dim, "x")
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    out = np.full(Y.shape[0], math.inf)
    inside = domain.contains(Y)
    if not np.any(inside):
        return out
    dx = domain.boundary_distance(spec, x)
    dy = domain.boundary_distance(spec, Y[inside])
    out[inside] = np.log1p(spec(Y[inside] - x) / np.minimum(dx, dy))
    return out


def average_path(path0, path1, s):
    """Vertex-wise convex combination ``s * path1 + (1 - s) * path0``."""
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise InputError("s must lie in [0, 1]")
    if path0.vertices.shape != path1.vertices.shape:
        raise InputError("paths must have identical vertex counts to be averaged")
    return Polyline(s * path1.vertices + (1.0 - s) * path0.vertices, strict=False)


def align_by_arclength(spec, path1, path2):
    """Put two paths on a common norm-arclength parameter ``[0, t2]``.

    Breakpoints are the union of both paths' vertex arclengths; the shorter
    path stays at its endpoint once its own length ``t1`` is used up.
    Returns ``(aligned1, aligned2, params, t1, t2)`` where the first path is
    the shorter one (swapped if needed).
    """
    c1 = cumulative_norm_length(spec, path1)
    c2 = cumulative_norm_length(spec, path2)
    if c1[-1] > c2[-1]:
        path1, path2, c1, c2 = path2, path1, c2, c1
    t1, t2 = c1[-1], c2[-1]
    params = np.unique(np.concatenate([c1, c2]))
    a1 = _interpolate(path1.vertices, c1, np.minimum(params, t1))
    a2 = _interpolate(path2.vertices, c2, params)
    return Polyline(a1, strict=False), Polyline(a2, strict=False), params, t1, t2


def qh_position(domain, spec, path, targets, tol=DEFAULT_TOL, iters=60):
    """Points of ``path`` at cumulative quasihyperbolic lengths ``targets``.

    Returns ``(points, segment_index)``. Inside a segment the partial length
    is inverted by safeguarded Newton steps (the derivative is
    ``||v|| / d``), falling back to bisection when a step leaves the bracket.
    """
    P, Q = path.segments()
    prof = qh_segment_lengths(domain, spec, P, Q, tol)
    if not np.all(np.isfinite(prof)):
        raise PreconditionError("path leaves the domain")
    cum = np.concatenate([[0.0], np.cumsum(prof)])
    targets = np.clip(np.asarray(targets, dtype=float), 0.0, cum[-1])
    seg = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(P) - 1)
    rest = targets - cum[seg]
    p, v = P[seg], Q[seg] - P[seg]
    speed = spec(v)
    lo = np.zeros(targets.shape)
    hi = np.ones(targets.shape)
    t = np.where(prof[seg] > 0, rest / np.where(prof[seg] > 0, prof[seg], 1.0), 0.0)
    active = np.ones(targets.shape, dtype=bool)
    for _ in range(iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ti = t[idx]
        part = np.zeros(idx.size)
        pos = ti > 0
        if np.any(pos):
            part[pos] = qh_segment_lengths(domain, spec, p[idx[pos]], p[idx[pos]] + ti[pos, None] * v[idx[pos]], tol)
        err = part - rest[idx]
        below = err < 0
        lo[idx] = np.where(below, ti, lo[idx])
        hi[idx] = np.where(below, hi[idx], ti)
        d = domain.distance_unchecked(spec, p[idx] + ti[:, None] * v[idx])
        step = ti - err * d / np.where(speed[idx] > 0, speed[idx], 1.0)
        inside = (step >= lo[idx]) & (step <= hi[idx])
        # iterate to rounding level; callers integrate these positions again
        done = np.abs(err) <= 4e-16 * np.maximum(rest[idx], 1.0)
        t[idx] = np.where(done, ti, np.where(inside, step, 0.5 * (lo[idx] + hi[idx])))
        active[idx] = ~done & (hi[idx] - lo[idx] > 4e-16)
    return p + t[:, None] * v, seg


def with_spur(domain, spec, path, extra, direction, tol=DEFAULT_TOL):
    """Append an out-and-back spur of total quasihyperbolic length ``extra`` at the end.

    Used to equalize the quasihyperbolic lengths of two paths without moving
    their endpoints.
    """
    if extra <= 0:
        return path
    u = np.asarray(direction, dtype=float)
    u = u / spec(u)
    end = path.end

    def gap(length):
        q = end + length * u
        if not domain.contains(q):
            return math.inf
        return qh_segment_length(domain, spec, end, q, tol * 1e-2) - extra / 2.0

    # grow the bracket, pulling back if the spur tip leaves the domain; the
    # length diverges at the boundary, so a finite root always exists
    lo, hi = 0.0, 1e-3 * max(1.0, float(domain.boundary_distance(spec, end)))
    while True:
        g = gap(hi)
        if math.isinf(g):
            hi = 0.5 * (lo + hi)
        elif g < 0:
            lo, hi = hi, 2.0 * hi
        else:
            break
    length = brentq(gap, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    tip = end + length * u
    return Polyline(np.vstack([path.vertices, tip, end]), strict=False)


def joint_average_qh_length(domain, spec, path0, path1, s, tol=DEFAULT_TOL):
    """Quasihyperbolic length of ``s*path1 + (1-s)*path0`` for the continuous paths.

    Both paths are run at constant quasihyperbolic speed over ``[0, 1]``, so
    ``D path_i = L_i d(path_i) u_i`` with ``u_i`` the unit direction of the
    current segment. The length integral of the average is evaluated by
    adaptive Simpson between the parameter values where either path turns.
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise InputError("s must lie in [0, 1]")
    paths = (path0, path1)
    lengths, cums, dirs = [], [], []
    for path in paths:
        P, Q = path.segments()
        prof = qh_segment_lengths(domain, spec, P, Q, tol)
        cum = np.concatenate([[0.0], np.cumsum(prof)])
        lengths.append(cum[-1])
        cums.append(cum / cum[-1])
        n = spec(Q - P)
        dirs.append((Q - P) / np.where(n > 0, n, 1.0)[:, None])
    breaks = np.unique(np.concatenate(cums))
    a, b = breaks[:-1], breaks[1:]
    keep = b > a
    a, b = a[keep], b[keep]

    def integrand(owner, t):
        tt = a[owner] + t * (b[owner] - a[owner])
        vel = 0.0
        pos = 0.0
        for w, path, L, cum, U in zip((1.0 - s, s), paths, lengths, cums, dirs):
            pts, _ = qh_position(domain, spec, path, tt * L, tol * 1e-2)
            # segment from the piece, not from the point, so corners are not ambiguous
            seg = np.clip(np.searchsorted(cum, a[owner], side="right") - 1, 0, len(U) - 1)
            d = domain.distance_unchecked(spec, pts)
            vel = vel + w * L * d[:, None] * U[seg]
            pos = pos + w * pts
        return spec(vel) / domain.distance_unchecked(spec, pos) * (b[owner] - a[owner])

    pieces = adaptive_simpson_batch(integrand, len(a), tol / max(1, len(a)))
    return float(np.sum(pieces))
