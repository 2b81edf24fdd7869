"""Proper subdomains of R^n and their boundary distance under a norm.

Every domain exposes the same small surface:

* ``contains(x)`` -- strict membership, vectorized over rows;
* ``boundary_distance(norm, x)`` -- ``d(x) = dist(x, complement)``;
* ``segment_clearance(norm, p, q)`` -- the minimum of ``d`` along ``[p, q]``
  (zero when the segment leaves the domain), vectorized over segment arrays.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ._optimize import golden_min
from ._validation import InputError, PreconditionError, check_point
from .norms import NormSpec

_TOUCH = 1e-12
_EUCLIDEAN = NormSpec(2.0)


@dataclass(frozen=True)
class ClearanceResult:
    min_distance: float
    argmin_parameter: float


def _rows(x, dim):
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (dim,):
        raise InputError(f"point dimension {arr.shape[-1:]} does not match domain dimension {dim}")
    return arr


def _point_segment_distance(norm, x, p, q, tol=1e-12):
    """Norm distance from points ``x`` to segments ``[p, q]`` (broadcast over rows).

    ``t -> ||p + t(q - p) - x||`` is convex, so golden-section search is exact
    up to ``tol`` in the parameter.
    """
    x, p, q = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, p, q)))
    v = q - p
    lead = x.shape[:-1]
    if getattr(norm, "p", None) == 2.0 and getattr(norm, "weights", 0) is None:
        vv = np.sum(v * v, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(vv > 0, np.sum((x - p) * v, axis=-1) / vv, 0.0)
        t = np.clip(t, 0.0, 1.0)
        return np.asarray(norm(p + t[..., None] * v - x)), np.asarray(t)

    t = np.zeros(lead)
    aligned = np.sum(v != 0.0, axis=-1) <= 1
    if hasattr(norm, "p"):
        # p-norms are monotone in each |coordinate|, so the nearest point of an
        # axis-parallel segment is the clamped coordinate
        axis = np.argmax(v != 0.0, axis=-1)[..., None]
        va = np.take_along_axis(v, axis, -1)[..., 0]
        ra = np.take_along_axis(x - p, axis, -1)[..., 0]
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(aligned & (va != 0.0), np.clip(ra / va, 0.0, 1.0), 0.0)
    else:
        aligned = np.zeros(lead, dtype=bool)
    rest = ~aligned
    if np.any(rest):
        xr, pr, vr = x[rest], p[rest], v[rest]
        tr, _ = golden_min(lambda s: norm(pr + s[..., None] * vr - xr), np.zeros(len(xr)), np.ones(len(xr)), tol=tol)
        t = np.array(t)
        t[rest] = tr
    return np.asarray(norm(p + t[..., None] * v - x)), np.asarray(t)


class Domain:
    """Base class; subclasses implement ``contains`` and ``boundary_distance``."""

    dim = 2
    convex = False

    def contains(self, x):
        raise NotImplementedError

    def boundary_distance(self, norm, x):
        """``d(x)``; every row of ``x`` must lie in the domain."""
        x = _rows(x, self.dim)
        self._check_inside(x)
        return self.distance_unchecked(norm, x)

    def distance_unchecked(self, norm, x):
        raise NotImplementedError

    def segment_clearance(self, norm, p, q):
        raise NotImplementedError

    def segment_feasible(self, norm, p, q):
        """Boolean mask of segments with positive clearance.

        Every point of ``[p, q]`` lies within ``||q - p|| / 2`` of an endpoint,
        so ``min(d(p), d(q)) > ||q - p|| / 2`` certifies feasibility without
        the exact clearance; only the remaining segments are resolved exactly.
        Endpoints within the touch tolerance of the boundary never pass the shortcut.
        """
        single = np.ndim(p) == 1 and np.ndim(q) == 1
        p = np.atleast_2d(np.asarray(p, dtype=float))
        q = np.atleast_2d(np.asarray(q, dtype=float))
        if single:
            return bool(self.segment_feasible(norm, p, q)[0])
        ok = np.asarray(self.contains(p) & self.contains(q))
        out = np.zeros(p.shape[:-1], dtype=bool)
        if not np.any(ok):
            return out
        idx = np.flatnonzero(ok)
        dp = self.distance_unchecked(norm, p[idx])
        dq = self.distance_unchecked(norm, q[idx])
        near = np.minimum(dp, dq)
        sure = (near > 0.5 * norm(q[idx] - p[idx])) & (near > _TOUCH)
        out[idx[sure]] = True
        rest = idx[~sure]
        if rest.size:
            val, _ = self.segment_clearance(norm, p[rest], q[rest])
            out[rest] = val > 0.0
        return out

    def _check_inside(self, x):
        inside = np.asarray(self.contains(x))
        if not np.all(inside):
            raise PreconditionError(f"point(s) outside the domain: {np.asarray(x)[~inside] if inside.ndim else x}")


class PuncturedSpace(Domain):
    """R^n with finitely many points removed."""

    def __init__(self, punctures):
        pts = np.atleast_2d(np.asarray(punctures, dtype=float))
        if pts.size == 0:
            raise InputError("a punctured space needs at least one puncture")
        if pts.shape[1] < 2:
            raise InputError("dimension must be at least 2")
        if len({tuple(r) for r in pts}) != len(pts):
            raise InputError("punctures must be pairwise distinct")
        self.punctures = pts
        self.dim = pts.shape[1]
        self.convex = False

    def __repr__(self):
        return f"PuncturedSpace({self.punctures.tolist()})"

    def contains(self, x):
        x = _rows(x, self.dim)
        hit = np.all(x[..., None, :] == self.punctures, axis=-1).any(axis=-1)
        return ~hit

    def distance_unchecked(self, norm, x):
        return np.min(norm(x[..., None, :] - self.punctures), axis=-1)

    def segment_clearance(self, norm, p, q):
        p = _rows(p, self.dim)
        q = _rows(q, self.dim)
        best = None
        best_t = None
        for z in self.punctures:
            val, t = _point_segment_distance(norm, z, p, q)
            if best is None:
                best, best_t = val, t
            else:
                better = val < best
                best = np.where(better, val, best)
                best_t = np.where(better, t, best_t)
        best = np.where(best <= _TOUCH, 0.0, best)
        return best, best_t


class ConvexPolytope(Domain):
    """``{x : a_i . x + b_i < 0 for all i}`` with nonempty interior."""

    convex = True

    def __init__(self, halfspaces):
        if len(halfspaces) == 0:
            raise InputError("a polytope needs at least one half-space")
        A = np.array([np.asarray(a, dtype=float) for a, _ in halfspaces])
        b = np.array([float(b) for _, b in halfspaces])
        if A.ndim != 2 or A.shape[1] < 2:
            raise InputError("half-space normals must be vectors of dimension >= 2")
        if np.any(np.all(A == 0.0, axis=1)):
            raise InputError("half-space normal must be nonzero")
        self.A = A
        self.b = b
        self.dim = A.shape[1]
        self._dual_scales = {}
        self.interior_point = self._chebyshev_center()

    def _chebyshev_center(self):
        # maximize s subject to a_i.x + b_i + s*|a_i| <= 0, s <= 1
        n = self.dim
        rownorm = np.linalg.norm(self.A, axis=1)
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A_ub = np.hstack([self.A, rownorm[:, None]])
        res = linprog(c, A_ub=A_ub, b_ub=-self.b, bounds=[(None, None)] * n + [(None, 1.0)], method="highs")
        if res.status != 0 or res.x[-1] <= 1e-12:
            raise InputError("polytope has empty interior")
        return res.x[:n]

    def __repr__(self):
        return f"ConvexPolytope({[(a.tolist(), float(b)) for a, b in zip(self.A, self.b)]})"

    def _signed(self, x):
        return x @ self.A.T + self.b

    def contains(self, x):
        x = _rows(x, self.dim)
        return np.all(self._signed(x) < 0.0, axis=-1)

    def _face_distances(self, norm, x):
        scale = self._dual_scales.get(norm)
        if scale is None:
            dual = norm.dual()
            scale = self._dual_scales[norm] = np.array([dual(a) for a in self.A])
        return -self._signed(x) / scale

    def distance_unchecked(self, norm, x):
        return np.min(self._face_distances(norm, x), axis=-1)

    def segment_clearance(self, norm, p, q):
        # d is a minimum of affine functions along the segment: the minimum
        # sits at an endpoint for every face.
        p = _rows(p, self.dim)
        q = _rows(q, self.dim)
        dp = self.distance_unchecked(norm, p)
        dq = self.distance_unchecked(norm, q)
        t = np.where(dq < dp, 1.0, 0.0)
        m = np.minimum(dp, dq)
        return np.where(m <= _TOUCH, 0.0, m), t


    def inverse_distance_integral(self, norm, p, q):
        """Exact ``int_0^1 dt / d(p + t (q - p))`` for each segment.

        Along a segment every face distance is affine, so ``d`` is their lower
        envelope. The segment is split where two faces trade places and each
        piece integrates in closed form as a logarithm.
        """
        p = np.atleast_2d(_rows(p, self.dim))
        q = np.atleast_2d(_rows(q, self.dim))
        a = self._face_distances(norm, p)
        slope = self._face_distances(norm, q) - a
        i, j = np.triu_indices(a.shape[1], 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = (a[:, j] - a[:, i]) / (slope[:, i] - slope[:, j])
        cross = np.where((cross > 0.0) & (cross < 1.0), cross, 1.0)
        T = np.sort(np.hstack([np.zeros((len(a), 1)), cross, np.ones((len(a), 1))]), axis=1)
        t0, t1 = T[:, :-1], T[:, 1:]
        mid = 0.5 * (t0 + t1)
        env = a[:, None, :] + mid[..., None] * slope[:, None, :]
        face = np.argmin(env, axis=-1)
        alpha = np.take_along_axis(a, face, axis=1)
        beta = np.take_along_axis(slope, face, axis=1)
        d0 = alpha + beta * t0
        x = beta * (t1 - t0) / d0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(np.abs(x) < 1e-12, 1.0 - x / 2.0, np.log1p(x) / x)
        return np.sum((t1 - t0) / d0 * ratio, axis=1)


class HalfSpace(ConvexPolytope):
    """``{x : a . x + b < 0}``."""

    def __init__(self, normal, offset=0.0):
        a = check_point(normal, name="normal")
        if not np.any(a != 0.0):
            raise InputError("half-space normal must be nonzero")
        super().__init__([(a, float(offset))])

    @property
    def normal(self):
        return self.A[0]

    @property
    def offset(self):
        return float(self.b[0])

    def __repr__(self):
        return f"HalfSpace({self.normal.tolist()}, {self.offset})"


class Polygon(Domain):
    """Interior of a simple polygon in the plane (possibly non-convex).

    ``d(x)`` is the minimum norm distance to the boundary edges; a segment has
    zero clearance when it crosses or touches an edge.
    """

    def __init__(self, vertices, convex=False):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InputError("polygon needs at least three planar vertices")
        self.vertices = v
        self.edges = np.stack([v, np.roll(v, -1, axis=0)], axis=1)
        self.dim = 2
        self.convex = convex

    def __repr__(self):
        return f"Polygon({self.vertices.tolist()})"

    def _inside_raw(self, x):
        # even-odd ray casting along +x
        px, py = x[..., 0:1], x[..., 1:2]
        a, b = self.edges[:, 0], self.edges[:, 1]
        cond = (a[:, 1] > py) != (b[:, 1] > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a[:, 0] + (py - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
        crossings = np.sum(cond & (px < xint), axis=-1)
        return crossings % 2 == 1

    def _edge_distance(self, norm, x):
        x = np.asarray(x, dtype=float)
        out = None
        for a, b in self.edges:
            val, _ = _point_segment_distance(norm, x, a, b)
            out = val if out is None else np.minimum(out, val)
        return out

    def contains(self, x):
        x = _rows(x, self.dim)
        inside = self._inside_raw(x)
        return inside & (self._edge_distance(_EUCLIDEAN, x) > 0.0)

    def distance_unchecked(self, norm, x):
        return self._edge_distance(norm, x)

    def segment_clearance(self, norm, p, q):
        p = _rows(p, self.dim)
        q = _rows(q, self.dim)
        inside = self._inside_raw(p) & self._inside_raw(q)
        crossed = np.zeros(p.shape[:-1], dtype=bool)
        best = np.full(p.shape[:-1], np.inf)
        best_t = np.zeros(p.shape[:-1])
        for a, b in self.edges:
            crossed |= _segments_intersect(p, q, a, b)
            # disjoint planar segments attain their distance at an endpoint
            for val, t in (
                _point_segment_distance(norm, a, p, q),
                _point_segment_distance(norm, b, p, q),
            ):
                better = val < best
                best = np.where(better, val, best)
                best_t = np.where(better, t, best_t)
            for val, t in (
                (self._endpoint(norm, p, a, b), 0.0),
                (self._endpoint(norm, q, a, b), 1.0),
            ):
                better = val < best
                best = np.where(better, val, best)
                best_t = np.where(better, t, best_t)
        bad = crossed | ~inside | (best <= _TOUCH)
        return np.where(bad, 0.0, best), best_t

    @staticmethod
    def _endpoint(norm, x, a, b):
        val, _ = _point_segment_distance(norm, x, a, b)
        return val


def _segments_intersect(p, q, a, b):
    def cross(o, u, v):
        return (u[..., 0] - o[..., 0]) * (v[..., 1] - o[..., 1]) - (u[..., 1] - o[..., 1]) * (v[..., 0] - o[..., 0])

    a = np.broadcast_to(a, p.shape)
    b = np.broadcast_to(b, p.shape)
    d1 = cross(a, b, p)
    d2 = cross(a, b, q)
    d3 = cross(p, q, a)
    d4 = cross(p, q, b)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    def on_seg(o, u, v, d):
        lo = np.minimum(o, u) - 1e-15
        hi = np.maximum(o, u) + 1e-15
        return (d == 0) & np.all((v >= lo) & (v <= hi), axis=-1)

    touch = on_seg(a, b, p, d1) | on_seg(a, b, q, d2) | on_seg(p, q, a, d3) | on_seg(p, q, b, d4)
    return proper | touch


def rectangle_union(rects):
    """Polygon of the L-shaped union of two axis-aligned rectangles sharing a corner block.

    ``rects`` is ``[(x0, y0, x1, y1), (x0, y0, x1, y1)]`` with both rectangles
    containing the origin block ``[x0, min x1] x [y0, min y1]``.
    """
    (ax0, ay0, ax1, ay1), (bx0, by0, bx1, by1) = rects
    if not (ax0 == bx0 and ay0 == by0):
        raise InputError("rectangles must share their lower-left corner")
    if not (ax1 > bx1 and by1 > ay1):
        raise InputError("expected a wide-short and a narrow-tall rectangle")
    verts = [(ax0, ay0), (ax1, ay0), (ax1, ay1), (bx1, ay1), (bx1, by1), (bx0, by1)]
    return Polygon(verts)


# functional surface


def contains(domain, x):
    x = np.asarray(x, dtype=float)
    out = domain.contains(x)
    return bool(out) if np.ndim(out) == 0 else out


def boundary_distance(domain, norm, x):
    out = domain.boundary_distance(norm, np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def min_boundary_distance_on_segment(domain, norm, p, q):
    p = check_point(p, domain.dim, "p")
    q = check_point(q, domain.dim, "q")
    if not (domain.contains(p) and domain.contains(q)):
        raise PreconditionError("segment endpoints must lie in the domain")
    val, t = domain.segment_clearance(norm, p, q)
    return ClearanceResult(float(val), float(t))


def segment_is_feasible(domain, norm, p, q):
    val, _ = domain.segment_clearance(norm, np.asarray(p, float), np.asarray(q, float))
    return val > 0.0


__all__ = [
    "ClearanceResult",
    "ConvexPolytope",
    "Domain",
    "HalfSpace",
    "Polygon",
    "PuncturedSpace",
    "boundary_distance",
    "contains",
    "min_boundary_distance_on_segment",
    "rectangle_union",
    "segment_is_feasible",
]
