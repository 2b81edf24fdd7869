"""Quasihyperbolic distance brackets via grid shortest paths and polyline refinement.

The upper bound is the quasihyperbolic length of an explicit feasible path
(Dijkstra on a lattice, then local pattern-search refinement); the lower bound
is the distance-ratio metric, which never exceeds the quasihyperbolic distance.
"""

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ._validation import DisconnectedError, InputError, PreconditionError, check_point
from .paths import (
    DEFAULT_TOL,
    MetricKind,
    Polyline,
    j_distance,
    j_distances,
    qh_polyline_length,
    qh_segment_length,
    qh_segment_lengths,
)

_STENCIL_HALF = {
    8: [(1, 0), (0, 1), (1, 1), (1, -1)],
    16: [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)],
}
_BALL_SLACK = 1e-9


@dataclass(frozen=True)
class BallConstraint:
    """Restrict paths to the metric ball ``{y : dist(center, y) <= radius}``.

    Membership is decided by the certified lower bound (the j-metric for k-balls),
    so the admissible region contains the true ball.
    """

    center: tuple
    radius: float
    metric: MetricKind = MetricKind.QUASIHYPERBOLIC

    def admits(self, domain, norm, Y):
        Y = np.atleast_2d(Y)
        return j_distances(domain, norm, np.asarray(self.center, float), Y) <= self.radius + _BALL_SLACK


@dataclass(frozen=True)
class SolverParams:
    grid_spacing: float = 0.05
    grid_margin: float = 2.0
    neighbor_stencil: int = 16
    refine_rounds: int = 200
    refine_step: float = 0.01
    quad_tol: float = 1e-8
    ball_constraint: BallConstraint = None

    def __post_init__(self):
        if not self.grid_spacing > 0:
            raise InputError("grid_spacing must be positive")
        if not self.grid_margin > 0:
            raise InputError("grid_margin must be positive")
        if self.neighbor_stencil not in _STENCIL_HALF:
            raise InputError("neighbor_stencil must be 8 or 16")
        if int(self.refine_rounds) < 0:
            raise InputError("refine_rounds must be non-negative")
        if not self.refine_step > 0:
            raise InputError("refine_step must be positive")
        if not self.quad_tol > 0:
            raise InputError("quad_tol must be positive")

    def scaled(self, factor):
        """Same resolution relative to a configuration scaled by ``factor``."""
        return replace(
            self,
            grid_spacing=self.grid_spacing * factor,
            grid_margin=self.grid_margin * factor,
            refine_step=self.refine_step * factor,
        )


@dataclass(frozen=True)
class DistanceEstimate:
    lower: float
    upper: float
    path: Polyline

    def contains(self, value, tol=0.0):
        return self.lower - tol <= value <= self.upper + tol


def _require_planar(domain):
    if domain.dim != 2:
        raise InputError("the grid solver works in the plane only")


class _Lattice:
    """Feasible lattice nodes ``anchor + h * (i, j)`` inside a box, with weighted edges."""

    def __init__(self, domain, norm, anchor, lo, hi, params):
        h = params.grid_spacing
        self.h = h
        self.anchor = anchor
        i0 = int(math.floor((lo[0] - anchor[0]) / h))
        i1 = int(math.ceil((hi[0] - anchor[0]) / h))
        j0 = int(math.floor((lo[1] - anchor[1]) / h))
        j1 = int(math.ceil((hi[1] - anchor[1]) / h))
        self.shape = (i1 - i0 + 1, j1 - j0 + 1)
        self.offset = (i0, j0)
        I, J = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
        coords = anchor + h * np.stack([I.ravel(), J.ravel()], axis=1)
        feasible = np.asarray(domain.contains(coords))
        idx = np.flatnonzero(feasible)
        d = domain.boundary_distance(norm, coords[idx])
        feasible[idx[d <= h / 4.0]] = False
        if params.ball_constraint is not None:
            idx = np.flatnonzero(feasible)
            feasible[idx[~params.ball_constraint.admits(domain, norm, coords[idx])]] = False
        # the anchor itself is always a node
        self.anchor_flat = (0 - i0) * self.shape[1] + (0 - j0)
        feasible[self.anchor_flat] = True
        self.coords = coords
        self.feasible = feasible

        rows, cols, wts = [], [], []
        grid_feasible = feasible.reshape(self.shape)
        flat = np.arange(coords.shape[0]).reshape(self.shape)
        for di, dj in _STENCIL_HALF[params.neighbor_stencil]:
            i0, i1 = max(0, -di), self.shape[0] - max(0, di)
            j0, j1 = max(0, -dj), self.shape[1] - max(0, dj)
            if i1 <= i0 or j1 <= j0:
                continue
            a = flat[i0:i1, j0:j1]
            b = flat[i0 + di:i1 + di, j0 + dj:j1 + dj]
            fa = grid_feasible.ravel()[a.ravel()]
            fb = grid_feasible.ravel()[b.ravel()]
            keep = fa & fb
            a, b = a.ravel()[keep], b.ravel()[keep]
            if a.size == 0:
                continue
            ok = domain.segment_feasible(norm, coords[a], coords[b])
            a, b = a[ok], b[ok]
            w = qh_segment_lengths(domain, norm, coords[a], coords[b], params.quad_tol, clearance=np.ones(a.size))
            fin = np.isfinite(w)
            rows.append(a[fin])
            cols.append(b[fin])
            wts.append(w[fin])
        self.rows = np.concatenate(rows) if rows else np.zeros(0, int)
        self.cols = np.concatenate(cols) if cols else np.zeros(0, int)
        self.wts = np.concatenate(wts) if wts else np.zeros(0)

    def nearby(self, y, radius_cells=2.5):
        """Feasible lattice nodes within ``radius_cells`` grid steps of ``y``."""
        rel = (np.asarray(y) - self.anchor) / self.h
        r = int(math.ceil(radius_cells))
        ci = int(round(rel[0])) - self.offset[0]
        cj = int(round(rel[1])) - self.offset[1]
        out = []
        for di in range(-r, r + 1):
            for dj in range(-r, r + 1):
                i, j = ci + di, cj + dj
                if 0 <= i < self.shape[0] and 0 <= j < self.shape[1]:
                    k = i * self.shape[1] + j
                    if self.feasible[k] and np.hypot(*(self.coords[k] - y)) / self.h <= radius_cells:
                        out.append(k)
        return np.array(out, dtype=int)

    def attach(self, domain, norm, points, quad_tol, extra_pairs=()):
        """Add ``points`` as extra nodes joined to nearby lattice nodes; return their indices."""
        n = self.coords.shape[0]
        rows, cols, wts = [self.rows], [self.cols], [self.wts]
        new_idx = []
        coords = [self.coords]
        for m, y in enumerate(points):
            k = n + m
            new_idx.append(k)
            coords.append(y[None, :])
            near = self.nearby(y)
            if near.size == 0:
                continue
            P = np.repeat(y[None, :], near.size, axis=0)
            ok = domain.segment_feasible(norm, P, self.coords[near])
            near = near[ok]
            w = qh_segment_lengths(domain, norm, P[: near.size], self.coords[near], quad_tol,
                                   clearance=np.ones(near.size))
            rows.append(np.full(near.size, k))
            cols.append(near)
            wts.append(w)
        all_coords = np.vstack(coords)
        for a, b in extra_pairs:
            if domain.segment_feasible(norm, all_coords[a][None], all_coords[b][None])[0]:
                w = qh_segment_length(domain, norm, all_coords[a], all_coords[b], quad_tol)
                if np.isfinite(w):
                    rows.append(np.array([a]))
                    cols.append(np.array([b]))
                    wts.append(np.array([w]))
        self.coords = all_coords
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)
        self.wts = np.concatenate(wts)
        return new_idx

    def shortest(self, source, target=None):
        n = self.coords.shape[0]
        # zero-weight edges would vanish from a sparse matrix
        w = np.maximum(self.wts, 1e-300)
        graph = coo_matrix((w, (self.rows, self.cols)), shape=(n, n)).tocsr()
        return dijkstra(graph, directed=False, indices=source, return_predecessors=True)


def _trace_back(pred, source, target):
    out = [target]
    while out[-1] != source:
        nxt = pred[out[-1]]
        if nxt < 0:
            raise DisconnectedError("no feasible grid path at this resolution")
        out.append(nxt)
    return out[::-1]


def grid_shortest_path(domain, norm, x, y, params=SolverParams()):
    """Minimal-weight lattice path from ``x`` to ``y``; edge weights are segment qh lengths."""
    _require_planar(domain)
    x = check_point(x, 2, "x")
    y = check_point(y, 2, "y")
    if not (domain.contains(x) and domain.contains(y)):
        raise PreconditionError("endpoints must lie in the domain")
    if np.array_equal(x, y):
        return Polyline.constant(x)
    bc = params.ball_constraint
    if bc is not None and not np.all(bc.admits(domain, norm, np.vstack([x, y]))):
        raise PreconditionError("endpoints violate the ball constraint")
    lo = np.minimum(x, y) - params.grid_margin
    hi = np.maximum(x, y) + params.grid_margin
    lat = _Lattice(domain, norm, x, lo, hi, params)
    src = lat.anchor_flat
    (tgt,) = lat.attach(domain, norm, [y], params.quad_tol)
    # the direct chord is always a candidate edge
    if domain.segment_feasible(norm, x[None], y[None])[0]:
        w = qh_segment_length(domain, norm, x, y, params.quad_tol)
        if np.isfinite(w) and (bc is None or _segment_admitted(domain, norm, bc, x, y)):
            lat.rows = np.append(lat.rows, src)
            lat.cols = np.append(lat.cols, tgt)
            lat.wts = np.append(lat.wts, w)
    dist, pred = lat.shortest(src)
    if not np.isfinite(dist[tgt]):
        raise DisconnectedError("endpoints are disconnected at this grid resolution")
    nodes = _trace_back(pred, src, tgt)
    verts = lat.coords[nodes]
    verts[0], verts[-1] = x, y
    return Polyline(verts, strict=False).deduplicated()


def _segment_admitted(domain, norm, bc, p, q, samples=9):
    t = np.linspace(0.0, 1.0, samples)
    return bool(np.all(bc.admits(domain, norm, p + t[:, None] * (q - p))))


def _directions(dim):
    dirs = [np.array(d, dtype=float) for d in itertools.product((-1, 0, 1), repeat=dim) if any(d)]
    return np.array(dirs)


def _subdivide(V, max_len, norm):
    out = [V[0]]
    for a, b in zip(V[:-1], V[1:]):
        k = max(1, int(math.ceil(norm(b - a) / max_len)))
        for i in range(1, k + 1):
            out.append(a + (b - a) * (i / k))
    return np.array(out)


def refine_polyline(domain, norm, path, params=SolverParams(), history=None):
    """Locally improve a feasible path by pattern search on its interior vertices.

    Each round moves all odd, then all even, interior vertices (they share no
    segment, so the moves are independent) to the best of the ``3^n - 1``
    neighbouring lattice directions at the current step, keeping a move only if
    it lowers the summed quasihyperbolic length of the two adjacent segments.
    A round without improvement halves the step. Segments whose length exceeds
    twice the mean are split at their midpoint. The path length never increases.

    If ``history`` is a list, the path length after each round is appended.
    """
    rounds = int(params.refine_rounds)
    if rounds == 0 or len(path) < 2:
        return path
    V = np.array(path.vertices, dtype=float)
    if np.all(V == V[0]):
        return path
    bc = params.ball_constraint
    V = _subdivide(V, 2.5 * params.grid_spacing, norm)
    tol = params.quad_tol

    def seg_w(P, Q):
        feasible = domain.segment_feasible(norm, P, Q)
        return qh_segment_lengths(domain, norm, P, Q, tol, clearance=feasible.astype(float))

    w = seg_w(V[:-1], V[1:])
    if not np.all(np.isfinite(w)):
        raise PreconditionError("refinement needs a feasible path")
    dirs = _directions(V.shape[1])
    n_dirs = len(dirs)
    step = params.refine_step
    min_step = params.refine_step * 1e-5
    for _ in range(rounds):
        improved = False
        for parity in (1, 2):
            idx = np.arange(parity, len(V) - 1, 2)
            m = idx.size
            if m == 0:
                continue
            old = w[idx - 1] + w[idx]
            cand = (V[idx][None, :, :] + step * dirs[:, None, :]).reshape(n_dirs * m, -1)
            prev = np.tile(V[idx - 1], (n_dirs, 1))
            nxt = np.tile(V[idx + 1], (n_dirs, 1))
            ok = np.asarray(domain.contains(cand))
            if bc is not None and np.any(ok):
                sub = np.flatnonzero(ok)
                ok[sub] = bc.admits(domain, norm, cand[sub])
            wl = np.full(n_dirs * m, math.inf)
            wr = np.full(n_dirs * m, math.inf)
            s = np.flatnonzero(ok)
            if s.size:
                both = seg_w(np.vstack([prev[s], cand[s]]), np.vstack([cand[s], nxt[s]]))
                wl[s], wr[s] = both[: s.size], both[s.size:]
            gain = (np.tile(old, n_dirs) - (wl + wr)).reshape(n_dirs, m)
            best = np.argmax(gain, axis=0)
            best_gain = gain[best, np.arange(m)]
            moved = best_gain > 1e-15 * old
            if np.any(moved):
                improved = True
                flat = best[moved] * m + np.flatnonzero(moved)
                V[idx[moved]] = cand[flat]
                w[idx[moved] - 1] = wl[flat]
                w[idx[moved]] = wr[flat]
        long = np.flatnonzero(w > 2.0 * np.mean(w))
        if long.size:
            mids = 0.5 * (V[long] + V[long + 1])
            V = np.insert(V, long + 1, mids, axis=0)
            w = seg_w(V[:-1], V[1:])
        if history is not None:
            history.append(float(np.sum(w)))
        if not improved:
            step *= 0.5
            if step < min_step:
                break
    return Polyline(V, strict=False).deduplicated()


def qh_distance(domain, norm, x, y, params=SolverParams()):
    """Bracket ``j(x, y) <= k(x, y) <= upper`` with the witnessing path."""
    x = check_point(x, domain.dim, "x")
    y = check_point(y, domain.dim, "y")
    if not (domain.contains(x) and domain.contains(y)):
        raise PreconditionError("endpoints must lie in the domain")
    if np.array_equal(x, y):
        return DistanceEstimate(0.0, 0.0, Polyline.constant(x))
    lower = j_distance(domain, norm, x, y)
    path = grid_shortest_path(domain, norm, x, y, params)
    path = refine_polyline(domain, norm, path, params)
    upper = qh_polyline_length(domain, norm, path, params.quad_tol)
    if lower > upper + params.quad_tol:
        raise AssertionError(f"bracket inverted: j={lower} > upper={upper}")
    return DistanceEstimate(lower, upper, path)


class DistanceField:
    """Single-source lattice distances from ``center``; evaluates upper bounds on k(center, .)."""

    def __init__(self, domain, norm, center, extent, params=SolverParams()):
        _require_planar(domain)
        center = check_point(center, 2, "center")
        if not domain.contains(center):
            raise PreconditionError("center must lie in the domain")
        self.domain = domain
        self.norm = norm
        self.center = center
        self.params = params
        lo = center - extent
        hi = center + extent
        lat = _Lattice(domain, norm, center, lo, hi, params)
        dist, _ = lat.shortest(lat.anchor_flat)
        self.lattice = lat
        self.dist = dist
        self._reachable = np.flatnonzero(np.isfinite(dist))

    def upper(self, Y):
        """Upper bounds on ``k(center, y)`` for each row of ``Y`` (``inf`` outside the domain)."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        out = np.full(Y.shape[0], math.inf)
        inside = np.flatnonzero(self.domain.contains(Y))
        if inside.size == 0:
            return out
        tol = self.params.quad_tol
        # straight chord from the center
        C = np.repeat(self.center[None, :], inside.size, axis=0)
        ok = self.domain.segment_feasible(self.norm, C, Y[inside])
        if np.any(ok):
            out[inside[ok]] = qh_segment_lengths(self.domain, self.norm, C[ok], Y[inside[ok]], tol,
                                                 clearance=np.ones(int(ok.sum())))
        lat = self.lattice
        Yi = Y[inside]
        rel = (Yi - lat.anchor) / lat.h
        base = np.rint(rel).astype(int) - np.array(lat.offset)
        r = 3
        off = np.array([(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1)])
        cells = base[:, None, :] + off[None, :, :]
        valid = (cells[..., 0] >= 0) & (cells[..., 0] < lat.shape[0]) & (cells[..., 1] >= 0) & (cells[..., 1] < lat.shape[1])
        flat = np.where(valid, cells[..., 0] * lat.shape[1] + cells[..., 1], 0)
        n_lat = lat.shape[0] * lat.shape[1]
        reach = np.isfinite(self.dist[:n_lat])
        valid &= reach[flat]
        near = np.linalg.norm(lat.coords[flat] - Yi[:, None, :], axis=-1) <= 2.5 * lat.h
        valid &= near
        qi, ci = np.nonzero(valid)
        if qi.size:
            nodes = flat[qi, ci]
            P, Q = Yi[qi], lat.coords[nodes]
            feas = self.domain.segment_feasible(self.norm, P, Q)
            qi, nodes = qi[feas], nodes[feas]
            if qi.size:
                w = qh_segment_lengths(self.domain, self.norm, P[feas], Q[feas], tol, clearance=np.ones(qi.size))
                cand = self.dist[nodes] + w
                best = np.full(inside.size, math.inf)
                np.minimum.at(best, qi, cand)
                out[inside] = np.minimum(out[inside], best)
        return out

    def bracket(self, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return j_distances(self.domain, self.norm, self.center, Y), self.upper(Y)


DEFAULT_PARAMS = SolverParams()

__all__ = [
    "BallConstraint",
    "DEFAULT_PARAMS",
    "DEFAULT_TOL",
    "DistanceEstimate",
    "DistanceField",
    "SolverParams",
    "grid_shortest_path",
    "qh_distance",
    "refine_polyline",
]
