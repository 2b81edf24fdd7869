"""Finite-dimensional (weighted) p-norms and sampled estimates of their moduli."""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._optimize import golden_min
from ._validation import InputError


class NormKind(enum.Enum):
    P_NORM = "pnorm"
    WEIGHTED_P_NORM = "weighted"


@dataclass(frozen=True)
class NormSpec:
    """A norm ``||v|| = (sum_i (w_i |v_i|)^p)^(1/p)`` on R^dim, ``p`` in ``[1, inf]``."""

    p: float = 2.0
    dim: int = 2
    weights: tuple = None

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise InputError(f"p must lie in [1, inf], got {self.p}")
        object.__setattr__(self, "p", p)
        if int(self.dim) != self.dim or self.dim < 2:
            raise InputError(f"dim must be an integer >= 2, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != self.dim:
                raise InputError(f"expected {self.dim} weights, got {len(w)}")
            if not all(x > 0 and math.isfinite(x) for x in w):
                raise InputError("weights must be finite and strictly positive")
            object.__setattr__(self, "weights", w)

    @property
    def kind(self):
        return NormKind.P_NORM if self.weights is None else NormKind.WEIGHTED_P_NORM

    def __call__(self, v):
        return norm(self, v)

    def dual(self):
        """The dual norm: exponent ``q`` with ``1/p + 1/q = 1`` and inverted weights."""
        w = None if self.weights is None else tuple(1.0 / x for x in self.weights)
        return NormSpec(dual_exponent(self.p), self.dim, w)

    def label(self):
        p = "inf" if math.isinf(self.p) else f"{self.p:g}"
        return f"l{p}" if self.weights is None else f"l{p}w{list(self.weights)}"


def norm(spec, v):
    """Evaluate ``spec`` on ``v``; arrays are reduced over their last axis."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (spec.dim,):
        raise InputError(f"vector dimension {v.shape[-1:]} does not match norm dimension {spec.dim}")
    if spec.weights is not None:
        v = v * np.asarray(spec.weights)
    if spec.p in (1.0, 2.0, math.inf):
        out = np.linalg.norm(v, ord=spec.p, axis=-1)
    else:
        # scale by the largest coordinate so |v_i|^p cannot underflow or overflow
        m = np.max(np.abs(v), axis=-1)
        safe = np.where(m > 0, m, 1.0)
        out = m * np.sum((np.abs(v) / safe[..., None]) ** spec.p, axis=-1) ** (1.0 / spec.p)
    return float(out) if out.ndim == 0 else out


def dual_exponent(p):
    p = float(p)
    if p < 1:
        raise InputError(f"p must lie in [1, inf], got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def euclidean_convexity_modulus(eps):
    """Closed form ``1 - sqrt(1 - eps^2/4)`` of the Hilbert-space modulus of convexity."""
    eps = np.asarray(eps, dtype=float)
    return 1.0 - np.sqrt(np.clip(1.0 - eps * eps / 4.0, 0.0, None))


def euclidean_smoothness_modulus(tau):
    """Closed form ``sqrt(1 + tau^2) - 1`` of the Hilbert-space modulus of smoothness."""
    tau = np.asarray(tau, dtype=float)
    return np.sqrt(1.0 + tau * tau) - 1.0


@dataclass(frozen=True)
class ModulusEstimate:
    argument: float
    value: float
    samples_used: int


def _sections(spec, rng, restarts):
    """Orthonormal 2-D sections used to reduce a modulus search to the plane."""
    n = spec.dim
    if n == 2:
        return [np.eye(2)]
    bases = []
    for i in range(n):
        for j in range(i + 1, n):
            b = np.zeros((2, n))
            b[0, i] = b[1, j] = 1.0
            bases.append(b)
    for _ in range(restarts):
        q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
        bases.append(q.T)
    return bases


def _sphere(spec, basis, theta):
    theta = np.asarray(theta, dtype=float)
    u = np.cos(theta)[..., None] * basis[0] + np.sin(theta)[..., None] * basis[1]
    return u / np.asarray(norm(spec, u))[..., None]


def _midpoint_depth(spec, basis, theta, eps, n_scan=64, iters=60):
    # For x = S(theta), locate y = S(theta + phi) on both arcs with ||x - y|| = eps
    # (first sign change of the gap on a scan, then bisection), and return the
    # smaller of the two values 1 - ||x + y|| / 2. Vectorized over theta.
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x = _sphere(spec, basis, theta)
    grid = np.linspace(0.0, math.pi, n_scan)
    best = np.full(theta.shape, math.inf)
    for sign in (1.0, -1.0):
        def gap(phi):
            return norm(spec, x - _sphere(spec, basis, theta + sign * phi)) - eps

        vals = np.stack([gap(np.full(theta.shape, g)) for g in grid])
        hit = vals >= 0.0
        # eps = 2 may miss the antipode by rounding; fall back to phi = pi
        k = np.where(hit.any(axis=0), hit.argmax(axis=0), n_scan - 1)
        hi = grid[k]
        lo = grid[np.maximum(k - 1, 0)]
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            up = gap(mid) >= 0.0
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        y = _sphere(spec, basis, theta + sign * hi)
        best = np.minimum(best, 1.0 - norm(spec, x + y) / 2.0)
    return best


def modulus_of_convexity_estimate(spec, eps, budget=720, restarts=8, seed=0):
    """Estimate ``delta(eps) = inf{1 - ||x+y||/2 : ||x|| = ||y|| = 1, ||x-y|| = eps}``.

    The unit sphere of each 2-D section is swept at ``budget`` angles; the pair
    constraint is solved by root-finding along the sphere chart, and the best
    sweep angle is polished by golden-section search. The result is an upper
    bound on the true infimum up to solver tolerance.
    """
    eps = float(eps)
    if not (0.0 < eps <= 2.0):
        raise InputError(f"eps must lie in (0, 2], got {eps}")
    rng = np.random.default_rng(seed)
    best = math.inf
    used = 0
    for basis in _sections(spec, rng, restarts):
        # the sphere is centrally symmetric, so half a turn suffices
        thetas = np.linspace(0.0, math.pi, budget, endpoint=False)
        vals = _midpoint_depth(spec, basis, thetas, eps)
        used += budget
        k = int(np.argmin(vals))
        step = math.pi / budget
        _, refined = golden_min(lambda t: _midpoint_depth(spec, basis, t, eps),
                                thetas[k] - step, thetas[k] + step, tol=1e-10)
        best = min(best, float(vals[k]), float(np.min(refined)))
    return ModulusEstimate(eps, max(0.0, min(1.0, best)), used)


def modulus_of_smoothness_estimate(spec, tau, budget=65536, restarts=8, seed=0):
    """Estimate ``rho(tau) = sup{(||x+y|| + ||x-y||)/2 - 1 : ||x|| = 1, ||y|| = tau}``.

    Dense sweep over pairs of sphere angles followed by Nelder-Mead polishing;
    the result is a lower bound on the true supremum.
    """
    tau = float(tau)
    if not tau > 0.0:
        raise InputError(f"tau must be positive, got {tau}")
    rng = np.random.default_rng(seed)
    m = max(8, int(math.isqrt(int(budget))))
    best = -math.inf
    used = 0
    for basis in _sections(spec, rng, restarts):
        def excess(a, b):
            x = _sphere(spec, basis, a)
            y = tau * _sphere(spec, basis, b)
            return (norm(spec, x + y) + norm(spec, x - y)) / 2.0 - 1.0

        thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        vals = excess(thetas[:, None], thetas[None, :])
        used += m * m
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        res = minimize(lambda z: -excess(z[0], z[1]), [thetas[i], thetas[j]], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        best = max(best, float(vals[i, j]), float(-res.fun))
    return ModulusEstimate(tau, max(0.0, best), used)
