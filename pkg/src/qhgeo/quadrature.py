"""Adaptive Simpson quadrature and fixed-order Gauss-Legendre rules."""

import numpy as np

from ._validation import InputError


def adaptive_simpson(f, a, b, tol=1e-8, max_depth=50):
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson bisection.

    ``f`` must accept a 1-D array of abscissae. Intervals are refined
    breadth-first, all active intervals of one level in a single call to
    ``f``; an interval is accepted when the Richardson error estimate
    ``|S_left + S_right - S| / 15`` is within its share of ``tol``.
    The accepted pieces are summed in left-to-right order.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    m = 0.5 * (a + b)
    fa, fm, fb = f(np.array([a, m, b]))
    lo = np.array([a])
    hi = np.array([b])
    flo, fmid, fhi = np.array([fa]), np.array([fm]), np.array([fb])
    whole = (b - a) / 6.0 * (flo + 4.0 * fmid + fhi)
    eps = np.array([tol])
    pieces_pos = []
    pieces_val = []
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        lq = 0.5 * (lo + mid)
        rq = 0.5 * (mid + hi)
        vals = f(np.concatenate([lq, rq]))
        flq, frq = vals[: lo.size], vals[lo.size:]
        h = (hi - lo) / 12.0
        left = h * (flo + 4.0 * flq + fmid)
        right = h * (fmid + 4.0 * frq + fhi)
        delta = left + right - whole
        done = (np.abs(delta) <= 15.0 * eps) | (depth == max_depth) | ~np.isfinite(delta)
        if np.any(done):
            pieces_pos.append(lo[done])
            pieces_val.append((left + right + delta / 15.0)[done])
        keep = ~done
        if not np.any(keep):
            break
        lo2 = np.concatenate([lo[keep], mid[keep]])
        hi2 = np.concatenate([mid[keep], hi[keep]])
        flo2 = np.concatenate([flo[keep], fmid[keep]])
        fmid2 = np.concatenate([flq[keep], frq[keep]])
        fhi2 = np.concatenate([fmid[keep], fhi[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps[keep], eps[keep]]) / 2.0
        lo, hi, flo, fmid, fhi = lo2, hi2, flo2, fmid2, fhi2
    pos = np.concatenate(pieces_pos)
    val = np.concatenate(pieces_val)
    # fixed summation order for reproducibility
    return float(np.sum(val[np.argsort(pos, kind="stable")]))


def adaptive_simpson_batch(f, count, tol=1e-8, max_depth=50):
    """Integrate ``count`` functions over ``[0, 1]`` at once by adaptive Simpson.

    ``f(owner, t)`` evaluates function ``owner[i]`` at ``t[i]``. The acceptance
    rule matches :func:`adaptive_simpson`, with ``tol`` applying to each
    function separately. Returns an array of ``count`` integrals, each summed
    over its accepted pieces in left-to-right order.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    count = int(count)
    if count == 0:
        return np.zeros(0)
    owner = np.arange(count)
    lo = np.zeros(count)
    hi = np.ones(count)
    flo = f(owner, lo)
    fmid = f(owner, np.full(count, 0.5))
    fhi = f(owner, hi)
    whole = (flo + 4.0 * fmid + fhi) / 6.0
    eps = np.full(count, float(tol))
    acc_owner, acc_pos, acc_val = [], [], []
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        vals = f(np.concatenate([owner, owner]), np.concatenate([0.5 * (lo + mid), 0.5 * (mid + hi)]))
        flq, frq = vals[: lo.size], vals[lo.size:]
        h = (hi - lo) / 12.0
        left = h * (flo + 4.0 * flq + fmid)
        right = h * (fmid + 4.0 * frq + fhi)
        delta = left + right - whole
        done = (np.abs(delta) <= 15.0 * eps) | (depth == max_depth) | ~np.isfinite(delta)
        acc_owner.append(owner[done])
        acc_pos.append(lo[done])
        acc_val.append((left + right + delta / 15.0)[done])
        keep = ~done
        if not np.any(keep):
            break
        owner = np.concatenate([owner[keep], owner[keep]])
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
        flo, fmid, fhi = (
            np.concatenate([flo[keep], fmid[keep]]),
            np.concatenate([flq[keep], frq[keep]]),
            np.concatenate([fmid[keep], fhi[keep]]),
        )
        whole = np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps[keep], eps[keep]]) / 2.0
    own = np.concatenate(acc_owner)
    pos = np.concatenate(acc_pos)
    val = np.concatenate(acc_val)
    order = np.lexsort((pos, own))
    # bincount accumulates sequentially in index order, so the sum order is fixed
    return np.bincount(own[order], weights=val[order], minlength=count)


_GL_CACHE = {}


def gauss_legendre(n):
    """Nodes and weights of the ``n``-point rule on ``[0, 1]``."""
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]
