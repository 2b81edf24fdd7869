import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, lo, hi, tol=1e-12, max_iter=200):
    """Vectorized golden-section search for a unimodal ``f`` on ``[lo, hi]``.

    ``lo`` and ``hi`` may be arrays; ``f`` must map an array of abscissae of the
    same shape to function values. Returns ``(argmin, min)``. The endpoints are
    compared against the interior minimizer so monotone functions are handled.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    a, b = lo.copy(), hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc < fd
        # left: keep [a, d] and reuse c as the new d; otherwise keep [c, b] and reuse d as c
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        probe = np.where(left, b - _INVPHI * (b - a), a + _INVPHI * (b - a))
        fp = f(probe)
        c, d, fc, fd = (
            np.where(left, probe, d),
            np.where(left, c, probe),
            np.where(left, fp, fd),
            np.where(left, fc, fp),
        )
    t = 0.5 * (a + b)
    ft = f(t)
    f_lo, f_hi = f(lo), f(hi)
    best_t = np.where(f_lo < ft, lo, t)
    best_f = np.minimum(f_lo, ft)
    best_t = np.where(f_hi < best_f, hi, best_t)
    best_f = np.minimum(f_hi, best_f)
    return best_t, best_f
