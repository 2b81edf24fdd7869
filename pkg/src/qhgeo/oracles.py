"""Closed-form reference values used to check the numerical solvers."""

import math

import numpy as np


def punctured_plane_qh_distance(x, y, puncture=(0.0, 0.0)):
    """Quasihyperbolic distance in the once-punctured Euclidean plane.

    In log-polar coordinates ``(log r, theta)`` the metric ``|dz| / |z|`` is
    Euclidean, and the punctured plane unrolls onto a cylinder. Geodesics are
    the images of straight lines whose angular extent is at most ``pi``, so
    ``k = sqrt(theta^2 + log^2(r1 / r2))`` with ``theta`` the angle between
    ``x`` and ``y`` seen from the puncture (in ``[0, pi]``).
    """
    z = np.asarray(puncture, dtype=float)
    u = np.asarray(x, dtype=float) - z
    v = np.asarray(y, dtype=float) - z
    r1 = math.hypot(*u)
    r2 = math.hypot(*v)
    theta = abs(math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1]))
    return math.hypot(theta, math.log(r1 / r2))


def half_plane_vertical_qh_distance(y1, y2):
    """k between ``(t, -y1)`` and ``(t, -y2)`` in ``{y < 0}``: ``|log(y2 / y1)|`` for any p-norm."""
    return abs(math.log(y2 / y1))
