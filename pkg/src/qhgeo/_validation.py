"""Exceptions and small input-checking helpers shared across the package."""

import math

import numpy as np
from sklearn.utils.validation import check_array


class InputError(ValueError):
    """Malformed or out-of-range input."""


class PreconditionError(ValueError):
    """A point or path violates an operation's precondition (e.g. lies outside the domain)."""


class DisconnectedError(RuntimeError):
    """No feasible grid path joins the endpoints at the requested resolution."""


def check_point(x, dim=None, name="point"):
    """Return ``x`` as a finite 1-D float array, optionally checking its length."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite coordinates")
    if dim is not None and arr.shape[0] != dim:
        raise InputError(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    return arr


def check_points(X, dim=None, name="points"):
    """Return ``X`` as an ``(m, dim)`` float array."""
    try:
        arr = check_array(X, dtype=float, ensure_2d=True, ensure_min_samples=0)
    except ValueError as exc:
        raise InputError(f"{name}: {exc}") from None
    if dim is not None and arr.shape[1] != dim:
        raise InputError(f"{name} have dimension {arr.shape[1]}, expected {dim}")
    return arr


def check_positive(value, name, allow_zero=False):
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not ok or math.isnan(value):
        raise InputError(f"{name} must be {'non-negative' if allow_zero else 'positive'}, got {value}")
    return value
