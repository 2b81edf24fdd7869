"""scikit-learn style wrappers around the distance solvers.

The estimators hold a domain and norm as hyper-parameters; ``predict`` maps
rows of points to distances. They make the solvers usable inside sklearn
tooling (``get_params``, ``clone``) without changing the functional API.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import InputError, check_points
from .geodesic import DistanceField, SolverParams, qh_distance
from .norms import NormSpec
from .paths import MetricKind, j_distances


class QuasihyperbolicDistance(BaseEstimator):
    """Pairwise distances: each input row is ``[x_1..x_n, y_1..y_n]``.

    ``metric="k"`` returns solver upper bounds, ``metric="j"`` the exact j-metric.
    """

    def __init__(self, domain=None, norm=None, metric="k", params=None):
        self.domain = domain
        self.norm = norm
        self.metric = metric
        self.params = params

    def fit(self, X=None, y=None):
        if self.domain is None:
            raise InputError("a domain is required")
        self.norm_ = self.norm or NormSpec(2.0, self.domain.dim)
        self.metric_ = MetricKind.parse(self.metric)
        self.params_ = self.params or SolverParams()
        self.dim_ = self.domain.dim
        return self

    def _split(self, X):
        X = check_points(X, 2 * self.dim_, "pairs")
        return X[:, : self.dim_], X[:, self.dim_:]

    def predict_bracket(self, X):
        """``(m, 2)`` array of ``[lower, upper]`` per pair."""
        check_is_fitted(self, "dim_")
        A, B = self._split(X)
        out = np.empty((len(A), 2))
        for i, (a, b) in enumerate(zip(A, B)):
            if self.metric_ is MetricKind.DISTANCE_RATIO:
                out[i] = j_distances(self.domain, self.norm_, a, b[None, :])[0]
            else:
                est = qh_distance(self.domain, self.norm_, a, b, self.params_)
                out[i] = est.lower, est.upper
        return out

    def predict(self, X):
        return self.predict_bracket(X)[:, 1]


class QuasihyperbolicField(BaseEstimator):
    """Upper bounds on ``k(center, y)`` from one single-source lattice solve (planar)."""

    def __init__(self, domain=None, norm=None, extent=2.0, params=None):
        self.domain = domain
        self.norm = norm
        self.extent = extent
        self.params = params

    def fit(self, X, y=None):
        """``X`` is the center, as a vector or a single-row array."""
        if self.domain is None:
            raise InputError("a domain is required")
        center = np.asarray(X, dtype=float).reshape(-1)
        if not self.extent > 0 or not math.isfinite(self.extent):
            raise InputError("extent must be positive")
        self.norm_ = self.norm or NormSpec(2.0, self.domain.dim)
        self.field_ = DistanceField(self.domain, self.norm_, center, float(self.extent), self.params or SolverParams())
        return self

    def predict(self, X):
        check_is_fitted(self, "field_")
        return self.field_.upper(check_points(X, self.domain.dim))

    def predict_bracket(self, X):
        check_is_fitted(self, "field_")
        lo, hi = self.field_.bracket(check_points(X, self.domain.dim))
        return np.column_stack([lo, hi])
