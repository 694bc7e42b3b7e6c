"""scikit-learn style wrapper around the circumcenter solvers."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .backward import BackwardProblem, backward_circumcenter, backward_pseudo_circumcenter
from .bregman import bregman_distance
from .forward import ForwardProblem, forward_circumcenter, forward_pseudo_circumcenter
from .legendre import get_function
from .linalg import Kind

_SIDES = ("backward", "forward")


class BregmanCircumcenter(TransformerMixin, BaseEstimator):
    """Circumcenter of the rows of X under a Bregman distance.

    Parameters
    ----------
    function : str
        Catalog name, e.g. "negative_entropy".
    side : {"backward", "forward"}
        Backward centers c satisfy D_f(c, x_i) = r; forward centers satisfy
        D_f(x_i, c) = r.
    pseudo : bool
        Use the pseudo-circumcenter (gradient-space affine hull for the
        backward side, ∇f* of the dual solution for the forward side).
    seed : int
        Seed for the forward Newton restarts.

    Attributes
    ----------
    solution_ : SolutionSet
    center_ : ndarray or None
        None when the set is empty or a flat.
    radius_ : float
        Common distance to the fitted points (nan without a center).
    status_ : str
        "UniquePoint", "Empty" or "Flat".
    """

    def __init__(self, function="energy", side="backward", pseudo=False, seed=0):
        self.function = function
        self.side = side
        self.pseudo = pseudo
        self.seed = seed

    def _distances(self, X, center):
        fn = self.fn_
        if self.side == "backward":
            return np.array([bregman_distance(fn, center, x) for x in X])
        return np.array([bregman_distance(fn, x, center) for x in X])

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=1)
        if self.side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}, got {self.side!r}")
        self.fn_ = get_function(self.function)
        self.n_features_in_ = X.shape[1]
        if self.side == "backward":
            pb = BackwardProblem.build(self.fn_, X)
            solver = backward_pseudo_circumcenter if self.pseudo else backward_circumcenter
            sol = solver(pb)
        else:
            fp = ForwardProblem.build(self.fn_, X)
            if self.pseudo:
                sol = forward_pseudo_circumcenter(fp)
            else:
                sol = forward_circumcenter(fp, seed=self.seed)
        self.solution_ = sol
        self.status_ = sol.kind.value
        self.center_ = sol.point if sol.kind is Kind.UNIQUE else None
        if self.center_ is None:
            self.radius_ = np.nan
        else:
            self.radius_ = float(self._distances(X[:1], self.center_)[0])
        return self

    def _validated(self, X):
        check_is_fitted(self, "solution_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, the estimator was fitted with {self.n_features_in_}"
            )
        if self.center_ is None:
            raise ValueError(f"no circumcenter for the fitted set (status {self.status_})")
        return X

    def transform(self, X):
        """Bregman distance between each row and the center, as a column."""
        X = self._validated(X)
        return self._distances(X, self.center_).reshape(-1, 1)

    def predict(self, X):
        """True for rows inside the circumscribed Bregman ball."""
        X = self._validated(X)
        d = self._distances(X, self.center_)
        return d <= self.radius_ * (1 + 1e-9) + 1e-12
