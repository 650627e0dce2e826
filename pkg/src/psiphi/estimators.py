"""scikit-learn style wrappers around the solvers.

``fit`` runs the iteration from a start point (or start cloud) and stores
the result in trailing-underscore attributes; ``predict`` / ``transform``
reuse the fitted configuration on new inputs.  Parameters are exposed
through ``get_params`` / ``set_params`` so the estimators clone and compose
like any other.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .fractal import (DEFAULT_RESOLUTION, DEFAULT_SET_MAX_ITER, DEFAULT_SET_TOL, CompactSet,
                      apply_coupled_ifs, apply_ifs, attractor_solve, coupled_attractor_solve,
                      hausdorff)
from .solver import (DEFAULT_MAX_ITER, DEFAULT_TOL, coupled_solve, extended_solve,
                     picard_solve)


def _start(X, dim: int) -> np.ndarray:
    arr = check_array(np.atleast_2d(np.asarray(X, dtype=float))).ravel()
    if arr.size != dim:
        raise ValueError(f"expected a start point with {dim} coordinates, got {arr.size}")
    return arr


def _starts(X, dim: int) -> np.ndarray:
    X = check_array(X, ensure_2d=False)
    if X.ndim == 1:
        X = X.reshape(-1, dim)
    if X.shape[1] != dim:
        raise ValueError(f"expected rows with {dim} coordinates, got {X.shape[1]}")
    return X


class _PicardBase(BaseEstimator):
    def _record(self, report):
        self.report_ = report
        self.converged_ = report.converged
        self.n_iter_ = report.iterations
        self.residuals_ = np.asarray(report.residual_trace)
        return self


class PicardSolver(_PicardBase):
    """Fixed point of a self map by Picard iteration.

    Parameters
    ----------
    mapping : SelfMapSpec
    tol, max_iter : stopping rule on successive-iterate distance.
    psi, phi : optional control functions; their hypotheses are checked and
        the verdict lands in ``report_``.
    """

    def __init__(self, mapping=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, psi=None,
                 phi=None, assume_closed_graph=False):
        self.mapping = mapping
        self.tol = tol
        self.max_iter = max_iter
        self.psi = psi
        self.phi = phi
        self.assume_closed_graph = assume_closed_graph

    def _solve(self, x0):
        return picard_solve(self.mapping, x0, self.tol, self.max_iter, self.psi, self.phi,
                            self.assume_closed_graph)

    def fit(self, X, y=None):
        dim = self.mapping.domain.dim
        self._record(self._solve(_start(X, dim)))
        self.fixed_point_ = self.report_.point
        self.n_features_in_ = dim
        return self

    def predict(self, X):
        """Fixed point reached from each row of ``X``."""
        check_is_fitted(self, "fixed_point_")
        X = _starts(X, self.n_features_in_)
        return np.vstack([self._solve(row).point for row in X])


class CoupledPicardSolver(_PicardBase):
    """Coupled fixed point ``(x*, y*)`` of ``T: X x X -> X``.

    ``fit`` takes the start pair stacked as ``[x0, y0]``.
    """

    def __init__(self, mapping=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, psi=None,
                 phi=None, assume_closed_graph=False):
        self.mapping = mapping
        self.tol = tol
        self.max_iter = max_iter
        self.psi = psi
        self.phi = phi
        self.assume_closed_graph = assume_closed_graph

    def _solve(self, z):
        d = self.mapping.left.dim
        return coupled_solve(self.mapping, z[:d], z[d:], self.tol, self.max_iter, self.psi,
                             self.phi, self.assume_closed_graph)

    def fit(self, X, y=None):
        dim = 2 * self.mapping.left.dim
        self._record(self._solve(_start(X, dim)))
        self.fixed_point_ = np.concatenate(self.report_.point)
        self.n_features_in_ = dim
        return self

    def predict(self, X):
        check_is_fitted(self, "fixed_point_")
        X = _starts(X, self.n_features_in_)
        return np.vstack([np.concatenate(self._solve(row).point) for row in X])


class ExtendedPicardSolver(_PicardBase):
    """Extended coupled fixed point of ``(T, S)`` on ``X x Y``.

    ``phi`` may be a single function or ``(phi1, phi2)``.
    """

    def __init__(self, pair=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, psi=None,
                 phi=None, assume_closed_graph=False):
        self.pair = pair
        self.tol = tol
        self.max_iter = max_iter
        self.psi = psi
        self.phi = phi
        self.assume_closed_graph = assume_closed_graph

    def _solve(self, z):
        d = self.pair.space.left.dim
        return extended_solve(self.pair, z[:d], z[d:], self.tol, self.max_iter, self.psi,
                              self.phi, self.assume_closed_graph)

    def fit(self, X, y=None):
        dim = self.pair.space.dim
        self._record(self._solve(_start(X, dim)))
        self.fixed_point_ = np.concatenate(self.report_.point)
        self.n_features_in_ = dim
        return self

    def predict(self, X):
        check_is_fitted(self, "fixed_point_")
        X = _starts(X, self.n_features_in_)
        return np.vstack([np.concatenate(self._solve(row).point) for row in X])


class IFSAttractor(TransformerMixin, BaseEstimator):
    """Attractor of an IFS by iterating the fractal operator.

    ``fit(X)`` starts from the cloud ``X`` (rows are points; the origin when
    omitted).  ``transform`` applies the fractal operator once and
    ``score`` is the negative Hausdorff distance to the fitted attractor.
    """

    def __init__(self, ifs=None, tol=DEFAULT_SET_TOL, max_iter=DEFAULT_SET_MAX_ITER,
                 resolution=DEFAULT_RESOLUTION):
        self.ifs = ifs
        self.tol = tol
        self.max_iter = max_iter
        self.resolution = resolution

    def _cloud(self, X):
        space = self.ifs.space
        return CompactSet(_starts(X, space.dim), space, self.resolution)

    def fit(self, X=None, y=None):
        a0 = None if X is None else self._cloud(X)
        rep = attractor_solve(self.ifs, a0, self.tol, self.max_iter, self.resolution)
        self.report_ = rep
        self.attractor_ = rep.attractor
        self.n_iter_ = rep.iterations
        self.hausdorff_trace_ = np.asarray(rep.hausdorff_trace)
        self.converged_ = rep.converged
        self.n_features_in_ = self.ifs.space.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "attractor_")
        return apply_ifs(self.ifs, self._cloud(X)).points.copy()

    def score(self, X, y=None):
        check_is_fitted(self, "attractor_")
        return -hausdorff(self._cloud(X), self.attractor_)


class CoupledIFSAttractor(TransformerMixin, BaseEstimator):
    """Coupled fractal pair of a coupled IFS.

    Inputs are pair clouds with ``2 * dim`` columns ``[x, y]``.
    """

    def __init__(self, cifs=None, tol=DEFAULT_SET_TOL, max_iter=DEFAULT_SET_MAX_ITER,
                 resolution=DEFAULT_RESOLUTION):
        self.cifs = cifs
        self.tol = tol
        self.max_iter = max_iter
        self.resolution = resolution

    def _cloud(self, X):
        prod = self.cifs.product
        return CompactSet(_starts(X, prod.dim), prod, self.resolution)

    def fit(self, X=None, y=None):
        c0 = None if X is None else self._cloud(X)
        rep = coupled_attractor_solve(self.cifs, c0, self.tol, self.max_iter, self.resolution)
        self.report_ = rep
        self.attractor_ = rep.attractor
        self.pair_cloud_ = rep.pair_cloud
        self.n_iter_ = rep.iterations
        self.hausdorff_trace_ = np.asarray(rep.hausdorff_trace)
        self.converged_ = rep.converged
        self.n_features_in_ = self.cifs.product.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "pair_cloud_")
        return apply_coupled_ifs(self.cifs, self._cloud(X)).points.copy()

    def score(self, X, y=None):
        check_is_fitted(self, "pair_cloud_")
        return -hausdorff(self._cloud(X), self.pair_cloud_)
