import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from psiphi import (CoupledIFSAttractor, CoupledPicardSolver, ExtendedPicardSolver,
                    IFSAttractor, PicardSolver)
from psiphi.catalog import S2_MAP, S2_PHI, S2_PSI, example_s4
from psiphi.fractal import CoupledIFS
from psiphi.maps import CoupledMapSpec, ExtendedPairSpec, SelfMapSpec


def test_picard_solver_api():
    est = PicardSolver(SelfMapSpec.affine(1 / 3, 2 / 3), tol=1e-12)
    assert est.get_params()["tol"] == 1e-12
    assert clone(est).get_params()["mapping"](0.3) == est.mapping(0.3)
    with pytest.raises(NotFittedError):
        est.predict([[0.0]])
    est.fit([0.0])
    assert est.converged_ and est.fixed_point_[0] == pytest.approx(1, abs=1e-11)
    assert len(est.residuals_) == est.n_iter_
    assert est.predict([[5.0], [-5.0]]) == pytest.approx(np.ones((2, 1)), abs=1e-11)
    with pytest.raises(ValueError):
        est.fit([0.0, 1.0])


def test_coupled_solver_api():
    est = CoupledPicardSolver(S2_MAP, tol=1e-12, psi=S2_PSI, phi=S2_PHI).fit([1.0, 0.25])
    assert est.converged_ and est.report_.conditions_verified
    assert np.all(est.fixed_point_ < 1e-12)
    assert est.predict([[0.5, 0.125]]).shape == (1, 2)


def test_extended_solver_api():
    pair = ExtendedPairSpec(CoupledMapSpec.bilinear_affine(0, 1 / 3, 2 / 3),
                            CoupledMapSpec.bilinear_affine(1 / 3, 0, 2 / 3))
    est = ExtendedPicardSolver(pair).set_params(tol=1e-12).fit([0.0, 0.0])
    assert est.fixed_point_ == pytest.approx([1, 1], abs=1e-11)


def test_ifs_attractor_api():
    est = IFSAttractor(example_s4()).fit([[0.0]])
    assert est.converged_ and est.n_features_in_ == 1
    grid = np.arange(1001)[:, None] * 1e-3
    assert -est.score(grid) < 5e-3
    out = est.transform([[0.0]])
    assert out.ravel() == pytest.approx([0, 2 / 3], abs=1e-3)
    assert IFSAttractor(example_s4()).fit().attractor_ == est.attractor_


def test_coupled_ifs_attractor_api():
    cifs = CoupledIFS([CoupledMapSpec.bilinear_affine(0.25, 0.25)])
    est = CoupledIFSAttractor(cifs).fit([[1.0, 1.0]])
    assert est.converged_ and est.pair_cloud_.points.shape[1] == 2
    assert est.transform([[1.0, 1.0]]).tolist() == [[0.5, 0.5]]
    assert clone(est).get_params()["resolution"] == 1e-3
