import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ibpdca.datasets import gen_matrix_instance, gen_tensor_instance
from ibpdca.estimators import MatrixCompleter, TensorCompleter
from ibpdca.exceptions import ParameterError, ShapeMismatchError
from ibpdca.metrics import rse


@pytest.fixture(scope="module")
def matrix_instance():
    return gen_matrix_instance(30, 30, 3, 0.6, 1)


def _with_nans(inst):
    return np.where(inst.mask.observed, inst.X_true, np.nan)


def test_params_roundtrip():
    est = MatrixCompleter(lam=0.7, solver="bpdca")
    assert est.get_params()["lam"] == 0.7
    c = clone(est)
    assert c.get_params() == est.get_params()
    est.set_params(max_iter=10)
    assert est.max_iter == 10
    assert TensorCompleter().max_iter == 3000


@pytest.mark.parametrize("solver", ["ibpdca", "bpdca", "admm-dca"])
def test_fit_with_nans(matrix_instance, solver):
    est = MatrixCompleter(solver=solver).fit(_with_nans(matrix_instance))
    assert est.converged_ and est.n_iter_ == est.trace_.n_iter
    assert est.rank_ == 3
    assert rse(est.completion_, matrix_instance.X_true) < 0.05
    assert est.mask_ == matrix_instance.mask


def test_explicit_mask_equals_nan_form(matrix_instance):
    a = MatrixCompleter().fit_transform(_with_nans(matrix_instance))
    b = MatrixCompleter().fit_transform(matrix_instance.X_true, mask=matrix_instance.mask)
    np.testing.assert_array_equal(a, b)


def test_transform_warm_start_and_shape(matrix_instance):
    est = MatrixCompleter().fit(_with_nans(matrix_instance))
    out = est.transform(_with_nans(matrix_instance))
    assert rse(out, est.completion_) < 1e-3
    with pytest.raises(ShapeMismatchError):
        est.transform(np.ones((3, 3)))


def test_unfitted_transform():
    with pytest.raises(NotFittedError):
        MatrixCompleter().transform(np.ones((2, 2)))


def test_bad_solver_and_inputs():
    with pytest.raises(ParameterError):
        MatrixCompleter(solver="sgd").fit(np.ones((2, 2)))
    with pytest.raises(ShapeMismatchError):
        MatrixCompleter().fit(np.ones((2, 2, 2)))
    with pytest.raises(ParameterError):
        MatrixCompleter().fit(np.full((2, 2), np.nan), mask=np.ones((2, 2), bool))


def test_tensor_completer():
    inst = gen_tensor_instance(12, 12, 4, 2, 0.6, 0)
    est = TensorCompleter().fit(np.where(inst.mask.observed, inst.X_true, np.nan))
    assert est.converged_
    assert est.rank_ <= 4
    assert rse(est.completion_, inst.X_true) < 0.05
