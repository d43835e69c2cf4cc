import numpy as np
import pytest
from scipy.optimize import minimize

from ibpdca.admm_dca import AdmmConfig, admm_dca_run, admm_subproblem, dca_subgradient_g
from ibpdca.exceptions import ParameterError
from ibpdca.problems import MatrixCompletionProblem, TensorCompletionProblem

from oracles import nuclear_plus_quadratic_oracle


def test_subgradient_at_origin_is_zero():
    np.testing.assert_array_equal(dca_subgradient_g(np.zeros((2, 3)), 0.5), np.zeros((2, 3)))


def test_subgradient_example():
    np.testing.assert_allclose(dca_subgradient_g(np.array([3.0, 4.0]), 0.5), [0.3, 0.4],
                               atol=1e-15)


def test_subgradient_norm_is_lam(rng):
    for _ in range(50):
        x = rng.standard_normal((3, 4)) * 10 ** rng.uniform(-5, 5)
        assert np.linalg.norm(dca_subgradient_g(x, 0.7)) == pytest.approx(0.7, rel=1e-12)


@pytest.mark.parametrize("kw", [dict(penalty_base=1.0), dict(inner_tol=0), dict(inner_max=0)])
def test_config_rejects(kw):
    with pytest.raises(ParameterError):
        AdmmConfig(**kw)


def test_y_update_matches_brute_force_2x2(rng):
    # one inner step from Y = Z = 0: check the Y-update against a direct minimizer of
    # 1/2||P(Y - M)||^2 + rho/2 ||X - Y + Z||^2
    M = rng.standard_normal((2, 2))
    obs = np.array([[True, False], [True, True]])
    p = MatrixCompletionProblem(M, obs, lam=0.0)
    cfg = AdmmConfig(penalty_base=1.1, inner_max=1)
    xi = rng.standard_normal((2, 2))
    X, _, res = admm_subproblem(p, xi, np.zeros((2, 2)), cfg)
    rho = 1.1
    np.testing.assert_allclose(X, xi / rho, atol=1e-14)      # lam = 0: prox is identity

    def obj(y):
        Y = y.reshape(2, 2)
        return 0.5 * np.sum((obs * (Y - M)) ** 2) + 0.5 * rho * np.sum((X - Y) ** 2)

    Y = minimize(obj, np.zeros(4), method="BFGS", options=dict(gtol=1e-12)).x.reshape(2, 2)
    assert res == pytest.approx(np.linalg.norm(X - Y), abs=1e-7)


@pytest.mark.parametrize("seed", range(3))
def test_inner_admm_solves_convex_subproblem(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((3, 3))
    obs = rng.random((3, 3)) < 0.6
    obs[0, 0] = True
    p = MatrixCompletionProblem(M, obs, lam=0.5)
    xi = dca_subgradient_g(rng.standard_normal((3, 3)), 0.5)

    def smooth(X):
        r = p.residual(X)
        return 0.5 * float(np.sum(r ** 2)) - float(np.vdot(xi, X)), r - xi

    # unobserved entries make the minimizer non-unique; compare objective values
    def F(X):
        return p.eval_f(X) + smooth(X)[0]

    best = F(nuclear_plus_quadratic_oracle(0.5, smooth, (3, 3)))
    # a slowly growing penalty lets the splitting reach the optimum
    X, _, res = admm_subproblem(p, xi, np.zeros((3, 3)),
                                AdmmConfig(penalty_base=1.001, inner_tol=1e-10, inner_max=10 ** 5))
    assert res <= 1e-10
    assert F(X) == pytest.approx(best, abs=1e-7)
    # the default 1.1^j schedule freezes the iterates early: feasible but inexact
    X, _, res = admm_subproblem(p, xi, np.zeros((3, 3)), AdmmConfig())
    assert res <= 1e-3
    assert F(X) >= best - 1e-7


def test_scalar_instance(scalar_problem):
    x, trace = admm_dca_run(scalar_problem, AdmmConfig(rel_tol=1e-10, inner_tol=1e-10))
    assert trace.status == "converged"
    assert abs(x[0, 0] - 5.0) <= 1e-6


def test_scalar_instance_defaults(scalar_problem):
    x, trace = admm_dca_run(scalar_problem)
    assert trace.status == "converged"
    assert abs(x[0, 0] - 5.0) <= 1e-3


def test_inner_loops_meet_tolerance_and_trace(small_problem):
    x, trace = admm_dca_run(small_problem)
    assert trace.solver == "admm-dca" and trace.status == "converged"
    body = trace.records[:-1]
    assert all(r.inner_residual <= 1e-3 for r in body)
    assert all(1 <= r.inner_iters < 500 for r in body)
    assert all(r.xi_norm <= small_problem.lam + 1e-9 for r in trace.records)


def test_tensor_run(rng):
    from ibpdca.linalg import tprod
    L = tprod(rng.standard_normal((5, 1, 3)), rng.standard_normal((1, 5, 3)))
    obs = rng.random(L.shape) < 0.7
    x, trace = admm_dca_run(TensorCompletionProblem(L, obs))
    assert trace.status == "converged"
    assert np.linalg.norm(x - L) / np.linalg.norm(L) < 0.1


def test_x0_shape(small_problem):
    with pytest.raises(ParameterError):
        admm_dca_run(small_problem, x0=np.zeros((2, 2)))
