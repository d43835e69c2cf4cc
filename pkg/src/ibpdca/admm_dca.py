"""Classical DCA baseline with an inner ADMM for the convex subproblem.

Outer step: ``xi = lam x / ||x||_F`` (a subgradient of ``g`` at the current
point), then approximately solve::

    min_X  f(X) - <xi, X> + 1/2 ||P_Omega(X - M)||^2

by splitting ``X = Y``. With scaled dual ``Z`` and penalty ``rho_j = base^j``
(``j = 1, 2, ...``, reset every outer iteration)::

    X = prox_{f/rho}(Y - Z + xi/rho)
    Y = (M + rho (X + Z)) / (1 + rho)   on Omega,   X + Z   elsewhere
    Z = Z + X - Y

stopping when ``||X - Y||_F <= inner_tol``.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from ._validation import check_array, check_scalar
from .exceptions import DivergenceError, ParameterError
from .solver import IterationRecord, SolverTrace, _phi_theta, _rel_change


@dataclass
class AdmmConfig:
    penalty_base: float = 1.1
    inner_tol: float = 1e-3
    inner_max: int = 500
    max_iter: int = 500
    rel_tol: float = 1e-5

    def __post_init__(self):
        self.penalty_base = check_scalar(self.penalty_base, "penalty_base", lower=1.0,
                                         lower_inclusive=False)
        self.inner_tol = check_scalar(self.inner_tol, "inner_tol", lower=0.0,
                                      lower_inclusive=False)
        self.inner_max = check_scalar(self.inner_max, "inner_max", lower=1, integer=True)
        self.max_iter = check_scalar(self.max_iter, "max_iter", lower=1, integer=True)
        self.rel_tol = check_scalar(self.rel_tol, "rel_tol", lower=0.0, lower_inclusive=False)


def dca_subgradient_g(x, lam):
    """Subgradient of ``lam ||.||_F`` at ``x``; zero at the origin."""
    x = np.asarray(x, dtype=np.float64)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        return np.zeros_like(x)
    return (lam / nrm) * x


def admm_subproblem(problem, xi, x_start, config):
    """Inner ADMM for ``min f(X) - <xi, X> + 1/2||P(X - M)||^2``.

    Returns
    -------
    X : ndarray
    n_inner : int
    residual : float
        Final ``||X - Y||_F``.
    """
    obs = problem.mask.observed
    M = problem.M_observed
    Y = x_start.copy()
    Z = np.zeros_like(Y)
    X = Y
    res = math.inf
    j = 0
    for j in range(1, config.inner_max + 1):
        rho = config.penalty_base ** j
        X = problem.prox_f(Y - Z + xi / rho, 1.0 / rho)
        V = X + Z
        Y = np.where(obs, (M + rho * V) / (1.0 + rho), V)
        Z = V - Y
        res = float(np.linalg.norm(X - Y))
        if res <= config.inner_tol:
            break
        # keep the unscaled multiplier rho*Z fixed across the penalty change
        Z /= config.penalty_base
    return X, j, res


def admm_dca_run(problem, config=None, x0=None):
    """Run ADMM-DCA on a matrix or tensor completion problem.

    Parameters
    ----------
    problem : MatrixCompletionProblem or TensorCompletionProblem
        Only ``lam``, the data and the mask are used; the ``split`` and
        kernel of the problem are irrelevant here.
    config : AdmmConfig, optional
    x0 : array_like, optional
        Defaults to zeros.

    Returns
    -------
    x : ndarray
    trace : SolverTrace
        Each record carries ``inner_iters`` and ``inner_residual``.
    """
    config = AdmmConfig() if config is None else config
    x = np.zeros(problem.shape) if x0 is None else check_array(x0, name="x0").copy()
    if x.shape != tuple(problem.shape):
        raise ParameterError(f"x0 shape {x.shape} does not match problem shape {problem.shape}")
    xi = np.zeros_like(x)
    trace = SolverTrace(solver="admm-dca")
    start = time.perf_counter()

    def record(k, x, xi):
        phi, theta = _phi_theta(problem, x, xi)
        return IterationRecord(k=k, phi=phi, theta=theta, theta_hat=math.nan, xhat_gap=0.0,
                               step_x=math.nan, step_xi=math.nan, upsilon=math.nan,
                               alpha=0.0, xi_norm=float(np.linalg.norm(xi)))

    for k in range(config.max_iter):
        rec = record(k, x, xi)
        xi_next = dca_subgradient_g(x, problem.lam)
        x_next, n_inner, res = admm_subproblem(problem, xi_next, x, config)
        rec.step_x = float(np.linalg.norm(x_next - x))
        rec.step_xi = float(np.linalg.norm(xi_next - xi))
        rec.inner_iters = n_inner
        rec.inner_residual = res
        trace.records.append(rec)
        if not np.isfinite(x_next).all():
            trace.status = "diverged"
            trace.n_iter = k + 1
            trace.wall_seconds = time.perf_counter() - start
            raise DivergenceError(f"non-finite iterate at iteration {k + 1}", trace)
        done = max(_rel_change(x_next, x), _rel_change(xi_next, xi)) <= config.rel_tol
        x, xi = x_next, xi_next
        if done:
            trace.status = "converged"
            trace.n_iter = k + 1
            break
    else:
        trace.status = "max-iter"
        trace.n_iter = config.max_iter
    trace.wall_seconds = time.perf_counter() - start
    trace.records.append(record(trace.n_iter, x, xi))
    return x, trace
