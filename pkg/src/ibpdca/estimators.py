"""scikit-learn style front end.

>>> from ibpdca.estimators import MatrixCompleter
>>> completer = MatrixCompleter(solver="ibpdca")
>>> X_hat = completer.fit_transform(X_with_nans)        # doctest: +SKIP

Missing entries are given either as NaN in ``X`` or through an explicit
boolean ``mask`` (True = observed).
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_array
from .admm_dca import AdmmConfig, admm_dca_run
from .exceptions import ParameterError, ShapeMismatchError
from .metrics import estimate_rank
from .problems import MatrixCompletionProblem, SamplingMask, TensorCompletionProblem
from .solver import SolverConfig, ibpdca_run

SOLVERS = ("ibpdca", "bpdca", "admm-dca")


def _split_observed(X, mask, ndim):
    X = check_array(X, ndim=ndim, name="X", allow_nan=True)
    if mask is None:
        observed = ~np.isnan(X)
    else:
        observed = np.asarray(getattr(mask, "observed", mask), dtype=bool)
        if observed.shape != X.shape:
            raise ShapeMismatchError(f"mask shape {observed.shape} does not match X {X.shape}")
        if np.isnan(X[observed]).any():
            raise ParameterError("observed entries of X must not be NaN")
    return np.where(observed, X, 0.0), SamplingMask(observed)


class _BaseCompleter(TransformerMixin, BaseEstimator):
    _ndim = None
    _rank_kind = None

    def _make_problem(self, M, mask):
        raise NotImplementedError

    def _solve(self, M, mask, x0=None):
        if self.solver not in SOLVERS:
            raise ParameterError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        problem = self._make_problem(M, mask)
        if self.solver == "admm-dca":
            cfg = AdmmConfig(penalty_base=self.penalty_base, inner_tol=self.inner_tol,
                             inner_max=self.inner_max, max_iter=self.max_iter,
                             rel_tol=self.rel_tol)
            return admm_dca_run(problem, cfg, x0=x0)
        cfg = SolverConfig(beta=self.beta, tau=self.tau,
                           alpha="none" if self.solver == "bpdca" else self.alpha,
                           alpha_min=self.alpha_min, max_iter=self.max_iter,
                           rel_tol=self.rel_tol, diagnostics=self.diagnostics)
        return ibpdca_run(problem, cfg, x0=x0)

    def fit(self, X, y=None, mask=None):
        """Complete ``X``.

        Parameters
        ----------
        X : array_like
            Data with NaN at missing entries (or arbitrary values there if
            ``mask`` is given).
        y : ignored
        mask : array_like of bool, optional
            True where ``X`` is observed.

        Returns
        -------
        self
        """
        M, m = _split_observed(X, mask, self._ndim)
        Xc, trace = self._solve(M, m)
        self.mask_ = m
        self.completion_ = Xc
        self.trace_ = trace
        self.n_iter_ = trace.n_iter
        self.rank_ = estimate_rank(Xc, kind=self._rank_kind)
        self.converged_ = trace.status == "converged"
        return self

    def transform(self, X, mask=None):
        """Complete ``X``, warm-starting from the fitted completion.

        ``X`` must have the shape seen in :meth:`fit`.
        """
        check_is_fitted(self, "completion_")
        M, m = _split_observed(X, mask, self._ndim)
        if M.shape != self.completion_.shape:
            raise ShapeMismatchError(
                f"X has shape {M.shape}, estimator was fitted on {self.completion_.shape}")
        Xc, _ = self._solve(M, m, x0=self.completion_)
        return Xc

    def fit_transform(self, X, y=None, mask=None):
        return self.fit(X, mask=mask).completion_


class MatrixCompleter(_BaseCompleter):
    """Low-rank matrix completion with the ``lam (||X||_* - ||X||_F)`` penalty.

    Parameters
    ----------
    solver : {"ibpdca", "bpdca", "admm-dca"}
    lam, mu : float
        Model weight and kernel parameter.
    beta, tau : float
        Proximal weights of the dual and primal updates.
    alpha : {"fista"} or float
        Extrapolation schedule for iBPDCA.
    alpha_min : float
        Lower bound on ``alpha`` used by the diagnostics.
    max_iter : int
    rel_tol : float
    penalty_base, inner_tol, inner_max
        Inner ADMM settings (ADMM-DCA only).
    diagnostics : bool
        Record merit-function quantities in ``trace_``.

    Attributes
    ----------
    completion_ : ndarray
    mask_ : SamplingMask
    trace_ : SolverTrace
    n_iter_ : int
    rank_ : int
    converged_ : bool
    """

    _ndim = 2
    _rank_kind = "matrix"

    def __init__(self, solver="ibpdca", lam=0.5, mu=1.1, beta=1.0, tau=1.0, alpha="fista",
                 alpha_min=0.2, max_iter=500, rel_tol=1e-5, penalty_base=1.1,
                 inner_tol=1e-3, inner_max=500, diagnostics=False):
        self.solver = solver
        self.lam = lam
        self.mu = mu
        self.beta = beta
        self.tau = tau
        self.alpha = alpha
        self.alpha_min = alpha_min
        self.max_iter = max_iter
        self.rel_tol = rel_tol
        self.penalty_base = penalty_base
        self.inner_tol = inner_tol
        self.inner_max = inner_max
        self.diagnostics = diagnostics

    def _make_problem(self, M, mask):
        return MatrixCompletionProblem(M, mask, lam=self.lam, mu=self.mu)


class TensorCompleter(_BaseCompleter):
    """Low-tubal-rank completion of 3-tensors with the TNN-based DC penalty.

    Same parameters and attributes as :class:`MatrixCompleter`; ``rank_``
    is the tubal rank and ``max_iter`` defaults to 3000.
    """

    _ndim = 3
    _rank_kind = "tubal"

    def __init__(self, solver="ibpdca", lam=0.5, mu=1.1, beta=1.0, tau=1.0, alpha="fista",
                 alpha_min=0.2, max_iter=3000, rel_tol=1e-5, penalty_base=1.1,
                 inner_tol=1e-3, inner_max=500, diagnostics=False):
        self.solver = solver
        self.lam = lam
        self.mu = mu
        self.beta = beta
        self.tau = tau
        self.alpha = alpha
        self.alpha_min = alpha_min
        self.max_iter = max_iter
        self.rel_tol = rel_tol
        self.penalty_base = penalty_base
        self.inner_tol = inner_tol
        self.inner_max = inner_max
        self.diagnostics = diagnostics

    def _make_problem(self, M, mask):
        return TensorCompletionProblem(M, mask, lam=self.lam, mu=self.mu)
