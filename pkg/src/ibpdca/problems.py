"""DC models for low-rank matrix and low-tubal-rank tensor completion.

Both models have the form::

    Phi(x) = f(x) - g(x) + h+(x) - h-(x)

with ``f`` a (tensor) nuclear norm scaled by ``lam`` and ``g = lam ||.||_F``.
A problem object bundles the evaluations, gradients, proximal maps and the
Bregman kernel a solver needs, plus the Lipschitz constants used by the
merit-function diagnostics.
"""

import numpy as np

from ._validation import check_array, check_same_shape, check_scalar
from .exceptions import ParameterError, ShapeMismatchError
from .linalg import singular_values, tensor_nuclear_norm
from .prox import EuclideanKernel, MaskedQuadraticKernel, prox_frobenius, svt, tensor_svt

#: Relative slack when testing membership of the dual ball ``||xi||_F <= lam``.
BALL_SLACK = 1e-9


class SamplingMask:
    """Observation set ``Omega`` and its orthogonal projection ``P_Omega``.

    Parameters
    ----------
    observed : array_like of bool
        True where an entry is observed. At least one entry must be.
    """

    def __init__(self, observed):
        observed = np.asarray(observed)
        if observed.dtype != bool:
            if not np.isin(observed, (0, 1)).all():
                raise ParameterError("mask entries must be boolean or 0/1")
            observed = observed.astype(bool)
        if observed.size == 0 or not observed.any():
            raise ParameterError("mask must contain at least one observed entry")
        self.observed = observed
        self.observed.setflags(write=False)

    @property
    def shape(self):
        return self.observed.shape

    @property
    def n_observed(self):
        return int(self.observed.sum())

    @property
    def n_missing(self):
        return int(self.observed.size - self.observed.sum())

    def project(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape != self.shape:
            raise ShapeMismatchError(f"array shape {X.shape} does not match mask {self.shape}")
        return np.where(self.observed, X, 0.0)

    def __eq__(self, other):
        return isinstance(other, SamplingMask) and np.array_equal(self.observed, other.observed)

    def __repr__(self):
        return f"SamplingMask(shape={self.shape}, observed={self.n_observed})"


def prox_beta_g(a, beta, lam):
    """Proximal map of ``beta * lam * ||.||_F``."""
    return prox_frobenius(a, beta * lam)


class DcProblem:
    """Interface consumed by the solvers.

    Subclasses implement ``eval_f``, ``eval_g``, ``eval_h_plus``,
    ``eval_h_minus``, their gradients, ``prox_beta_g``, ``conj_g`` and
    ``solve_x_subproblem``, and set ``kernel``, ``lam``, ``l_h_plus`` and
    ``l_h_minus``.
    """

    kernel = None
    lam = None
    l_h_plus = 0.0
    l_h_minus = 0.0
    shape = None

    def eval_f(self, x):
        raise NotImplementedError

    def eval_g(self, x):
        raise NotImplementedError

    def eval_h_plus(self, x):
        return 0.0

    def eval_h_minus(self, x):
        return 0.0

    def grad_h_plus(self, x):
        return np.zeros(self.shape)

    def grad_h_minus(self, x):
        return np.zeros(self.shape)

    def prox_beta_g(self, a, beta):
        raise NotImplementedError

    def conj_g(self, xi):
        """Value of the convex conjugate ``g*`` at ``xi`` (may be ``inf``)."""
        raise NotImplementedError

    def solve_x_subproblem(self, u, xhat, tau):
        raise NotImplementedError

    def check_tau(self, tau):
        """Reject proximal weights for which ``solve_x_subproblem`` is not exact."""
        return check_scalar(tau, "tau", lower=0.0, lower_inclusive=False)

    def objective(self, x):
        """``Phi(x) = f(x) - g(x) + h+(x) - h-(x)``."""
        return (self.eval_f(x) - self.eval_g(x)
                + self.eval_h_plus(x) - self.eval_h_minus(x))

    def surrogate(self, x, xi):
        """``Theta(x, xi) = f(x) + g*(xi) - <xi, x> + h+(x) - h-(x)``."""
        gc = self.conj_g(xi)
        if np.isinf(gc):
            return np.inf
        return (self.eval_f(x) + gc - float(np.vdot(xi, x))
                + self.eval_h_plus(x) - self.eval_h_minus(x))

    def subproblem_objective(self, x, u, xhat, tau):
        """Objective of the primal update: ``f + h+ - <x - xhat, u> + tau B_psi(x, xhat)``."""
        return (self.eval_f(x) + self.eval_h_plus(x) - float(np.vdot(x - xhat, u))
                + tau * self.kernel.distance(x, xhat))


class _CompletionProblem(DcProblem):
    """Shared pieces of the completion models: data, mask and ``g = lam ||.||_F``."""

    _ndim = None

    def __init__(self, M_observed, mask, lam=0.5, mu=1.1):
        if not isinstance(mask, SamplingMask):
            mask = SamplingMask(mask)
        M = check_array(M_observed, ndim=self._ndim, name="M_observed")
        check_same_shape(M, mask.observed, ("M_observed", "mask"))
        self.mask = mask
        self.M_observed = mask.project(M)
        self.M_observed.setflags(write=False)
        self.lam = check_scalar(lam, "lam", lower=0.0)
        self.shape = M.shape

    def residual(self, x):
        return self.mask.project(x - self.M_observed)

    def data_fit(self, x):
        r = self.residual(x)
        return 0.5 * float(np.vdot(r, r))

    def eval_g(self, x):
        return self.lam * float(np.linalg.norm(x))

    def prox_beta_g(self, a, beta):
        return prox_frobenius(a, beta * self.lam)

    def conj_g(self, xi):
        # g* is the indicator of the Frobenius ball of radius lam
        radius = self.lam * (1.0 + BALL_SLACK) if self.lam > 0 else BALL_SLACK
        if np.linalg.norm(xi) <= radius:
            return 0.0
        return np.inf


class MatrixCompletionProblem(_CompletionProblem):
    """``lam (||X||_* - ||X||_F) + 1/2 ||P_Omega(X - M)||_F^2``.

    Parameters
    ----------
    M_observed : array_like, shape (m, n)
        Observed data; entries outside the mask are ignored.
    mask : SamplingMask or array_like of bool
    lam : float, default 0.5
    mu : float, default 1.1
    split : {"plus", "minus"}, default "plus"
        Where the data-fit term goes. ``"plus"`` sets ``h+ = 1/2||P(X-M)||^2``,
        ``h- = 0`` with the masked kernel ``1/2 <X, (mu I - P) X>`` (requires
        ``mu > 1`` and ``tau = 1``). ``"minus"`` sets ``h+ = 0``,
        ``h- = -1/2||P(X-M)||^2`` with the Euclidean kernel
        ``(mu/2)||X||^2``, which admits any ``tau > 0``.
    """

    _ndim = 2

    def __init__(self, M_observed, mask, lam=0.5, mu=1.1, split="plus"):
        super().__init__(M_observed, mask, lam=lam, mu=mu)
        if split not in ("plus", "minus"):
            raise ParameterError(f"split must be 'plus' or 'minus', got {split!r}")
        self.split = split
        if split == "plus":
            self.mu = check_scalar(mu, "mu", lower=1.0, lower_inclusive=False)
            self.kernel = MaskedQuadraticKernel(self.mu, self.mask)
            self.l_h_plus, self.l_h_minus = 1.0, 0.0
        else:
            self.mu = check_scalar(mu, "mu", lower=0.0, lower_inclusive=False)
            self.kernel = EuclideanKernel(self.mu)
            self.l_h_plus, self.l_h_minus = 0.0, 1.0

    def eval_f(self, x):
        return self.lam * float(singular_values(x).sum())

    def prox_f(self, a, step):
        """Proximal map of ``step * lam * ||.||_*``."""
        return svt(a, step * self.lam)

    def eval_h_plus(self, x):
        return self.data_fit(x) if self.split == "plus" else 0.0

    def eval_h_minus(self, x):
        return -self.data_fit(x) if self.split == "minus" else 0.0

    def grad_h_plus(self, x):
        return self.residual(x) if self.split == "plus" else np.zeros(self.shape)

    def grad_h_minus(self, x):
        return -self.residual(x) if self.split == "minus" else np.zeros(self.shape)

    def check_tau(self, tau):
        tau = super().check_tau(tau)
        if self.split == "plus" and tau != 1.0:
            raise ParameterError(
                "the masked kernel gives a closed-form primal update only for tau = 1; "
                "use split='minus' for other values"
            )
        return tau

    def solve_x_subproblem(self, u, xhat, tau=1.0):
        """Exact minimizer of the primal update.

        With the masked kernel and ``tau = 1`` the quadratic parts collapse to
        ``(mu/2)||X - xhat||^2`` and the minimizer is
        ``svt(xhat - (grad h+(xhat) - u)/mu, lam/mu)``. With the Euclidean
        kernel it is ``svt(xhat + u/(tau mu), lam/(tau mu))``.
        """
        tau = self.check_tau(tau)
        if self.split == "plus":
            return svt(xhat - (self.residual(xhat) - u) / self.mu, self.lam / self.mu)
        w = tau * self.mu
        return svt(xhat + u / w, self.lam / w)

    def __repr__(self):
        return (f"MatrixCompletionProblem(shape={self.shape}, lam={self.lam}, "
                f"mu={self.mu}, split={self.split!r})")


class TensorCompletionProblem(_CompletionProblem):
    """``lam (||X||_TNN - ||X||_F) + 1/2 ||P_Omega(X - M)||_F^2`` for 3-tensors.

    Uses ``h+ = 0``, ``h- = -1/2||P(X-M)||^2`` (``L_h- = 1``) and the
    Euclidean kernel ``(mu/2)||X||^2``.
    """

    _ndim = 3

    def __init__(self, M_observed, mask, lam=0.5, mu=1.1):
        super().__init__(M_observed, mask, lam=lam, mu=mu)
        self.mu = check_scalar(mu, "mu", lower=0.0, lower_inclusive=False)
        self.kernel = EuclideanKernel(self.mu)
        self.l_h_plus, self.l_h_minus = 0.0, 1.0

    def eval_f(self, x):
        return self.lam * tensor_nuclear_norm(x)

    def prox_f(self, a, step):
        return tensor_svt(a, step * self.lam)

    def eval_h_minus(self, x):
        return -self.data_fit(x)

    def grad_h_minus(self, x):
        return -self.residual(x)

    def solve_x_subproblem(self, u, xhat, tau=1.0):
        """``tensor_svt(xhat + u/(tau mu), lam/(tau mu))``.

        For ``tau = 1`` and ``u = xi - P(xhat - M)`` this is the shrinkage of
        ``xhat - (P(xhat - M) - xi)/mu`` at threshold ``lam/mu``.
        """
        tau = self.check_tau(tau)
        w = tau * self.mu
        return tensor_svt(xhat + u / w, self.lam / w)

    def __repr__(self):
        return f"TensorCompletionProblem(shape={self.shape}, lam={self.lam}, mu={self.mu})"


def objective_phi(problem, x):
    """Objective value ``Phi(x)`` of a completion model."""
    return problem.objective(np.asarray(x, dtype=np.float64))
