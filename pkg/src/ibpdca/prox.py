"""Proximal operators, the Moreau route to conjugate proxes, and Bregman kernels."""

import numpy as np

from ._validation import check_matrix, check_same_shape, check_scalar, check_tensor3
from .linalg import _is_self_conjugate, _svd, fill_conjugate, half_spectrum, idft_tubes


def prox_frobenius(a, t):
    """Proximal map of ``t * ||.||_F`` (block soft-thresholding).

    Returns ``max(0, 1 - t / ||a||_F) * a``; the zero array when
    ``||a||_F <= t``.
    """
    t = check_scalar(t, "t", lower=0.0)
    a = np.asarray(a, dtype=np.float64)
    nrm = np.linalg.norm(a)
    if nrm <= t:
        return np.zeros_like(a)
    return (1.0 - t / nrm) * a


def project_frobenius_ball(a, radius):
    """Euclidean projection onto ``{x : ||x||_F <= radius}``."""
    a = np.asarray(a, dtype=np.float64)
    nrm = np.linalg.norm(a)
    if nrm <= radius:
        return a.copy()
    return (radius / nrm) * a


def svt(A, kappa):
    """Singular value thresholding, the proximal map of ``kappa * ||.||_*``.

    Parameters
    ----------
    A : array_like, shape (m, n)
    kappa : float
        Nonnegative threshold.

    Returns
    -------
    ndarray, shape (m, n)
        ``U @ diag(max(sigma - kappa, 0)) @ Vt``.
    """
    A = check_matrix(A, name="A")
    kappa = check_scalar(kappa, "kappa", lower=0.0)
    U, s, Vt = _svd(A)
    s = np.maximum(s - kappa, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def tensor_svt(T, kappa):
    """Tensor singular value thresholding.

    Every Fourier-domain frontal slice has its singular values shrunk by
    the same ``kappa``; the result is transformed back to the original
    domain. This is the proximal map of ``kappa * ||.||_TNN``.
    """
    T = check_tensor3(T, name="T")
    kappa = check_scalar(kappa, "kappa", lower=0.0)
    n3 = T.shape[2]
    Tbar = np.fft.fft(T, axis=2)
    Xbar = np.zeros_like(Tbar)
    for k in half_spectrum(n3):
        U, s, Vt = _svd(Tbar[:, :, k].real if _is_self_conjugate(k, n3) else Tbar[:, :, k])
        s = np.maximum(s - kappa, 0.0)
        keep = s > 0
        Xbar[:, :, k] = (U[:, keep] * s[keep]) @ Vt[keep]
    fill_conjugate(Xbar)
    return idft_tubes(Xbar)


def prox_conjugate(prox_g, xi, xhat, beta):
    """Solve the dual-variable subproblem through the Moreau decomposition.

    Computes ``prox_{g*/beta}(xi + xhat/beta)`` as::

        xi + xhat/beta - prox_{beta g}(beta*xi + xhat) / beta

    without ever forming ``g*``.

    Parameters
    ----------
    prox_g : callable
        ``prox_g(a, beta)`` returns the proximal map of ``beta * g`` at ``a``.
    xi, xhat : ndarray
        Current dual variable and extrapolated primal point.
    beta : float
        Proximal weight, ``beta > 0``.
    """
    beta = check_scalar(beta, "beta", lower=0.0, lower_inclusive=False)
    xi = np.asarray(xi, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    return xi + xhat / beta - prox_g(beta * xi + xhat, beta) / beta


class BregmanKernel:
    """Differentiable strongly convex kernel ``psi``.

    Subclasses provide ``value``, ``gradient``, the strong convexity modulus
    ``rho`` and the gradient Lipschitz modulus ``l_psi``.
    """

    rho = None
    l_psi = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def distance(self, x, y):
        return bregman_distance(self, x, y)


class EuclideanKernel(BregmanKernel):
    """``psi(x) = (scale/2) ||x||^2``, so ``rho = l_psi = scale``."""

    def __init__(self, scale=1.0):
        self.scale = check_scalar(scale, "scale", lower=0.0, lower_inclusive=False)
        self.rho = self.scale
        self.l_psi = self.scale

    def value(self, x):
        return 0.5 * self.scale * float(np.vdot(x, x))

    def gradient(self, x):
        return self.scale * np.asarray(x, dtype=np.float64)

    def __repr__(self):
        return f"EuclideanKernel(scale={self.scale})"


class MaskedQuadraticKernel(BregmanKernel):
    """``psi(x) = 1/2 <x, (mu I - P_Omega) x>`` for a sampling mask ``Omega``.

    The operator has eigenvalue ``mu`` on unobserved entries and ``mu - 1``
    on observed ones, hence ``rho = mu - 1`` and ``l_psi = mu``; ``mu > 1``
    keeps it positive definite.
    """

    def __init__(self, mu, mask):
        self.mu = check_scalar(mu, "mu", lower=1.0, lower_inclusive=False)
        self.observed = np.asarray(getattr(mask, "observed", mask), dtype=bool)
        self.rho = self.mu - 1.0
        self.l_psi = self.mu

    def _apply(self, x):
        x = np.asarray(x, dtype=np.float64)
        check_same_shape(x, self.observed, ("x", "mask"))
        return self.mu * x - np.where(self.observed, x, 0.0)

    def value(self, x):
        return 0.5 * float(np.vdot(x, self._apply(x)))

    def gradient(self, x):
        return self._apply(x)

    def __repr__(self):
        return f"MaskedQuadraticKernel(mu={self.mu}, observed={int(self.observed.sum())}/{self.observed.size})"


def bregman_distance(psi, x, y):
    """``B_psi(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    check_same_shape(x, y, ("x", "y"))
    if isinstance(psi, (EuclideanKernel, MaskedQuadraticKernel)):
        # quadratic kernels: evaluate the exact form to avoid cancellation
        d = x - y
        if isinstance(psi, EuclideanKernel):
            return 0.5 * psi.scale * float(np.vdot(d, d))
        return 0.5 * float(np.vdot(d, psi.gradient(d)))
    return float(psi.value(x) - psi.value(y) - np.vdot(psi.gradient(y), x - y))
