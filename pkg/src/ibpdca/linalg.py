"""Dense matrix and third-order tensor kernels.

Matrices are plain ``(m, n)`` float64 arrays. A third-order tensor is an
``(n1, n2, n3)`` array whose ``k``-th frontal slice is ``T[:, :, k]``; the
tubes (mode-3 fibers) are ``T[i, j, :]``.

The tube transform is the unnormalized forward DFT along the last axis,
with ``1/n3`` on the inverse, which is what ``numpy.fft`` implements.
"""

from collections import namedtuple

import numpy as np

from ._validation import check_matrix, check_tensor3
from .exceptions import NumericalFailureError, ShapeMismatchError, SymmetryViolationError

SvdResult = namedtuple("SvdResult", ["U", "sigma", "Vt"])
SvdResult.__doc__ = """Reduced SVD ``A = U @ diag(sigma) @ Vt`` with ``r = min(m, n)``."""

TSvd = namedtuple("TSvd", ["U", "Gamma", "Vt"])
TSvd.__doc__ = """t-SVD ``T = U * Gamma * Vt`` under the t-product.

``U`` is ``(n1, r, n3)``, ``Gamma`` is f-diagonal ``(r, r, n3)`` and ``Vt``
is ``(r, n2, n3)``, where ``r = min(n1, n2)``.
"""

#: Tolerance on the imaginary residue left by an inverse tube DFT.
IMAG_TOL = 1e-9


def _svd(a):
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc


def svd(A):
    """Reduced singular value decomposition of a real matrix.

    Parameters
    ----------
    A : array_like, shape (m, n)

    Returns
    -------
    SvdResult
        ``U`` (m, r) with orthonormal columns, ``sigma`` nonincreasing and
        nonnegative of length ``r = min(m, n)``, ``Vt`` (r, n) with
        orthonormal rows.

    Raises
    ------
    NumericalFailureError
        If the underlying LAPACK driver fails to converge.
    """
    A = check_matrix(A, name="A")
    U, s, Vt = _svd(A)
    return SvdResult(U, s, Vt)


def singular_values(A):
    A = check_matrix(A, name="A")
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc


def dft_tubes(T):
    """Unnormalized forward DFT of every tube of a real third-order tensor."""
    T = check_tensor3(T, name="T")
    return np.fft.fft(T, axis=2)


def idft_tubes(Tbar, tol=IMAG_TOL):
    """Inverse tube DFT (``1/n3`` normalization) returning a real tensor.

    Raises
    ------
    SymmetryViolationError
        If the imaginary part of the result exceeds ``tol`` relative to
        ``max(1, max|real part|)``, i.e. ``Tbar`` is not the spectrum of a
        real tensor.
    """
    Tbar = np.asarray(Tbar)
    if Tbar.ndim != 3:
        raise ShapeMismatchError(f"Tbar must be 3-dimensional, got shape {Tbar.shape}")
    T = np.fft.ifft(Tbar, axis=2)
    resid = np.max(np.abs(T.imag), initial=0.0)
    scale = max(1.0, np.max(np.abs(T.real), initial=0.0))
    if resid > tol * scale:
        raise SymmetryViolationError(
            f"imaginary residue {resid:.3e} exceeds {tol:g} (relative to {scale:.3e})"
        )
    return np.ascontiguousarray(T.real)


def half_spectrum(n3):
    """Indices ``0 .. n3 // 2`` of the Fourier slices that determine the rest.

    For a real tensor, slice ``n3 - k`` is the complex conjugate of slice
    ``k``, so only these slices need an actual factorization.
    """
    return range(n3 // 2 + 1)


def _is_self_conjugate(k, n3):
    return k == 0 or 2 * k == n3


def fill_conjugate(Xbar):
    """Overwrite slices ``k > n3 // 2`` with the conjugates of ``n3 - k``."""
    n3 = Xbar.shape[2]
    for k in range(n3 // 2 + 1, n3):
        Xbar[:, :, k] = np.conj(Xbar[:, :, n3 - k])
    return Xbar


def slice_svd(Xk, real):
    """SVD of one Fourier slice; self-conjugate slices are factored as real."""
    if real:
        return _svd(np.ascontiguousarray(Xk.real))
    return _svd(Xk)


def tprod(A, B):
    """t-product of ``A`` (n1, n2, n3) and ``B`` (n2, n4, n3).

    Slice-wise matrix products in the Fourier domain followed by the
    inverse tube DFT.
    """
    A = check_tensor3(A, name="A")
    B = check_tensor3(B, name="B")
    if A.shape[1] != B.shape[0] or A.shape[2] != B.shape[2]:
        raise ShapeMismatchError(f"cannot t-multiply shapes {A.shape} and {B.shape}")
    Cbar = np.einsum("ijk,jlk->ilk", np.fft.fft(A, axis=2), np.fft.fft(B, axis=2))
    return idft_tubes(Cbar)


def conj_transpose(A):
    """Tensor transpose: transpose every frontal slice, then reverse slices 2..n3."""
    A = check_tensor3(A, name="A")
    At = np.transpose(A, (1, 0, 2))
    idx = (-np.arange(A.shape[2])) % A.shape[2]
    return np.ascontiguousarray(At[:, :, idx])


def t_identity(n, n3):
    """Identity tensor for the t-product: first frontal slice ``I_n``, rest zero."""
    eye = np.zeros((n, n, n3))
    eye[:, :, 0] = np.eye(n)
    return eye


def tsvd(T):
    """t-SVD of a real third-order tensor.

    Each Fourier-domain frontal slice is factored by a matrix SVD; the
    factors of slices past ``n3 // 2`` are taken as conjugates so that the
    inverse DFT of every factor is real.

    Returns
    -------
    TSvd
    """
    T = check_tensor3(T, name="T")
    n1, n2, n3 = T.shape
    r = min(n1, n2)
    Tbar = np.fft.fft(T, axis=2)
    Ubar = np.zeros((n1, r, n3), dtype=complex)
    Gbar = np.zeros((r, r, n3), dtype=complex)
    Vbar = np.zeros((r, n2, n3), dtype=complex)
    diag = np.arange(r)
    for k in half_spectrum(n3):
        U, s, Vt = slice_svd(Tbar[:, :, k], _is_self_conjugate(k, n3))
        Ubar[:, :, k] = U
        Gbar[diag, diag, k] = s
        Vbar[:, :, k] = Vt
    for arr in (Ubar, Gbar, Vbar):
        fill_conjugate(arr)
    return TSvd(idft_tubes(Ubar), idft_tubes(Gbar), idft_tubes(Vbar))


def fourier_singular_values(T):
    """Singular values of every Fourier slice, as an ``(r, n3)`` array."""
    T = check_tensor3(T, name="T")
    n3 = T.shape[2]
    Tbar = np.fft.fft(T, axis=2)
    out = np.empty((min(T.shape[:2]), n3))
    for k in half_spectrum(n3):
        Xk = Tbar[:, :, k]
        if _is_self_conjugate(k, n3):
            Xk = Xk.real
        try:
            out[:, k] = np.linalg.svd(Xk, compute_uv=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
        if k:
            out[:, n3 - k] = out[:, k]
    return out


def tensor_nuclear_norm(T):
    """``(1/n3) * sum_k sum_i sigma_i(Tbar_k)``."""
    s = fourier_singular_values(T)
    return float(s.sum() / s.shape[1])
