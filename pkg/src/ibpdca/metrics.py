"""Recovery quality measures."""

from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_array, check_same_shape
from .exceptions import ParameterError
from .linalg import fourier_singular_values, singular_values

#: Singular values at or below this fraction of the largest one do not count.
RANK_RTOL = 1e-6


@dataclass
class Metrics:
    rse: float
    rank: int
    iters: int
    wall_seconds: float
    psnr: float = math.nan


def rse(X_star, X_true):
    """Relative error ``||X_star - X_true||_F / ||X_true||_F``."""
    X_star = check_array(X_star, name="X_star")
    X_true = check_array(X_true, name="X_true")
    check_same_shape(X_star, X_true, ("X_star", "X_true"))
    den = np.linalg.norm(X_true)
    if den == 0:
        raise ParameterError("RSE is undefined for a zero ground truth")
    return float(np.linalg.norm(X_star - X_true) / den)


def psnr(X_star, X_true, mask):
    """Peak signal-to-noise ratio in dB.

    ``10 log10(max(X_true)^2 * #missing / ||X_star - X_true||_F^2)`` where the
    error is taken over the whole array and ``#missing`` counts the
    unobserved entries. Returns ``inf`` when the two arrays are equal.
    """
    X_star = check_array(X_star, name="X_star")
    X_true = check_array(X_true, name="X_true")
    check_same_shape(X_star, X_true, ("X_star", "X_true"))
    observed = np.asarray(getattr(mask, "observed", mask), dtype=bool)
    check_same_shape(observed, X_true, ("mask", "X_true"))
    n_missing = int(observed.size - observed.sum())
    if n_missing == 0:
        raise ParameterError("PSNR needs at least one unobserved entry")
    err = float(np.sum((X_star - X_true) ** 2))
    if err == 0:
        return math.inf
    return 10.0 * math.log10(float(X_true.max()) ** 2 * n_missing / err)


def estimate_rank(X, kind=None, rtol=RANK_RTOL):
    """Numerical rank (matrices) or tubal rank (3-tensors).

    A matrix counts singular values above ``rtol * sigma_max``. For a
    tensor, index ``i`` counts if ``max_k sigma_i(Xbar_k)`` exceeds ``rtol``
    times the largest Fourier singular value overall.

    Parameters
    ----------
    X : array_like
    kind : {"matrix", "tubal"}, optional
        Inferred from ``X.ndim`` if omitted.
    """
    X = check_array(X, ndim=(2, 3), name="X")
    if kind is None:
        kind = "matrix" if X.ndim == 2 else "tubal"
    if kind == "matrix":
        if X.ndim != 2:
            raise ParameterError("kind='matrix' needs a 2-D array")
        s = singular_values(X)
    elif kind == "tubal":
        if X.ndim != 3:
            raise ParameterError("kind='tubal' needs a 3-D array")
        s = fourier_singular_values(X).max(axis=1)
    else:
        raise ParameterError(f"kind must be 'matrix' or 'tubal', got {kind!r}")
    smax = s.max(initial=0.0)
    if smax == 0:
        return 0
    return int(np.count_nonzero(s > rtol * smax))
