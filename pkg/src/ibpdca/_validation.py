"""Input validation helpers in the spirit of ``sklearn.utils.check_array``."""

import numbers

import numpy as np

from .exceptions import NonFiniteError, ParameterError, ShapeMismatchError


def check_array(a, ndim=None, name="array", allow_nan=False):
    """Return ``a`` as a float64 ndarray, validating rank and finiteness.

    Parameters
    ----------
    a : array_like
        Input values.
    ndim : int or tuple of int, optional
        Accepted number of dimensions.
    name : str
        Used in error messages.
    allow_nan : bool
        If True, NaN entries are accepted (they mark missing values for the
        estimators); infinities are still rejected.
    """
    arr = np.asarray(a, dtype=np.float64)
    if ndim is not None:
        allowed = (ndim,) if isinstance(ndim, int) else tuple(ndim)
        if arr.ndim not in allowed:
            raise ShapeMismatchError(
                f"{name} must have ndim in {allowed}, got shape {arr.shape}"
            )
    if arr.size == 0:
        raise ShapeMismatchError(f"{name} must be non-empty, got shape {arr.shape}")
    if allow_nan:
        if np.isinf(arr).any():
            raise NonFiniteError(f"{name} contains infinite values")
    elif not np.isfinite(arr).all():
        raise NonFiniteError(f"{name} contains NaN or infinite values")
    return arr


def check_matrix(a, name="matrix", allow_nan=False):
    return check_array(a, ndim=2, name=name, allow_nan=allow_nan)


def check_tensor3(a, name="tensor", allow_nan=False):
    return check_array(a, ndim=3, name=name, allow_nan=allow_nan)


def check_same_shape(a, b, names=("a", "b")):
    if np.shape(a) != np.shape(b):
        raise ShapeMismatchError(
            f"{names[0]} and {names[1]} shapes differ: {np.shape(a)} vs {np.shape(b)}"
        )


def check_scalar(x, name, lower=None, upper=None, lower_inclusive=True,
                 upper_inclusive=True, integer=False):
    """Validate a scalar parameter and return it as float (or int)."""
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(x, bool) or not isinstance(x, kind):
        raise ParameterError(f"{name} must be {'an integer' if integer else 'real'}, got {x!r}")
    if not np.isfinite(x):
        raise ParameterError(f"{name} must be finite, got {x!r}")
    if lower is not None:
        bad = x < lower if lower_inclusive else x <= lower
        if bad:
            op = ">=" if lower_inclusive else ">"
            raise ParameterError(f"{name} must be {op} {lower}, got {x!r}")
    if upper is not None:
        bad = x > upper if upper_inclusive else x >= upper
        if bad:
            op = "<=" if upper_inclusive else "<"
            raise ParameterError(f"{name} must be {op} {upper}, got {x!r}")
    return int(x) if integer else float(x)
