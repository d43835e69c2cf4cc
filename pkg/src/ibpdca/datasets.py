"""Seeded synthetic completion instances."""

from collections import namedtuple
import logging

import numpy as np

from ._validation import check_scalar
from .linalg import tprod
from .problems import SamplingMask
from .rng import RngState

logger = logging.getLogger(__name__)

Instance = namedtuple("Instance", ["X_true", "mask", "M_observed", "low_rank", "seed"])
Instance.__doc__ = """A generated completion instance.

``low_rank`` is the noiseless factor product; ``seed`` is the seed actually
used (it differs from the requested one only if a draw produced an empty
mask and had to be repeated).
"""

_MAX_RESEEDS = 1000


def _check_common(dims, r, sr):
    for i, d in enumerate(dims):
        check_scalar(d, f"dims[{i}]", lower=1, integer=True)
    check_scalar(r, "r", lower=1, upper=min(dims[:2]), integer=True)
    check_scalar(sr, "sr", lower=0.0, upper=1.0, lower_inclusive=False)


def _draw_mask(rng, shape, sr):
    return rng.uniform(shape) < sr


def gen_matrix_instance(m, n, r, sr, seed):
    """Random low-rank matrix completion instance.

    ``X_true = U @ V + 0.01 * N`` with ``U`` (m, r) and ``V`` (r, n) uniform on
    [0, 1) and ``N`` standard normal; each entry is observed independently
    with probability ``sr``. Draw order from one stream: ``U``, ``V``, ``N``,
    then the mask uniforms, each in row-major order.

    If the mask comes out empty the whole draw is repeated with ``seed + 1``
    (and so on).
    """
    _check_common((m, n), r, sr)
    for attempt in range(_MAX_RESEEDS):
        s = int(seed) + attempt
        rng = RngState(s)
        U = rng.uniform((m, r))
        V = rng.uniform((r, n))
        L = U @ V
        X = L + 0.01 * rng.normal((m, n))
        obs = _draw_mask(rng, (m, n), sr)
        if obs.any():
            break
        logger.info("empty mask for seed %d, retrying with %d", s, s + 1)
    mask = SamplingMask(obs)
    return Instance(X, mask, mask.project(X), L, s)


def _slice_major(rng, draw, shape):
    # tensors are filled frontal slice by frontal slice, each slice row-major
    n1, n2, n3 = shape
    return np.ascontiguousarray(np.transpose(draw((n3, n1, n2)), (1, 2, 0)))


def gen_tensor_instance(n1, n2, n3, r, sr, seed):
    """Random low-tubal-rank tensor completion instance.

    ``X_true = U * V + 0.01 * N`` (t-product) with ``U`` (n1, r, n3), ``V``
    (r, n2, n3) and ``N`` all standard normal. Tensors are filled slice by
    slice in the draw order ``U``, ``V``, ``N``, mask.
    """
    _check_common((n1, n2, n3), r, sr)
    check_scalar(n3, "n3", lower=1, integer=True)
    for attempt in range(_MAX_RESEEDS):
        s = int(seed) + attempt
        rng = RngState(s)
        U = _slice_major(rng, rng.normal, (n1, r, n3))
        V = _slice_major(rng, rng.normal, (r, n2, n3))
        L = tprod(U, V)
        X = L + 0.01 * _slice_major(rng, rng.normal, (n1, n2, n3))
        obs = _slice_major(rng, rng.uniform, (n1, n2, n3)) < sr
        if obs.any():
            break
        logger.info("empty mask for seed %d, retrying with %d", s, s + 1)
    mask = SamplingMask(obs)
    return Instance(X, mask, mask.project(X), L, s)
