"""Portable seeded random streams.

The generator is splitmix64: the 64-bit state advances by the golden-ratio
increment ``0x9E3779B97F4A7C15`` and each output is the usual
xor-shift/multiply finalizer of the new state. Derived draws:

* uniform in ``[0, 1)``: ``(z >> 11) * 2**-53``;
* standard normal: Box-Muller on consecutive pairs ``(u1, u2)`` of
  uniforms, using ``r = sqrt(-2 log(1 - u1))`` and emitting
  ``r cos(2 pi u2)`` then ``r sin(2 pi u2)``; for an odd request the last
  sine is discarded.

Arrays are filled in C (row-major) order. All arithmetic is on unsigned
64-bit integers with wraparound, so any language can reproduce the streams
bit for bit.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class RngState:
    """A splitmix64 stream.

    Parameters
    ----------
    seed : int
        Any integer; reduced modulo ``2**64``.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64
        self.counter = 0

    def next_uint64(self, n):
        """Next ``n`` raw 64-bit outputs."""
        idx = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.seed) + idx * GOLDEN
            out = _mix(states)
        self.counter += n
        return out

    def uniform(self, shape):
        n = int(np.prod(shape))
        z = self.next_uint64(n)
        return ((z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53).reshape(shape)

    def normal(self, shape):
        n = int(np.prod(shape))
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        ang = 2.0 * np.pi * u[:, 1]
        z = np.column_stack([r * np.cos(ang), r * np.sin(ang)]).ravel()
        return z[:n].reshape(shape)

    def __repr__(self):
        return f"RngState(seed={self.seed}, counter={self.counter})"
