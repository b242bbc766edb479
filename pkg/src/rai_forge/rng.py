"""Counter-based deterministic random numbers.

Every stochastic component of the package (synthetic data, splits, minibatch
index streams, network initialization) draws from the same counter-based
64-bit generator so that results are reproducible bit-for-bit from a single
integer seed, independently of library versions.  The full algorithm is
documented in ``docs/prng.md`` together with test vectors; in short:

    state(k)  = (seed + (k + 1) * GOLDEN) mod 2^64          # splitmix stride
    output(k) = mix(state(k))                               # splitmix64 finalizer

where ``mix`` is the xor-shift/multiply finalizer of splitmix64.  Uniforms
take the top 53 bits of ``output`` shifted into (0, 1]; Gaussians come from
Box-Muller on counter pairs (2j, 2j+1).
"""

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

# numpy emits a warning when uint64 arithmetic wraps on some platforms via
# intermediate casts; everything below stays in uint64 on purpose.
_U64 = np.uint64


def mix64(z):
    """Splitmix64 finalizer for a single Python integer (wraps mod 2^64)."""
    z &= _MASK
    z = (z ^ (z >> 30)) * _MIX1 & _MASK
    z = (z ^ (z >> 27)) * _MIX2 & _MASK
    return z ^ (z >> 31)


def derive_seed(seed, stream):
    """Derive an independent child seed for a named sub-stream.

    ``stream`` is a small integer tag (e.g. a round index).  The rule is
    ``mix64(mix64(seed + GOLDEN) + stream)`` and is part of the documented
    generator contract.
    """
    return mix64(mix64((seed + GOLDEN) & _MASK) + (stream & _MASK))


def raw(seed, counters):
    """Vector of raw 64-bit outputs for the given counters (uint64 array)."""
    c = np.asarray(counters, dtype=_U64)
    state = _U64(seed & _MASK) + (c + _U64(1)) * _U64(GOLDEN)
    z = state
    z = (z ^ (z >> _U64(30))) * _U64(_MIX1)
    z = (z ^ (z >> _U64(27))) * _U64(_MIX2)
    return z ^ (z >> _U64(31))


def uniform(seed, counters):
    """Uniforms in (0, 1], one per counter.

    The open-at-zero interval keeps ``log(u)`` finite for Box-Muller.
    """
    bits = raw(seed, counters) >> _U64(11)
    return (bits.astype(np.float64) + 1.0) * (0.5 ** 53)


def gaussian(seed, counters):
    """Standard normals, one per counter.

    Counter pair (2j, 2j+1) feeds one Box-Muller transform; counter 2j
    receives the cosine branch and 2j+1 the sine branch, so any aligned
    slice of the stream is reproducible in isolation.
    """
    c = np.asarray(counters, dtype=np.uint64)
    base = (c >> _U64(1)) << _U64(1)
    u1 = uniform(seed, base)
    u2 = uniform(seed, base + _U64(1))
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return np.where(c & _U64(1) == 0, r * np.cos(theta), r * np.sin(theta))


class CounterStream:
    """Sequential convenience cursor over the counter-based generator.

    Used where a consumer just wants "the next k draws" (SGD minibatches,
    weight initialization) rather than addressing counters explicitly.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK
        self.cursor = 0

    def _take(self, k):
        c = np.arange(self.cursor, self.cursor + k, dtype=np.uint64)
        self.cursor += k
        return c

    def uniforms(self, k):
        return uniform(self.seed, self._take(k))

    def gaussians(self, k):
        # keep pairs aligned: always consume an even number of counters
        start = self.cursor
        if start % 2 == 1:
            self.cursor += 1
            start += 1
        need = k + (k % 2)
        c = np.arange(start, start + need, dtype=np.uint64)
        self.cursor = start + need
        return gaussian(self.seed, c)[:k]

    def integers(self, bound, k):
        """k integers uniform on {0, ..., bound-1} (floor of u*bound)."""
        u = self.uniforms(k)
        idx = np.minimum((u * bound).astype(np.int64), bound - 1)
        return idx

    def permutation(self, n):
        """Deterministic permutation of range(n) by sorting n uniforms."""
        u = self.uniforms(n)
        return np.argsort(u, kind="stable")
