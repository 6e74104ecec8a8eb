"""Metered fair-bit source.

Every random decision in the package is paid for in fair bits drawn from a
xoshiro256** generator (Blackman & Vigna), seeded through splitmix64.  Output
words are consumed most-significant bit first and every bit is counted.

The generator state lives in a small ``uint64`` array so that the compiled
sampling kernels and the Python-level helpers below share one stream:

    rng[0:4]  xoshiro256** state
    rng[4]    current output word
    rng[5]    bits of rng[4] not yet consumed (the low ``rng[5]`` bits)
    rng[6]    total bits consumed

Kernels draw through :func:`choose`, which either reads this stream or, in
scripted mode, replays a fixed list of choice outcomes.  The scripted mode is
what the exhaustive path audit uses to enumerate every run of a sampler with
exact probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1

# rng layout
_WORD, _AVAIL, _COUNT = 4, 5, 6
RNG_LEN = 7

# script layout: mode, position, length, pending choice arity, choices...
SCRIPT_MODE, SCRIPT_POS, SCRIPT_LEN, SCRIPT_NEED = 0, 1, 2, 3
SCRIPT_HEADER = 4


def splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step. Returns ``(new_state, output)``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def mix64(x: int) -> int:
    return splitmix64(x & MASK64)[1]


def derive_seed(seed: int, index: int) -> int:
    """Seed for sample ``index`` of a run seeded with ``seed``.

    ``mix64(seed ^ mix64(index))`` where ``mix64`` is the splitmix64 output
    function applied to ``x + 0x9E3779B97F4A7C15``.
    """
    return mix64((seed & MASK64) ^ mix64(index))


def xoshiro_state(seed: int) -> list[int]:
    s = seed & MASK64
    out = []
    for _ in range(4):
        s, z = splitmix64(s)
        out.append(z)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def xoshiro_reference(state: list[int], count: int) -> list[int]:
    """Plain-integer xoshiro256** used to cross-check the compiled generator."""
    s0, s1, s2, s3 = state
    out = []
    for _ in range(count):
        out.append((_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64)
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
    return out


@njit(cache=True, _nrt=False, inline="always")
def _rotl64(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True, _nrt=False)
def next_word(rng):
    s0 = rng[0]
    s1 = rng[1]
    s2 = rng[2]
    s3 = rng[3]
    result = _rotl64(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl64(s3, 45)
    rng[0] = s0
    rng[1] = s1
    rng[2] = s2
    rng[3] = s3
    return result


@njit(cache=True, _nrt=False)
def next_bits(rng, k):
    """Next ``k`` bits (0 <= k <= 64) of the stream as an unsigned integer."""
    if k == 0:
        return np.uint64(0)
    avail = np.int64(rng[_AVAIL])
    rng[_COUNT] += np.uint64(k)
    if avail >= k:
        avail -= k
        rng[_AVAIL] = np.uint64(avail)
        w = rng[_WORD] >> np.uint64(avail)
        if k == 64:
            return w
        return w & ((np.uint64(1) << np.uint64(k)) - np.uint64(1))
    need = k - avail
    hi = np.uint64(0)
    if avail > 0:
        hi = rng[_WORD] & ((np.uint64(1) << np.uint64(avail)) - np.uint64(1))
    w = next_word(rng)
    rng[_WORD] = w
    rng[_AVAIL] = np.uint64(64 - need)
    lo = w >> np.uint64(64 - need)
    if need == 64:
        return lo
    return (hi << np.uint64(need)) | lo


@njit(cache=True, _nrt=False)
def bit_width(m):
    """ceil(log2 m) for m >= 1."""
    k = 0
    while (np.int64(1) << k) < m:
        k += 1
    return k


@njit(cache=True, _nrt=False)
def uniform_int(rng, m):
    """Exactly uniform integer in [0, m) by rejection on ceil(log2 m) bits."""
    k = bit_width(m)
    while True:
        x = np.int64(next_bits(rng, k))
        if x < m:
            return x


@njit(cache=True, _nrt=False)
def categorical_dyadic(rng, cum, exponent):
    """Index i with probability (cum[i+1] - cum[i]) / 2**exponent.

    Bits are read most-significant first and reading stops as soon as the
    dyadic interval spanned by the prefix sits inside a single category.
    """
    lo = np.int64(0)
    width = np.int64(1) << exponent
    ncat = len(cum) - 1
    for _ in range(exponent):
        width >>= 1
        if next_bits(rng, 1) == np.uint64(1):
            lo += width
        i = 0
        while not (cum[i] <= lo < cum[i + 1]):
            i += 1
        if lo + width <= cum[i + 1]:
            return i
    i = 0
    while not (cum[i] <= lo < cum[i + 1]):
        i += 1
    if i >= ncat:
        i = ncat - 1
    return i


@njit(cache=True, _nrt=False, inline="always")
def _scripted(script, m):
    pos = script[SCRIPT_POS]
    if pos < script[SCRIPT_LEN]:
        script[SCRIPT_POS] = pos + 1
        return script[SCRIPT_HEADER + pos]
    script[SCRIPT_NEED] = m
    return -1


@njit(cache=True, _nrt=False)
def choose(rng, script, m):
    """Uniform choice in [0, m); -1 means the script ran out."""
    if script[SCRIPT_MODE] == 0:
        return uniform_int(rng, m)
    return _scripted(script, m)


@njit(cache=True, _nrt=False)
def choose_dyadic(rng, script, cum, exponent):
    """Weighted choice over dyadic masses; -1 means the script ran out.

    A pending weighted choice is reported as ``-(number of categories)``.
    """
    if script[SCRIPT_MODE] == 0:
        return categorical_dyadic(rng, cum, exponent)
    return _scripted(script, -(len(cum) - 1))


def free_script() -> np.ndarray:
    """Script array selecting the live bit stream."""
    return np.zeros(SCRIPT_HEADER, dtype=np.int64)


def make_script(choices) -> np.ndarray:
    s = np.zeros(SCRIPT_HEADER + len(choices), dtype=np.int64)
    s[SCRIPT_MODE] = 1
    s[SCRIPT_LEN] = len(choices)
    s[SCRIPT_HEADER:] = choices
    return s


@dataclass(frozen=True)
class DyadicProbability:
    """``numerator / 2**exponent``, a probability with a finite binary expansion."""

    numerator: int
    exponent: int

    def __post_init__(self):
        if self.exponent < 0 or self.numerator < 0:
            raise ValueError("numerator and exponent must be nonnegative")
        if self.numerator > 1 << self.exponent:
            raise ValueError(f"{self.numerator}/2^{self.exponent} exceeds 1")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    @classmethod
    def from_fraction(cls, q: Fraction) -> DyadicProbability:
        q = Fraction(q)
        d = q.denominator
        if d & (d - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, d.bit_length() - 1)


class MeteredBitSource:
    """Deterministic stream of fair bits with an exact consumption counter.

    Not thread-safe; give each worker its own source (see :func:`derive_seed`).
    """

    def __init__(self, seed: int = 0):
        self.seed = seed & MASK64
        self.rng = np.zeros(RNG_LEN, dtype=np.uint64)
        self.rng[:4] = xoshiro_state(self.seed)
        self.script = free_script()

    @property
    def bits_consumed(self) -> int:
        return int(self.rng[_COUNT])

    def next_bit(self) -> int:
        return int(next_bits(self.rng, 1))

    def uniform_pow2(self, k: int) -> int:
        """Uniform integer in [0, 2**k); consumes exactly ``k`` bits."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        x = 0
        while k > 0:
            step = min(k, 64)
            x = (x << step) | int(next_bits(self.rng, step))
            k -= step
        return x

    def uniform(self, m: int) -> int:
        if m < 1:
            raise ValueError("m must be positive")
        if m >= 1 << 62:
            k = (m - 1).bit_length()
            while True:
                x = self.uniform_pow2(k)
                if x < m:
                    return x
        return int(uniform_int(self.rng, m))

    def trit(self) -> int:
        return self.uniform(3)

    def bernoulli(self, p: DyadicProbability) -> bool:
        """True with probability exactly ``p``.

        Compares a lazily drawn uniform ``0.b1b2...`` against the binary
        expansion of ``p``; reads at most ``p.exponent`` bits.
        """
        num, e = p.numerator, p.exponent
        if num == 1 << e:
            return True
        for j in range(1, e + 1):
            b = self.next_bit()
            pb = (num >> (e - j)) & 1
            if b != pb:
                return b < pb
        return False


class ChoiceScript:
    """Stand-in source that replays a fixed list of choice outcomes."""

    def __init__(self, choices):
        self.choices = list(choices)
        self.rng = np.zeros(RNG_LEN, dtype=np.uint64)
        self.script = make_script(self.choices)

    @property
    def pending(self) -> int:
        """Arity of the choice requested after the script ran out."""
        return int(self.script[SCRIPT_NEED])

    @property
    def bits_consumed(self) -> int:
        return 0
