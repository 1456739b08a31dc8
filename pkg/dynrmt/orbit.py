"""
Exact doubling-map dynamics on a stored binary expansion.

The doubling map T(x) = 2x mod 1 shifts the binary digits of x one place to
the left, so an orbit x, Tx, T^2x, ... is fully described by the digit
sequence d_1, d_2, ... of its starting point. Iterating 2x mod 1 in floating
point exhausts the 53 mantissa bits after 53 steps; here the digits are kept
as bits and only converted to a real number when a shift is evaluated.

Digits are drawn from a Philox counter-based generator, so an orbit is a
pure function of its seed, and any prefix of a longer orbit is the shorter
orbit with the same seed.
"""
import math
from dataclasses import dataclass, field

import numpy as np


MASK64 = 0xFFFFFFFFFFFFFFFF

# Digits carried by a double; shifts are evaluated at this precision unless
# a caller asks for more.
DEFAULT_PRECISION = 53


def philox(seed, *stream):
    """Return a Philox bit generator keyed by ``seed`` and an optional stream path.

    Distinct stream paths give statistically independent generators; the
    same (seed, stream) always gives the same generator.
    """
    entropy = [seed & MASK64] + [s & MASK64 for s in stream]
    key = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)
    return np.random.Philox(key=key)


def random_bits(bit_generator, count):
    "Draw ``count`` fair bits, in the order the generator emits them."
    words = bit_generator.random_raw((count + 63) // 64)
    raw = np.asarray(words, dtype='<u8').view(np.uint8)
    return np.unpackbits(raw, bitorder='little')[:count]


def default_window(N):
    "Dependence window used when a configuration leaves W unset."
    return max(53, int(math.ceil(3 * math.log2(N))))


def orbit_length(N, precision=DEFAULT_PRECISION):
    "Digits needed to evaluate every shift used by an N x N block."
    return 2 * N * N + precision


def _frozen(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class BitOrbit:
    digits: np.ndarray
    origin_seed: int

    @property
    def length(self):
        return len(self.digits)

    def digit(self, n):
        "The digit d_n, 1-based as in the binary expansion."
        if not 1 <= n <= self.length:
            raise IndexError("digit d_%d outside orbit of length %d" % (n, self.length))
        return int(self.digits[n - 1])

    def __repr__(self):
        return '<BitOrbit seed=%d length=%d>' % (self.origin_seed, self.length)


def sample_orbit(seed, length):
    "Sample the binary expansion of a uniformly distributed starting point."
    if length < 1:
        raise ValueError("orbit length must be positive, got %d" % length)
    digits = random_bits(philox(seed, 0), length)
    return BitOrbit(digits=_frozen(digits.astype(np.uint8)), origin_seed=seed)


def orbit_from_digits(digits, seed=0):
    "Wrap an explicit digit sequence; used for hand-built orbits."
    digits = np.array(digits, dtype=np.uint8)
    if digits.size and digits.max() > 1:
        raise ValueError("binary digits must be 0 or 1")
    return BitOrbit(digits=_frozen(digits), origin_seed=seed)


def _check_range(ks, precision, available):
    if ks.size == 0:
        return
    if ks.min() < 0:
        raise IndexError("negative shift %d" % ks.min())
    if ks.max() + precision > available:
        raise IndexError(
            "shift %d with precision %d needs %d digits; only %d available" % (
                ks.max(), precision, ks.max() + precision, available
            )
        )


def _check_precision(precision):
    if not 1 <= precision <= 64:
        raise ValueError("precision must lie in 1..64, got %d" % precision)


def shift_values(orbit, ks, precision=DEFAULT_PRECISION):
    """Evaluate T^k x truncated to ``precision`` digits for every k in ``ks``.

    The digits are accumulated as an unsigned 64-bit integer and converted
    to a double once; for precision <= 53 the result is exact.
    """
    _check_precision(precision)
    ks = np.asarray(ks, dtype=np.int64)
    _check_range(ks, precision, orbit.length)

    acc = np.zeros(ks.shape, dtype=np.uint64)
    one = np.uint64(1)
    for n in range(precision):
        acc = (acc << one) | orbit.digits[ks + n].astype(np.uint64)
    return acc.astype(np.float64) * 2.0 ** -precision


def shift_value(orbit, k, precision=DEFAULT_PRECISION):
    "T^k x as sum_{n=1..P} d_{n+k} 2^-n."
    return float(shift_values(orbit, [k], precision)[0])


##########################################################################
# Digit resampling
##########################################################################

@dataclass(frozen=True)
class ResampledOrbit:
    """The orbit with every shift's digits beyond the window redrawn.

    ``fresh_digits[k]`` holds the independent digits b^k_{W+1} ... b^k_P
    used for y_k; digits past the evaluation precision never influence a
    value and are not stored.
    """
    base: BitOrbit
    window: int
    fresh_digits: np.ndarray
    seed: int
    precision: int = DEFAULT_PRECISION
    index_count: int = field(default=0)

    def values(self, ks):
        "The resampled points y_k for every k in ``ks``."
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size and (ks.min() < 0 or ks.max() >= self.index_count):
            raise IndexError(
                "resampled index outside 0..%d" % (self.index_count - 1)
            )
        retained = min(self.window, self.precision)
        _check_range(ks, retained, self.base.length)

        acc = np.zeros(ks.shape, dtype=np.uint64)
        one = np.uint64(1)
        for n in range(self.precision):
            if n < retained:
                bits = self.base.digits[ks + n]
            else:
                bits = self.fresh_digits[ks, n - retained]
            acc = (acc << one) | bits.astype(np.uint64)
        return acc.astype(np.float64) * 2.0 ** -self.precision

    def value(self, k):
        return float(self.values([k])[0])


def resample(orbit, window, index_count, seed, precision=DEFAULT_PRECISION):
    """Resample every shift T^k x, 0 <= k < index_count, beyond ``window`` digits.

    y_k keeps d_{k+1} ... d_{k+W} and replaces the remaining digits by fresh
    coin flips that are independent across k; hence |y_k - T^k x| <= 2^-W and
    y_k, y_k' are independent once |k - k'| >= W.
    """
    _check_precision(precision)
    if window < 1:
        raise ValueError("resampling window must be positive, got %d" % window)
    if index_count < 1:
        raise ValueError("index count must be positive, got %d" % index_count)
    if index_count - 1 + min(window, precision) > orbit.length:
        raise IndexError(
            "orbit of length %d is too short for %d resampled indices with window %d" % (
                orbit.length, index_count, window
            )
        )

    tail = max(precision - window, 0)
    fresh = random_bits(philox(seed, 1), index_count * tail).reshape(index_count, tail)
    return ResampledOrbit(
        base=orbit,
        window=window,
        fresh_digits=_frozen(fresh.astype(np.uint8)),
        seed=seed,
        precision=precision,
        index_count=index_count,
    )
