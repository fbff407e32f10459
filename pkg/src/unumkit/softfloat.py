"""Round-to-nearest-even binary16/binary32 arithmetic on exact dyadics.

Just enough of IEEE-style soft float for the accumulation benchmark: exact
dyadic inputs are rounded into the format, sums are computed exactly and
re-rounded, and overflow saturates to infinity.  NaN only appears through
inf - inf, which the benchmark never produces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import NAN, NEG_INF, POS_INF, Dyadic, ExtendedReal


@dataclass(frozen=True, slots=True)
class FloatFormat:
    name: str
    precision: int  # significand bits, hidden bit included
    emax: int
    bits: int

    @property
    def emin(self) -> int:
        return 1 - self.emax

    @property
    def max_finite(self) -> Dyadic:
        return Dyadic((1 << self.precision) - 1, self.emax - self.precision + 1)


BINARY16 = FloatFormat("f16", 11, 15, 16)
BINARY32 = FloatFormat("f32", 24, 127, 32)


def round_nearest_even(x: Dyadic, fmt: FloatFormat) -> ExtendedReal:
    """Round an exact dyadic into the format; overflow gives +-infinity."""
    if x.is_zero():
        return ExtendedReal.finite(x)
    neg = x.sign() < 0
    w = abs(x)
    E = w.floor_log2()
    quantum = max(E, fmt.emin) - (fmt.precision - 1)
    if w.e >= quantum:
        mag = w
    else:
        shift = quantum - w.e
        quot, rem = w.m >> shift, w.m & ((1 << shift) - 1)
        half = 1 << (shift - 1)
        if rem > half or (rem == half and quot & 1):
            quot += 1
        mag = Dyadic(quot, quantum)
    if mag.cmp(fmt.max_finite) > 0:
        return NEG_INF if neg else POS_INF
    return ExtendedReal.finite(-mag if neg else mag)


def soft_add(a: ExtendedReal, b: ExtendedReal, fmt: FloatFormat) -> ExtendedReal:
    if a.is_nan or b.is_nan:
        return NAN
    if a.is_inf or b.is_inf:
        if a.is_inf and b.is_inf and a.kind != b.kind:
            return NAN
        return a if a.is_inf else b
    return round_nearest_even(a.dyadic + b.dyadic, fmt)
