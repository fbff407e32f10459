"""Exact dyadic arithmetic and general open/closed intervals.

Every finite unum value is a dyadic rational m * 2**e, and dyadics are closed
under addition and negation, so this module can serve as the exact semantic
ground truth with no rounding anywhere.  A :class:`GeneralInterval` is the set
of reals a unum or ubound denotes; NaN-ness is a property of the whole
interval, never of an endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Dyadic:
    """Arbitrary-precision dyadic rational, value = m * 2**e.

    Canonical form: ``m`` is odd or zero, and zero is stored as (0, 0).
    The constructor normalizes, so ``Dyadic(4, 0) == Dyadic(1, 2)``.
    """

    m: int
    e: int = 0

    def __post_init__(self) -> None:
        m, e = self.m, self.e
        if m == 0:
            e = 0
        else:
            shift = (m & -m).bit_length() - 1
            if shift:
                m >>= shift
                e += shift
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "e", e)

    @classmethod
    def from_int(cls, n: int) -> "Dyadic":
        return cls(n, 0)

    @classmethod
    def from_float(cls, x: float) -> "Dyadic":
        """Exact conversion; floats are a subset of the dyadics."""
        if not math.isfinite(x):
            raise ValueError(f"cannot convert {x!r} to a dyadic")
        num, den = x.as_integer_ratio()
        return cls(num, -(den.bit_length() - 1))

    def is_zero(self) -> bool:
        return self.m == 0

    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)

    def floor_log2(self) -> int:
        """Largest k with 2**k <= |self|; undefined for zero."""
        if self.m == 0:
            raise ValueError("floor_log2 of zero")
        return self.e + abs(self.m).bit_length() - 1

    def __add__(self, other: "Dyadic") -> "Dyadic":
        if self.m == 0:
            return other
        if other.m == 0:
            return self
        e = min(self.e, other.e)
        return Dyadic((self.m << (self.e - e)) + (other.m << (other.e - e)), e)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.m, self.e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.m * other.m, self.e + other.e)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.m), self.e)

    def half(self) -> "Dyadic":
        return Dyadic(self.m, self.e - 1)

    def cmp(self, other: "Dyadic") -> int:
        return (self - other).sign()

    def __lt__(self, other: "Dyadic") -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: "Dyadic") -> bool:
        return self.cmp(other) <= 0

    def __gt__(self, other: "Dyadic") -> bool:
        return self.cmp(other) > 0

    def __ge__(self, other: "Dyadic") -> bool:
        return self.cmp(other) >= 0

    def to_float(self) -> float:
        """Nearest double, saturating to +-inf on overflow (reporting only)."""
        if self.m == 0:
            return 0.0
        mag = abs(self.m)
        shift = max(0, mag.bit_length() - 54)
        try:
            return math.ldexp(self.sign() * (mag >> shift), self.e + shift)
        except OverflowError:
            return math.inf if self.m > 0 else -math.inf

    def __str__(self) -> str:
        return f"{self.m}*2^{self.e}"


ZERO = Dyadic(0)

_FINITE = "finite"
_POS_INF = "+inf"
_NEG_INF = "-inf"
_NAN = "nan"


@dataclass(frozen=True, slots=True)
class ExtendedReal:
    """A dyadic, +-infinity, or NaN.

    NaN never appears inside a GeneralInterval endpoint; it exists here so
    encoders can take any decoded scalar.
    """

    kind: str
    value: Dyadic | None = None

    def __post_init__(self) -> None:
        if self.kind == _FINITE:
            if self.value is None:
                raise ValueError("finite ExtendedReal needs a dyadic value")
        elif self.kind in (_POS_INF, _NEG_INF, _NAN):
            if self.value is not None:
                raise ValueError(f"{self.kind} carries no dyadic value")
        else:
            raise ValueError(f"bad ExtendedReal kind {self.kind!r}")

    @classmethod
    def finite(cls, d: Dyadic) -> "ExtendedReal":
        return cls(_FINITE, d)

    @property
    def is_finite(self) -> bool:
        return self.kind == _FINITE

    @property
    def is_nan(self) -> bool:
        return self.kind == _NAN

    @property
    def is_inf(self) -> bool:
        return self.kind in (_POS_INF, _NEG_INF)

    @property
    def dyadic(self) -> Dyadic:
        if self.value is None:
            raise ValueError(f"{self} has no dyadic value")
        return self.value

    def neg(self) -> "ExtendedReal":
        if self.kind == _FINITE:
            return ExtendedReal.finite(-self.value)
        if self.kind == _POS_INF:
            return NEG_INF
        if self.kind == _NEG_INF:
            return POS_INF
        return self

    def cmp(self, other: "ExtendedReal") -> int:
        """Total order on non-NaN values: -inf < finite < +inf."""
        if self.is_nan or other.is_nan:
            raise ValueError("NaN is unordered")
        a = -1 if self.kind == _NEG_INF else (1 if self.kind == _POS_INF else 0)
        b = -1 if other.kind == _NEG_INF else (1 if other.kind == _POS_INF else 0)
        if a != b:
            return -1 if a < b else 1
        if a != 0:
            return 0
        return self.value.cmp(other.value)

    def __lt__(self, other: "ExtendedReal") -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: "ExtendedReal") -> bool:
        return self.cmp(other) <= 0

    def __str__(self) -> str:
        return str(self.value) if self.kind == _FINITE else self.kind


POS_INF = ExtendedReal(_POS_INF)
NEG_INF = ExtendedReal(_NEG_INF)
NAN = ExtendedReal(_NAN)


def fin(m: int, e: int = 0) -> ExtendedReal:
    """Shorthand for a finite endpoint m * 2**e."""
    return ExtendedReal.finite(Dyadic(m, e))


@dataclass(frozen=True, slots=True)
class GeneralInterval:
    """A set of extended reals: an interval with per-endpoint openness, or NaN.

    Endpoints are never NaN.  A degenerate interval (lo == hi) must be closed
    on both sides; it may sit at +-infinity, which represents the exact
    infinite value itself.  An infinite endpoint of a non-degenerate interval
    may be open (a limit that is not attained) or closed (the infinity belongs
    to the set, as when an exact infinity bounds a ubound).
    """

    lo: ExtendedReal
    lo_open: bool
    hi: ExtendedReal
    hi_open: bool
    nan: bool = False

    def __post_init__(self) -> None:
        if self.nan:
            object.__setattr__(self, "lo", NAN)
            object.__setattr__(self, "hi", NAN)
            object.__setattr__(self, "lo_open", False)
            object.__setattr__(self, "hi_open", False)
            return
        if self.lo.is_nan or self.hi.is_nan:
            raise ValueError("NaN endpoint; use the nan flag instead")
        c = self.lo.cmp(self.hi)
        if c > 0:
            raise ValueError(f"inverted interval: {self.lo} > {self.hi}")
        if c == 0 and (self.lo_open or self.hi_open):
            raise ValueError("degenerate interval must be closed on both sides")
        if self.lo.kind == _POS_INF and c != 0:
            raise ValueError("lower endpoint +inf")
        if self.hi.kind == _NEG_INF and c != 0:
            raise ValueError("upper endpoint -inf")

    @classmethod
    def point(cls, x: ExtendedReal | Dyadic) -> "GeneralInterval":
        if isinstance(x, Dyadic):
            x = ExtendedReal.finite(x)
        if x.is_nan:
            return NAN_INTERVAL
        return cls(x, False, x, False)

    @classmethod
    def make_nan(cls) -> "GeneralInterval":
        return cls(NAN, False, NAN, False, nan=True)

    def is_point(self) -> bool:
        return not self.nan and self.lo.cmp(self.hi) == 0

    def width(self) -> ExtendedReal:
        """hi - lo; zero for points (including the infinite points)."""
        if self.nan:
            raise ValueError("width of NaN interval")
        if self.is_point():
            return ExtendedReal.finite(ZERO)
        if self.lo.is_inf or self.hi.is_inf:
            return POS_INF
        return ExtendedReal.finite(self.hi.dyadic - self.lo.dyadic)

    def midpoint(self) -> ExtendedReal:
        if self.nan:
            raise ValueError("midpoint of NaN interval")
        if self.is_point():
            return self.lo
        if self.lo.is_inf or self.hi.is_inf:
            raise ValueError("midpoint of unbounded interval")
        return ExtendedReal.finite((self.lo.dyadic + self.hi.dyadic).half())

    def __str__(self) -> str:
        if self.nan:
            return "NaN"
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        return f"{lb}{self.lo}, {self.hi}{rb}"


NAN_INTERVAL = GeneralInterval.make_nan()


def _endpoint_add(
    av: ExtendedReal, ao: bool, bv: ExtendedReal, bo: bool
) -> tuple[ExtendedReal, bool] | None:
    """Sum of one endpoint pair; None signals inf + (-inf), i.e. NaN.

    An attained (closed) infinity absorbs whatever it is added to, so the
    result endpoint is closed; otherwise openness is the OR of the operand
    openness flags.
    """
    if av.is_inf or bv.is_inf:
        if av.is_inf and bv.is_inf and av.kind != bv.kind:
            return None
        inf = av if av.is_inf else bv
        attained = (av.is_inf and not ao) or (bv.is_inf and not bo)
        return inf, not attained
    return ExtendedReal.finite(av.dyadic + bv.dyadic), ao or bo


def interval_add(p: GeneralInterval, q: GeneralInterval) -> GeneralInterval:
    """Exact interval sum; bounds are handled independently."""
    if p.nan or q.nan:
        return NAN_INTERVAL
    lo = _endpoint_add(p.lo, p.lo_open, q.lo, q.lo_open)
    hi = _endpoint_add(p.hi, p.hi_open, q.hi, q.hi_open)
    if lo is None or hi is None:
        return NAN_INTERVAL
    return GeneralInterval(lo[0], lo[1], hi[0], hi[1])


def interval_neg(p: GeneralInterval) -> GeneralInterval:
    """Mirror the interval through zero, swapping endpoints and openness."""
    if p.nan:
        return NAN_INTERVAL
    return GeneralInterval(p.hi.neg(), p.hi_open, p.lo.neg(), p.lo_open)


def contains(p: GeneralInterval, q: GeneralInterval) -> bool:
    """True iff every member of q is a member of p; NaN contains only NaN."""
    if q.nan:
        return p.nan
    if p.nan:
        return False
    c = p.lo.cmp(q.lo)
    if c > 0 or (c == 0 and p.lo_open and not q.lo_open):
        return False
    c = p.hi.cmp(q.hi)
    if c < 0 or (c == 0 and p.hi_open and not q.hi_open):
        return False
    return True
