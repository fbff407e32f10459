"""Bit-exact unum representations and conversions to and from intervals.

Packed values are the variable-width interchange form
``sign | exponent(es) | fraction(fs) | ubit | es-1 | fs-1``; unpacked values
are the fixed 64-bit internal form with summary bits used by the ALU model.

Decode semantics
----------------
utag size fields store es-1 and fs-1, so field sizes are at least 1.  With
``bias = 2**(es-1) - 1``:

* ``e == 0`` is subnormal: magnitude ``2**(1-bias) * f * 2**-fs``;
* otherwise magnitude ``2**(e-bias) * (1 + f * 2**-fs)``;
* the all-ones exponent and fraction at the environment's maximal es AND fs
  encode +-infinity (ubit clear) or NaN (ubit set); at any smaller size the
  all-ones pattern is an ordinary finite value;
* a set ubit denotes the open interval one ulp wide extending away from
  zero, ``(x, x + ulp)`` for non-negative ``x`` and ``(x - ulp, x)`` for
  negative ``x``, with ``ulp = 2**(max(e,1) - bias - fs)``;
* the inexact pattern one step below the infinity pattern runs to infinity:
  it decodes to ``(maxreal, +inf)`` (mirrored for the negative side).

Both zero patterns decode to exact 0; the +0 pattern is canonical and the
-0 pattern is accepted on input but never produced for exact zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

from .env import Environment
from .exact import (
    NAN_INTERVAL,
    NEG_INF,
    POS_INF,
    Dyadic,
    ExtendedReal,
    GeneralInterval,
)


class EnvironmentMismatch(ValueError):
    """Operands from different environments were combined."""


# ---------------------------------------------------------------------------
# Packed forms


@dataclass(frozen=True, slots=True)
class PackedUnum:
    """A single unum: float fields plus the self-descriptive utag.

    ``exponent`` and ``fraction`` are the raw field values (``es`` and ``fs``
    bits wide); the utag stores ``es - 1`` and ``fs - 1``.
    """

    env: Environment
    sign: int
    exponent: int
    fraction: int
    es: int
    fs: int
    ubit: int

    def __post_init__(self) -> None:
        env = self.env
        if not 1 <= self.es <= env.max_es:
            raise ValueError(f"es {self.es} out of range for {env}")
        if not 1 <= self.fs <= env.max_fs:
            raise ValueError(f"fs {self.fs} out of range for {env}")
        if self.sign not in (0, 1) or self.ubit not in (0, 1):
            raise ValueError("sign and ubit must be single bits")
        if not 0 <= self.exponent < (1 << self.es):
            raise ValueError(f"exponent field {self.exponent} does not fit {self.es} bits")
        if not 0 <= self.fraction < (1 << self.fs):
            raise ValueError(f"fraction field {self.fraction} does not fit {self.fs} bits")

    @property
    def bit_length(self) -> int:
        return 2 + self.es + self.fs + self.env.a + self.env.b

    def to_int(self) -> int:
        """Field concatenation, MSB first: sign|e|f|ubit|es-1|fs-1."""
        v = self.sign
        v = (v << self.es) | self.exponent
        v = (v << self.fs) | self.fraction
        v = (v << 1) | self.ubit
        v = (v << self.env.a) | (self.es - 1)
        v = (v << self.env.b) | (self.fs - 1)
        return v

    def to_text(self) -> str:
        return f"u{self.env}:{self.to_int():0{self.bit_length}b}"

    @classmethod
    def from_bits(cls, env: Environment, bits: str) -> "PackedUnum":
        """Parse an MSB-first binary string; its length fixes es and fs."""
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"bad bit string {bits!r}")
        v = int(bits, 2)
        fsm1 = v & ((1 << env.b) - 1)
        v >>= env.b
        esm1 = v & ((1 << env.a) - 1)
        v >>= env.a
        es, fs = esm1 + 1, fsm1 + 1
        if len(bits) != 2 + es + fs + env.a + env.b:
            raise ValueError(
                f"bit string length {len(bits)} inconsistent with es={es}, fs={fs}"
            )
        ubit = v & 1
        v >>= 1
        fraction = v & ((1 << fs) - 1)
        v >>= fs
        exponent = v & ((1 << es) - 1)
        v >>= es
        return cls(env, v & 1, exponent, fraction, es, fs, ubit)

    @classmethod
    def from_text(cls, text: str) -> "PackedUnum":
        head, _, bits = text.partition(":")
        if not head.startswith("u") or not bits:
            raise ValueError(f"bad unum text {text!r}")
        return cls.from_bits(Environment.parse(head[1:]), bits)

    def __str__(self) -> str:
        return self.to_text()


UBOUND_JOINER = "⋈"  # bowtie; ASCII fallback is "><"


@dataclass(frozen=True, slots=True)
class PackedUbound:
    """A single unum, or a pair of unums bounding a general interval.

    In a pair the first unum contributes the lower side of its decoded
    interval and the second the upper side.  NaN never appears inside a
    pair, and the pair's sides must not be inverted or empty.
    """

    first: PackedUnum
    second: PackedUnum | None = None

    def __post_init__(self) -> None:
        if self.second is None:
            return
        if self.second.env != self.first.env:
            raise EnvironmentMismatch(
                f"{self.first.env} paired with {self.second.env}"
            )
        d1 = decode_unum(self.first)
        d2 = decode_unum(self.second)
        if d1.nan or d2.nan:
            raise ValueError("NaN cannot be part of a ubound pair")
        c = d1.lo.cmp(d2.hi)
        if c > 0:
            raise ValueError(f"inverted ubound: {d1.lo} > {d2.hi}")
        if c == 0 and (d1.lo_open or d2.hi_open):
            raise ValueError("empty ubound: equal open endpoints")

    @property
    def env(self) -> Environment:
        return self.first.env

    @property
    def is_pair(self) -> bool:
        return self.second is not None

    @property
    def bit_length(self) -> int:
        n = self.first.bit_length
        if self.second is not None:
            n += self.second.bit_length
        return n

    def to_text(self, ascii_join: bool = False) -> str:
        if self.second is None:
            return self.first.to_text()
        joiner = "><" if ascii_join else UBOUND_JOINER
        return f"{self.first.to_text()}{joiner}{self.second.to_text()}"

    @classmethod
    def from_text(cls, text: str) -> "PackedUbound":
        for joiner in (UBOUND_JOINER, "><"):
            if joiner in text:
                a, _, b = text.partition(joiner)
                return cls(PackedUnum.from_text(a), PackedUnum.from_text(b))
        return cls(PackedUnum.from_text(text))

    def __str__(self) -> str:
        return self.to_text()


def single(p: PackedUnum) -> PackedUbound:
    return PackedUbound(p)


# ---------------------------------------------------------------------------
# Decode


def _is_top_format(p: PackedUnum) -> bool:
    return p.es == p.env.max_es and p.fs == p.env.max_fs


@lru_cache(maxsize=1 << 16)
def decode_unum(p: PackedUnum) -> GeneralInterval:
    """Exact interval denoted by one packed unum."""
    emax = (1 << p.es) - 1
    fmax = (1 << p.fs) - 1
    top = _is_top_format(p)
    if top and p.exponent == emax and p.fraction == fmax:
        if p.ubit:
            return NAN_INTERVAL
        return GeneralInterval.point(NEG_INF if p.sign else POS_INF)
    bias = (1 << (p.es - 1)) - 1
    if p.exponent == 0:
        mag = Dyadic(p.fraction, 1 - bias - p.fs)
        ulp_e = 1 - bias - p.fs
    else:
        mag = Dyadic((1 << p.fs) + p.fraction, p.exponent - bias - p.fs)
        ulp_e = p.exponent - bias - p.fs
    x = -mag if p.sign else mag
    if not p.ubit:
        return GeneralInterval.point(ExtendedReal.finite(x))
    if top and p.exponent == emax and p.fraction == fmax - 1:
        # one step below the infinity pattern: open out to infinity
        if p.sign:
            return GeneralInterval(NEG_INF, True, ExtendedReal.finite(x), True)
        return GeneralInterval(ExtendedReal.finite(x), True, POS_INF, True)
    ulp = Dyadic(1, ulp_e)
    if p.sign:
        return GeneralInterval(
            ExtendedReal.finite(x - ulp), True, ExtendedReal.finite(x), True
        )
    return GeneralInterval(
        ExtendedReal.finite(x), True, ExtendedReal.finite(x + ulp), True
    )


def decode(v: PackedUnum | PackedUbound) -> GeneralInterval:
    """Decoded interval of a unum or ubound."""
    if isinstance(v, PackedUnum):
        return decode_unum(v)
    if v.second is None:
        return decode_unum(v.first)
    d1 = decode_unum(v.first)
    d2 = decode_unum(v.second)
    return GeneralInterval(d1.lo, d1.lo_open, d2.hi, d2.hi_open)


# ---------------------------------------------------------------------------
# Format grids.  All helpers below work on non-negative magnitudes; signs are
# applied by the callers.


def _fmt_params(es: int) -> tuple[int, int, int]:
    """(bias, lowest normal exponent, top exponent) for an es-bit exponent."""
    bias = (1 << (es - 1)) - 1
    return bias, 1 - bias, 1 << (es - 1)


def _pattern_fields(
    w: Dyadic, es: int, fs: int, env: Environment
) -> tuple[int, int] | None:
    """(e, f) fields representing magnitude ``w`` exactly, or None.

    The infinity/NaN slot at the environment's maximal format is not a value
    and is reported as not representable.
    """
    if w.is_zero():
        return 0, 0
    if w.sign() < 0:
        raise ValueError("magnitude expected")
    bias, emin, etop = _fmt_params(es)
    E = w.floor_log2()
    if E > etop:
        return None
    if E >= emin:
        shift = w.e + fs - E
        if shift < 0:
            return None
        f = (w.m << shift) - (1 << fs)
        e = E + bias
    else:
        shift = w.e + fs - emin
        if shift < 0:
            return None
        f = w.m << shift
        e = 0
    if (
        es == env.max_es
        and fs == env.max_fs
        and e == (1 << es) - 1
        and f == (1 << fs) - 1
    ):
        return None
    return e, f


def _min_fs_exact(w: Dyadic, es: int, env: Environment) -> int | None:
    """Smallest fs at which magnitude ``w`` has an exact pattern at ``es``."""
    if w.is_zero():
        return 1
    bias, emin, etop = _fmt_params(es)
    E = w.floor_log2()
    if E > etop:
        return None
    fs = max(1, (E if E >= emin else emin) - w.e)
    if fs > env.max_fs:
        return None
    if _pattern_fields(w, es, fs, env) is None:  # infinity slot
        return None
    return fs


def _exact_pattern(
    x: Dyadic, es: int, fs: int, env: Environment, ubit: int = 0
) -> PackedUnum:
    fields = _pattern_fields(abs(x), es, fs, env)
    if fields is None:
        raise ValueError(f"{x} has no pattern at es={es}, fs={fs} in {env}")
    sign = 1 if x.sign() < 0 else 0
    return PackedUnum(env, sign, fields[0], fields[1], es, fs, ubit)


def _pred_pattern(w: Dyadic, es: int, fs: int, env: Environment) -> tuple[int, int]:
    """Fields of the grid predecessor of on-grid magnitude ``w > 0``."""
    fields = _pattern_fields(w, es, fs, env)
    if fields is None:
        raise ValueError(f"{w} is not on the es={es}, fs={fs} grid")
    e, f = fields
    if f > 0:
        return e, f - 1
    if e == 0:
        raise ValueError("zero has no predecessor")
    return e - 1, (1 << fs) - 1


def _grid_floor(w: Dyadic, es: int, fs: int, env: Environment) -> Dyadic:
    """Largest grid magnitude <= ``w`` at format (es, fs); grids include 0."""
    if w.sign() <= 0:
        raise ValueError("positive magnitude expected")
    bias, emin, etop = _fmt_params(es)
    top_q = (1 << (fs + 1)) - 1
    if es == env.max_es and fs == env.max_fs:
        top_q -= 1  # all-ones is the infinity slot, top value is maxreal
    E = w.floor_log2()
    if E > etop:
        return Dyadic(top_q, etop - fs)
    step_e = (E if E >= emin else emin) - fs
    if w.e >= step_e:
        q = w.m << (w.e - step_e)
    else:
        q = w.m >> (step_e - w.e)
    if E == etop and q > top_q:
        q = top_q
    return Dyadic(q, step_e)


def _lattice_fields(w: Dyadic, env: Environment) -> tuple[int, int] | None:
    return _pattern_fields(w, env.max_es, env.max_fs, env)


def lattice_contains(x: Dyadic, env: Environment) -> bool:
    """True iff ``x`` is an exact value of some unum pattern in ``env``.

    The exact values of every (es, fs) format coincide with the grid of the
    maximal format, so one membership test suffices.
    """
    return _lattice_fields(abs(x), env) is not None


def maxreal(env: Environment) -> Dyadic:
    """Largest finite value, one fraction step below the infinity pattern."""
    _, _, etop = _fmt_params(env.max_es)
    return Dyadic((1 << (env.max_fs + 1)) - 2, etop - env.max_fs)


def smallest_pos(env: Environment) -> Dyadic:
    """Smallest positive value: the bottom subnormal step of the max format."""
    _, emin, _ = _fmt_params(env.max_es)
    return Dyadic(1, emin - env.max_fs)


def _beyond(env: Environment) -> Dyadic | None:
    """The open-side value just past the top binade, 2**(etop+1).

    It is never an exact value, but it is the outward end of the ubit window
    of the all-ones patterns at the top exponent, so it is available as an
    open interval side.  Environments with b = 0 have no such patterns.
    """
    if env.max_fs < 2:
        return None
    _, _, etop = _fmt_params(env.max_es)
    return Dyadic(1, etop + 1)


def _mag_step_down(v: Dyadic, env: Environment) -> Dyadic:
    """Lattice predecessor of on-lattice magnitude ``v > 0`` (may be 0)."""
    e, f = _pred_pattern(v, env.max_es, env.max_fs, env)
    bias, emin, _ = _fmt_params(env.max_es)
    fs = env.max_fs
    if e == 0:
        return Dyadic(f, emin - fs)
    return Dyadic((1 << fs) + f, e - bias - fs)


def _lattice_below(t: Dyadic, env: Environment) -> Dyadic | None:
    """Largest lattice value strictly below ``t``, or None."""
    s = t.sign()
    if s > 0:
        fl = _grid_floor(t, env.max_es, env.max_fs, env)
        if fl.cmp(t) < 0:
            return fl
        return _mag_step_down(fl, env)
    if s == 0:
        return -smallest_pos(env)
    mag = abs(t)
    mr = maxreal(env)
    if mag.cmp(mr) >= 0:
        return None
    fl = _grid_floor(mag, env.max_es, env.max_fs, env)
    if fl.cmp(mag) > 0:  # cannot happen: floor <= mag
        raise AssertionError
    if fl.cmp(mag) == 0:
        succ = _lattice_above(mag, env)
        return -succ if succ is not None else None
    succ = _lattice_above(fl, env)
    return -succ if succ is not None else None


def _lattice_above(t: Dyadic, env: Environment) -> Dyadic | None:
    """Smallest lattice value strictly above ``t``, or None."""
    s = t.sign()
    if s < 0:
        below = _lattice_below(abs(t), env)
        return -below if below is not None else None
    if s == 0:
        return smallest_pos(env)
    mr = maxreal(env)
    if t.cmp(mr) >= 0:
        return None
    fl = _grid_floor(t, env.max_es, env.max_fs, env)
    fields = _pattern_fields(fl, env.max_es, env.max_fs, env)
    e, f = fields
    fs = env.max_fs
    bias, emin, _ = _fmt_params(env.max_es)
    if f < (1 << fs) - 1:
        f += 1
    else:
        e += 1
        f = 0
    if (
        e == (1 << env.max_es) - 1
        and f == (1 << fs) - 1
    ):
        return None  # next step is the infinity slot
    if e == 0:
        return Dyadic(f, emin - fs)
    return Dyadic((1 << fs) + f, e - bias - fs)


# ---------------------------------------------------------------------------
# Interval sides and their unum realizations


def tighten(g: GeneralInterval, env: Environment) -> GeneralInterval:
    """Tightest interval with ``env``-representable sides that contains ``g``.

    Each side is rounded outward: onto the lattice for closed sides, and onto
    the set of reachable open-side values otherwise.  The reachable open-side
    values are the lattice points, +-infinity, and the just-past-the-top
    binade boundary described by :func:`_beyond`.
    """
    if g.nan:
        return NAN_INTERVAL
    beyond = _beyond(env)

    lo, lo_open = g.lo, g.lo_open
    if lo.is_finite and not lattice_contains(lo.dyadic, env):
        t = lo.dyadic
        if lo_open and beyond is not None and t == -beyond:
            pass  # the mirrored top-boundary side is reachable as-is
        else:
            v = _lattice_below(t, env)
            if v is None and beyond is not None and (-beyond).cmp(t) < 0:
                v = -beyond
            lo = ExtendedReal.finite(v) if v is not None else NEG_INF
            lo_open = True

    hi, hi_open = g.hi, g.hi_open
    if hi.is_finite and not lattice_contains(hi.dyadic, env):
        t = hi.dyadic
        if hi_open and beyond is not None and t == beyond:
            pass  # the top-boundary side is reachable as-is
        else:
            v = _lattice_above(t, env)
            if v is None and beyond is not None and beyond.cmp(t) > 0:
                v = beyond
            hi = ExtendedReal.finite(v) if v is not None else POS_INF
            hi_open = True

    return GeneralInterval(lo, lo_open, hi, hi_open)


def _nan_unum(env: Environment) -> PackedUnum:
    es, fs = env.max_es, env.max_fs
    return PackedUnum(env, 0, (1 << es) - 1, (1 << fs) - 1, es, fs, 1)


def _inf_unum(env: Environment, sign: int) -> PackedUnum:
    es, fs = env.max_es, env.max_fs
    return PackedUnum(env, sign, (1 << es) - 1, (1 << fs) - 1, es, fs, 0)


def _inf_edge_unum(env: Environment, sign: int) -> PackedUnum:
    """The inexact pattern whose window runs out to +-infinity."""
    es, fs = env.max_es, env.max_fs
    return PackedUnum(env, sign, (1 << es) - 1, (1 << fs) - 2, es, fs, 1)


def _min_exact_unum(x: Dyadic, env: Environment, ubit: int = 0) -> PackedUnum:
    """Fewest-bits pattern for exact value ``x`` (smallest es on ties)."""
    best = None
    for es in range(1, env.max_es + 1):
        fs = _min_fs_exact(abs(x), es, env)
        if fs is None:
            continue
        if best is None or es + fs < best[0] + best[1]:
            best = (es, fs)
    if best is None:
        raise ValueError(f"{x} is not representable in {env}")
    return _exact_pattern(x, best[0], best[1], env, ubit)


def _min_window_below(v: Dyadic, env: Environment, sign: int) -> PackedUnum:
    """Fewest-bits inexact unum whose window's outward end equals ``v > 0``.

    With sign 0 this realizes an open upper side at ``v``; with sign 1 the
    mirrored pattern realizes an open lower side at ``-v``.
    """
    best = None
    for es in range(1, env.max_es + 1):
        _, _, etop = _fmt_params(es)
        if v.m == 1 and v.e == etop + 1:
            # just past this es's top binade: reached by all-ones patterns
            if es == env.max_es and env.max_fs < 2:
                continue
            fs, boundary = 1, True
        else:
            fs, boundary = _min_fs_exact(v, es, env), False
        if fs is None:
            continue
        if best is None or es + fs < best[0] + best[1]:
            best = (es, fs, boundary)
    if best is None:
        raise ValueError(f"no inexact window ends at {v} in {env}")
    es, fs, boundary = best
    if boundary:
        e, f = (1 << es) - 1, (1 << fs) - 1
    else:
        e, f = _pred_pattern(v, es, fs, env)
    return PackedUnum(env, sign, e, f, es, fs, 1)


def realize_lower(
    value: ExtendedReal, is_open: bool, env: Environment, raw: bool = False
) -> PackedUnum:
    """A unum whose decoded interval has the requested lower side.

    ``raw`` asks for the maximal-precision realization instead of the
    fewest-bits one.
    """
    if value.is_nan:
        raise ValueError("NaN is not an interval side")
    if value.kind == "+inf":
        if is_open:
            raise ValueError("open lower side at +inf")
        return _inf_unum(env, 0)
    if value.kind == "-inf":
        return _inf_edge_unum(env, 1) if is_open else _inf_unum(env, 1)
    x = value.dyadic
    if not is_open:
        if raw:
            return _exact_pattern(x, env.max_es, env.max_fs, env)
        return _min_exact_unum(x, env)
    if x.sign() >= 0:
        if raw:
            return _exact_pattern(x, env.max_es, env.max_fs, env, ubit=1)
        return _min_exact_unum(x, env, ubit=1)
    # negative open lower side: mirrored outward window end
    if raw:
        return _raw_window_below(abs(x), env, 1)
    return _min_window_below(abs(x), env, 1)


def realize_upper(
    value: ExtendedReal, is_open: bool, env: Environment, raw: bool = False
) -> PackedUnum:
    """A unum whose decoded interval has the requested upper side."""
    if value.is_nan:
        raise ValueError("NaN is not an interval side")
    if value.kind == "-inf":
        if is_open:
            raise ValueError("open upper side at -inf")
        return _inf_unum(env, 1)
    if value.kind == "+inf":
        return _inf_edge_unum(env, 0) if is_open else _inf_unum(env, 0)
    x = value.dyadic
    if not is_open:
        if raw:
            return _exact_pattern(x, env.max_es, env.max_fs, env)
        return _min_exact_unum(x, env)
    if x.is_zero():
        # the window below zero belongs to the negative zero pattern
        if raw:
            return PackedUnum(env, 1, 0, 0, env.max_es, env.max_fs, 1)
        return PackedUnum(env, 1, 0, 0, 1, 1, 1)
    if x.sign() < 0:
        if raw:
            return _exact_pattern(x, env.max_es, env.max_fs, env, ubit=1)
        return _min_exact_unum(x, env, ubit=1)
    if raw:
        return _raw_window_below(x, env, 0)
    return _min_window_below(x, env, 0)


def _raw_window_below(v: Dyadic, env: Environment, sign: int) -> PackedUnum:
    """Maximal-precision counterpart of :func:`_min_window_below`."""
    es = env.max_es
    fields = _pattern_fields(v, es, env.max_fs, env)
    if fields is not None:
        e, f = _pred_pattern(v, es, env.max_fs, env)
        return PackedUnum(env, sign, e, f, es, env.max_fs, 1)
    _, _, etop = _fmt_params(es)
    if v.m == 1 and v.e == etop + 1 and env.max_fs >= 2:
        fs = env.max_fs - 1
        return PackedUnum(env, sign, (1 << es) - 1, (1 << fs) - 1, es, fs, 1)
    raise ValueError(f"no inexact window ends at {v} in {env}")


def _single_window(R: GeneralInterval, env: Environment) -> PackedUnum | None:
    """Fewest-bits single unum decoding exactly to open interval ``R``."""
    if not (R.lo_open and R.hi_open):
        return None
    if R.hi.kind == "+inf":
        if R.lo.is_finite and R.lo.dyadic == maxreal(env):
            return _inf_edge_unum(env, 0)
        return None
    if R.lo.kind == "-inf":
        if R.hi.is_finite and R.hi.dyadic == -maxreal(env):
            return _inf_edge_unum(env, 1)
        return None
    lo, hi = R.lo.dyadic, R.hi.dyadic
    if lo.sign() < 0 and hi.sign() > 0:
        return None
    sign = 0
    if hi.sign() <= 0:
        sign = 1
        lo, hi = -hi, -lo
    # want an exact part at lo whose ulp equals the width
    width = hi - lo
    if width.m != 1:
        return None
    best = None
    for es in range(1, env.max_es + 1):
        _, emin, etop = _fmt_params(es)
        if lo.is_zero():
            fs = emin - width.e
        else:
            E = lo.floor_log2()
            if E > etop:
                continue
            fs = (E if E >= emin else emin) - width.e
        if not 1 <= fs <= env.max_fs:
            continue
        fields = _pattern_fields(lo, es, fs, env)
        if fields is None:
            continue
        cand = PackedUnum(env, sign, fields[0], fields[1], es, fs, 1)
        if decode_unum(cand) != R:
            continue
        if best is None or es + fs < best.es + best.fs:
            best = cand
    return best


def express(R: GeneralInterval, env: Environment, minimal: bool = True) -> PackedUbound:
    """Represent an interval whose sides are already ``env``-representable.

    With ``minimal`` the result has the fewest total packed bits among all
    representations with identical decode, collapsing to a single unum when
    one exists; otherwise both sides are realized at maximal precision and
    kept as a pair (the pre-compression datapath form).
    """
    if R.nan:
        return single(_nan_unum(env))
    if R.is_point():
        v = R.lo
        if v.kind == "+inf":
            u = _inf_unum(env, 0)
        elif v.kind == "-inf":
            u = _inf_unum(env, 1)
        elif minimal:
            u = _min_exact_unum(v.dyadic, env)
        else:
            u = _exact_pattern(v.dyadic, env.max_es, env.max_fs, env)
        return single(u) if minimal else PackedUbound(u, u)
    if minimal:
        w = _single_window(R, env)
        if w is not None:
            both = PackedUbound(
                realize_lower(R.lo, R.lo_open, env),
                realize_upper(R.hi, R.hi_open, env),
            )
            if both.bit_length < w.bit_length:
                return both
            return single(w)
    lo_u = realize_lower(R.lo, R.lo_open, env, raw=not minimal)
    hi_u = realize_upper(R.hi, R.hi_open, env, raw=not minimal)
    return PackedUbound(lo_u, hi_u)


def encode_tight(g: GeneralInterval, env: Environment) -> PackedUbound:
    """Smallest representable superset of ``g``, in fewest bits.

    Endpoints are rounded outward onto representable sides; the result
    collapses to a single unum whenever one has the identical decode.
    """
    return express(tighten(g, env), env, minimal=True)


def encode_exact(x: ExtendedReal, env: Environment) -> PackedUnum | None:
    """Maximal-precision exact unum for ``x``, or None if off the lattice.

    ``None`` is a normal outcome: callers use this to probe exactness.
    NaN input is a contract violation.
    """
    if x.is_nan:
        raise ValueError("encode_exact of NaN")
    if x.kind == "+inf":
        return _inf_unum(env, 0)
    if x.kind == "-inf":
        return _inf_unum(env, 1)
    fields = _lattice_fields(abs(x.dyadic), env)
    if fields is None:
        return None
    sign = 1 if x.dyadic.sign() < 0 else 0
    return PackedUnum(env, sign, fields[0], fields[1], env.max_es, env.max_fs, 0)


# ---------------------------------------------------------------------------
# Unpacked internal form (64-bit slots, 128-bit register images)

_FRACTION_SLOT = 32
_EXPONENT_SLOT = 16


@dataclass(frozen=True, slots=True)
class UnpackedUnum:
    """Fixed-width internal unum: raw fields plus redundant summary bits.

    The fraction is left-aligned in its 32-bit slot (``fs`` significant
    bits).  Summary bits cache NaN / +-infinity / exact-zero detection and
    the pairing flag; they are derived from the fields, never authoritative.
    """

    sign: int
    exponent: int
    fraction: int
    es: int
    fs: int
    ubit: int
    nan: bool = False
    inf: bool = False
    zero: bool = False
    second: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.es <= 16 or not 1 <= self.fs <= 32:
            raise ValueError(f"es={self.es}, fs={self.fs} out of the unpacked range")
        if not 0 <= self.exponent < (1 << self.es):
            raise ValueError("exponent field out of range")
        if self.fraction & ~(((1 << self.fs) - 1) << (_FRACTION_SLOT - self.fs)):
            raise ValueError("fraction has bits outside its fs-wide field")

    def to_word(self) -> int:
        """64-bit slot: pad|nan|inf|zero|second|ubit|sign|es-1|fs-1|e|f."""
        v = 0  # pad bit
        for flag in (self.nan, self.inf, self.zero, self.second):
            v = (v << 1) | int(flag)
        v = (v << 1) | self.ubit
        v = (v << 1) | self.sign
        v = (v << 4) | (self.es - 1)
        v = (v << 5) | (self.fs - 1)
        v = (v << _EXPONENT_SLOT) | self.exponent
        v = (v << _FRACTION_SLOT) | self.fraction
        return v

    @classmethod
    def from_word(cls, word: int) -> "UnpackedUnum":
        if not 0 <= word < (1 << 64):
            raise ValueError("unpacked slot must fit 64 bits")
        if word >> 63:
            raise ValueError("pad bit set in unpacked slot")
        fraction = word & ((1 << _FRACTION_SLOT) - 1)
        word >>= _FRACTION_SLOT
        exponent = word & ((1 << _EXPONENT_SLOT) - 1)
        word >>= _EXPONENT_SLOT
        fs = (word & 0x1F) + 1
        word >>= 5
        es = (word & 0xF) + 1
        word >>= 4
        sign = word & 1
        word >>= 1
        ubit = word & 1
        word >>= 1
        second = bool(word & 1)
        word >>= 1
        zero = bool(word & 1)
        word >>= 1
        inf = bool(word & 1)
        word >>= 1
        nan = bool(word & 1)
        return cls(sign, exponent, fraction, es, fs, ubit, nan, inf, zero, second)


def unpack(p: PackedUnum) -> UnpackedUnum:
    """Widen to the internal form, deriving summary bits from the decode."""
    d = decode_unum(p)
    is_inf = not d.nan and d.is_point() and d.lo.is_inf
    is_zero = not d.nan and d.is_point() and d.lo.is_finite and d.lo.dyadic.is_zero()
    return UnpackedUnum(
        sign=p.sign,
        exponent=p.exponent,
        fraction=p.fraction << (_FRACTION_SLOT - p.fs),
        es=p.es,
        fs=p.fs,
        ubit=p.ubit,
        nan=d.nan,
        inf=is_inf,
        zero=is_zero,
    )


def pack(u: UnpackedUnum, env: Environment) -> PackedUnum:
    """Narrow to the interchange form, dropping the summary bits."""
    if u.es > env.max_es or u.fs > env.max_fs:
        raise ValueError(f"es={u.es}, fs={u.fs} exceeds {env}")
    return PackedUnum(
        env,
        u.sign,
        u.exponent,
        u.fraction >> (_FRACTION_SLOT - u.fs),
        u.es,
        u.fs,
        u.ubit,
    )


def expand(u: UnpackedUnum, env: Environment) -> UnpackedUnum:
    """Re-encode at the environment's maximal precision, decode unchanged.

    Exact values always expand.  An inexact unum expands only when its ulp
    window coincides with the maximal format's window at that exponent;
    otherwise the interval is not expressible in one maximal-format unum and
    ValueError is raised.
    """
    p = pack(u, env)
    d = decode_unum(p)
    if d.nan:
        raise ValueError("expand of NaN")
    if p.es == env.max_es and p.fs == env.max_fs:
        out = p
    elif not p.ubit:
        if d.lo.is_inf:
            out = _inf_unum(env, p.sign)
        else:
            out = _exact_pattern(d.lo.dyadic, env.max_es, env.max_fs, env)
    else:
        anchor = d.hi if p.sign else d.lo
        fields = _pattern_fields(abs(anchor.dyadic), env.max_es, env.max_fs, env)
        if fields is None:
            raise ValueError(f"{d} has no maximal-precision representation")
        out = PackedUnum(env, p.sign, fields[0], fields[1], env.max_es, env.max_fs, 1)
        if decode_unum(out) != d:
            raise ValueError(f"{d} has no maximal-precision representation")
    res = unpack(out)
    return replace(res, second=u.second)


# ---------------------------------------------------------------------------
# 128-bit register images


def ubound_to_image(ub: PackedUbound) -> int:
    """128-bit register image: first unum in the upper slot."""
    first = replace(unpack(ub.first), second=ub.second is not None)
    image = first.to_word() << 64
    if ub.second is not None:
        image |= replace(unpack(ub.second), second=True).to_word()
    return image


def image_to_ubound(env: Environment, image: int) -> PackedUbound:
    """Parse and validate a 128-bit register image."""
    if not 0 <= image < (1 << 128):
        raise ValueError("register image must fit 128 bits")
    if image == 0:
        # the defined empty pattern: reads as a single exact zero
        return PackedUbound(PackedUnum(env, 0, 0, 0, 1, 1, 0))
    hi_word = image >> 64
    lo_word = image & ((1 << 64) - 1)
    first_u = UnpackedUnum.from_word(hi_word)
    first = pack(first_u, env)
    _check_summary(first_u, first)
    if lo_word == 0:
        if first_u.second:
            raise ValueError("pairing flag set but second slot is empty")
        return PackedUbound(first)
    second_u = UnpackedUnum.from_word(lo_word)
    if not (first_u.second and second_u.second):
        raise ValueError("ubound image requires the pairing flag in both slots")
    second = pack(second_u, env)
    _check_summary(second_u, second)
    return PackedUbound(first, second)


def _check_summary(u: UnpackedUnum, p: PackedUnum) -> None:
    ref = unpack(p)
    if (u.nan, u.inf, u.zero) != (ref.nan, ref.inf, ref.zero):
        raise ValueError("summary bits contradict the field decode")


def image_to_hex(image: int) -> str:
    return f"{image:032x}"


def hex_to_image(text: str) -> int:
    text = text.strip()
    if len(text) != 32:
        raise ValueError(f"register image needs 32 hex digits, got {len(text)}")
    return int(text, 16)
