"""Addition and subtraction on unums and ubounds.

Results are the tightest representable supersets of the exact interval sum:
an endpoint that cannot be represented exactly is rounded outward and its
ubit set, and when both exact endpoints are representable each result ubit
is simply the OR of the contributing operand ubits.  ``add`` applies the
lossless re-encoding pass implicitly, mirroring a datapath that compresses
after every operation; ``add_raw`` exposes the uncompressed two-unum form.
"""

from __future__ import annotations

from dataclasses import replace

from .codec import (
    EnvironmentMismatch,
    PackedUbound,
    PackedUnum,
    decode,
    express,
    single,
    tighten,
)
from .exact import interval_add, interval_neg


def _check_envs(x: PackedUbound, y: PackedUbound) -> None:
    if x.env != y.env:
        raise EnvironmentMismatch(f"{x.env} vs {y.env}")


def add_raw(x: PackedUbound, y: PackedUbound) -> PackedUbound:
    """Sum before compression: both bounds at maximal precision."""
    _check_envs(x, y)
    return express(tighten(interval_add(decode(x), decode(y)), x.env), x.env, minimal=False)


def add(x: PackedUbound, y: PackedUbound) -> PackedUbound:
    """Tightest-containment sum with the implicit lossless compression."""
    _check_envs(x, y)
    return express(tighten(interval_add(decode(x), decode(y)), x.env), x.env, minimal=True)


def _negate_unum(p: PackedUnum) -> PackedUnum:
    d = p
    if d.ubit and d.es == p.env.max_es and d.fs == p.env.max_fs:
        emax = (1 << d.es) - 1
        fmax = (1 << d.fs) - 1
        if d.exponent == emax and d.fraction == fmax:
            return replace(d, sign=0)  # NaN stays the canonical quiet pattern
    if not d.ubit and d.exponent == 0 and d.fraction == 0:
        return replace(d, sign=0)  # exact zero is its own negation, +0 form
    return replace(d, sign=1 - d.sign)


def negate(x: PackedUbound) -> PackedUbound:
    """Mirror through zero: flip signs and swap the pair order."""
    if x.second is None:
        return single(_negate_unum(x.first))
    return PackedUbound(_negate_unum(x.second), _negate_unum(x.first))


def sub(x: PackedUbound, y: PackedUbound) -> PackedUbound:
    """Difference, defined as ``add(x, negate(y))`` bit for bit."""
    return add(x, negate(y))


def interval_of_sum(x: PackedUbound, y: PackedUbound):
    """Exact interval sum of the decoded operands (no rounding)."""
    _check_envs(x, y)
    return interval_add(decode(x), decode(y))


__all__ = [
    "add",
    "add_raw",
    "sub",
    "negate",
    "interval_of_sum",
    "interval_neg",
]
