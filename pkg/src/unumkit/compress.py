"""Unum-specific compression: lossless ``optimize`` and lossy ``unify``.

``optimize`` re-encodes to the fewest total packed bits with the decoded
interval unchanged, collapsing a two-unum ubound into one unum whenever a
single unum has the identical decode.

``unify`` replaces a value by a single unum that contains it, preferring the
tightest such cover, then the fewest bits, then the smaller lower endpoint.
When no single unum covers the interval it falls back to ``optimize``,
returning the input's semantics unchanged; the fallback is this library's
choice of behavior for the uncoverable case.  Unification never violates
containment, but the cover is usually wider than the input, which is the
price of halving the storage.
"""

from __future__ import annotations

from typing import Iterator

from .codec import (
    PackedUbound,
    PackedUnum,
    _fmt_params,
    _grid_floor,
    _inf_edge_unum,
    _min_exact_unum,
    _nan_unum,
    _pattern_fields,
    decode,
    decode_unum,
    express,
    single,
)
from .env import Environment
from .exact import Dyadic, GeneralInterval, contains, interval_neg


def optimize(x: PackedUbound) -> PackedUbound:
    """Fewest-bits representation with the identical decoded interval."""
    return express(decode(x), x.env, minimal=True)


def _better(a: PackedUnum, b: PackedUnum) -> PackedUnum:
    """Cover preference: narrower interval, then fewer bits, then lower lo."""
    da, db = decode_unum(a), decode_unum(b)
    wa, wb = da.width(), db.width()
    if wa.is_finite != wb.is_finite:
        return a if wa.is_finite else b
    if wa.is_finite:
        c = wa.dyadic.cmp(wb.dyadic)
        if c:
            return a if c < 0 else b
    if a.bit_length != b.bit_length:
        return a if a.bit_length < b.bit_length else b
    c = da.lo.cmp(db.lo)
    if c:
        return a if c < 0 else b
    return a


def _is_inf_edge(u: PackedUnum) -> bool:
    env = u.env
    return (
        u.ubit == 1
        and u.es == env.max_es
        and u.fs == env.max_fs
        and u.exponent == (1 << u.es) - 1
        and u.fraction == (1 << u.fs) - 2
    )


def _covers(cand: PackedUnum, positive_target: GeneralInterval, sign: int) -> bool:
    d = decode_unum(cand)
    goal = positive_target if sign == 0 else interval_neg(positive_target)
    return contains(d, goal)


def _format_window(
    lo: Dyadic,
    target: GeneralInterval,
    es: int,
    fs: int,
    env: Environment,
    sign: int,
) -> PackedUnum | None:
    """The only candidate window at (es, fs): the one whose open start is the
    grid floor of the target's lower endpoint."""
    if lo.is_zero():
        if not target.lo_open:
            return None
        v = Dyadic(0)
    else:
        v = _grid_floor(lo, es, fs, env)
        if v.cmp(lo) == 0 and not target.lo_open:
            return None  # a closed endpoint cannot sit on the open window edge
    fields = _pattern_fields(v, es, fs, env)
    if fields is None:
        return None
    cand = PackedUnum(env, sign, fields[0], fields[1], es, fs, 1)
    return cand if _covers(cand, target, sign) else None


def _positive_covers(
    target: GeneralInterval, env: Environment, sign: int
) -> Iterator[PackedUnum]:
    """Per-format tightest single-unum covers of a non-negative interval."""
    lo = target.lo.dyadic
    span = target.hi.dyadic - lo
    for es in range(1, env.max_es + 1):
        _, emin, etop = _fmt_params(es)
        if lo.is_zero():
            width_exp = emin
        else:
            E = lo.floor_log2()
            if E > etop:
                continue
            width_exp = max(E, emin)
        fs = min(env.max_fs, max(1, width_exp - span.floor_log2() + 1))
        while fs >= 1:
            cand = _format_window(lo, target, es, fs, env, sign)
            fs -= 1
            if cand is None:
                continue
            yield cand
            if not _is_inf_edge(cand):
                break  # ordinary windows only get wider at smaller fs


def unify(x: PackedUbound) -> PackedUbound:
    """Merge into the single unum best covering the value, if one exists."""
    env = x.env
    R = decode(x)
    if R.nan:
        return single(_nan_unum(env))
    if R.is_point():
        if R.lo.is_inf:
            return express(R, env, minimal=True)
        return single(_min_exact_unum(R.lo.dyadic, env))

    if R.hi.kind == "+inf":
        if R.hi_open:
            cand = _inf_edge_unum(env, 0)
            if contains(decode_unum(cand), R):
                return single(cand)
        return optimize(x)
    if R.lo.kind == "-inf":
        if R.lo_open:
            cand = _inf_edge_unum(env, 1)
            if contains(decode_unum(cand), R):
                return single(cand)
        return optimize(x)

    lo_sign = R.lo.dyadic.sign()
    hi_sign = R.hi.dyadic.sign()
    if lo_sign < 0 and hi_sign > 0:
        return optimize(x)  # no single window spans zero
    if (lo_sign == 0 and not R.lo_open) or (hi_sign == 0 and not R.hi_open):
        return optimize(x)  # windows touching zero are open there

    if hi_sign <= 0:
        sign = 1
        target = interval_neg(R)
    else:
        sign = 0
        target = R

    best: PackedUnum | None = None
    for cand in _positive_covers(target, env, sign):
        best = cand if best is None else _better(best, cand)
    if best is None:
        return optimize(x)
    return single(best)


__all__ = ["optimize", "unify"]
