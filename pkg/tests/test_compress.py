import random

import pytest

from unumkit import (
    Environment,
    PackedUbound,
    PackedUnum,
    decode,
    encode_exact,
    encode_tight,
    single,
)
from unumkit.compress import optimize, unify
from unumkit.exact import Dyadic, GeneralInterval, contains, fin
from unumkit.oracle import SideTables, enumerate_unums

E11 = Environment(1, 1)
E22 = Environment(2, 2)


@pytest.fixture(scope="module")
def tables11():
    return SideTables.build(E11)


@pytest.fixture(scope="module")
def tables22():
    return SideTables.build(E22)


def pattern(env, *fields):
    return PackedUnum(env, *fields)


# --- optimize ---------------------------------------------------------------


def test_optimize_drops_trailing_fraction_zeros():
    # 2.5 held at es=2, fs=4 shrinks to the es=1, fs=2 form, decode unchanged
    fat = single(pattern(E22, 0, 2, 4, 2, 4, 0))
    assert decode(fat) == GeneralInterval.point(Dyadic(5, -1))
    slim = optimize(fat)
    assert (slim.first.es, slim.first.fs) == (1, 2)
    assert slim.bit_length == 9
    assert decode(slim) == decode(fat)


def test_optimize_collapses_degenerate_pair():
    three = encode_exact(fin(3), E22)
    pair = PackedUbound(three, three)
    out = optimize(pair)
    assert not out.is_pair
    assert decode(out) == GeneralInterval.point(Dyadic(3))
    assert out.bit_length == 8


def test_optimize_is_idempotent_on_minimal_input():
    p = single(pattern(E22, 0, 1, 1, 1, 1, 1))
    assert optimize(p) == p


def test_optimize_preserves_window_width():
    # the interval is part of the value: fs may not shrink when that would
    # coarsen the ulp window
    w = single(pattern(E22, 0, 1, 2, 2, 3, 1))
    assert optimize(w).bit_length <= w.bit_length
    assert decode(optimize(w)) == decode(w)


def test_optimize_exhaustive_small_env(tables11):
    for p in enumerate_unums(E11):
        x = single(p)
        o = optimize(x)
        d = decode(x)
        assert decode(o) == d
        assert o.bit_length == tables11.min_bits_for(d)
        assert optimize(o) == o


def test_optimize_random_pairs(tables22):
    rng = random.Random(7)
    pats = list(enumerate_unums(E22))
    checked = 0
    while checked < 3000:
        try:
            x = PackedUbound(rng.choice(pats), rng.choice(pats))
        except ValueError:
            continue
        checked += 1
        o = optimize(x)
        d = decode(x)
        assert decode(o) == d
        assert o.bit_length == tables22.min_bits_for(d)
        assert optimize(o) == o


# --- unify --------------------------------------------------------------------


def test_unify_degenerate_pair_is_lossless():
    three = encode_exact(fin(3), E22)
    out = unify(PackedUbound(three, three))
    assert not out.is_pair
    assert decode(out) == GeneralInterval.point(Dyadic(3))
    assert out == optimize(PackedUbound(three, three))


def test_unify_keeps_precision_over_bits():
    # the exact point 2.5 is covered by the cheaper window (2,3), but the
    # width-zero representation wins: unify never widens needlessly
    p25 = encode_exact(fin(5, -1), E22)
    out = unify(PackedUbound(p25, p25))
    assert decode(out) == GeneralInterval.point(Dyadic(5, -1))
    assert out.bit_length == 9


def test_unify_uncoverable_interval_falls_back():
    # no single {2,2} unum covers (2.5, 3.5); exhaustive search over all
    # patterns confirms, so unify returns the optimized input unchanged
    g = GeneralInterval(fin(5, -1), True, fin(7, -1), True)
    x = encode_tight(g, E22)
    out = unify(x)
    assert out.is_pair
    assert decode(out) == decode(x)
    assert out == optimize(x)


def test_unify_uncoverable_closed_interval_falls_back(tables22):
    g = GeneralInterval(fin(1), False, fin(2), False)
    x = encode_tight(g, E22)
    assert tables22.tightest_cover(decode(x)) is None
    out = unify(x)
    assert out == optimize(x)
    assert decode(out) == g


def test_unify_covering_window():
    # [448, 480] has no exact-width window; the tightest cover is (384, 512)
    x = PackedUbound(encode_exact(fin(7, 6), E22), encode_exact(fin(15, 5), E22))
    out = unify(x)
    assert not out.is_pair
    assert decode(out) == GeneralInterval(fin(3, 7), True, fin(1, 9), True)


def test_unify_top_boundary_window():
    g = GeneralInterval(fin(31, 4), True, fin(1, 9), True)  # (496, 512)
    x = encode_tight(g, E22)
    out = unify(x)
    assert not out.is_pair
    assert decode(out) == GeneralInterval(fin(15, 5), True, fin(1, 9), True)


def test_unify_infinite_tail():
    from unumkit.exact import POS_INF

    # a closed endpoint past the top boundary is only covered out to +inf
    g = GeneralInterval(fin(31, 4), True, fin(1, 9), False)  # (496, 512]
    x = encode_tight(g, E22)
    assert decode(x) == GeneralInterval(fin(15, 5), True, POS_INF, True)
    assert unify(x) == x

    top = encode_tight(GeneralInterval(fin(500), True, fin(600), True), E22)
    out = unify(top)
    assert not out.is_pair
    assert decode(out) == GeneralInterval(fin(15, 5), True, POS_INF, True)


def test_unify_zero_spanning_has_no_cover(tables22):
    x = PackedUbound(encode_exact(fin(-1), E22), encode_exact(fin(1), E22))
    assert tables22.tightest_cover(decode(x)) is None
    out = unify(x)
    assert out == optimize(x)


def test_unify_nan():
    nan = single(pattern(E22, 0, 15, 15, 4, 4, 1))
    out = unify(nan)
    assert decode(out).nan and not out.is_pair


def test_unify_exhaustive_small_env(tables11):
    for p in enumerate_unums(E11):
        x = single(p)
        d = decode(x)
        u = unify(x)
        assert contains(decode(u), d)
        want = tables11.tightest_cover(d)
        if want is None:
            assert decode(u) == decode(optimize(x))
        else:
            assert not u.is_pair and u.first == want
            assert u.bit_length <= optimize(x).bit_length
        assert unify(u) == u


def test_unify_random_pairs(tables22):
    rng = random.Random(11)
    pats = list(enumerate_unums(E22))
    checked = 0
    while checked < 2000:
        try:
            x = PackedUbound(rng.choice(pats), rng.choice(pats))
        except ValueError:
            continue
        checked += 1
        d = decode(x)
        u = unify(x)
        assert contains(decode(u), d)
        want = tables22.tightest_cover(d)
        if want is None:
            assert decode(u) == decode(optimize(x))
        else:
            assert not u.is_pair and u.first == want
        assert unify(u) == u


def test_unify_bits_never_exceed_optimize_when_cover_exists(tables22):
    rng = random.Random(13)
    pats = list(enumerate_unums(E22))
    checked = 0
    while checked < 2000:
        try:
            x = PackedUbound(rng.choice(pats), rng.choice(pats))
        except ValueError:
            continue
        checked += 1
        if tables22.tightest_cover(decode(x)) is not None:
            assert unify(x).bit_length <= optimize(x).bit_length
