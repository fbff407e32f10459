import pytest
from hypothesis import given, strategies as st

from unumkit import (
    Environment,
    NEG_INF,
    POS_INF,
    NAN,
    PackedUbound,
    PackedUnum,
    UnpackedUnum,
    decode,
    encode_exact,
    encode_tight,
    expand,
    maxreal,
    maxubits,
    pack,
    single,
    smallest_pos,
    unpack,
)
from unumkit.codec import (
    hex_to_image,
    image_to_hex,
    image_to_ubound,
    lattice_contains,
    tighten,
    ubound_to_image,
)
from unumkit.exact import Dyadic, GeneralInterval, contains, fin
from unumkit.oracle import enumerate_unums

E11 = Environment(1, 1)
E22 = Environment(2, 2)
E45 = Environment(4, 5)


@st.composite
def packed_unums(draw, env=E45):
    es = draw(st.integers(1, env.max_es))
    fs = draw(st.integers(1, env.max_fs))
    return PackedUnum(
        env,
        draw(st.integers(0, 1)),
        draw(st.integers(0, (1 << es) - 1)),
        draw(st.integers(0, (1 << fs) - 1)),
        es,
        fs,
        draw(st.integers(0, 1)),
    )


# --- decode ---------------------------------------------------------------


def test_decode_zero_pattern_any_env():
    for env in (E11, E22, E45):
        p = PackedUnum(env, 0, 0, 0, 1, 1, 0)
        assert decode(p) == GeneralInterval.point(Dyadic(0))


def test_decode_exact_three():
    p = PackedUnum(E22, 0, 1, 1, 1, 1, 0)
    assert decode(p) == GeneralInterval.point(Dyadic(3))


def test_decode_inexact_three_four():
    p = PackedUnum(E22, 0, 1, 1, 1, 1, 1)
    assert decode(p) == GeneralInterval(fin(3), True, fin(4), True)


def test_decode_negative_zero():
    assert decode(PackedUnum(E22, 1, 0, 0, 1, 1, 0)) == GeneralInterval.point(Dyadic(0))
    # -0 with the ubit is the open window just below zero
    d = decode(PackedUnum(E22, 1, 0, 0, 4, 4, 1))
    assert d == GeneralInterval(fin(-1, -10), True, fin(0), True)


def test_decode_specials():
    top = PackedUnum(E22, 0, 15, 15, 4, 4, 0)
    assert decode(top) == GeneralInterval.point(POS_INF)
    assert decode(PackedUnum(E22, 1, 15, 15, 4, 4, 0)) == GeneralInterval.point(NEG_INF)
    assert decode(PackedUnum(E22, 0, 15, 15, 4, 4, 1)).nan
    edge = PackedUnum(E22, 0, 15, 14, 4, 4, 1)
    assert decode(edge) == GeneralInterval(fin(15, 5), True, POS_INF, True)


def test_all_ones_below_top_format_is_finite():
    # at smaller es/fs the all-ones pattern is an ordinary value
    p = PackedUnum(E22, 0, 15, 7, 4, 3, 0)
    assert decode(p) == GeneralInterval.point(Dyadic(15, 5))  # 480
    w = PackedUnum(E22, 0, 15, 7, 4, 3, 1)
    assert decode(w) == GeneralInterval(fin(15, 5), True, fin(1, 9), True)  # (480, 512)


def test_constants():
    assert maxreal(E22) == Dyadic(15, 5)
    assert smallest_pos(E22) == Dyadic(1, -10)


# --- encode_exact ---------------------------------------------------------


def test_encode_exact_simple_dyadic():
    p = encode_exact(fin(3, -1), E45)
    assert p is not None and p.ubit == 0
    assert (p.es, p.fs) == (16, 32)
    assert decode(p) == GeneralInterval.point(Dyadic(3, -1))


def test_encode_exact_underflow_is_none():
    assert encode_exact(fin(1, -100000), E22) is None


def test_encode_exact_infinity_pattern():
    p = encode_exact(POS_INF, E22)
    assert (p.sign, p.exponent, p.fraction, p.es, p.fs, p.ubit) == (0, 15, 15, 4, 4, 0)


def test_encode_exact_nan_rejected():
    with pytest.raises(ValueError):
        encode_exact(NAN, E22)


def test_lattice_membership_matches_enumeration():
    values = set()
    for p in enumerate_unums(E11):
        d = decode(p)
        if not d.nan and d.is_point() and d.lo.is_finite:
            values.add(d.lo.dyadic)
    for v in values:
        assert lattice_contains(v, E11)
    # off-lattice by precision, by fine scale and by range
    assert not lattice_contains(Dyadic(9, -2), E11)  # 2.25 needs three fraction bits
    assert not lattice_contains(Dyadic(1, -100), E11)
    assert not lattice_contains(Dyadic(1, 100), E11)


# --- encode_tight ---------------------------------------------------------


def test_tight_point_three_is_single_exact():
    ub = encode_tight(GeneralInterval.point(Dyadic(3)), E22)
    assert not ub.is_pair
    assert ub.first.ubit == 0
    assert decode(ub) == GeneralInterval.point(Dyadic(3))


def test_tight_off_lattice_point_is_one_ulp_window():
    # 341/1024 is just above 1/3 and on no {2,2} lattice point
    g = GeneralInterval.point(Dyadic(341, -10))
    ub = encode_tight(g, E22)
    d = decode(ub)
    assert not ub.is_pair and ub.first.ubit == 1
    assert contains(d, g)
    assert d == GeneralInterval(fin(21, -6), True, fin(11, -5), True)
    assert d.width().dyadic == Dyadic(1, -6)  # exactly one ulp


def test_tight_closed_interval_is_exact_pair():
    g = GeneralInterval(fin(3), False, fin(5), False)
    ub = encode_tight(g, E22)
    assert ub.is_pair
    assert ub.first.ubit == 0 and ub.second.ubit == 0
    assert decode(ub) == g


def test_tight_beyond_maxreal():
    # 496 sits between maxreal and the top-binade boundary 512
    d = decode(encode_tight(GeneralInterval.point(Dyadic(496)), E22))
    assert d == GeneralInterval(fin(15, 5), True, fin(1, 9), True)
    d = decode(encode_tight(GeneralInterval.point(Dyadic(600)), E22))
    assert d == GeneralInterval(fin(15, 5), True, POS_INF, True)
    d = decode(encode_tight(GeneralInterval.point(Dyadic(-600)), E22))
    assert d == GeneralInterval(NEG_INF, True, fin(-15, 5), True)


def test_tight_nan():
    from unumkit.exact import NAN_INTERVAL

    ub = encode_tight(NAN_INTERVAL, E22)
    assert not ub.is_pair and decode(ub).nan


@given(packed_unums(env=E22))
def test_tighten_is_identity_on_decodes(p):
    d = decode(p)
    if d.nan:
        assert tighten(d, E22).nan
    else:
        assert tighten(d, E22) == d


small_dyadics = st.builds(
    Dyadic,
    st.integers(min_value=-(1 << 20), max_value=1 << 20),
    st.integers(min_value=-16, max_value=12),
)


@given(small_dyadics, small_dyadics, st.booleans(), st.booleans())
def test_encode_tight_always_contains(a, b, lo_open, hi_open):
    lo, hi = sorted([a, b])
    if lo == hi:
        lo_open = hi_open = False
    g = GeneralInterval(fin(lo.m, lo.e), lo_open, fin(hi.m, hi.e), hi_open)
    for env in (E11, E22, E45):
        assert contains(decode(encode_tight(g, env)), g)


def test_encode_tight_sides_match_enumeration_oracle():
    import random

    from unumkit.oracle import SideTables

    tables = SideTables.build(E11)
    rng = random.Random(23)
    for _ in range(3000):
        a = Dyadic(rng.randint(-1 << 12, 1 << 12), rng.randint(-8, 4))
        b = Dyadic(rng.randint(-1 << 12, 1 << 12), rng.randint(-8, 4))
        lo, hi = sorted([a, b])
        lo_open = rng.random() < 0.5
        hi_open = rng.random() < 0.5
        if lo == hi:
            lo_open = hi_open = False
        g = GeneralInterval(fin(lo.m, lo.e), lo_open, fin(hi.m, hi.e), hi_open)
        d = decode(encode_tight(g, E11))
        assert (d.lo, d.lo_open) == tables.best_lower(g.lo, g.lo_open)
        assert (d.hi, d.hi_open) == tables.best_upper(g.hi, g.hi_open)


# --- pack / unpack / expand ------------------------------------------------


def test_pack_unpack_roundtrip_exhaustive_small():
    for p in enumerate_unums(E11):
        u = unpack(p)
        assert pack(u, E11) == p
        assert UnpackedUnum.from_word(u.to_word()) == u


@given(packed_unums())
def test_pack_unpack_roundtrip_large_env(p):
    u = unpack(p)
    assert pack(u, E45) == p
    assert UnpackedUnum.from_word(u.to_word()) == u


def test_summary_bits():
    assert unpack(PackedUnum(E22, 0, 0, 0, 2, 2, 0)).zero
    assert unpack(PackedUnum(E22, 0, 15, 15, 4, 4, 1)).nan
    assert unpack(PackedUnum(E22, 1, 15, 15, 4, 4, 0)).inf
    u = unpack(PackedUnum(E22, 0, 1, 1, 1, 1, 1))
    assert not (u.nan or u.inf or u.zero or u.second)


def test_unpacked_fraction_left_aligned():
    u = unpack(PackedUnum(E22, 0, 1, 1, 1, 1, 0))
    assert u.fraction == 1 << 31
    assert (u.es, u.fs) == (1, 1)


def test_expand_identity_at_maximum():
    p = PackedUnum(E22, 0, 9, 5, 4, 4, 1)
    assert expand(unpack(p), E22) == unpack(p)


def test_expand_value_three():
    u = expand(unpack(PackedUnum(E22, 0, 1, 1, 1, 1, 0)), E22)
    assert (u.es, u.fs) == (4, 4)
    assert decode(pack(u, E22)) == GeneralInterval.point(Dyadic(3))


def test_expand_subnormal_normalizes():
    # smallest positive value of (es=1, fs=1): subnormal 1
    p = PackedUnum(E22, 0, 0, 1, 1, 1, 0)
    assert decode(p) == GeneralInterval.point(Dyadic(1))
    u = expand(unpack(p), E22)
    assert u.exponent != 0  # normal form at maximal precision
    assert decode(pack(u, E22)) == GeneralInterval.point(Dyadic(1))


@pytest.mark.parametrize("env", [E11, E22])
def test_expand_exhaustive_small_env(env):
    # expand preserves the decode whenever the interval is expressible at
    # maximal precision, and refuses exactly when no such pattern exists
    max_decodes = {}
    for p in enumerate_unums(env):
        if (p.es, p.fs) == (env.max_es, env.max_fs):
            d = decode(p)
            key = "nan" if d.nan else (d.lo, d.lo_open, d.hi, d.hi_open)
            max_decodes[key] = p
    for p in enumerate_unums(env):
        d = decode(p)
        if d.nan:
            with pytest.raises(ValueError):
                expand(unpack(p), env)
            continue
        key = (d.lo, d.lo_open, d.hi, d.hi_open)
        try:
            u = expand(unpack(p), env)
        except ValueError:
            assert key not in max_decodes
        else:
            assert (u.es, u.fs) == (env.max_es, env.max_fs)
            assert decode(pack(u, env)) == d
    # every exact value expands
    for p in enumerate_unums(env):
        if p.ubit == 0:
            expand(unpack(p), env)


# --- sizes ------------------------------------------------------------------


def test_bit_lengths_within_bounds():
    for env in (E11, E22):
        for p in enumerate_unums(env):
            assert p.bit_length <= maxubits(env)
    big = encode_exact(POS_INF, E45)
    assert big.bit_length == maxubits(E45) == 59
    pair = PackedUbound(big, big)
    assert pair.bit_length == 2 * maxubits(E45)


# --- text and register images -----------------------------------------------


def test_text_roundtrip():
    p = PackedUnum(E22, 0, 1, 1, 1, 1, 1)
    assert p.to_text() == "u{2,2}:01110000"
    assert PackedUnum.from_text(p.to_text()) == p
    ub = PackedUbound(
        PackedUnum(E22, 0, 1, 0, 1, 1, 0), PackedUnum(E22, 0, 1, 1, 1, 1, 0)
    )
    assert PackedUbound.from_text(ub.to_text()) == ub
    assert PackedUbound.from_text(ub.to_text(ascii_join=True)) == ub
    assert "><" in ub.to_text(ascii_join=True)


def test_image_roundtrip_single_and_pair():
    p = single(PackedUnum(E45, 0, 3, 1, 2, 1, 0))
    img = ubound_to_image(p)
    assert image_to_ubound(E45, img) == p
    hx = image_to_hex(img)
    assert len(hx) == 32
    assert hex_to_image(hx) == img

    lo = encode_exact(fin(1), E45)
    hi = encode_exact(fin(2), E45)
    ub = PackedUbound(lo, hi)
    img = ubound_to_image(ub)
    assert image_to_ubound(E45, img) == ub
    # first unum sits in the upper 64-bit slot
    assert (img >> 64) != 0


def test_image_validation():
    lo = encode_exact(fin(1), E45)
    img = ubound_to_image(PackedUbound(lo, lo))
    # clearing the pairing flag of the second slot corrupts the image
    bad = img & ~(1 << 59)
    with pytest.raises(ValueError):
        image_to_ubound(E45, bad)
    with pytest.raises(ValueError):
        hex_to_image("123")  # wrong digit count
    # a lying zero summary bit is rejected
    one = ubound_to_image(single(lo))
    lying = one | (1 << (60 + 64))
    with pytest.raises(ValueError):
        image_to_ubound(E45, lying)


# --- structural validation ---------------------------------------------------


def test_ubound_rejects_inversion_and_nan():
    three = encode_exact(fin(3), E22)
    five = encode_exact(fin(5), E22)
    with pytest.raises(ValueError):
        PackedUbound(five, three)
    nan = PackedUnum(E22, 0, 15, 15, 4, 4, 1)
    with pytest.raises(ValueError):
        PackedUbound(nan, five)


def test_ubound_rejects_mixed_environment():
    a = encode_exact(fin(1), E22)
    b = encode_exact(fin(2), E45)
    with pytest.raises(ValueError):
        PackedUbound(a, b)
