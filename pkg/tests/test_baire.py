import random
from fractions import Fraction

import pytest

from wadgelab import pointset as ps
from wadgelab.baire import (
    BairePoint,
    Generator,
    IdentityMap,
    PrefixSubstitution,
    agree,
    baire_to_real,
    dec,
    enc,
    lex_iso,
    lex_iso_inv,
    parse_baire_map,
    real_to_baire,
    right_continuity_probe,
    transport,
)
from wadgelab.errors import NonRational, OutOfRange, ParseError, UnsupportedBaireMap
from wadgelab.exact import IntervalAtom, QSqrt2
from wadgelab.redmap import CertifiedInterval, verify_reduction

from support import rand_rational

F = Fraction
Z = BairePoint.zero


def rand_point(rng):
    prefix = [rng.randrange(4) for _ in range(rng.randrange(5))]
    if rng.random() < 0.5:
        return Z(prefix)
    return BairePoint.periodic(prefix, [rng.randrange(4) for _ in range(rng.randint(1, 3))])


def lex_less(x, y, n=60):
    for i in range(n):
        if x(i) != y(i):
            return x(i) < y(i)
    return False


def test_zigzag():
    assert [dec(n) for n in range(5)] == [0, 1, -1, 2, -2]
    assert all(enc(dec(n)) == n for n in range(200))
    with pytest.raises(OutOfRange):
        dec(-1)


def test_block_code_examples():
    assert lex_iso(Z()) == 0
    assert lex_iso(Z([1])) == F(1, 2)
    assert lex_iso(Z([0, 1])) == F(1, 4)


def test_inverse_examples():
    assert lex_iso_inv(F(3, 4)) == Z([2])
    assert lex_iso_inv(F(0)) == Z()
    third = lex_iso_inv(F(1, 3))
    assert third.kind == "DepthBounded"
    assert third.coords(5) == [0, 1, 1, 1, 1]


def test_line_examples():
    assert baire_to_real(Z([2])) == -1
    assert baire_to_real(Z([1, 1])) == F(3, 2)
    assert baire_to_real(Z([0])) == 0
    assert real_to_baire(F(-1)) == Z([2])
    assert real_to_baire(F(3, 2)) == Z([1, 1])


def test_order_isomorphism():
    rng = random.Random(1)
    pts = [rand_point(rng) for _ in range(150)]
    for x in pts:
        for y in pts[:40]:
            vx, vy = lex_iso(x), lex_iso(y)
            assert (vx < vy) == lex_less(x, y)


def test_roundtrips():
    rng = random.Random(2)
    for _ in range(500):
        r = rand_rational(rng, 5, 30)
        assert baire_to_real(real_to_baire(r)) == r
        x = rand_point(rng)
        assert real_to_baire(baire_to_real(x)) == x


def test_modulus():
    """Agreement on k coordinates pins the code down to 2^-k."""
    rng = random.Random(3)
    for _ in range(500):
        x, y = rand_point(rng), rand_point(rng)
        k = 0
        while k < 30 and x(k) == y(k):
            k += 1
        assert agree(x, y, k)
        assert abs(lex_iso(x) - lex_iso(y)) <= F(1, 2 ** k)


def test_domain_errors():
    with pytest.raises(NonRational):
        real_to_baire(QSqrt2(0, 1))
    with pytest.raises(OutOfRange):
        lex_iso_inv(F(1))


def test_depth_bounded_generator():
    sub = PrefixSubstitution((((0,), (5,)),))
    pt = BairePoint((), Generator("squares", lambda i: i * i % 3), 20)
    v = lex_iso(sub(pt).drop(1))
    assert isinstance(v, CertifiedInterval)
    assert v.hi - v.lo == F(1, 2 ** 20)


def test_right_continuity():
    rng = random.Random(4)
    for _ in range(30):
        r = rand_rational(rng, 3, 8)
        k = right_continuity_probe(r, coords=3)
        assert k is not None and k <= 40


def test_point_text():
    rng = random.Random(5)
    for _ in range(100):
        x = rand_point(rng)
        assert BairePoint.parse(str(x)) == x
    with pytest.raises(ParseError):
        BairePoint.parse("b:(1,2)")


class TestTransport:
    def test_identity(self):
        h = transport(IdentityMap())
        rng = random.Random(6)
        for _ in range(1000):
            r = rand_rational(rng, 6, 40)
            assert h(r) == r

    def test_swap_of_unit_intervals(self):
        # codes 1 and 2 are the integer parts 1 and -1
        g = parse_baire_map("sub([1]>[2];[2]>[1])")
        h = transport(g)
        A = ps.union(ps.iv(F(1), F(3, 2), True, False), ps.iv(F(5), F(6), True, False))
        B = ps.union(ps.iv(F(-1), F(-1, 2), True, False), ps.iv(F(5), F(6), True, False))
        rep = verify_reduction(h, A, B, IntervalAtom.closed(F(-3), F(7)), 500)
        assert rep.ok and rep.samples >= 500

    def test_shift(self):
        h = transport("shift(1)")
        # x = (enc(2), 1, 0...) = 2 + 1/2 -> (1, 0, ...) = 1
        assert h(F(5, 2)) == 1

    @pytest.mark.parametrize("text", ["reverse", "shift(-1)", "sub([1]>[2];[1,3]>[0])"])
    def test_rejected(self, text):
        with pytest.raises(UnsupportedBaireMap):
            transport(text)

    def test_rejects_arbitrary_callable(self):
        with pytest.raises(UnsupportedBaireMap):
            transport(lambda x: x)
