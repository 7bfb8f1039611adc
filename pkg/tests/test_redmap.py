import random
from fractions import Fraction

import pytest

from wadgelab import pointset as ps
from wadgelab.errors import DomainError, OutsideDomain, ParseError, UnresolvableRange, Unsupported
from wadgelab.exact import INF, IntervalAtom, QSqrt2
from wadgelab.finite import FiniteUnion
from wadgelab.redmap import (
    Affine,
    CantorAffine,
    Cell,
    CertifiedInterval,
    Constant,
    PiecewiseMap,
    affine_map,
    cantor_map,
    coherence_check,
    compose,
    const_map,
    deferred_map,
    identity,
    parse_map,
    preimage,
    verify_reduction,
)

from support import rand_atom

F = Fraction
SQRT2 = QSqrt2(0, 1)
WIN = IntervalAtom.closed(F(-8), F(8))


def linking_piece(rng, a, b, va, vb):
    if va == vb:
        return Constant(va)
    if rng.random() < 0.5:
        slope = (vb - va) / (b - a)
        return Affine(slope, va - slope * a)
    return CantorAffine(vb - va, 1 / (b - a), -a / (b - a), va)


def rand_map(rng, k=4):
    xs = sorted({F(rng.randint(-24, 24), 4) for _ in range(k)})
    vs = [F(rng.randint(-12, 12), rng.choice((1, 2, 3))) for _ in xs]
    cells = []
    slope = rng.choice((1, -1))
    end = Constant(vs[0]) if rng.random() < 0.5 else Affine(slope, vs[0] - slope * xs[0])
    cells.append(Cell(-INF, xs[0], end))
    for a, b, va, vb in zip(xs, xs[1:], vs, vs[1:]):
        cells.append(Cell(a, b, linking_piece(rng, a, b, va, vb)))
    end = Constant(vs[-1]) if rng.random() < 0.5 else Affine(F(1, 2), vs[-1] - xs[-1] / 2)
    cells.append(Cell(xs[-1], INF, end))
    return PiecewiseMap(cells)


def rand_fu(rng, n=3):
    return FiniteUnion([rand_atom(rng) for _ in range(n)])


def probe_points(rng, f, extra=()):
    pts = {F(k, 16) for k in range(-160, 161)}
    pts.update(f.breakpoints())
    pts.update(extra)
    pts.update(F(k, 7) + SQRT2 / 1000 for k in range(-50, 50))
    return sorted(pts)


def test_evaluation_examples():
    assert identity()(F(7, 3)) == F(7, 3)
    assert cantor_map(1, 1, 0, 0)(F(1, 4)) == F(1, 3)
    assert const_map(SQRT2)(F(99)) == SQRT2


def test_certified_irrational_value():
    v = cantor_map()(SQRT2 - 1)
    assert isinstance(v, (CertifiedInterval, Fraction))
    if isinstance(v, CertifiedInterval):
        assert v.hi - v.lo <= F(1, 2 ** 40)


def test_continuity_at_breakpoints():
    rng = random.Random(1)
    for _ in range(100):
        f = rand_map(rng)
        for a, b in zip(f.cells, f.cells[1:]):
            assert a.piece(a.hi) == b.piece(b.lo)


class TestCompose:
    def test_examples(self):
        h = compose(affine_map(2, 1), affine_map(3, 0))
        assert h.cells[0].piece == Affine(6, 1)
        assert compose(const_map(5), cantor_map())(F(1, 3)) == 5

    def test_pointwise(self):
        rng = random.Random(2)
        for _ in range(150):
            f, g = rand_map(rng), rand_map(rng)
            h = compose(g, f)
            for x in probe_points(rng, f)[::7]:
                fx = f(x)
                if isinstance(fx, CertifiedInterval):
                    continue
                gx = g(fx)
                hx = h(x)
                if isinstance(gx, CertifiedInterval) or isinstance(hx, CertifiedInterval):
                    continue
                assert hx == gx, (x, f.to_text(), g.to_text())

    def test_partial_outer(self):
        g = PiecewiseMap([Cell(F(0), F(1), Affine(1, 0))], partial=True)
        with pytest.raises(UnresolvableRange):
            compose(g, affine_map(1, 5))


class TestPreimage:
    def test_examples(self):
        unit = FiniteUnion([IntervalAtom.closed(F(0), F(1))])
        assert preimage(identity(), unit) == unit
        assert preimage(affine_map(2, 0), unit) == FiniteUnion([IntervalAtom.closed(F(0), F(1, 2))])
        assert preimage(const_map(0), FiniteUnion([IntervalAtom.open(F(0), F(1))])).is_empty()

    def test_cantor_flat(self):
        pre = preimage(cantor_map(), FiniteUnion([IntervalAtom.point(F(1, 2))]))
        assert pre == FiniteUnion([IntervalAtom.closed(F(1, 3), F(2, 3))])

    def test_random(self):
        rng = random.Random(3)
        for _ in range(200):
            f, B = rand_map(rng), rand_fu(rng)
            P = preimage(f, B)
            for x in probe_points(rng, f, P.endpoints()):
                y = f(x)
                if isinstance(y, CertifiedInterval):
                    continue
                assert P.contains(x) == B.contains(y), (x, f.to_text(), B)

    def test_deferred_rejected(self):
        f = deferred_map("test-square", fn=lambda x, eps=None: x * x)
        with pytest.raises(Unsupported):
            preimage(f, FiniteUnion([IntervalAtom.closed(F(0), F(1))]))


class TestVerify:
    def test_examples(self):
        unit = ps.iv(F(0), F(1), False, False)
        assert verify_reduction(identity(), unit, unit, WIN, 100).ok
        pos = ps.iv(F(0), INF, False, False)
        rep = verify_reduction(const_map(0), pos, pos, WIN, 100, extra=[F(1)])
        assert not rep.ok
        assert any(w.x == 1 and w.fx == 0 for w in rep.failures)
        empty = ps.Compl(ps.iv(-INF, INF, False, False))
        assert verify_reduction(const_map(SQRT2), empty, ps.Q(), WIN, 100).ok

    def test_result_line(self):
        unit = ps.iv(F(0), F(1))
        rep = verify_reduction(identity(), unit, unit, IntervalAtom.closed(F(-2), F(2)), 5)
        assert rep.result_line() == f"RESULT pass samples={rep.samples} fail=0 inconclusive=0"

    def test_mutation_is_caught(self):
        """Every witness reported for a shifted map is a genuine failure."""
        rng = random.Random(4)
        caught = 0
        for _ in range(60):
            f, B = rand_map(rng), rand_fu(rng)
            P = preimage(f, B)
            A = ps.Union(tuple(ps.Atom(a) for a in P.atoms))
            Bx = ps.Union(tuple(ps.Atom(a) for a in B.atoms))
            assert verify_reduction(f, A, Bx, WIN, 200, extra=P.endpoints()).ok
            g = compose(affine_map(1, F(1, 3)), f)
            rep = verify_reduction(g, A, Bx, WIN, 200, extra=P.endpoints())
            if not rep.ok:
                caught += 1
                for w in rep.failures:
                    assert P.contains(w.x) != B.contains(g(w.x))
        assert caught > 20

    def test_partial_map_domain(self):
        f = PiecewiseMap([Cell(F(0), F(1), Affine(1, 0))], partial=True)
        with pytest.raises(OutsideDomain):
            f(F(2))
        rep = verify_reduction(f, ps.Q(), ps.Q(), WIN, 50)
        assert rep.ok and rep.samples > 0


class TestCoherence:
    def test_examples(self):
        def pmap(pairs):
            return PiecewiseMap([Cell(F(x), F(x), Constant(F(v))) for x, v in pairs], partial=True)

        assert coherence_check(pmap([(0, 0), (1, 1)]))
        assert coherence_check(pmap([(0, 0), (1, 0), (2, 1)]), [(IntervalAtom.line(), 1)])
        assert not coherence_check(pmap([(0, 1), (1, 0)]), [(IntervalAtom.line(), 1)])


class TestMapFiles:
    def test_roundtrip(self):
        rng = random.Random(5)
        for _ in range(100):
            f = rand_map(rng)
            g = parse_map(f.to_text())
            assert g.to_text() == f.to_text()
            assert [c.piece for c in g.cells] == [c.piece for c in f.cells]

    def test_partial_roundtrip(self):
        f = PiecewiseMap([Cell(F(0), F(1), Affine(2, SQRT2)), Cell(F(3), F(3), Constant(F(1, 2)))],
                         partial=True)
        g = parse_map(f.to_text())
        assert g.partial and g.domain == f.domain
        assert g(F(1, 2)) == 1 + SQRT2

    def test_trailer_lines_skipped(self):
        text = identity().to_text() + "STAGE 3\nEPS 1/8\nLEDGER\n"
        assert parse_map(text)(F(5)) == 5

    @pytest.mark.parametrize("text,line", [
        ("BP -inf inf\nPIECE affine 1 0\n", 1),
        ("MAP total\nBP -inf inf\nPIECE wobble 1\n", 3),
        ("MAP total\nBP -inf inf\nPIECE affine 0 1\n", 3),
        ("MAP total\nPIECE const 1\n", 2),
        ("MAP total\nBP -inf 0\nPIECE const 1\n", 1),
        ("MAP sideways\n", 1),
        ("MAP total\nBP x inf\nPIECE const 1\n", 2),
    ])
    def test_errors(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_map(text)
        assert info.value.line == line

    def test_total_must_cover(self):
        with pytest.raises(DomainError):
            PiecewiseMap([Cell(F(0), F(1), Affine(1, 0))])
