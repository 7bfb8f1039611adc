import random
from fractions import Fraction

import pytest

from wadgelab import constructions as cons
from wadgelab import pointset as ps
from wadgelab.errors import DomainError, NotAlmostContained, NotI0, WitnessInvalid
from wadgelab.exact import INF, IntervalAtom, QSqrt2
from wadgelab.finite import FiniteUnion
from wadgelab.orders import ZERO, OrdinalCNF, ShiftWord, SubsetPattern, marker
from wadgelab.redmap import affine_map, identity, verify_reduction

from support import rand_tree, tree_members

F = Fraction
P = SubsetPattern.parse


def check34(f, a, b, top=8):
    S = ps.Family34(a)
    window = IntervalAtom.closed(-1, 2 * top + 3)
    points = [ZERO] + [marker(n) for n in range(top + 2)] + S.blocks(window, 2)
    anchors = [x for p in points for x in S.scheme.anchors(p)]
    return verify_reduction(f, S, ps.Family34(b), window, 400, anchors)


def check35(f, a, b):
    S = ps.Family35(a)
    window = IntervalAtom.closed(0, 3)
    anchors = cons.verification_anchors(S, window, 3)
    return verify_reduction(f, S, ps.Family35(b), window, 400, anchors)


class TestSubsetfin:
    @pytest.mark.parametrize("a,b", [("{}", "{}"), ("{2}", "{2}"), ("{0,1}", "{1}"),
                                     ("{2,5}", "{2,5,9}"), ("{1}+tail(4)", "{}+tail(3)")])
    def test_verifies(self, a, b):
        a, b = P(a), P(b)
        rep = check34(cons.subsetfin_reduction(a, b), a, b)
        assert rep.ok, rep.witness_lines()[:3]
        assert rep.passes > 0

    def test_iso_witnesses(self):
        a, b = P("{0,1}"), P("{1}")
        f = cons.iso_to_reduction(cons.ZOMEGA, ShiftWord.iota(1, -1), a, b)
        assert check34(f, a, b).ok
        a = b = P("{2,5}")
        assert check34(cons.iso_to_reduction(cons.ZOMEGA, ShiftWord(), a, b), a, b).ok

    def test_bad_witness(self):
        with pytest.raises(WitnessInvalid):
            cons.iso_to_reduction(cons.ZOMEGA, ShiftWord(), P("{3}"), P("{}"))

    def test_not_almost_contained(self):
        with pytest.raises(NotAlmostContained):
            cons.subsetfin_reduction(P("{}+tail(2)"), P("{1,2,3}"))

    def test_image_structure(self):
        a, b = P("{2}"), P("{2,5}")
        window = IntervalAtom.closed(-1, 6)
        same = cons.image_structure_check(identity(), a, window, 2)
        view = ps.extract_structure(ps.Family34(a), window, 2)
        assert same.patterns() == view.patterns()
        assert same.note == "increasing"
        f = cons.subsetfin_reduction(a, b)
        moved = cons.image_structure_check(f, a, window, 2)
        assert moved.patterns() == view.patterns()
        assert moved.note.startswith("increasing")
        # iota_0^-1 moves each anchor block one step down
        for src, img in zip(view.blocks, moved.blocks):
            assert img.anchor0 == f(src.anchor0)
        zero = [b for b in moved.blocks if b.element == ZERO][0]
        assert zero.anchor0 == cons.ZOMEGA.anchor(ZERO.add(0, -1), 0)

    def test_reversed_head(self):
        a = P("{1}")
        window = IntervalAtom.closed(-1, 4)
        view = cons.image_structure_check(affine_map(-1, 0), a, window, 2)
        assert view.note == "decreasing"
        assert all(not b.half_open.lo_closed and b.half_open.hi_closed for b in view.blocks)


class TestBelowQ:
    @pytest.mark.parametrize("a,b", [("{}", "{}"), ("{2}", "{2}"), ("{1}", "{1,3}"), ("{0,1}", "{1}")])
    def test_verifies(self, a, b):
        a, b = P(a), P(b)
        rep = check35(cons.belowQ_reduction(a, b), a, b)
        assert rep.ok, rep.witness_lines()[:3]

    def test_translation_witness(self):
        a = b = P("{1}")
        f = cons.iso_to_reduction(cons.ORDINAL, OrdinalCNF.finite(0), a, b)
        assert check35(f, a, b).ok


class TestAntiComplete:
    def test_examples(self):
        assert cons.anticomplete_distinct(P("{2}"), P("{3}"), 5)
        same = cons.anticomplete_distinct(P("{2}"), P("{2}"), 5)
        assert not same
        shallow = cons.anticomplete_distinct(P("{9}"), P("{}"), 3)
        assert not shallow and "beyond the depth" in shallow.note


class TestOpenToSet:
    def test_single_interval(self):
        U = ps.iv(F(0), F(1), False, False)
        A = ps.iv(F(0), INF, False, False)
        f = cons.open_to_set_reduction(U, A, (0, INF))
        assert 0 < f(F(1, 2)) <= 1
        assert f(F(2)) == 0
        assert verify_reduction(f, U, A, IntervalAtom.closed(F(-3), F(4)), 500).ok

    def test_two_bumps(self):
        U = ps.union(ps.iv(F(0), F(1), False, False), ps.iv(F(2), F(3), False, False))
        A = ps.iv(F(0), INF, False, False)
        f = cons.open_to_set_reduction(U, A, (0, INF))
        for x in (F(1, 2), F(5, 2), F(9, 4) + QSqrt2(0, F(1, 100))):
            assert 0 < f(x) <= 1
        assert verify_reduction(f, U, A, IntervalAtom.closed(F(-3), F(6)), 500).ok

    def test_generator_target(self):
        U = ps.union(ps.iv(-INF, F(0), False, False), ps.iv(F(1), F(5), False, False))
        A = ps.union(ps.iv(F(1, 3), F(3), False, True), ps.Q2())
        f = cons.open_to_set_reduction(U, A, (F(1, 3), 3))
        assert verify_reduction(f, U, A, IntervalAtom.closed(F(-4), F(7)), 500).ok

    @pytest.mark.parametrize("U,witness", [
        (ps.Compl(ps.iv(-INF, INF, False, False)), (0, INF)),
        (ps.iv(F(0), F(1)), (0, INF)),
        (ps.iv(F(0), F(1), False, False), (1, INF)),
        (ps.iv(F(0), F(1), False, False), (-1, INF)),
        (ps.iv(F(0), F(1), False, False), (0, 0)),
    ])
    def test_rejected(self, U, witness):
        with pytest.raises(WitnessInvalid):
            cons.open_to_set_reduction(U, ps.iv(F(0), INF, False, False), witness)


class TestTrees:
    def test_example(self):
        full = frozenset({(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)})
        t0 = frozenset({(), (0,), (0, 0), (0, 1)})
        out = cons.tree_refine(cons.TreeFamily((t0, full), 2, 2))
        assert out.trees == (t0, frozenset({(), (1,), (1, 0), (1, 1)}))
        assert out.labels == ((0, ()), (1, (1,)))

    def test_single_and_duplicate(self):
        t = frozenset({(), (1,), (1, 0)})
        assert cons.tree_refine(cons.TreeFamily((t,), 2, 2)).trees == (t,)
        assert len(cons.tree_refine(cons.TreeFamily((t, t), 2, 2)).trees) == 1

    def test_random_disjoint_union(self):
        rng = random.Random(1)
        for _ in range(60):
            fam = cons.TreeFamily(tuple(rand_tree(rng, 2, 3) for _ in range(3)), 2, 3)
            out = cons.tree_refine(fam)
            sets = [tree_members(t, 2, 3, 4) for t in out.trees]
            total = set().union(*[tree_members(t, 2, 3, 4) for t in fam.trees])
            assert set().union(*sets) == total
            assert sum(len(s) for s in sets) == len(total)

    def test_bad_tree(self):
        with pytest.raises(DomainError):
            cons.TreeFamily((frozenset({(), (0, 1)}),), 2, 2)


class TestDecompose:
    def test_finite(self):
        S = ps.union(ps.iv(F(0), F(1)), ps.iv(F(2), F(2)))
        pieces = cons.decompose_fsigma(S, IntervalAtom.closed(F(-5), F(5)), 3)
        assert pieces == [FiniteUnion([IntervalAtom.closed(F(0), F(1))]),
                          FiniteUnion([IntervalAtom.point(F(2))])]

    def test_not_i0(self):
        with pytest.raises(NotI0):
            cons.decompose_fsigma(ps.iv(F(0), F(1), False, False), IntervalAtom.closed(F(-5), F(5)), 3)

    def test_dyadics(self):
        pieces = cons.decompose_fsigma(ps.Q2(), IntervalAtom.closed(F(0), F(1)), 4)
        assert [p.atoms[0].lo for p in pieces] == [F(k, 16) for k in range(17)]
        assert cons.piece_containing(pieces, IntervalAtom.point(F(3, 16))) == 3
        assert cons.piece_containing(pieces, IntervalAtom.point(F(1, 3))) is None


class TestJoin:
    def test_members(self):
        sets = [ps.Q2(), ps.CantorSet(), ps.Family35(P("{1}"))]
        join, maps = cons.upper_bound_join(sets)
        window = IntervalAtom.closed(F(0), F(1))
        for A, f in zip(sets, maps):
            assert verify_reduction(f, A, join, window, 200).ok

    def test_empty_and_full(self):
        empty = ps.Compl(ps.iv(-INF, INF, False, False))
        full = ps.iv(-INF, INF, False, False)
        join, maps = cons.upper_bound_join([empty, full])
        assert not join.member(F(1, 2))
        assert join.member(F(3, 2))
        assert not join.member(F(1)) and not join.member(F(2))
