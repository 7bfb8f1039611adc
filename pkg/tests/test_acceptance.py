"""The thirteen acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import bisect
import itertools
import random
import shlex
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

from support import (oracle_I, oracle_nontrivial, rand_boolean, rand_pattern, rand_rational, rand_tree,
                     rand_union, rand_zvec, tree_members)

from wadgelab import baire as bz
from wadgelab import constructions as cons
from wadgelab import minimal
from wadgelab import pointset as ps
from wadgelab import stages as st
from wadgelab.errors import NotI0
from wadgelab.exact import IntervalAtom, QSqrt2, cantor_value, is_finite
from wadgelab.finite import FiniteUnion
from wadgelab.orders import (ZERO, OmegaSqReversedScheme, OrdinalCNF, OrdinalScheme, ShiftWord, SubsetPattern,
                             ZomegaScheme, ZVec, apply_shift, marker, sigma_preserves_star, zvec_cmp)
from wadgelab.redmap import verify_reduction

GOLDEN = Path(__file__).parent / "golden"


def test_cantor_function_exact(criterion):
    done = criterion(1, "Cantor function exactness")
    rng = random.Random(1)
    t0 = time.perf_counter()
    ok = (cantor_value(Fraction(1, 3)) == Fraction(1, 2) and cantor_value(Fraction(1, 4)) == Fraction(1, 3)
          and cantor_value(Fraction(2, 3)) == Fraction(1, 2))
    checked = 0
    for _ in range(100):
        q = rand_rational(rng, span=3, den=50)
        base = cantor_value(q)
        for n in range(-5, 6):
            ok &= cantor_value(q + n) == base + n
            checked += 1
    elapsed = time.perf_counter() - t0
    done(ok and elapsed < 1, f"{checked} shifted values, {elapsed:.2f}s")


def test_order_kernel(criterion):
    done = criterion(2, "order kernel: trichotomy, shift laws, embedding, margins, zero extension")
    rng = random.Random(2)
    t0 = time.perf_counter()
    Z = ZomegaScheme()
    ok = True
    for _ in range(1000):
        x, y = rand_zvec(rng), rand_zvec(rng)
        rel = [x < y, x == y, x > y]
        ok &= rel.count(True) == 1
        ok &= zvec_cmp(x, y) == -zvec_cmp(y, x)
        n = rng.randrange(5)
        ok &= apply_shift(ShiftWord(((n, 1), (n, -1))), x) == x
        ok &= apply_shift(ShiftWord(((n, -1), (n, 1))), x) == x
        if x != y:
            lo, hi = sorted((x, y))
            ok &= apply_shift(ShiftWord.iota(n), lo) < apply_shift(ShiftWord.iota(n), hi)
    for _ in range(10000):
        x, y = rand_zvec(rng), rand_zvec(rng)
        if x != y:
            lo, hi = sorted((x, y))
            ok &= Z.embed(lo) < Z.embed(hi)
    jumps = 0
    ordinal, reverse = OrdinalScheme(), OmegaSqReversedScheme()
    for _ in range(1000):
        z = rand_zvec(rng)
        ok &= Z.margin(z) > 0 and Z.embed(Z.successor(z)) - Z.embed(z) >= Z.margin(z)
        a = OrdinalCNF(tuple((e, rng.randint(1, 3)) for e in sorted(rng.sample(range(4), rng.randint(0, 3)),
                                                                    reverse=True)))
        ok &= ordinal.margin(a) > 0
        ok &= ordinal.embed_point(a.successor()) - ordinal.embed_point(a) >= ordinal.margin(a)
        b = OmegaSqReversedScheme.element(rng.randrange(6), rng.randint(1, 6))
        nxt = reverse.successor(b)
        ok &= reverse.margin(b) > 0 and reverse.embed_point(nxt) - reverse.embed_point(b) >= reverse.margin(b)
        ok &= Z.embed_point(z, level=z.top() + rng.randint(1, 4)) == Z.embed_point(z)
        jumps += 3
    elapsed = time.perf_counter() - t0
    done(ok and elapsed < 5, f"{jumps} jumps, {elapsed:.2f}s")


def _subsetfin_pair(rng):
    a = rand_pattern(rng, top=6, tail_prob=0.3)
    n0 = rng.randrange(4)
    extra = {n for n in range(8) if rng.random() < 0.3}
    tail = None if a.tail is None else a.tail + rng.randrange(2)
    b = SubsetPattern(frozenset({n for n in a.finite if n >= n0} | extra), tail)
    return a, b


def test_subsetfin_forward(criterion):
    done = criterion(3, "subsetfin reductions verify on a 1000-point grid")
    rng = random.Random(3)
    t0 = time.perf_counter()
    worst_fail, worst_inc = 0, 0.0
    for _ in range(50):
        a, b = _subsetfin_pair(rng)
        h = max(a.horizon(), b.horizon())
        f = cons.subsetfin_reduction(a, b)
        S = ps.Family34(a)
        window = IntervalAtom.closed(-1, 2 * h + 3)
        points = [ZERO] + [marker(n) for n in range(h + 2)] + S.blocks(window, 2)
        anchors = [x for p in points for x in S.scheme.anchors(p)]
        rep = verify_reduction(f, S, ps.Family34(b), window, 1000, anchors)
        worst_fail = max(worst_fail, len(rep.failures))
        worst_inc = max(worst_inc, rep.inconclusive / rep.samples)
    elapsed = time.perf_counter() - t0
    done(worst_fail == 0 and worst_inc <= 0.1 and elapsed < 30,
         f"max fail={worst_fail} max inconclusive={worst_inc:.1%}, {elapsed:.1f}s")


def test_subsetfin_converse_proxy(criterion):
    done = criterion(4, "no short shift word carries a* into b* when a is not almost in b")
    rng = random.Random(4)
    t0 = time.perf_counter()
    letters = [(n, d) for n in range(7) for d in (1, -1)]
    words = [ShiftWord(w) for k in range(4) for w in itertools.product(letters, repeat=k)]
    false_witnesses = 0
    for _ in range(50):
        a = SubsetPattern(frozenset(n for n in range(6) if rng.random() < 0.4), rng.randrange(2, 8))
        b = rand_pattern(rng, top=8, tail_prob=0.0)
        false_witnesses += sum(sigma_preserves_star(a, b, w) for w in words)
    elapsed = time.perf_counter() - t0
    done(false_witnesses == 0 and elapsed < 10, f"{len(words)} words x 50 pairs, {elapsed:.1f}s")


def test_condition_I_oracle(criterion):
    done = criterion(5, "condition (I) checker agrees with the endpoint-scan oracle")
    rng = random.Random(5)
    mismatches = 0
    for _ in range(200):
        S = rand_union(rng)
        chk = ps.check_I(S)
        mismatches += (chk.i0, chk.i1) != oracle_I(S)
    bad_combos, combos = 0, 0
    for _ in range(300):
        S = rand_boolean(rng)
        if not oracle_nontrivial(S):
            continue
        combos += 1
        chk = ps.check_I(S)
        bad_combos += chk.i0 and chk.i1
    done(mismatches == 0 and bad_combos == 0,
         f"200 unions, {mismatches} mismatches; {combos} non-trivial combinations, {bad_combos} with I")


def _decomposition_ok(S, pieces, window, points):
    for p, q in itertools.combinations(pieces, 2):
        if not p.intersect(q).is_empty():
            return False
    for p in pieces:
        if not p.subset_of(FiniteUnion([window])) or not p.is_closed():
            return False
    union = FiniteUnion([a for p in pieces for a in p.atoms])
    return all(union.contains(x) == S.member(x) for x in points if window.contains(x))


def test_decomposition(criterion):
    done = criterion(6, "closed decompositions of sets with I0")
    rng = random.Random(6)
    window = IntervalAtom.closed(-6, 6)
    grid = [Fraction(k, 80) - 6 for k in range(961)] + [QSqrt2(Fraction(k, 10) - 6, Fraction(1, 100))
                                                     for k in range(121)]
    ok, inputs, fact_checks = True, 0, 0
    while inputs < 100:
        S = rand_union(rng)
        if not oracle_I(S)[0]:
            continue
        inputs += 1
        pieces = cons.decompose_fsigma(S, window, 3)
        ok &= _decomposition_ok(S, pieces, window, grid)
        union = FiniteUnion([a for p in pieces for a in p.atoms])
        for comp in union.atoms * 2:
            if fact_checks >= 100 or comp.is_point():
                continue
            lo = comp.lo + (comp.hi - comp.lo) * Fraction(rng.randint(0, 4), 10)
            hi = comp.hi - (comp.hi - comp.lo) * Fraction(rng.randint(0, 4), 10)
            sub = IntervalAtom(lo, hi, rng.random() < 0.5, rng.random() < 0.5)
            k = cons.piece_containing(pieces, sub)
            ok &= k is not None and pieces[k].contains_atom(sub)
            fact_checks += 1
    unit = IntervalAtom.closed(0, 1)
    q2_points = [Fraction(k, 1024) for k in range(1025)] + [Fraction(k, 1024) + QSqrt2(0, Fraction(1, 10 ** 4))
                                                           for k in range(1024)]
    ok &= _decomposition_ok(ps.Q2(), cons.decompose_fsigma(ps.Q2(), unit, 10), unit, q2_points)
    raised = 0
    for _ in range(50):
        a, b = sorted((rand_rational(rng), rand_rational(rng) + 13))
        try:
            cons.decompose_fsigma(ps.Atom(IntervalAtom.open(a, b)), window, 3)
        except NotI0:
            raised += 1
    done(ok and raised == 50 and fact_checks == 100,
         f"{inputs} inputs plus Q2, {fact_checks} interval checks, NotI0 raised {raised}/50")


def test_tree_refine(criterion):
    done = criterion(7, "tree refinement against exhaustive enumeration")
    rng = random.Random(7)
    ok = True
    for _ in range(100):
        branching, depth = rng.randint(1, 3), rng.randint(1, 4)
        trees = tuple(rand_tree(rng, branching, depth) for _ in range(rng.randint(1, 4)))
        F = cons.TreeFamily(trees, branching, depth)
        R = cons.tree_refine(F)
        sets = [tree_members(t, branching, depth, 5) for t in R.trees]
        ok &= all(not (p & q) for p, q in itertools.combinations(sets, 2))
        before = set().union(*(tree_members(t, branching, depth, 5) for t in trees))
        ok &= set().union(*sets) == before
    done(ok, "100 families, branching <= 3, depth <= 4, checked at length 5")


def _stage_checks(state, target, grid_n):
    ok = all(fn(state) for fn in (st.check_extension, st.check_coherence, st.check_eps, st.check_sorting,
                                  st.check_ledger))
    for n in range(state.stage + 1):
        f = state.map_at(n)
        finite = [b for e in state.entries if e.stage <= n for b in e.hull if is_finite(b)]
        window = IntervalAtom.closed(min(finite) - 1, max(finite) + 1)
        ends = [b for a in f.domain.atoms for b in (a.lo, a.hi) if is_finite(b)]
        ok &= verify_reduction(f, state.source, target, window, grid_n, ends).ok
    return ok


def test_stage_machinery(criterion):
    done = criterion(8, "staged reduction to Q: 20 stages with every invariant")
    t0 = time.perf_counter()
    ok = True
    for S in (ps.Q2(), ps.Family35(SubsetPattern.of(1))):
        state = st.reduce_to_Q(S, 20)
        ok &= state.stage == 20 and _stage_checks(state, ps.Q(), 200)
    elapsed = time.perf_counter() - t0
    done(ok and elapsed < 20, f"{elapsed:.1f}s")


def test_anticomplete_rigidity(criterion):
    done = criterion(9, "anti-complete family: distinct patterns are told apart")
    rng = random.Random(9)
    pats = []
    while len(pats) < 20:
        p = rand_pattern(rng, top=6, tail_prob=0.3)
        if p not in pats:
            pats.append(p)
    wrong = 0
    for a, b in itertools.combinations_with_replacement(pats, 2):
        depth = max(a.horizon(), b.horizon()) + 1
        wrong += bool(cons.anticomplete_distinct(a, b, depth)) != (a != b)
    done(wrong == 0, f"{len(pats) * (len(pats) + 1) // 2} pairs, {wrong} wrong")


def test_baire_bridge(criterion):
    done = criterion(10, "Baire space bridge")
    rng = random.Random(10)
    ok = True
    points = [bz.BairePoint.zero(tuple(rng.randrange(6) for _ in range(rng.randrange(7)))) for _ in range(1000)]
    for x in points:
        y = bz.real_to_baire(bz.baire_to_real(x))
        ok &= y.as_periodic() == x.as_periodic()
    for _ in range(1000):
        x, y = rng.sample(points, 2)
        if x.prefix == y.prefix:
            continue
        tx, ty = x.drop(1), y.drop(1)
        lex = next((tx(i) < ty(i) for i in range(64) if tx(i) != ty(i)), None)
        if lex is not None:
            ok &= (bz.lex_iso(tx) < bz.lex_iso(ty)) == lex
    worst = 0
    for _ in range(100):
        k = bz.right_continuity_probe(rand_rational(rng, span=4, den=30), coords=4, k_max=40)
        ok &= k is not None
        worst = max(worst, k or 99)
    h = bz.transport("sub([0]>[1];[1]>[0])")
    rep = verify_reduction(h, ps.Atom(IntervalAtom(0, 1, True, False)), ps.Atom(IntervalAtom(1, 2, True, False)),
                           IntervalAtom.closed(-2, 3), 500)
    ok &= rep.ok and rep.inconclusive == 0
    done(ok, f"probe max K={worst}, transport {rep.result_line()}")


def _covered(small, big):
    """Every atom of the sorted tuple small lies inside one atom of the sorted tuple big."""
    los = [b.lo for b in big]
    for a in small:
        k = bisect.bisect_right(los, a.lo) - 1
        if k < 0 or not big[k].contains_atom(a):
            return False
    return True


def _mc_invariants(d):
    """Depth-d surrogates of the three properties of the minimal compact set."""
    inner, outer = minimal.mc_truncation(d)
    inner2, outer2 = minimal.mc_truncation(d + 2)
    outer1 = minimal.mc_truncation(d + 1)[1]
    ok = _covered(outer1.atoms, outer.atoms) and _covered(inner.atoms, outer.atoms)
    atoms, los2 = inner.atoms, [c.lo for c in inner2.atoms]
    outer_los = [c.lo for c in outer.atoms]
    outer2_his = [c.hi for c in outer2.atoms]
    for a, b in zip(atoms, atoms[1:]):
        same_cell = bisect.bisect_right(outer_los, a.lo) == bisect.bisect_right(outer_los, b.lo)
        # thick components facing the inside of an outer cell have a neighbour within 2^-d
        if same_cell:
            ok &= b.lo - a.hi <= Fraction(1, 2 ** d)
        # unless a gap separates them, a full block of depth d+2 lies strictly between
        k = bisect.bisect_right(outer2_his, a.hi)
        if k < len(outer2.atoms) and outer2.atoms[k].lo < b.lo:
            m = bisect.bisect_right(los2, a.hi)
            ok &= m < len(inner2.atoms) and inner2.atoms[m].hi < b.lo
    return ok


def _mf_invariants(d):
    pieces, _ = minimal.mf_pieces(d)
    copies = [p for p in pieces if p.kind == "copy"]
    ok = True
    for p, q in itertools.combinations(copies, 2):
        nested = p.lo <= q.lo and q.hi <= p.hi or q.lo <= p.lo and p.hi <= q.hi
        disjoint = p.hi < q.lo or q.hi < p.lo
        ok &= nested or disjoint
    ok &= all(p.hi - p.lo <= Fraction(1, 2 ** p.gen) for p in copies)
    inner, outer = minimal.mf_truncation(d)
    ok &= _covered(minimal.mf_truncation(d + 1)[1].atoms, outer.atoms) and _covered(inner.atoms, outer.atoms)
    return ok


def test_minimal_sets(criterion):
    done = criterion(11, "minimal sets: truncation invariants, compact stages, glued boundary values")
    ok = all(_mc_invariants(d) for d in range(1, 9))
    ok &= all(_mf_invariants(d) for d in range(1, 9))
    state = st.reduce_minimal_compact(ps.CantorSet(), 10)
    unit = IntervalAtom.closed(0, 1)
    for n in range(11):
        f = state.map_at(n)
        ends = [b for a in f.domain.atoms for b in (a.lo, a.hi) if is_finite(b)]
        ok &= verify_reduction(f, ps.MinCompact(), ps.CantorSet(), unit, 200, ends).ok
    ok &= st.check_increasing(state) and st.check_coherence(state)
    states = st.glue_minimal(ps.Q(), 3)
    bounds = st.boundary_values(states)
    ok &= all(fx == y for _, fx, y in bounds)
    ok &= [x for x, _, _ in bounds] == [0, 1, 1, 2, 2, 3]
    g = st.glued_map(states)
    ok &= verify_reduction(g, ps.MinFsigma(), ps.Q(), IntervalAtom.closed(0, 3), 600).ok
    done(ok, "d <= 8, Cantor stages 0..10, 3 glued cells")


def test_join(criterion):
    done = criterion(12, "join of three sets")
    sets = [ps.Q2(), ps.CantorSet(), ps.Family35(SubsetPattern.of(1))]
    J, maps = cons.upper_bound_join(sets)
    lines = []
    for n, (A, f) in enumerate(zip(sets, maps)):
        rep = verify_reduction(f, A, J, IntervalAtom.closed(-2, 4), 800)
        lines.append(rep.ok and rep.inconclusive == 0)
    done(all(lines), f"{sum(lines)}/3 reductions pass")


def _run_corpus(workdir):
    """Run every corpus command in workdir; returns the transcript bytes."""
    for src in (GOLDEN / "files").iterdir():
        (workdir / src.name).write_bytes(src.read_bytes())
    chunks = []
    for line in (GOLDEN / "commands.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        proc = subprocess.run([sys.executable, "-m", "wadgelab", *shlex.split(line)], cwd=workdir,
                              capture_output=True)
        chunks.append(b"$ " + line.encode() + b"\n" + proc.stdout + proc.stderr
                      + f"[exit {proc.returncode}]\n".encode())
    return b"".join(chunks)


def test_cli_golden(criterion, tmp_path):
    done = criterion(13, "CLI golden corpus")
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first = _run_corpus(tmp_path / "a")
    second = _run_corpus(tmp_path / "b")
    expected = (GOLDEN / "expected.txt").read_bytes()
    codes = {int(ln[6:-1]) for ln in first.decode().splitlines() if ln.startswith("[exit ")}
    count = first.count(b"\n$ ") + 1
    done(first == second == expected and codes == {0, 1, 2, 3} and count >= 30,
         f"{count} commands, exit codes {sorted(codes)}")
