"""Reductions built from combinatorial witnesses, refinement algorithms and joins.

The staged constructions (reduction to the rationals and the minimal-set
machinery) live in :mod:`wadgelab.stages` and are re-exported here.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DepthExceeded, DomainError, NotAlmostContained, NotI0, Unsupported, WitnessInvalid,
)
from .exact import INF, IntervalAtom, is_finite, normalize
from .finite import FiniteUnion
from .orders import (
    Anchor, BandLimit, Gap, OrdinalCNF, OrdinalScheme, PrivateInterval, ShiftWord, SubsetPattern,
    ZomegaScheme, apply_shift, astar_member, least_exception_bound, ord_add, sigma_preserves_star,
)
from . import pointset as ps
from .pointset import BlockView, LStructureView
from .redmap import (
    Affine, CertifiedInterval, Cell, Constant, Deferred, PiecewiseMap, register_deferred,
)

ZOMEGA = ZomegaScheme(4)
ORDINAL = OrdinalScheme(2)


# -- Family34: order automorphisms extended to the line -----------------------

def _iso34_fn(a, b, word):
    scheme = ZOMEGA

    def block_map(z, t):
        w = apply_shift(word, z)
        m, m2 = scheme.margin(z), scheme.margin(w)
        step, step2 = m / 8, m2 / 8
        if t <= 2 * step or not (not astar_member(a, z) and astar_member(b, w)):
            t2 = t * m2 / m
        elif t <= 3 * step:
            t2 = 2 * step2
        else:
            t2 = 2 * step2 + (t - 3 * step) * (m2 - 2 * step2) / (m - 3 * step)
        return scheme.embed_point(w) + t2

    def fn(x):
        if not is_finite(x):
            return x
        loc = scheme.locate(x, max_depth=1024)
        if isinstance(loc, Anchor):
            return normalize(block_map(loc.element, x - scheme.embed_point(loc.element)))
        if isinstance(loc, PrivateInterval):
            return normalize(block_map(loc.element, loc.offset))
        if isinstance(loc, Gap):
            lo2, hi2 = scheme.cut_bounds(loc.cut.apply(word))
            return normalize(lo2 + (x - loc.lo) * (hi2 - lo2) / (loc.hi - loc.lo))
        lo, hi = scheme.cut_bounds(loc.cut)
        lo2, hi2 = scheme.cut_bounds(loc.cut.apply(word))
        return lo2 if x == lo else hi2

    return fn


def _iso34_factory(arg):
    a, b, word = arg.split(":")
    return _iso34_fn(SubsetPattern.parse(a), SubsetPattern.parse(b), ShiftWord.parse(word)), 1


register_deferred("iso34", _iso34_factory)


# -- Family35: ordinal translates ----------------------------------------------

def _translate_ok(a, b, c):
    """Source blocks of type B never land on target blocks of type B+."""
    lead = c.leading_exponent() if not c.is_zero() else -1
    if a.tail is not None and b.tail is None:
        return False
    limit = max(a.horizon(), b.horizon()) + 2
    return all(n in b for n in range(lead + 1, limit) if n in a)


def _collapse(v):
    return Fraction(0) if v <= Fraction(2, 3) else 3 * v - 2


def _translate35_fn(a, b, c):
    src, dst = ps.Family35(a), ps.Family35(b)
    scheme = ORDINAL
    base = scheme.embed_point(c)

    def fn(x):
        if not is_finite(x):
            return x if x > 0 else base
        if x < 0:
            return base
        alpha = scheme.block(x)
        beta = ord_add(c, alpha)
        x0, x1, nxt = src.frame(alpha)
        y0, y1, ynxt = dst.frame(beta)
        if x < x1:
            return normalize(y0 + (x - x0) * (y1 - y0) / (x1 - x0))
        v = (x - x1) / (nxt - x1)
        plus_a, plus_b = src.is_plus(alpha), dst.is_plus(beta)
        if plus_a and not plus_b:
            v = _collapse(v)
        elif plus_b and not plus_a:
            raise WitnessInvalid(f"block {alpha} would land on a B+ block")
        return normalize(y1 + v * (ynxt - y1))

    return fn


def _translate35_factory(arg):
    a, b, c = arg.split(":")
    return _translate35_fn(SubsetPattern.parse(a), SubsetPattern.parse(b), OrdinalCNF.parse(c)), 1


register_deferred("translate35", _translate35_factory)


def _total(piece):
    return PiecewiseMap([Cell(-INF, INF, piece)])


def iso_to_reduction(scheme, sigma, a, b):
    """Extend an order witness to an increasing total reduction between coded sets.

    For the Z^(omega) scheme sigma is a ShiftWord with sigma(a*) contained in b*;
    for the ordinal scheme it is an ordinal c acting as alpha -> c + alpha.
    """
    if isinstance(scheme, ZomegaScheme):
        if not sigma_preserves_star(a, b, sigma):
            raise WitnessInvalid(f"{sigma} does not carry {a}* into {b}*")
        ident = f"iso34:{a}:{b}:{sigma}"
        return _total(Deferred(ident, _iso34_fn(a, b, sigma), 1))
    if isinstance(scheme, OrdinalScheme):
        if not _translate_ok(a, b, sigma):
            raise WitnessInvalid(f"translation by {sigma} sends a B block of {a} to a B+ block of {b}")
        ident = f"translate35:{a}:{b}:{sigma}"
        return _total(Deferred(ident, _translate35_fn(a, b, sigma), 1))
    raise Unsupported(f"no witness extension for {type(scheme).__name__}")


def _exception_bound(a, b):
    try:
        return least_exception_bound(a, b)
    except DomainError:
        raise NotAlmostContained(f"{a} is not almost contained in {b}") from None


def subsetfin_reduction(a, b):
    """Reduction Family34(a) -> Family34(b) from the shift iota_{n0}^-1."""
    n0 = _exception_bound(a, b)
    return iso_to_reduction(ZOMEGA, ShiftWord.iota(n0, -1), a, b)


def belowQ_reduction(a, b):
    """Monotone reduction Family35(a) -> Family35(b) by alpha -> omega^n0 + 1 + alpha."""
    n0 = _exception_bound(a, b)
    c = ord_add(OrdinalCNF.omega_pow(n0), OrdinalCNF.finite(1))
    return iso_to_reduction(ORDINAL, c, a, b)


def verification_anchors(S, window, depth):
    """All block anchors of a coded family inside the window."""
    out = []
    for p in S.blocks(window, depth):
        for k in range(S.scheme.arity):
            x = S.scheme.anchor(p, k)
            if window.contains(x):
                out.append(x)
    return out


def _exact(v):
    if isinstance(v, CertifiedInterval):
        raise DepthExceeded("image value is not exact")
    return v


def image_structure_check(f, a, window, depth):
    """The image blocks f(xi0(i)), f(xi1(i)) of Family34(a) over the window."""
    S = ps.Family34(a)
    blocks, collapsed = [], 0
    for p in S.blocks(window, depth):
        v0, v1, v2, v3 = (_exact(f(S.scheme.anchor(p, k))) for k in range(4))
        half = IntervalAtom(v0, v1, True, False) if v0 <= v1 else IntervalAtom(v1, v0, False, True)
        # the pattern is the one coded by a; an interval part may still be
        # squeezed to a point when its block lands on a singleton block of b
        pattern = "singleton" if astar_member(a, p) else "interval"
        collapsed += pattern == "interval" and v2 == v3
        blocks.append(BlockView(p, v0, v1, half, pattern))
    starts = [b.anchor0 for b in blocks]
    if all(x < y for x, y in zip(starts, starts[1:])):
        note = "increasing"
    elif all(x > y for x, y in zip(starts, starts[1:])):
        note = "decreasing"
    else:
        note = "not monotone"
    if collapsed:
        note += f"; {collapsed} interval part(s) collapsed to a point"
    return LStructureView(tuple(blocks), note)


# -- the reversed omega^2 family -------------------------------------------------

@dataclass(frozen=True)
class Distinctness:
    distinct: bool
    visible: int
    note: str = ""

    def __bool__(self):
        return self.distinct


def anticomplete_distinct(a, b, depth):
    """Compare the singleton patterns of AntiComplete(a) and AntiComplete(b)
    on the finite-ordinal blocks k <= depth."""
    window = IntervalAtom.closed(-1, Fraction(1, 2))

    def singles(pat):
        view = ps.extract_structure(ps.AntiComplete(pat), window, depth)
        out = {}
        for blk in view.blocks:
            n = blk.element.finite_value()
            if n is not None:
                out[n] = blk.pattern
        return out

    pa, pb = singles(a), singles(b)
    visible = sorted(set(pa) & set(pb))
    diff = [n for n in visible if pa[n] != pb[n]]
    if diff:
        return Distinctness(True, len(visible), f"patterns differ at block {diff[0]}")
    note = f"no difference among blocks 0..{depth}"
    if a != b:
        note += "; the patterns may differ beyond the depth"
    return Distinctness(False, len(visible), note)


# -- open sets into sets failing I0 ---------------------------------------------

def _check_witness(A, x, y):
    if not (is_finite(x) and x < y):
        raise WitnessInvalid("the witness must be a nonempty interval with a finite left end")
    if A.member(x):
        raise WitnessInvalid("the witness end point lies in A")
    fu = ps.normalize_finite(A)
    inside = IntervalAtom(x, y, False, False)
    if fu is not None:
        if not fu.contains_atom(inside):
            raise WitnessInvalid("the witness interval is not contained in A")
        return
    top = y if is_finite(y) else x + 1
    for k in range(1, 257):
        if not A.member(x + (top - x) * Fraction(k, 257)):
            raise WitnessInvalid("the witness interval is not contained in A")


def open_to_set_reduction(U, A, witness):
    """f(t) = x + (h/2) min(d(t, complement of U), 1) with h = min(y, x+1) - x."""
    fu = ps.normalize_finite(U)
    if fu is None or not fu.is_open() or fu.is_empty() or fu.is_full():
        raise WitnessInvalid("U must be a non-trivial open finite union")
    x, y = (normalize(v) for v in witness)
    _check_witness(A, x, y)
    c = (min(y, x + 1) - x) / 2
    cells, cur = [], -INF

    def add(lo, hi, piece):
        if lo < hi:
            cells.append(Cell(lo, hi, piece))

    for comp in fu.atoms:
        l, r = comp.lo, comp.hi
        add(cur, l, Constant(x))
        if is_finite(l) and is_finite(r):
            m = (l + r) / 2
            a1, b1 = min(l + 1, m), max(r - 1, m)
            add(l, a1, Affine(c, x - c * l))
            add(a1, b1, Constant(x + c))
            add(b1, r, Affine(-c, x + c * r))
        elif is_finite(r):
            add(l, r - 1, Constant(x + c))
            add(r - 1, r, Affine(-c, x + c * r))
        else:
            add(l, l + 1, Affine(c, x - c * l))
            add(l + 1, r, Constant(x + c))
        cur = r
    add(cur, INF, Constant(x))
    return PiecewiseMap(cells)


# -- trees ----------------------------------------------------------------------

@dataclass(frozen=True)
class TreeFamily:
    """Trees of sequences over range(branching) of length <= depth.

    A tree T stands for the closed set of sequences whose length-depth prefix
    lies in T.
    """

    trees: tuple
    branching: int
    depth: int
    labels: tuple = ()

    def __post_init__(self):
        trees = tuple(frozenset(tuple(s) for s in t) for t in self.trees)
        for t in trees:
            if () not in t:
                raise DomainError("a tree must contain the root")
            for s in t:
                if len(s) > self.depth or any(not 0 <= c < self.branching for c in s):
                    raise DomainError(f"node {s} is outside the bounds")
                if s and s[:-1] not in t:
                    raise DomainError(f"tree is not prefix closed at {s}")
        object.__setattr__(self, "trees", trees)

    def branch_member(self, k, seq):
        return tuple(seq[:self.depth]) in self.trees[k]


def subtree(tree, s):
    """T/s: the nodes of T comparable with s."""
    return frozenset(t for t in tree if t == s[:len(t)] or s == t[:len(s)])


def tree_refine(F):
    """Pairwise disjoint trees T_n/s, s minimal in T_n minus the earlier trees."""
    out, labels = [], []
    seen = set()
    for n, tree in enumerate(F.trees):
        diff = tree - seen
        for s in sorted(diff, key=lambda s: (len(s), s)):
            if any(s[:k] in diff for k in range(len(s))):
                continue
            out.append(subtree(tree, s))
            labels.append((n, s))
        seen |= tree
    return TreeFamily(tuple(out), F.branching, F.depth, tuple(labels))


def all_sequences(branching, length):
    return itertools.product(range(branching), repeat=length)


# -- decompositions into disjoint closed pieces ------------------------------------

def decompose_fsigma(S, window, depth):
    """Pairwise disjoint closed pieces (relative to the window) whose union is S there."""
    check = ps.check_I(S)
    if not check.i0:
        raise NotI0(f"{S.dsl()} contains an interval without its end point")
    fu = ps.normalize_finite(S)
    if fu is not None:
        return [FiniteUnion([c]) for c in fu.clip(window).components()]
    lo, hi = window.lo, window.hi
    if not (is_finite(lo) and is_finite(hi)):
        raise DepthExceeded("generator decompositions need a bounded window")
    if isinstance(S, ps.Q2):
        den = 2 ** depth
        pts = _grid_points(lo, hi, den)
    elif isinstance(S, ps.Q):
        pts = sorted({p for q in range(1, depth + 2) for p in _grid_points(lo, hi, q)})
    else:
        raise Unsupported(f"no decomposition scheme for {S.dsl()}")
    return [FiniteUnion([IntervalAtom.point(p)]) for p in pts if window.contains(p)]


def _grid_points(lo, hi, den):
    from .exact import floor_exact
    start = -floor_exact(-lo * den)
    stop = floor_exact(hi * den)
    return [Fraction(k, den) for k in range(start, stop + 1)]


def piece_containing(pieces, interval):
    """The index of the piece containing the interval when the pieces cover it."""
    union = FiniteUnion([a for p in pieces for a in p.atoms])
    if not union.contains_atom(interval):
        return None
    for k, p in enumerate(pieces):
        if p.contains_atom(interval):
            return k
    raise DomainError("an interval covered by disjoint closed pieces meets several of them")


# -- the join ---------------------------------------------------------------------

def _squash_factory(arg):
    n = int(arg)
    return (lambda t: ps.squash_value(n, t)), 1


register_deferred("squash", _squash_factory)


def squash_map(n):
    return _total(Deferred(f"squash:{n}", lambda t: ps.squash_value(n, t), 1))


def upper_bound_join(sets):
    """The join of finitely many sets placed in the unit intervals (n, n+1)."""
    sets = list(sets)
    join = ps.Union(tuple(ps.Squash(n, A) for n, A in enumerate(sets)))
    return join, [squash_map(n) for n in range(len(sets))]


from .stages import (  # noqa: E402  re-exported staged constructions
    StageState, glue_minimal, min_compact_truncation, min_fsigma_truncation, reduce_minimal_compact,
    reduce_to_Q,
)
