"""Symbolic subsets of the real line with exact membership.

Expressions are immutable trees of interval atoms, boolean combinators and
named generators.  Membership is the primitive; truncations, condition (I)
and the coarse classification are derived from it.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import minimal
from .errors import DepthExceeded, DomainError, Unsupported
from .exact import (
    INF, IntervalAtom, QSqrt2, as_rational, cantor_enclosure, cantor_fiber, cantor_preimage_member,
    cantor_value, floor_exact, format_rational, in_cantor_set, is_dyadic, is_finite, normalize,
)
from .finite import FiniteUnion
from .orders import (
    Anchor, OrdinalScheme, OmegaSqReversedScheme, PrivateInterval, SubsetPattern, ZomegaScheme,
    astar_member,
)

BUDGET = 64
X0 = Fraction(1, 3)


class SetExpr:
    """Base class of all set expressions."""

    def member(self, x):
        raise NotImplementedError

    def dsl(self):
        raise NotImplementedError

    def __str__(self):
        return self.dsl()


@dataclass(frozen=True)
class Atom(SetExpr):
    atom: IntervalAtom

    def member(self, x):
        return self.atom.contains(x)

    def dsl(self):
        return self.atom.dsl()


@dataclass(frozen=True)
class Union(SetExpr):
    children: tuple

    def member(self, x):
        return any(c.member(x) for c in self.children)

    def dsl(self):
        return "(union" + "".join(" " + c.dsl() for c in self.children) + ")"


@dataclass(frozen=True)
class Inter(SetExpr):
    children: tuple

    def member(self, x):
        return all(c.member(x) for c in self.children)

    def dsl(self):
        return "(inter" + "".join(" " + c.dsl() for c in self.children) + ")"


@dataclass(frozen=True)
class Compl(SetExpr):
    child: SetExpr

    def member(self, x):
        return not self.child.member(x)

    def dsl(self):
        return f"(compl {self.child.dsl()})"


@dataclass(frozen=True)
class Squash(SetExpr):
    """The image of a set under t -> n + 1/2 + t/(2(|t|+1)), inside (n, n+1)."""

    n: int
    child: SetExpr

    def member(self, x):
        s = x - self.n - Fraction(1, 2)
        if not abs(s) < Fraction(1, 2):
            return False
        t = normalize(2 * s / (1 - 2 * abs(s)))
        return self.child.member(t)

    def dsl(self):
        return f"(squash {self.n} {self.child.dsl()})"


def squash_value(n, t):
    if not is_finite(t):
        return Fraction(n + 1) if t > 0 else Fraction(n)
    return normalize(n + Fraction(1, 2) + t / (2 * (abs(t) + 1)))


def iv(lo, hi, lo_closed=True, hi_closed=True):
    return Atom(IntervalAtom(lo, hi, lo_closed, hi_closed))


def union(*children):
    return Union(tuple(children))


def inter(*children):
    return Inter(tuple(children))


# -- truncations and structure views ----------------------------------------

@dataclass(frozen=True)
class Truncation:
    window: IntervalAtom
    depth: int
    inner: FiniteUnion
    outer: FiniteUnion

    def uncertain_length(self):
        return self.outer.minus(self.inner).total_length()


@dataclass(frozen=True)
class BlockView:
    element: object
    anchor0: object
    anchor1: object
    half_open: IntervalAtom
    pattern: str


@dataclass(frozen=True)
class LStructureView:
    blocks: tuple
    note: str = ""

    def patterns(self):
        return [b.pattern for b in self.blocks]


# -- named generators ---------------------------------------------------------

@dataclass(frozen=True)
class Rules:
    i0: bool
    i1: bool
    cls: str
    reason: str


class Named(SetExpr):
    rules = None
    dense_codense = False

    def truncate(self, window, depth):
        raise Unsupported(f"no truncation scheme for {self.dsl()}")


def _window_bounds(window):
    if not (is_finite(window.lo) and is_finite(window.hi)):
        raise DomainError("truncation needs a finite window")
    return window.lo, window.hi


def _closed_window(window):
    return FiniteUnion([IntervalAtom.closed(window.lo, window.hi)])


def _digit_one_scan(x, budget):
    """For irrational x in (0,1): True once a ternary digit 1 shows up, None if unseen."""
    t = x
    for _ in range(budget):
        t = 3 * t
        d = floor_exact(t)
        t = t - d
        if d == 1:
            return True
    return None


@dataclass(frozen=True)
class Q(Named):
    rules = Rules(True, True, "other", "countable, dense and codense")
    dense_codense = True

    def member(self, x):
        return as_rational(x) is not None

    def dsl(self):
        return "(q)"

    def truncate(self, window, depth):
        lo, hi = _window_bounds(window)
        pts = set()
        for q in range(1, depth + 2):
            for p in range(floor_exact(lo * q), floor_exact(hi * q) + 1):
                pts.add(Fraction(p, q))
        inner = FiniteUnion([IntervalAtom.point(p) for p in pts if window.contains(p)])
        return Truncation(window, depth, inner, _closed_window(window))


@dataclass(frozen=True)
class Q2(Named):
    rules = Rules(True, True, "other", "countable, dense and codense")
    dense_codense = True

    def member(self, x):
        q = as_rational(x)
        return q is not None and is_dyadic(q)

    def dsl(self):
        return "(q2)"

    def truncate(self, window, depth):
        lo, hi = _window_bounds(window)
        s = 2 ** depth
        pts = [Fraction(p, s) for p in range(floor_exact(lo * s), floor_exact(hi * s) + 1)]
        inner = FiniteUnion([IntervalAtom.point(p) for p in pts if window.contains(p)])
        return Truncation(window, depth, inner, _closed_window(window))


@dataclass(frozen=True)
class CantorSet(Named):
    rules = Rules(True, False, "closed", "compact, contains no interval, open gaps")

    def member(self, x):
        q = as_rational(x)
        if q is not None:
            return in_cantor_set(q)
        if x < 0 or x > 1:
            return False
        if _digit_one_scan(x, BUDGET):
            return False
        raise DepthExceeded("cannot certify Cantor set membership of an irrational")

    def dsl(self):
        return "(cantor)"

    def truncate(self, window, depth):
        cells = [(Fraction(0), Fraction(1))]
        for _ in range(depth):
            nxt = []
            for a, b in cells:
                t = (b - a) / 3
                nxt.append((a, a + t))
                nxt.append((b - t, b))
            cells = nxt
        outer = FiniteUnion([IntervalAtom.closed(a, b) for a, b in cells]).clip(window)
        pts = {p for c in cells for p in c}
        inner = FiniteUnion([IntervalAtom.point(p) for p in pts if window.contains(p)])
        return Truncation(window, depth, inner, outer)


@dataclass(frozen=True)
class CantorPre(Named):
    """f_c^{-1}(Q2 + offset)."""

    offset: Fraction = X0
    rules = Rules(True, True, "other", "continuous preimage of a countable dense codense set")

    def __post_init__(self):
        object.__setattr__(self, "offset", Fraction(self.offset))

    def member(self, x):
        return cantor_pre_member(x, self.offset)

    def dsl(self):
        return f"(cantor-pre {format_rational(self.offset)})"

    def truncate(self, window, depth):
        lo, hi = _window_bounds(window)
        s = 2 ** depth
        vlo, vhi = cantor_enclosure(lo, BUDGET)[0], cantor_enclosure(hi, BUDGET)[1]
        atoms = []
        for k in range(floor_exact((vlo - self.offset) * s) - 1, floor_exact((vhi - self.offset) * s) + 2):
            a, b = cantor_fiber(Fraction(k, s) + self.offset)
            atom = IntervalAtom.closed(a, b).intersect(window)
            if atom is not None:
                atoms.append(atom)
        return Truncation(window, depth, FiniteUnion(atoms), _closed_window(window))


def cantor_pre_member(x, offset, budget=BUDGET):
    """x in f_c^{-1}(Q2 + offset) for any exact scalar x."""
    q = as_rational(x)
    if q is not None:
        return cantor_preimage_member(q, offset)
    lo, hi = cantor_enclosure(x, budget)
    if lo == hi:
        return is_dyadic(lo - offset)
    if not is_dyadic(offset):
        # the value is dyadic or irrational, never in Q2 + offset
        return False
    raise DepthExceeded("cannot certify the Cantor function value at an irrational")


def _structured_truncation(window, depth, blocks):
    """blocks: list of (private IntervalAtom, inner FiniteUnion, outer FiniteUnion)."""
    lo, hi = _window_bounds(window)
    inner, outer, covered = [], [], []
    for private, inn, out in blocks:
        inner.extend(inn.atoms)
        outer.extend(out.atoms)
        covered.append(private)
    known = FiniteUnion(covered)
    unknown = _closed_window(window).minus(known)
    inner_u = FiniteUnion(inner).clip(window)
    outer_u = FiniteUnion(outer).union(unknown).clip(window)
    return Truncation(window, depth, inner_u, outer_u)


@dataclass(frozen=True)
class Family34(Named):
    """The Z^(omega)-structured set coding a*: block i is [xi0, xi1) plus {xi2} or [xi2, xi3]."""

    a: SubsetPattern
    rules = Rules(False, False, "d2", "half-open blocks over a discrete embedding")
    scheme = ZomegaScheme(4)

    def member(self, x):
        loc = self.scheme.locate(x, max_depth=1024)
        if isinstance(loc, Anchor):
            point, offset = loc.element, loc.copy * self.scheme.radius(loc.element) / 4
        elif isinstance(loc, PrivateInterval):
            point, offset = loc.element, loc.offset
        else:
            return False
        return self.block_contains(point, offset)

    def block_contains(self, point, offset):
        step = self.scheme.radius(point) / 4
        if 0 <= offset < step:
            return True
        if astar_member(self.a, point):
            return offset == 2 * step
        return 2 * step <= offset <= 3 * step

    def pattern(self, point):
        return "singleton" if astar_member(self.a, point) else "interval"

    def compact_part(self, point):
        x2, x3 = self.scheme.anchor(point, 2), self.scheme.anchor(point, 3)
        if astar_member(self.a, point):
            return IntervalAtom.point(x2)
        return IntervalAtom.closed(x2, x3)

    def blocks(self, window, depth):
        lo, hi = _window_bounds(window)
        return self.scheme.enumerate(lo, hi, depth)

    def truncate(self, window, depth):
        out = []
        for p in self.blocks(window, depth):
            x0, x1 = self.scheme.anchor(p, 0), self.scheme.anchor(p, 1)
            part = FiniteUnion([IntervalAtom(x0, x1, True, False), self.compact_part(p)])
            private = IntervalAtom(x0, x0 + self.scheme.margin(p), True, False)
            out.append((private, part, part))
        return _structured_truncation(window, depth, out)

    def dsl(self):
        return f"(fam34 {self.a})"


@dataclass(frozen=True)
class AntiComplete(Named):
    """Blocks over reversed omega^2; the block of the finite ordinal n carries {xi2} iff n in a."""

    a: SubsetPattern
    rules = Rules(False, False, "d2", "half-open blocks over a discrete embedding")
    scheme = OmegaSqReversedScheme(4)

    def member(self, x):
        loc = self.scheme.locate(x, max_depth=1 << 20)
        if isinstance(loc, Anchor):
            point, offset = loc.element, loc.copy * self.scheme.radius(loc.element) / 4
        elif isinstance(loc, PrivateInterval):
            point, offset = loc.element, loc.offset
        else:
            return False
        step = self.scheme.radius(point) / 4
        if 0 <= offset < step:
            return True
        return self.has_singleton(point) and offset == 2 * step

    def has_singleton(self, point):
        n = point.finite_value()
        return n is not None and n in self.a

    def pattern(self, point):
        return "singleton" if self.has_singleton(point) else "empty"

    def blocks(self, window, depth):
        lo, hi = _window_bounds(window)
        return self.scheme.enumerate(lo, hi, depth)

    def truncate(self, window, depth):
        out = []
        for p in self.blocks(window, depth):
            x0, x1 = self.scheme.anchor(p, 0), self.scheme.anchor(p, 1)
            atoms = [IntervalAtom(x0, x1, True, False)]
            if self.has_singleton(p):
                atoms.append(IntervalAtom.point(self.scheme.anchor(p, 2)))
            part = FiniteUnion(atoms)
            private = IntervalAtom(x0, x0 + self.scheme.margin(p), True, False)
            out.append((private, part, part))
        return _structured_truncation(window, depth, out)

    def dsl(self):
        return f"(anticomplete {self.a})"


@dataclass(frozen=True)
class Family35(Named):
    """Blocks over omega^omega: [xi0, xi1)^A followed by [xi1, next)^B(i)."""

    b: SubsetPattern
    rules = Rules(True, True, "other", "blockwise preimages of dense codense sets, glued at anchors outside the set")
    scheme = OrdinalScheme(2)

    def is_plus(self, alpha):
        n = alpha.is_power()
        return n is not None and n not in self.b

    def pattern(self, alpha):
        return "B+" if self.is_plus(alpha) else "B"

    def frame(self, alpha):
        x0 = self.scheme.embed_point(alpha)
        x1 = self.scheme.anchor(alpha, 1)
        nxt = self.scheme.embed_point(alpha.successor())
        return x0, x1, nxt

    def member(self, x):
        if x < 0:
            return False
        if floor_exact(x) > 1024:
            raise DepthExceeded("exponent beyond the depth budget")
        alpha = self.scheme.block(x)
        x0, x1, nxt = self.frame(alpha)
        if x < x1:
            return cantor_pre_member((x - x0) / (x1 - x0), X0)
        v = (x - x1) / (nxt - x1)
        if self.is_plus(alpha) and v <= Fraction(2, 3):
            return True
        return cantor_pre_member(v, Fraction(0))

    def blocks(self, window, depth):
        lo, hi = _window_bounds(window)
        return self.scheme.enumerate(lo, hi, depth)

    def truncate(self, window, depth):
        out = []
        a_part, b_part = CantorPre(X0), CantorPre(Fraction(0))
        unit = IntervalAtom(Fraction(0), Fraction(1), True, False)
        for p in self.blocks(window, depth):
            x0, x1, nxt = self.frame(p)
            inner = []
            fa = minimal.Frame(x0, x1)
            inner.extend(fa.atom(t) for t in a_part.truncate(unit, depth).inner.atoms)
            fb = minimal.Frame(x1, nxt)
            inner.extend(fb.atom(t) for t in b_part.truncate(unit, depth).inner.atoms)
            if self.is_plus(p):
                inner.append(fb.atom(IntervalAtom.closed(0, Fraction(2, 3))))
            private = IntervalAtom(x0, nxt, True, False)
            inner_u = FiniteUnion(inner).intersect(FiniteUnion([private]))
            out.append((private, inner_u, FiniteUnion([IntervalAtom(x0, nxt, False, False)])))
        return _structured_truncation(window, depth, out)

    def dsl(self):
        return f"(fam35 {self.b})"


@dataclass(frozen=True)
class MinCompact(Named):
    rules = Rules(True, False, "closed", "compact with open gaps whose ends are thick")

    def member(self, x):
        return minimal.mc_member(x)

    def dsl(self):
        return "(min-compact)"

    def truncate(self, window, depth):
        inner, outer = minimal.mc_truncation(depth)
        return Truncation(window, depth, inner.clip(window), outer.clip(window))


@dataclass(frozen=True)
class MinFsigma(Named):
    rules = Rules(True, True, "other", "copies of the minimal compact set separated by closed free intervals")

    def member(self, x):
        return minimal.mf_member(x)

    def dsl(self):
        return "(min-fsigma)"

    def truncate(self, window, depth):
        lo, hi = _window_bounds(window)
        inner_u, outer_u = minimal.mf_truncation(depth)
        inner, outer = [], []
        for n in range(floor_exact(lo) - 1, floor_exact(hi) + 1):
            shift = minimal.Frame(Fraction(n), Fraction(n + 1))
            inner.extend(shift.atom(a) for a in inner_u.atoms)
            outer.extend(shift.atom(a) for a in outer_u.atoms)
        return Truncation(window, depth, FiniteUnion(inner).clip(window), FiniteUnion(outer).clip(window))


GENERATORS = {
    "q": Q, "q2": Q2, "cantor": CantorSet, "cantor-pre": CantorPre, "fam34": Family34,
    "fam35": Family35, "anticomplete": AntiComplete, "min-compact": MinCompact, "min-fsigma": MinFsigma,
}


# -- operations -----------------------------------------------------------------

def member(S, x):
    return S.member(normalize(x))


def normalize_finite(S):
    """The FiniteUnion denoted by S, or None when S involves a generator."""
    if isinstance(S, Atom):
        return FiniteUnion([S.atom])
    if isinstance(S, Union):
        parts = [normalize_finite(c) for c in S.children]
        if any(p is None for p in parts):
            return None
        return FiniteUnion.empty().union(*parts)
    if isinstance(S, Inter):
        parts = [normalize_finite(c) for c in S.children]
        if any(p is None for p in parts):
            return None
        return FiniteUnion.line().intersect(*parts)
    if isinstance(S, Compl):
        inner = normalize_finite(S.child)
        return None if inner is None else inner.complement()
    return None


def components(F):
    """Maximal intervals and points of a finite union, in order."""
    fu = F if isinstance(F, FiniteUnion) else normalize_finite(F)
    if fu is None:
        raise Unsupported("components need a finite union")
    return fu.components()


def _i0_finite(fu):
    for a in fu.atoms:
        if a.is_point():
            continue
        if is_finite(a.lo) and not a.lo_closed or is_finite(a.hi) and not a.hi_closed:
            return False
    return True


@dataclass(frozen=True)
class ICheck:
    i0: bool
    i1: bool
    reason: str = ""


def check_I(S):
    fu = normalize_finite(S)
    if fu is not None:
        return ICheck(_i0_finite(fu), _i0_finite(fu.complement()), "exact endpoint scan")
    i0, i1, reason = _rules(S)
    return ICheck(i0, i1, reason)


def _is_dense_codense(S):
    if isinstance(S, Named):
        return S.dense_codense
    if isinstance(S, Compl):
        return _is_dense_codense(S.child)
    return False


def _rules(S):
    if isinstance(S, Named):
        return S.rules.i0, S.rules.i1, S.rules.reason
    if isinstance(S, Compl):
        i0, i1, reason = _rules(S.child)
        return i1, i0, "complement: " + reason
    if isinstance(S, Union):
        i0, i1, reason = _rules(Inter(tuple(Compl(c) for c in S.children)))
        return i1, i0, reason
    if isinstance(S, Inter):
        finite = [normalize_finite(c) for c in S.children]
        gens = [c for c, f in zip(S.children, finite) if f is None]
        fin = FiniteUnion.line().intersect(*[f for f in finite if f is not None])
        if len(gens) == 1 and fin.is_full():
            return _rules(gens[0])
        if len(gens) == 1 and _is_dense_codense(gens[0]):
            return True, _dense_inter_i1(gens[0], fin), "dense codense set cut by a finite union"
    raise Unsupported(f"no condition (I) rule applies to {S.dsl()}")


def _dense_inter_i1(G, U):
    # intervals in the complement of G n U are the intervals of the complement of
    # U once isolated points of U outside G are dropped
    kept = [a for a in U.atoms if not (a.is_point() and not G.member(a.lo))]
    V = FiniteUnion(kept).complement()
    for comp in V.atoms:
        if comp.is_point():
            continue
        for e, closed in ((comp.lo, comp.lo_closed), (comp.hi, comp.hi_closed)):
            if is_finite(e) and not closed and U.contains(e) and G.member(e):
                return False
    return True


def classify(S):
    fu = normalize_finite(S)
    if fu is not None:
        if fu.is_empty() or fu.is_full():
            return "clopen-trivial"
        if fu.is_open():
            return "open"
        if fu.is_closed():
            return "closed"
        return "d2"
    if isinstance(S, Named):
        return S.rules.cls
    if isinstance(S, Compl) and isinstance(S.child, Named):
        flip = {"open": "closed", "closed": "open", "other": "other"}
        if S.child.rules.cls in flip:
            return flip[S.child.rules.cls]
    i0, i1, _ = _rules(S)
    if i0 and i1 and _nontrivial(S):
        return "other"
    raise Unsupported(f"cannot classify {S.dsl()}")


def _candidates(S):
    pts = {Fraction(0), Fraction(1, 2), Fraction(1), Fraction(-1), QSqrt2(0, 1), QSqrt2(Fraction(1, 2), Fraction(1, 7))}
    stack = [S]
    while stack:
        e = stack.pop()
        if isinstance(e, Atom):
            a = e.atom
            for p in (a.lo, a.hi):
                if is_finite(p):
                    pts.add(p)
            m = a.midpoint()
            pts.add(m)
            if is_finite(a.lo) and is_finite(a.hi) and a.lo != a.hi:
                pts.add(a.lo + (a.hi - a.lo) * QSqrt2(0, Fraction(1, 2)))
        elif isinstance(e, (Union, Inter)):
            stack.extend(e.children)
        elif isinstance(e, Compl):
            stack.append(e.child)
    return pts


def _nontrivial(S):
    seen = set()
    for p in _candidates(S):
        try:
            seen.add(S.member(p))
        except DepthExceeded:
            continue
    return seen == {True, False}


def truncate(S, window, depth):
    fu = normalize_finite(S)
    if fu is not None:
        part = fu.clip(window)
        return Truncation(window, depth, part, part)
    if isinstance(S, Named):
        return S.truncate(window, depth)
    win = FiniteUnion([window])
    if isinstance(S, Compl):
        t = truncate(S.child, window, depth)
        return Truncation(window, depth, win.minus(t.outer), win.minus(t.inner))
    parts = [truncate(c, window, depth) for c in S.children]
    if isinstance(S, Union):
        return Truncation(window, depth, FiniteUnion.empty().union(*[p.inner for p in parts]),
                          FiniteUnion.empty().union(*[p.outer for p in parts]))
    return Truncation(window, depth, win.intersect(*[p.inner for p in parts]),
                      win.intersect(*[p.outer for p in parts]))


def extract_structure(S, window, depth):
    if not isinstance(S, (Family34, Family35, AntiComplete)):
        raise Unsupported("structure views exist for the coded families only")
    if not (is_finite(window.lo) and is_finite(window.hi)):
        raise DepthExceeded("an infinite window has infinitely many blocks")
    blocks = []
    for p in S.blocks(window, depth):
        x0, x1 = S.scheme.anchor(p, 0), S.scheme.anchor(p, 1)
        blocks.append(BlockView(p, x0, x1, IntervalAtom(x0, x1, True, False), S.pattern(p)))
    return LStructureView(tuple(blocks))
