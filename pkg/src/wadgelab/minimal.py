"""The minimal compact set and the minimal F_sigma set, as exact recursive schemes.

The compact set lives in [0, 1]:

    M = F^{-1}(K),   F = 0 on [0,1/9],  f_c(9(x-1/9)/7) on [1/9,8/9],  1 on [8/9,1]

where K is the set of reals in [0, 1] with a base-4 expansion over the digits
{0, 2, 3}.  Every dyadic point of K pulls back to a closed interval (a thick
component) and all other points of K pull back to single points.  Gaps of K sit
at (0.w1, 0.w2) in base 4, so every gap end is dyadic and hence thick.  The
junction points 0.w3 = 0.w2333... are dense in K; their thick intervals are
approachable from both sides.

The F_sigma set on [0, 1] is a disjoint union of affine copies of M: two top
copies on [0, 1/5] and [4/5, 1], and every gap of a copy (and the middle
region (1/5, 4/5)) is filled by a ternary recursion whose middle thirds are
alternately free closed intervals (outside the set) and new copies.  On the
line the set is extended with period 1.
"""

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthExceeded
from .exact import IntervalAtom, as_rational, cantor_enclosure, cantor_fiber, cantor_value, floor_exact
from .finite import FiniteUnion

NINTH = Fraction(1, 9)
DIGITS = (0, 2, 3)
DEFAULT_BUDGET = 64


# -- the compact set M ----------------------------------------------------

def F(x):
    """The collapsing map of M; exact at rationals."""
    if x <= NINTH:
        return Fraction(0)
    if x >= 1 - NINTH:
        return Fraction(1)
    return cantor_value(9 * (x - NINTH) / 7)


@functools.lru_cache(maxsize=1 << 18)
def F_inv(y):
    """The closed interval F^{-1}(y) as (lo, hi) for rational y in [0, 1]."""
    if y == 0:
        return Fraction(0), NINTH
    if y == 1:
        return 1 - NINTH, Fraction(1)
    lo, hi = cantor_fiber(y)
    return NINTH + 7 * lo / 9, NINTH + 7 * hi / 9


def _k_locate(y):
    """("in", None) if y lies in K, else ("gap", (g1, g2, level)); y rational in [0,1]."""
    c, scale, level = Fraction(0), Fraction(1), 0
    seen = set()
    while True:
        t = (y - c) / scale
        if t in seen:
            return "in", None
        seen.add(t)
        level += 1
        q = scale / 4
        if t in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
            return "in", None
        if t < Fraction(1, 4):
            digit = 0
        elif t < Fraction(1, 2):
            return "gap", (c + q, c + 2 * q, level)
        elif t < Fraction(3, 4):
            digit = 2
        else:
            digit = 3
        c += digit * q
        scale = q


def _k_locate_interval(lo, hi, budget):
    """Classify an enclosure [lo, hi] of F(x): "in", a gap, or None if undecided."""
    c, scale = Fraction(0), Fraction(1)
    for level in range(1, budget + 1):
        q = scale / 4
        cells = [(c, c + q, 0), (c + 2 * q, c + 3 * q, 2), (c + 3 * q, c + scale, 3)]
        if c + q < lo and hi < c + 2 * q:
            return "gap", (c + q, c + 2 * q, level)
        for a, b, d in cells:
            if a < lo and hi < b:
                c, scale = a, q
                break
        else:
            return None
    return None


def mc_locate(x, budget=DEFAULT_BUDGET):
    """Locate an exact scalar relative to M.

    Returns ("in", None), ("out", None) for points outside [0, 1], or
    ("gap", (lo, hi, level)) for the open gap of M containing x.
    """
    if x < 0 or x > 1:
        return "out", None
    if x <= NINTH or x >= 1 - NINTH:
        return "in", None
    q = as_rational(x)
    if q is not None:
        kind, gap = _k_locate(F(q))
    else:
        lo, hi = cantor_enclosure(9 * (x - NINTH) / 7, budget)
        if lo == hi:
            kind, gap = _k_locate(lo)
        else:
            res = _k_locate_interval(lo, hi, budget)
            if res is None:
                raise DepthExceeded("cannot certify membership in the minimal compact set")
            kind, gap = res
    if kind == "in":
        return "in", None
    g1, g2, level = gap
    return "gap", (F_inv(g1)[1], F_inv(g2)[0], level)


def mc_member(x, budget=DEFAULT_BUDGET):
    return mc_locate(x, budget)[0] == "in"


def _prefixes(length):
    for word in itertools.product(DIGITS, repeat=length):
        yield sum((Fraction(d, 4 ** (j + 1)) for j, d in enumerate(word)), Fraction(0))


def k_cells(depth):
    """Left ends of the level-depth closed cells of K."""
    return sorted(_prefixes(depth))


@functools.lru_cache(maxsize=None)
def mc_gaps(depth):
    """Open gaps of M of level <= depth, as (level, lo, hi), sorted by position."""
    out = []
    for level in range(1, depth + 1):
        q = Fraction(1, 4 ** level)
        for c in _prefixes(level - 1):
            out.append((level, F_inv(c + q)[1], F_inv(c + 2 * q)[0]))
    out.sort(key=lambda g: g[1])
    return tuple(out)


def mc_junctions(depth):
    """Thick intervals of M approachable from both sides, level <= depth, as (level, lo, hi)."""
    out = []
    for level in range(1, depth + 1):
        q = Fraction(1, 4 ** level)
        for c in _prefixes(level - 1):
            lo, hi = F_inv(c + 3 * q)
            out.append((level, lo, hi))
    out.sort(key=lambda g: g[1])
    return out


@functools.lru_cache(maxsize=None)
def mc_truncation(depth):
    """(inner, outer) finite unions with inner <= M <= outer, nested in depth."""
    q = Fraction(1, 4 ** depth)
    cells = k_cells(depth)
    outer = FiniteUnion(IntervalAtom.closed(F_inv(c)[0], F_inv(c + q)[1]) for c in cells)
    ends = set()
    for c in cells:
        ends.add(c)
        ends.add(c + q)
    inner = FiniteUnion(IntervalAtom.closed(*F_inv(y)) for y in ends)
    return inner, outer


# -- affine frames ----------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """The affine increasing map t -> lo + (hi - lo) t from [0, 1] onto [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def to_outer(self, t):
        return self.lo + (self.hi - self.lo) * t

    def to_inner(self, x):
        return (x - self.lo) / (self.hi - self.lo)

    def atom(self, a):
        return IntervalAtom(self.to_outer(a.lo), self.to_outer(a.hi), a.lo_closed, a.hi_closed)

    def union(self, fu):
        return FiniteUnion(self.atom(a) for a in fu.atoms)

    def diameter(self):
        return self.hi - self.lo


# -- the F_sigma set ----------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """A copy of M (kind "copy") or a free closed interval (kind "free") with its generation."""

    kind: str
    lo: Fraction
    hi: Fraction
    gen: int

    @property
    def frame(self):
        return Frame(self.lo, self.hi)

    def atom(self):
        return IntervalAtom.closed(self.lo, self.hi)


TOP_COPIES = (Piece("copy", Fraction(0), Fraction(1, 5), 0),
              Piece("copy", Fraction(4, 5), Fraction(1), 0))
TOP_REGION = (Fraction(1, 5), Fraction(4, 5))


def _region_cell(u, v, r, g0):
    L = v - u
    kind = "free" if r % 2 == 0 else "copy"
    return Piece(kind, u + L / 3, u + 2 * L / 3, g0 + r + 1), (u, u + L / 3), (u + 2 * L / 3, v)


def mf_unit_locate(t, budget=DEFAULT_BUDGET):
    """Locate t in [0, 1] relative to the unit F_sigma set.

    Returns ("copy", piece) when t lies in a copy, ("free", piece) inside a free
    interval, or ("limit", None) for points in no piece.  Generations in the
    returned piece are not tracked (0).
    """
    if t <= TOP_COPIES[0].hi:
        state = TOP_COPIES[0]
    elif t >= TOP_COPIES[1].lo:
        state = TOP_COPIES[1]
    else:
        state = (TOP_REGION[0], TOP_REGION[1], 0)
    seen = set()
    for _ in range(budget):
        if isinstance(state, Piece):
            kind, gap = mc_locate(state.frame.to_inner(t), budget)
            if kind == "in":
                return "copy", state
            state = (state.frame.to_outer(gap[0]), state.frame.to_outer(gap[1]), 0)
            continue
        u, v, r = state
        key = ((t - u) / (v - u), r % 2)
        if key in seen:
            return "limit", None
        seen.add(key)
        mid, left, right = _region_cell(u, v, r, 0)
        if mid.lo <= t <= mid.hi:
            if mid.kind == "free":
                return "free", mid
            state = mid
        else:
            u, v = left if t < mid.lo else right
            state = (u, v, r + 1)
    raise DepthExceeded("F_sigma membership needs more nesting than the budget")


def mf_member(x, budget=DEFAULT_BUDGET):
    """Membership in the periodic F_sigma set on the line."""
    n = floor_exact(x)
    return mf_unit_locate(x - n, budget)[0] == "copy"


def mf_pieces(depth):
    """All copies and free intervals of generation <= depth, plus unresolved regions.

    Returns (pieces, residual) where residual lists closed intervals (u, v) of
    regions whose fill is beyond the depth.
    """
    pieces, residual = [], []
    stack = [p for p in TOP_COPIES] + [("region", TOP_REGION[0], TOP_REGION[1], 0, 0)]
    while stack:
        item = stack.pop()
        if isinstance(item, Piece):
            pieces.append(item)
            if item.kind == "copy":
                for level, glo, ghi in mc_gaps((depth - item.gen) // 2):
                    u, v = item.frame.to_outer(glo), item.frame.to_outer(ghi)
                    stack.append(("region", u, v, 0, item.gen + 2 * level))
            continue
        _, u, v, r, g0 = item
        mid, left, right = _region_cell(u, v, r, g0)
        if mid.gen > depth:
            residual.append((u, v))
            continue
        stack.append(mid)
        stack.append(("region", left[0], left[1], r + 1, g0))
        stack.append(("region", right[0], right[1], r + 1, g0))
    pieces.sort(key=lambda p: (p.lo, p.hi))
    residual.sort()
    return pieces, residual


def mf_truncation(depth):
    """(inner, outer) for the unit F_sigma set; outer is nested in depth."""
    pieces, residual = mf_pieces(depth)
    inner_atoms, outer_atoms = [], []
    for p in pieces:
        if p.kind != "copy":
            continue
        inn, out = mc_truncation((depth - p.gen) // 2)
        inner_atoms.extend(p.frame.atom(a) for a in inn.atoms)
        outer_atoms.extend(p.frame.atom(a) for a in out.atoms)
    outer_atoms.extend(IntervalAtom.closed(u, v) for u, v in residual)
    return FiniteUnion(inner_atoms), FiniteUnion(outer_atoms)
