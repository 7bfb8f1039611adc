"""Stage executors: the staged reduction to Q and the minimal-set machinery.

Each executor grows a partial map one stage at a time and keeps the whole run
in a StageState: the assigned domain pieces (with the stage that assigned
them), the interval ledger and the epsilon schedule.  Pieces of a source or a
target are visited in fixed canonical orders (see enumeration.py), so runs are
reproducible and every "least piece" choice is well defined.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .enumeration import (
    SQRT2, dyadic_key, irrational_key, irrational_slot, iter_dyadics, iter_rationals, least_dyadic_in,
    least_irrational_in, least_rational_in, nth, rational_key,
)
from .errors import BadAnchors, DepthExceeded, DomainError, EmptyTarget, NotConditionI, Unsupported
from .exact import INF, IntervalAtom, QSqrt2, as_rational, cantor_fiber, cantor_value, format_scalar, is_finite, normalize
from .finite import FiniteUnion
from . import minimal
from .minimal import F_inv, mc_locate
from .orders import OrdinalCNF
from .pointset import (
    CantorSet, Family35, MinCompact, MinFsigma, Q, Q2, Truncation, check_I, normalize_finite,
)
from .redmap import Affine, Cell, Constant, Deferred, PiecewiseMap, register_deferred, verify_reduction

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


# -- stage states -------------------------------------------------------------

@dataclass
class Entry:
    """One assigned domain piece.

    atoms are the closed domain atoms the piece contributes, cells the map
    cells over them, hull the convex hull used for ordering and ``value`` the
    image hull (lo, hi).
    """

    kind: str
    key: tuple
    hull: tuple
    atoms: tuple
    cells: tuple
    value: tuple
    stage: int
    segments: tuple = ()

    def units(self):
        """(segment, image hull) pairs; a copy of M contributes one per solid segment."""
        return self.segments or ((self.hull, self.value),)


@dataclass
class StageState:
    stage: int = 0
    entries: list = field(default_factory=list)
    ledger: list = field(default_factory=list)
    eps: list = field(default_factory=list)
    partial_domain: object = None
    notes: list = field(default_factory=list)

    @property
    def gamma(self):
        return list(self.entries)

    @property
    def epsilon(self):
        return self.eps[-1] if self.eps else None

    def map_at(self, stage=None):
        """The partial map f_stage (default: the latest)."""
        stage = self.stage if stage is None else stage
        cells, atoms = [], []
        for e in self.entries:
            if e.stage <= stage:
                cells.extend(e.cells)
                atoms.extend(e.atoms)
        return PiecewiseMap(cells, partial=True, domain=FiniteUnion(atoms))

    @property
    def f(self):
        return self.map_at()

    def ordered(self, stage=None):
        stage = self.stage if stage is None else stage
        return sorted((e for e in self.entries if e.stage <= stage), key=lambda e: e.hull)

    def to_text(self):
        lines = [self.map_at().to_text().rstrip("\n"), f"STAGE {self.stage}"]
        if self.eps:
            lines.append(f"EPS {format_scalar(self.eps[-1])}")
        for atom, avoid in self.ledger:
            lines.append(f"LEDGER {atom} avoid={avoid}")
        return "\n".join(lines) + "\n"


def _point_entry(kind, key, atom, value, stage):
    v = normalize(value)
    return Entry(kind, key, (atom.lo, atom.hi), (atom,), (Cell(atom.lo, atom.hi, Constant(v)),), (v, v), stage)


def _between(hull, lo, hi):
    return lo < hull[0] and hull[1] < hi


def check_extension(state):
    """Values assigned at stage m are unchanged later (entries are never rewritten)."""
    seen = {}
    for e in state.entries:
        if e.hull in seen and seen[e.hull] != e.value:
            return False
        seen[e.hull] = e.value
    return all(e.stage <= state.stage for e in state.entries)


def _units(state, stage):
    out = [(seg, val, e.stage) for e in state.entries if e.stage <= stage for seg, val in e.units()]
    out.sort(key=lambda u: u[0])
    return out


def check_coherence(state):
    """For every stage m and successive pieces of Gamma_m with disjoint images,
    every later piece strictly between them has its image strictly between."""
    final = _units(state, state.stage)
    for m in range(state.stage + 1):
        snap = _units(state, m)
        for (ps, pv, _), (qs, qv, _) in zip(snap, snap[1:]):
            lo, hi = sorted((pv, qv))
            if not lo[1] < hi[0]:
                continue
            for seg, val, st in final:
                if st > m and ps[1] < seg[0] and seg[1] < qs[0]:
                    if not _between(val, lo[1], hi[0]):
                        return False
    return True


def check_eps(state):
    return all(b <= a / 2 for a, b in zip(state.eps, state.eps[1:]))


# -- decompositions -------------------------------------------------------------
#
# A decomposition lists the closed pieces of a set (A pieces) and closed
# connected pieces of its complement (B pieces) in key order, and finds the
# least-keyed piece inside an open interval.

class RationalsDecomposition:
    """Q: rational points; complement pieces are the points sqrt2 + p_k."""

    def __init__(self):
        self.expr = Q()

    def a_piece(self, k):
        r = nth(iter_rationals, k)
        return rational_key(r), IntervalAtom.point(r)

    def b_piece(self, k):
        return rational_key(nth(iter_rationals, k)), IntervalAtom.point(irrational_slot(k))

    def least_a_in(self, lo, hi):
        r = least_rational_in(lo, hi)
        return rational_key(r), IntervalAtom.point(r)

    def least_b_in(self, lo, hi):
        r = least_irrational_in(lo, hi)
        return irrational_key(r), IntervalAtom.point(r)


class DyadicsDecomposition:
    """Q2: dyadic points; complement pieces are the points d + 1/3."""

    def __init__(self):
        self.expr = Q2()

    def a_piece(self, k):
        d = nth(iter_dyadics, k)
        return dyadic_key(d), IntervalAtom.point(d)

    def b_piece(self, k):
        d = nth(iter_dyadics, k)
        return dyadic_key(d), IntervalAtom.point(d + THIRD)

    def least_a_in(self, lo, hi):
        d = least_dyadic_in(lo, hi)
        return None if d is None else (dyadic_key(d), IntervalAtom.point(d))

    def least_b_in(self, lo, hi):
        d = least_dyadic_in(lo - THIRD, hi - THIRD)
        return None if d is None else (dyadic_key(d), IntervalAtom.point(d + THIRD))


def _fc(x):
    if x == -INF:
        return -INF
    if x == INF:
        return INF
    return cantor_value(x)


class Family35Decomposition:
    """Finitely many finite-ordinal blocks of a Family35 set.

    Each block [x0, nxt) splits into an A-part [x0, x1), where the set is the
    f_c-preimage of Q2 + 1/3, and a B-part [x1, nxt) with Q2 in place of
    Q2 + 1/3 (plus the solid head [0, 2/3] on B+ blocks).  Pieces of the set:
    A-part points (value d + 1/3) and B-part flats (value d).  Complement
    pieces: the rays, A-part flats and B-part points.  Keys are
    (dyadic key, block, kind).
    """

    RAY = (0, 0, 0, 0)

    def __init__(self, family, blocks, upper_ray=True):
        self.family = family
        self.blocks = blocks
        self.frames = [family.frame(OrdinalCNF.finite(k)) for k in range(blocks)]
        self.plus = [family.is_plus(OrdinalCNF.finite(k)) for k in range(blocks)]
        self.top = self.frames[-1][2]
        self.upper_ray = upper_ray
        self.expr = family
        self._seqs = {}

    # coordinates
    def _a_atom(self, k, lo, hi):
        x0, x1, _ = self.frames[k]
        return IntervalAtom.closed(x0 + (x1 - x0) * lo, x0 + (x1 - x0) * hi)

    def _b_atom(self, k, lo, hi):
        _, x1, nxt = self.frames[k]
        return IntervalAtom.closed(x1 + (nxt - x1) * lo, x1 + (nxt - x1) * hi)

    def _unit(self, x, a, b):
        if x == -INF:
            return -INF
        if x == INF:
            return INF
        return (x - a) / (b - a)

    def _iter(self, part):
        for d in iter_dyadics():
            for k in range(self.blocks):
                yield from self._pieces_at(d, k, part)

    def _pieces_at(self, d, k, part):
        key = dyadic_key(d)
        if part == "a":
            w = d + THIRD
            if 0 < w < 1:
                u = cantor_fiber(w)[0]
                yield (key, k, 0), self._a_atom(k, u, u)
            if 0 <= d < 1:
                if self.plus[k] and d == 0:
                    yield (key, k, 1), self._b_atom(k, 0, Fraction(2, 3))
                elif not (self.plus[k] and 0 < d <= HALF):
                    yield (key, k, 1), self._b_atom(k, *cantor_fiber(d))
        else:
            if 0 <= d < 1 and not (k == 0 and d == 0):
                yield (key, k, 2), self._a_atom(k, *cantor_fiber(d))
            w = d + THIRD
            if 0 < w < 1 and not (self.plus[k] and w <= HALF):
                v = cantor_fiber(w)[0]
                yield (key, k, 3), self._b_atom(k, v, v)

    def _rays(self):
        out = [((self.RAY, -1, 0), IntervalAtom(-INF, 0, False, True))]
        if self.upper_ray:
            out.append(((self.RAY, -1, 1), IntervalAtom(self.top, INF, True, False)))
        return out

    def _nth(self, part, k):
        if part not in self._seqs:
            head = [] if part == "a" else self._rays()
            self._seqs[part] = (head, self._iter(part))
        seq, it = self._seqs[part]
        while len(seq) <= k:
            seq.append(next(it))
        return seq[k]

    def a_piece(self, k):
        return self._nth("a", k)

    def b_piece(self, k):
        return self._nth("b", k)

    def _least(self, lo, hi, part):
        best = None
        if part == "b":
            for key, atom in self._rays():
                if lo < atom.lo and atom.hi < hi:
                    best = min(best, (key, atom)) if best else (key, atom)
        for k in range(self.blocks):
            x0, x1, nxt = self.frames[k]
            if hi <= x0 or lo >= nxt:
                continue
            ulo, uhi = _fc(self._unit(lo, x0, x1)), _fc(self._unit(hi, x0, x1))
            vlo, vhi = _fc(self._unit(lo, x1, nxt)), _fc(self._unit(hi, x1, nxt))
            for cand in self._block_least(k, part, ulo, uhi, vlo, vhi):
                if cand is not None and (best is None or cand[0] < best[0]):
                    best = cand
        return best

    def _block_least(self, k, part, ulo, uhi, vlo, vhi):
        # a piece with Cantor value w lies inside (lo, hi) iff f_c(lo) < w < f_c(hi)
        if part == "a":
            d = least_dyadic_in(max(ulo, 0) - THIRD, min(uhi, 1) - THIRD)
            if d is not None:
                yield next(self._pieces_at(d, k, "a"))
            if self.plus[k]:
                if vlo < 0 and vhi > Fraction(2, 3):
                    yield self._merged(k)
                d = least_dyadic_in(max(vlo, HALF), min(vhi, 1))
            else:
                d = least_dyadic_in(max(vlo, 0), min(vhi, 1), lo_closed=vlo < 0)
            if d is not None:
                yield ((dyadic_key(d), k, 1), self._b_atom(k, *cantor_fiber(d)))
        else:
            lo_closed = ulo < 0 and k > 0
            d = least_dyadic_in(max(ulo, 0), min(uhi, 1), lo_closed=lo_closed)
            if d is not None:
                yield ((dyadic_key(d), k, 2), self._a_atom(k, *cantor_fiber(d)))
            wlo = max(vlo, HALF) if self.plus[k] else max(vlo, 0)
            d = least_dyadic_in(wlo - THIRD, min(vhi, 1) - THIRD)
            if d is not None:
                v = cantor_fiber(d + THIRD)[0]
                yield ((dyadic_key(d), k, 3), self._b_atom(k, v, v))

    def _merged(self, k):
        return (dyadic_key(0), k, 1), self._b_atom(k, 0, Fraction(2, 3))

    def least_a_in(self, lo, hi):
        return self._least(lo, hi, "a")

    def least_b_in(self, lo, hi):
        return self._least(lo, hi, "b")


def family35_window(family, blocks=2):
    """The Family35 set cut to its first finite-ordinal blocks, with its decomposition."""
    from .pointset import Inter, Atom
    dec = Family35Decomposition(family, blocks)
    dec.expr = Inter((family, Atom(IntervalAtom(0, dec.top, True, False))))
    return dec


def source_decomposition(S):
    if isinstance(S, Q2):
        return DyadicsDecomposition()
    if isinstance(S, Q):
        return RationalsDecomposition()
    if isinstance(S, Family35):
        return family35_window(S)
    if isinstance(S, Family35Decomposition):
        return S
    fu = normalize_finite(S)
    if fu is not None:
        res = check_I(S)
        if not (res.i0 and res.i1):
            raise NotConditionI(f"{S.dsl()} fails condition (I)")
    else:
        try:
            res = check_I(S)
        except Unsupported:
            res = None
        if res is not None and not (res.i0 and res.i1):
            raise NotConditionI(f"{S.dsl()} fails condition (I)")
    raise Unsupported(f"no piece enumerator for {S.dsl()}")


# -- the staged reduction to Q ------------------------------------------------------

def _pow2_floor(x):
    """The largest 2^-m (m >= 0) with 2^-m <= x, for 0 < x."""
    p = Fraction(1)
    while p > x:
        p /= 2
    return p


class _QStager:
    def __init__(self, dec, fill_cap):
        self.dec = dec
        self.fill_cap = fill_cap
        self.state = StageState()
        self.assigned = set()

    def neighbours(self, atom):
        left = right = None
        for e in self.state.entries:
            if e.hull[1] < atom.lo and (left is None or e.hull[1] > left.hull[1]):
                left = e
            if e.hull[0] > atom.hi and (right is None or e.hull[0] < right.hull[0]):
                right = e
        return left, right

    def step(self, kind, key, atom, n):
        left, right = self.neighbours(atom)
        fx = left.value[1] if left else -INF
        fy = right.value[0] if right else INF
        least = least_rational_in if kind == "A" else least_irrational_in
        if fx != fy:
            lo, hi = min(fx, fy), max(fx, fy)
            r = least(lo, hi)
        else:
            v = fx
            ell = self.state.eps[n] if n < len(self.state.eps) else self.state.eps[-1]
            i = len(self.state.ledger)
            for j in range(i + 1):
                q = irrational_slot(j)
                if q > v:
                    ell = min(ell, q - v)
            for atom_j, _ in self.state.ledger:
                if atom_j.lo < v < atom_j.hi:
                    ell = min(ell, (atom_j.hi - v) / 2)
            for e in self.state.entries:
                if e.value[0] > v:
                    ell = min(ell, (e.value[0] - v) / 2)
            ell = _pow2_floor(ell) if as_rational(ell) is None else Fraction(ell)
            interval = IntervalAtom.open(v, v + ell)
            self.state.ledger.append((interval, i))
            r = least(v, v + ell)
        self.state.entries.append(_point_entry(kind, key, atom, r, n) if atom.is_point()
                                  else _const_entry(kind, key, atom, r, n))
        self.assigned.add((atom.lo, atom.hi))

    def fill(self, n):
        ordered = self.state.ordered()
        gaps = []
        bounds = [-INF] + [b for e in ordered for b in e.hull] + [INF]
        for lo, hi in zip(bounds[::2], bounds[1::2]):
            if lo < hi:
                cand = self.dec.least_a_in(lo, hi)
                if cand is not None:
                    gaps.append(cand)
        gaps.sort(key=lambda c: c[0])
        for key, atom in gaps[:self.fill_cap]:
            self.step("A", key, atom, n)


def _const_entry(kind, key, atom, value, stage):
    v = normalize(value)
    cell = Cell(atom.lo if is_finite(atom.lo) else -INF, atom.hi if is_finite(atom.hi) else INF, Constant(v))
    return Entry(kind, key, (atom.lo, atom.hi), (atom,), (cell,), (v, v), stage)


def reduce_to_Q(S, stages, fill_cap=3):
    """Run the staged reduction of S to Q for the given number of stages.

    S is Q2, Q or a Family35 set (cut to its first two finite-ordinal
    blocks).  Stage 0 maps A_0 to p_0 and B_0 to q_0; stage n applies the
    step to A_n and B_n and then fills up to ``fill_cap`` open gaps between
    assigned pieces, least piece key first.
    """
    dec = source_decomposition(S)
    if stages < 0:
        raise DomainError("stages must be >= 0")
    run = _QStager(dec, fill_cap)
    st = run.state
    st.eps = [Fraction(1, 2 ** n) for n in range(stages + 1)]
    key, atom = dec.a_piece(0)
    st.entries.append(_const_entry("A", key, atom, nth(iter_rationals, 0), 0))
    run.assigned.add((atom.lo, atom.hi))
    key, atom = dec.b_piece(0)
    st.entries.append(_const_entry("B", key, atom, irrational_slot(0), 0))
    run.assigned.add((atom.lo, atom.hi))
    for n in range(1, stages + 1):
        st.stage = n
        for kind, getter in (("A", dec.a_piece), ("B", dec.b_piece)):
            key, atom = getter(n)
            if (atom.lo, atom.hi) not in run.assigned:
                run.step(kind, key, atom, n)
        run.fill(n)
    st.source = dec.expr
    return st


def check_sorting(state):
    """A pieces go to rationals and B pieces to sqrt2 + rationals."""
    for e in state.entries:
        v = e.value[0]
        if e.kind == "A" and as_rational(v) is None:
            return False
        if e.kind == "B" and not (isinstance(v, QSqrt2) and v.b == 1):
            return False
    return True


def check_ledger(state):
    """Each ledger interval avoids the forbidden pieces 0..k for its recorded k."""
    forbidden = getattr(state, "forbidden", lambda j: IntervalAtom.point(irrational_slot(j)))
    for atom, avoid in state.ledger:
        for j in range(avoid + 1):
            if atom.intersect(forbidden(j)) is not None:
                return False
    return True


def verify_stage_map(state, target, window=None, grid_n=400):
    """Partial verification of f_n on its domain against the target."""
    f = state.map_at()
    if window is None:
        finite = [b for e in state.entries for b in e.hull if is_finite(b)]
        window = IntervalAtom.closed(min(finite) - 1, max(finite) + 1)
    extra = [a.lo for e in state.entries for a in e.atoms if is_finite(a.lo)]
    extra += [a.hi for e in state.entries for a in e.atoms if is_finite(a.hi)]
    return verify_reduction(f, state.source, target, window, grid_n, extra)


# -- truncations of the minimal sets ---------------------------------------------

UNIT = IntervalAtom.closed(0, 1)


def min_compact_truncation(depth):
    inner, outer = minimal.mc_truncation(depth)
    return Truncation(UNIT, depth, inner, outer)


def min_fsigma_truncation(depth):
    inner, outer = minimal.mf_truncation(depth)
    return Truncation(UNIT, depth, inner, outer)


# -- digit-coded compact sets ------------------------------------------------------

class DigitCompact:
    """A compact set coded by base-b expansions over a digit set.

    realize(y) is the closed interval of reals carrying code y (a point for
    the Cantor set, a thick interval for the minimal compact set).  Items at
    level l+1 live in a level-l cell c of width W: one junction c + jf*W
    (a component approachable from both sides) and the gaps between
    non-adjacent digits.
    """

    MAX_LEVEL = 48

    def __init__(self, base, digits, jf, realize, expr):
        self.base, self.digits, self.jf = base, digits, Fraction(jf)
        self.realize = realize
        self.expr = expr
        self._gap_digits = [(a, b) for a, b in zip(digits, digits[1:]) if b > a + 1]

    def extent(self, c, W):
        return self.realize(c)[0], self.realize(c + W)[1]

    def children(self, c, W):
        w = W / self.base
        return [(c + d * w, w) for d in self.digits]

    def junction(self, c, W):
        return self.realize(c + self.jf * W)

    def gaps(self, c, W):
        w = W / self.base
        out = []
        for a, b in self._gap_digits:
            left, right = self.realize(c + (a + 1) * w), self.realize(c + b * w)
            out.append((left, right))
        return out

    def _search(self, lo, hi, pick):
        frontier = [(Fraction(0), Fraction(1))]
        for level in range(1, self.MAX_LEVEL + 1):
            found = []
            for c, W in frontier:
                found.extend(pick(c, W))
            if found:
                return min(found)
            nxt = []
            for c, W in frontier:
                for cc, ww in self.children(c, W):
                    e1, e2 = self.extent(cc, ww)
                    if e1 < hi and e2 > lo:
                        nxt.append((cc, ww))
            frontier = nxt
            if not frontier:
                return None
        return None

    def least_junction(self, lo, hi):
        """The least (level, position) junction component inside the open (lo, hi)."""
        def pick(c, W):
            a, b = self.junction(c, W)
            return [(a, b)] if lo < a and b < hi else []
        return self._search(lo, hi, pick)

    def least_gap(self, lo, hi, flanks_inside=False):
        """The least gap (left component, right component) with the gap inside [lo, hi];
        with flanks_inside both flanking components must lie in the open (lo, hi)."""
        def pick(c, W):
            out = []
            for left, right in self.gaps(c, W):
                if flanks_inside:
                    ok = lo < left[0] and right[1] < hi
                else:
                    ok = lo <= left[1] and right[0] <= hi
                if ok:
                    out.append((left[1], left, right))
            return [(left, right) for _, left, right in sorted(out)]
        return self._search(lo, hi, pick)

    def meets(self, lo, hi):
        """Whether the open interval (lo, hi) meets the set."""
        if not lo < hi:
            return False
        frontier = [(Fraction(0), Fraction(1))]
        for _ in range(self.MAX_LEVEL + 1):
            nxt = []
            for c, W in frontier:
                for end in (self.realize(c), self.realize(c + W)):
                    if end[0] < hi and end[1] > lo:
                        return True
                for cc, ww in self.children(c, W):
                    e1, e2 = self.extent(cc, ww)
                    if e1 < hi and e2 > lo:
                        nxt.append((cc, ww))
            frontier = nxt
            if not frontier:
                return False
        raise DepthExceeded("cannot decide whether the interval meets the target")

    def adjacent_gap(self, v):
        """The far end of a gap with v as one end, or None."""
        frontier = [(Fraction(0), Fraction(1))]
        for _ in range(self.MAX_LEVEL):
            nxt = []
            for c, W in frontier:
                for left, right in self.gaps(c, W):
                    if left[1] == v:
                        return right[0]
                    if right[0] == v:
                        return left[1]
                for cc, ww in self.children(c, W):
                    e1, e2 = self.extent(cc, ww)
                    if e1 <= v <= e2:
                        nxt.append((cc, ww))
            frontier = nxt
        return None

    def bounds(self):
        return self.realize(Fraction(0)), self.realize(Fraction(1))


def _point(y):
    return y, y


CANTOR_CODE = DigitCompact(3, (0, 2), Fraction(1, 4), _point, CantorSet())
MC_CODE = DigitCompact(4, (0, 2, 3), Fraction(3, 4), F_inv, MinCompact())


def _onto(src, dst, increasing=True):
    """The monotone affine (or constant) piece mapping [src] onto [dst]."""
    (a1, a2), (b1, b2) = src, dst
    if b1 == b2:
        return Constant(b1)
    if not increasing:
        b1, b2 = b2, b1
    slope = (b2 - b1) / (a2 - a1)
    return Affine(slope, b1 - slope * a1)


# -- tent fillers ---------------------------------------------------------------

def _tent_value(t, x, y, vx, vy, far, gap):
    """Fill of [x, y] whose M-points go to the end values and whose M-gaps go
    strictly into the complement: towards ``far`` when vx == vy, otherwise
    affinely across the chosen gap and towards the other end elsewhere."""
    if t <= x:
        return vx
    if t >= y:
        return vy
    kind, g = mc_locate(t)
    if vx == vy:
        base, towards = vx, far
    elif t < gap[0]:
        base, towards = vx, vy
    elif t > gap[1]:
        base, towards = vy, vx
    else:
        return normalize(vx + (t - gap[0]) * (vy - vx) / (gap[1] - gap[0]))
    if kind == "in":
        return base
    d = min(t - g[0], g[1] - t, 1)
    return normalize(base + (towards - base) / 2 * d)


def _tent_factory(arg):
    from .exact import parse_scalar
    parts = arg.split(",")
    x, y, vx, vy = (parse_scalar(p) for p in parts[:4])
    far = parse_scalar(parts[4]) if parts[4] != "-" else None
    gap = None
    if vx != vy:
        left, right = MC_CODE.least_gap(x, y, flanks_inside=False) or (None, None)
        if left is None:
            raise DepthExceeded("no gap of the minimal compact set inside the fill interval")
        gap = (left[1], right[0])
    direction = 0 if vx == vy else (1 if vx < vy else -1)
    return (lambda t: _tent_value(normalize(t), x, y, vx, vy, far, gap)), direction


register_deferred("tent61", _tent_factory)


def tent_piece(x, y, vx, vy, far=None):
    parts = [format_scalar(v) for v in (x, y, vx, vy)] + [format_scalar(far) if far is not None else "-"]
    fn, direction = _tent_factory(",".join(parts))
    if vx == vy:
        hull = tuple(sorted((vx, vx + (far - vx) / 4)))
    else:
        hull = (min(vx, vy), max(vx, vy))
    return Deferred("tent61:" + ",".join(parts), fn, direction, hull)


# -- reducing the minimal compact set to a compact target ---------------------------

def _end_value(entry, side):
    cell = entry.cells[-1] if side == "hi" else entry.cells[0]
    x = entry.hull[1] if side == "hi" else entry.hull[0]
    return normalize(cell.piece(x))


class _CompactStager:
    def __init__(self, target, cap):
        self.B = target
        self.M = MC_CODE
        self.cap = cap
        self.state = StageState()
        self.far = {}

    def add(self, kind, atom, piece, value, n, key=()):
        cell = Cell(atom.lo, atom.hi, piece)
        self.state.entries.append(Entry(kind, key, (atom.lo, atom.hi), (atom,), (cell,), value, n))

    def add_thick(self, src, dst, n, kind="A"):
        self.add(kind, IntervalAtom.closed(*src), _onto(src, dst), tuple(dst), n)

    def intervals(self):
        ordered = self.state.ordered()
        out = []
        for p, q in zip(ordered, ordered[1:]):
            if p.hull[1] < q.hull[0]:
                out.append((p.hull[1], q.hull[0], _end_value(p, "hi"), _end_value(q, "lo")))
        out.sort(key=lambda i: (-(i[1] - i[0]), i[0]))
        return out[:self.cap]

    def fill(self, x, y, fx, fy, n):
        far = None
        if fx == fy:
            far = self.far.get((x, y))
            if far is None:
                far = self.B.adjacent_gap(fx)
            if far is None:
                self.state.notes.append(f"stage {n}: no complement gap next to {format_scalar(fx)}")
                return
        piece = tent_piece(x, y, fx, fy, far)
        self.add("fill", IntervalAtom.open(x, y), piece, piece.hull, n)
        self.state.entries[-1].cells = (Cell(x, y, piece),)

    def step_junction(self, x, y, fx, fy, n):
        src = self.M.least_junction(x, y)
        dst = self.B.least_junction(fx, fy)
        if src is None or dst is None:
            self.state.notes.append(f"stage {n}: junction search exhausted in ({format_scalar(x)},{format_scalar(y)})")
            return
        self.add_thick(src, dst, n)

    def step_gap(self, x, y, fx, fy, n):
        src = self.M.least_gap(x, y, flanks_inside=True)
        dst = self.B.least_gap(fx, fy)
        if src is None or dst is None:
            self.state.notes.append(f"stage {n}: gap search exhausted in ({format_scalar(x)},{format_scalar(y)})")
            return
        (X, Y), (Xd, Yd) = src, dst
        c1, c2, d1, d2 = X[1], Y[0], Xd[1], Yd[0]
        if d1 == fx:
            self.add_thick(X, (fx, fx), n)
            self.far[(x, X[0])] = d2
        else:
            self.add_thick(X, Xd, n)
        self.add("C", IntervalAtom.open(c1, c2), _onto((c1, c2), (d1, d2)), (d1, d2), n)
        if d2 == fy:
            self.add_thick(Y, (fy, fy), n)
            self.far[(Y[1], y)] = d1
        else:
            self.add_thick(Y, Yd, n)

    def run(self, stages):
        lo_comp, hi_comp = self.B.bounds()
        self.add_thick((Fraction(0), Fraction(1, 9)), lo_comp, 0)
        self.add_thick((Fraction(8, 9), Fraction(1)), hi_comp, 0)
        for n in range(1, stages + 1):
            self.state.stage = n
            for step in (self.step_junction, self.step_gap):
                for x, y, fx, fy in self.intervals():
                    if fx == fy or not self.B.meets(min(fx, fy), max(fx, fy)):
                        self.fill(x, y, fx, fy, n)
                    else:
                        step(x, y, fx, fy, n)
        return self.state


def _easy_items(count, max_level=12):
    """count junctions alternating with count-1 gaps of M, in increasing order."""
    for level in range(1, max_level + 1):
        items = [(lo, hi, "T") for _, lo, hi in minimal.mc_junctions(level)]
        items += [(lo, hi, "G") for _, lo, hi in minimal.mc_gaps(level)]
        items.sort()
        picked, want = [], "T"
        for lo, hi, kind in items:
            if len(picked) == 2 * count - 1:
                break
            if kind == want:
                picked.append((lo, hi))
                want = "G" if want == "T" else "T"
        if len(picked) == 2 * count - 1:
            return picked
    raise DepthExceeded("not enough junctions for the target components")


def _easy_value(t, comps, items):
    k_max = len(comps) - 1
    for k, (lo, hi) in enumerate(items):
        if lo <= t <= hi:
            j = k // 2
            if k % 2 == 0:
                return normalize(comps[j][0] + (t - lo) * (comps[j][1] - comps[j][0]) / (hi - lo)) \
                    if comps[j][1] != comps[j][0] else comps[j][0]
            a, b = comps[j][1], comps[j + 1][0]
            return normalize(a + (t - lo) * (b - a) / (hi - lo))
    # between items: M-points go to the nearest component end, gaps move into the complement
    idx = sum(1 for lo, _ in items if lo < t)
    if idx == 0:
        base = comps[0][0]
        far = base - (base if base > 0 else 1)
    elif idx == len(items):
        base = comps[k_max][1]
        far = base + (1 - base if base < 1 else 1)
    else:
        prev = idx - 1
        j = prev // 2
        if prev % 2 == 0:
            base, far = comps[j][1], comps[j + 1][0]
        else:
            base, far = comps[j + 1][0], comps[j][1]
    kind, g = mc_locate(t)
    if kind == "in":
        return base
    d = min(t - g[0], g[1] - t, 1)
    return normalize(base + (far - base) / 2 * d)


def _easy_factory(arg):
    from .exact import parse_scalar
    vals = [parse_scalar(p) for p in arg.split(",")]
    comps = list(zip(vals[::2], vals[1::2]))
    items = _easy_items(len(comps))
    return (lambda t: _easy_value(normalize(t), comps, items)), 1


register_deferred("easy61", _easy_factory)


def _finite_components(target):
    fu = normalize_finite(target)
    if fu is None:
        return None
    if fu.is_empty():
        raise EmptyTarget("the target is empty")
    comps = []
    for a in fu.components():
        if not (a.lo_closed and a.hi_closed):
            raise DomainError("the target must be compact")
        comps.append((a.lo, a.hi))
    return comps


def reduce_minimal_compact(target, stages=10, cap=6):
    """Stage the increasing reduction of the minimal compact set to a compact target.

    target is CantorSet, MinCompact or a finite union of closed bounded
    intervals; the latter is handled in one step by the explicit map that
    sends alternating junctions and gaps of M onto the components and the
    complementary gaps.
    """
    comps = _finite_components(target)
    if comps is not None:
        arg = ",".join(format_scalar(v) for c in comps for v in c)
        fn, direction = _easy_factory(arg)
        hull = (comps[0][0] - (comps[0][0] if comps[0][0] > 0 else 1),
                comps[-1][1] + (1 - comps[-1][1] if comps[-1][1] < 1 else 1))
        piece = Deferred("easy61:" + arg, fn, direction, hull)
        st = StageState(stage=stages)
        st.entries.append(Entry("A", (), (Fraction(0), Fraction(1)), (UNIT,), (Cell(0, 1, piece),),
                                (comps[0][0], comps[-1][1]), 0))
        st.source, st.target = MinCompact(), target
        return st
    if isinstance(target, CantorSet):
        code = CANTOR_CODE
    elif isinstance(target, MinCompact):
        code = MC_CODE
    else:
        raise Unsupported(f"no component enumerator for {target.dsl()}")
    st = _CompactStager(code, cap).run(stages)
    st.source, st.target = MinCompact(), target
    return st


def check_increasing(state):
    """Thick pieces are mapped in increasing order."""
    thick = [e for e in state.ordered() if e.kind == "A"]
    return all(p.value[1] <= q.value[0] for p, q in zip(thick, thick[1:]))


# -- gluing reductions of the minimal F_sigma set ---------------------------------------

TRUNC = 2  # solid segments of a copy: its outer cells at this depth


def _copy_template():
    inner, outer = minimal.mc_truncation(TRUNC)
    comps = [(a.lo, a.hi) for a in inner.atoms]
    segs = [(a.lo, a.hi) for a in outer.atoms]
    return comps, segs


COPY_COMPS, COPY_SEGS = _copy_template()
LOWER_END = F_inv(Fraction(1, 4))[1]


def _copy_plan(mode, target, increasing=True):
    """Values on the template components of a copy.

    mode "onto": one junction (F^-1(3/4)) maps monotonically onto target,
    the components before it go to its first end and those after to the
    last.  mode "split": the lower half (up to F^-1(1/4)) does this with the
    junction F^-1(3/16) and the upper half with F^-1(3/4) in the opposite
    direction, so both ends of the copy go to the same end of the target.
    """
    b1, b2 = target
    first, last = (b1, b2) if increasing else (b2, b1)
    halves = [(Fraction(0), Fraction(1), F_inv(Fraction(3, 4)), first, last)]
    if mode == "split":
        halves = [(Fraction(0), LOWER_END, F_inv(Fraction(3, 16)), first, last),
                  (LOWER_END, Fraction(1), F_inv(Fraction(3, 4)), last, first)]
    plan = []
    for lo, hi in COPY_COMPS:
        for h_lo, h_hi, junction, start, end in halves:
            if h_lo <= lo and hi <= h_hi:
                break
        if (lo, hi) == junction:
            plan.append(("affine", (lo, hi), start, end))
        else:
            plan.append(("const", (lo, hi), start if hi <= junction[0] else end, None))
    return plan


def _copy_entry(piece, plan, stage, key):
    frame = piece.frame
    atoms, cells, vals = [], [], []
    for kind, (lo, hi), v0, v1 in plan:
        a, b = frame.to_outer(lo), frame.to_outer(hi)
        atoms.append(IntervalAtom.closed(a, b))
        if kind == "const" or v0 == v1:
            cells.append(Cell(a, b, Constant(v0)))
            vals.append((a, b, v0, v0))
        else:
            slope = (v1 - v0) / (b - a)
            cells.append(Cell(a, b, Affine(slope, v0 - slope * a)))
            vals.append((a, b, min(v0, v1), max(v0, v1)))
    units = []
    for lo, hi in COPY_SEGS:
        a, b = frame.to_outer(lo), frame.to_outer(hi)
        inside = [v for v in vals if a <= v[0] and v[1] <= b]
        units.append(((a, b), (min(v[2] for v in inside), max(v[3] for v in inside))))
    value = (min(v[2] for v in vals), max(v[3] for v in vals))
    return Entry("A", key, (piece.lo, piece.hi), tuple(atoms), tuple(cells), value, stage, tuple(units))


def _merged_segments(units):
    out = []
    for seg, val in units:
        if out and out[-1][0][1] >= seg[0]:
            (lo, _), (vlo, vhi) = out[-1]
            out[-1] = ((lo, seg[1]), (min(vlo, val[0]), max(vhi, val[1])))
        else:
            out.append((seg, val))
    return out


def _entry_value(entry, x):
    for c in entry.cells:
        if c.lo <= x <= c.hi:
            return normalize(c.piece(x))
    raise DomainError("point outside the entry")


class TargetDecomposition:
    """Closed pieces of the target in key order, with the anchor components first."""

    def __init__(self, dec, anchors):
        self.dec = dec
        self.anchors = [IntervalAtom.point(y) for y in anchors]

    def piece(self, j):
        if j < len(self.anchors):
            return self.anchors[j]
        seen = set((a.lo, a.hi) for a in self.anchors)
        k = j - len(self.anchors)
        i = 0
        while True:
            atom = self.dec.a_piece(i)[1]
            if (atom.lo, atom.hi) not in seen:
                if k == 0:
                    return atom
                k -= 1
            i += 1


class _GlueStager:
    def __init__(self, n, B, target, y0, y1, budget, cap):
        self.n = n
        self.B = B
        self.target = target
        pieces, _ = minimal.mf_pieces(budget)
        shift = Fraction(n)
        shifted = [minimal.Piece(p.kind, p.lo + shift, p.hi + shift, p.gen) for p in pieces]
        tops = [p for p in shifted if p.gen == 0 and p.kind == "copy"]
        rest = sorted((p for p in shifted if p.gen > 0), key=lambda p: (p.gen, p.lo))
        self.copies = tops + [p for p in rest if p.kind == "copy"]
        self.frees = [p for p in rest if p.kind == "free"]
        self.used = set()
        self.state = StageState()
        self.state.eps = [Fraction(1)]
        self.y0, self.y1 = y0, y1
        self.cap = cap

    def add_copy(self, piece, plan, n):
        self.state.entries.append(_copy_entry(piece, plan, n, (piece.gen, piece.lo)))
        self.used.add((piece.lo, piece.hi))

    def add_free(self, piece, dst, increasing, n):
        atom = piece.atom()
        pc = _onto((piece.lo, piece.hi), (dst.lo, dst.hi), increasing)
        value = (dst.lo, dst.hi)
        self.state.entries.append(Entry("C", (piece.gen, piece.lo), (piece.lo, piece.hi), (atom,),
                                        (Cell(piece.lo, piece.hi, pc),), value, n))
        self.used.add((piece.lo, piece.hi))

    def intervals(self):
        units = []
        for e in self.state.entries:
            for seg, _ in _merged_segments(e.units()):
                units.append((seg, e))
        units.sort(key=lambda u: u[0])
        out = []
        for (s, e), (t, g) in zip(units, units[1:]):
            if s[1] < t[0]:
                out.append((s[1], t[0], _entry_value(e, s[1]), _entry_value(g, t[0])))
        out.sort(key=lambda i: (-(i[1] - i[0]), i[0]))
        return out[:self.cap]

    def least_source(self, pool, x, y):
        for p in pool:
            if (p.lo, p.hi) not in self.used and x < p.lo and p.hi < y:
                return p
        return None

    def window_at(self, v, n):
        """K_delta next to v on an approachable side, avoiding the first n target pieces."""
        delta = self.state.eps[n - 1] / 2
        probe = self.target.dec.least_a_in(v, v + delta)
        up = probe is not None
        for e in self.state.entries:
            for w in e.value:
                if w != v and (w > v) == up:
                    delta = min(delta, abs(w - v) / 2)
        for j in range(n):
            atom = self.target.piece(j)
            if atom.contains(v):
                continue
            if up and atom.lo > v:
                delta = min(delta, atom.lo - v)
            if not up and atom.hi < v:
                delta = min(delta, v - atom.hi)
        delta = _pow2_floor(delta)
        self.eps_stage = min(self.eps_stage, delta)
        K = IntervalAtom.open(v, v + delta) if up else IntervalAtom.open(v - delta, v)
        self.state.ledger.append((K, n - 1))
        return K, up

    def step_copy(self, x, y, fx, fy, n):
        src = self.least_source(self.copies, x, y)
        if src is None:
            self.state.notes.append(f"cell {self.n} stage {n}: no copy within the budget in ({format_scalar(x)},{format_scalar(y)})")
            return
        if fx != fy:
            cand = self.target.dec.least_a_in(min(fx, fy), max(fx, fy))
            if cand is None:
                return
            atom = cand[1]
            self.add_copy(src, _copy_plan("onto", (atom.lo, atom.hi), fx < fy), n)
        else:
            K, up = self.window_at(fx, n)
            cand = self.target.dec.least_a_in(K.lo, K.hi)
            if cand is None:
                return
            atom = cand[1]
            self.add_copy(src, _copy_plan("split", (atom.lo, atom.hi), up), n)

    def step_free(self, x, y, fx, fy, n):
        src = self.least_source(self.frees, x, y)
        if src is None:
            self.state.notes.append(f"cell {self.n} stage {n}: no free interval within the budget in ({format_scalar(x)},{format_scalar(y)})")
            return
        if fx != fy:
            cand = self.target.dec.least_b_in(min(fx, fy), max(fx, fy))
            increasing = fx < fy
        else:
            K, increasing = self.window_at(fx, n)
            cand = self.target.dec.least_b_in(K.lo, K.hi)
        if cand is not None:
            self.add_free(src, cand[1], increasing, n)

    def run(self, stages):
        a0, a1 = self.copies[0], self.copies[1]
        self.add_copy(a0, _copy_plan("onto", (self.y0, self.y0)), 0)
        self.add_copy(a1, _copy_plan("onto", (self.y1, self.y1)), 0)
        for n in range(1, stages + 1):
            self.state.stage = n
            self.eps_stage = self.state.eps[-1] / 2
            for step in (self.step_copy, self.step_free):
                for x, y, fx, fy in self.intervals():
                    step(x, y, fx, fy, n)
            self.state.eps.append(self.eps_stage)
        return self.state


def _glue_target(B, cells):
    if isinstance(B, Q):
        return RationalsDecomposition(), [Fraction(k) for k in range(cells + 1)]
    if isinstance(B, Family35):
        dec = Family35Decomposition(B, cells + 1, upper_ray=False)
        ys = [x0 + (x1 - x0) / 4 for x0, x1, _ in dec.frames]
        return dec, ys
    try:
        res = check_I(B)
    except Unsupported:
        res = None
    if res is not None and not (res.i0 and res.i1):
        raise NotConditionI(f"{B.dsl()} fails condition (I)")
    raise Unsupported(f"no piece enumerator for {B.dsl()}")


def glue_minimal(B, cells, ys=None, stages=3, budget=8, cap=8):
    """One stage state per cell [n, n+1] of the minimal F_sigma set.

    Cell n maps its top copies (around x_n = n and x_{n+1} = n+1) to the
    anchors y_n and y_{n+1}, then alternates the copy step and the free
    interval step for the given number of stages.  Consecutive cells agree at
    the shared anchor, so the union is one partial map.
    """
    if cells < 1:
        raise BadAnchors("at least one cell is needed")
    dec, default = _glue_target(B, cells)
    ys = default if ys is None else [normalize(y) for y in ys]
    if len(ys) != cells + 1:
        raise BadAnchors(f"need {cells + 1} anchors, got {len(ys)}")
    if any(not a < b for a, b in zip(ys, ys[1:])):
        raise BadAnchors("anchors must be strictly increasing")
    if not all(B.member(y) for y in ys):
        raise BadAnchors("anchors must lie in the target")
    if isinstance(dec, Family35Decomposition):
        for y in ys:
            if not any(x0 <= y < x1 for x0, x1, _ in dec.frames):
                raise BadAnchors("anchors must be point components of the target")
    states = []
    for n in range(cells):
        target = TargetDecomposition(dec, [ys[n], ys[n + 1]])
        st = _GlueStager(n, B, target, ys[n], ys[n + 1], budget, cap).run(stages)
        st.source, st.target = MinFsigma(), B
        st.forbidden = target.piece
        st.anchors = (Fraction(n), ys[n], Fraction(n + 1), ys[n + 1])
        states.append(st)
    return states


def glued_map(states):
    """The union of the cell maps as one partial map."""
    cells, atoms = [], []
    for st in states:
        f = st.map_at()
        cells.extend(f.cells)
        atoms.extend(f.domain.atoms)
    return PiecewiseMap(cells, partial=True, domain=FiniteUnion(atoms))


def boundary_values(states):
    """(x_n, left value, right value) at each interior cell boundary, plus the outer ends."""
    out = []
    for st in states:
        f = st.map_at()
        x0, y0, x1, y1 = st.anchors
        out.append((x0, f(x0), y0))
        out.append((x1, f(x1), y1))
    return out
