"""Finite unions of intervals in normal form.

A ``FiniteUnion`` keeps its atoms sorted, pairwise disjoint and maximal: no two
atoms touch, so the atoms are exactly the connected components.  All set
operations go through one routine that evaluates a predicate on the cells cut
out by a finite set of endpoints.
"""

from fractions import Fraction

from .exact import INF, IntervalAtom, is_finite


def _sample(lo, hi):
    if is_finite(lo) and is_finite(hi):
        return (lo + hi) / 2
    if is_finite(lo):
        return lo + 1
    if is_finite(hi):
        return hi - 1
    return Fraction(0)


def from_predicate(points, pred):
    """The finite union {x : pred(x)} for a predicate constant on each cell.

    The cells are the points themselves and the open intervals between
    consecutive points (including the two unbounded ones).
    """
    pts = sorted(set(p for p in points if is_finite(p)))
    cells = []
    prev = -INF
    for p in pts:
        cells.append(("open", prev, p))
        cells.append(("point", p, p))
        prev = p
    cells.append(("open", prev, INF))

    atoms = []
    cur = None  # (lo, lo_closed)
    for i, (kind, lo, hi) in enumerate(cells):
        inside = pred(lo) if kind == "point" else pred(_sample(lo, hi))
        if inside:
            if cur is None:
                cur = (lo, kind == "point")
        elif cur is not None:
            # the run ended on the previous cell
            pk, plo, phi = cells[i - 1]
            atoms.append(IntervalAtom(cur[0], phi, cur[1], pk == "point"))
            cur = None
    if cur is not None:
        atoms.append(IntervalAtom(cur[0], INF, cur[1], False))
    return FiniteUnion._trusted(atoms)


class FiniteUnion:
    __slots__ = ("atoms",)

    def __init__(self, atoms=()):
        object.__setattr__(self, "atoms", _merge(atoms))

    @classmethod
    def _trusted(cls, atoms):
        obj = object.__new__(cls)
        object.__setattr__(obj, "atoms", tuple(atoms))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("FiniteUnion is immutable")

    @classmethod
    def empty(cls):
        return cls._trusted(())

    @classmethod
    def line(cls):
        return cls._trusted((IntervalAtom.line(),))

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __eq__(self, other):
        return isinstance(other, FiniteUnion) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def contains(self, x):
        lo, hi = 0, len(self.atoms)
        while lo < hi:
            mid = (lo + hi) // 2
            a = self.atoms[mid]
            if x < a.lo:
                hi = mid
            elif x > a.hi:
                lo = mid + 1
            else:
                return a.contains(x)
        return False

    __contains__ = contains

    def endpoints(self):
        return _endpoints(self.atoms)

    def is_empty(self):
        return not self.atoms

    def is_full(self):
        return self.atoms == (IntervalAtom.line(),)

    def complement(self):
        return from_predicate(self.endpoints(), lambda x: not self.contains(x))

    def union(self, *others):
        sets = (self,) + others
        pts = [p for s in sets for p in s.endpoints()]
        return from_predicate(pts, lambda x: any(s.contains(x) for s in sets))

    def intersect(self, *others):
        sets = (self,) + others
        pts = [p for s in sets for p in s.endpoints()]
        return from_predicate(pts, lambda x: all(s.contains(x) for s in sets))

    def minus(self, other):
        return from_predicate(self.endpoints() + other.endpoints(),
                              lambda x: self.contains(x) and not other.contains(x))

    def clip(self, window):
        return self.intersect(FiniteUnion._trusted((window,)))

    def components(self):
        return list(self.atoms)

    def is_open(self):
        return all(not a.is_point()
                   and not (a.lo_closed and is_finite(a.lo))
                   and not (a.hi_closed and is_finite(a.hi)) for a in self.atoms)

    def is_closed(self):
        return all((a.lo_closed or not is_finite(a.lo)) and (a.hi_closed or not is_finite(a.hi))
                   for a in self.atoms)

    def subset_of(self, other):
        return self.minus(other).is_empty()

    def contains_atom(self, atom):
        return FiniteUnion._trusted((atom,)).subset_of(self)

    def total_length(self):
        return sum((a.length() for a in self.atoms), Fraction(0))

    def hull(self):
        if not self.atoms:
            return None
        first, last = self.atoms[0], self.atoms[-1]
        return IntervalAtom(first.lo, last.hi, first.lo_closed, last.hi_closed)

    def dsl(self):
        if not self.atoms:
            return "(union)"
        if len(self.atoms) == 1:
            return self.atoms[0].dsl()
        return "(union " + " ".join(a.dsl() for a in self.atoms) + ")"

    def __str__(self):
        if not self.atoms:
            return "{}"
        return " u ".join(str(a) for a in self.atoms)

    def __repr__(self):
        return f"FiniteUnion({self})"


def _merge(atoms):
    """Sort and merge overlapping or touching atoms."""
    items = sorted((a for a in atoms if a is not None),
                   key=lambda a: (a.lo, not a.lo_closed))
    out = []
    for a in items:
        if out:
            b = out[-1]
            if b.hi > a.lo or (b.hi == a.lo and (b.hi_closed or a.lo_closed)):
                if a.hi > b.hi or (a.hi == b.hi and a.hi_closed):
                    out[-1] = IntervalAtom(b.lo, a.hi, b.lo_closed, a.hi_closed)
                continue
        out.append(a)
    return tuple(out)


def _endpoints(atoms):
    pts = []
    for a in atoms:
        pts.append(a.lo)
        pts.append(a.hi)
    return [p for p in pts if is_finite(p)]


def union_of(atoms):
    return FiniteUnion(atoms)


def fmt_atoms(fu):
    """One atom per line, in DSL form."""
    return [a.dsl() for a in fu.atoms]

