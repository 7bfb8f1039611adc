"""Random generators and brute-force oracles shared by the tests."""

import itertools
from fractions import Fraction

from wadgelab import pointset as ps
from wadgelab.exact import INF, IntervalAtom, is_finite
from wadgelab.orders import SubsetPattern, ZVec


def rand_rational(rng, span=6, den=12):
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def rand_zvec(rng, length=4, spread=3):
    return ZVec({i: rng.randint(-spread, spread) for i in range(length) if rng.random() < 0.7})


def rand_atom(rng, span=5, den=4):
    if rng.random() < 0.15:
        return IntervalAtom.point(rand_rational(rng, span, den))
    a, b = sorted((rand_rational(rng, span, den), rand_rational(rng, span, den)))
    if rng.random() < 0.1:
        a = -INF
    if rng.random() < 0.1:
        b = INF
    if a == b:
        return IntervalAtom.point(a)
    return IntervalAtom(a, b, is_finite(a) and rng.random() < 0.5, is_finite(b) and rng.random() < 0.5)


def rand_union(rng, max_atoms=10):
    return ps.Union(tuple(ps.Atom(rand_atom(rng)) for _ in range(rng.randint(1, max_atoms))))


def rand_boolean(rng, depth=2):
    """A random finite boolean combination of interval atoms."""
    if depth == 0 or rng.random() < 0.3:
        return ps.Atom(rand_atom(rng))
    op = rng.choice(("union", "inter", "compl"))
    if op == "compl":
        return ps.Compl(rand_boolean(rng, depth - 1))
    kids = tuple(rand_boolean(rng, depth - 1) for _ in range(rng.randint(2, 3)))
    return (ps.Union if op == "union" else ps.Inter)(kids)


def rand_pattern(rng, top=6, tail_prob=0.3):
    fin = frozenset(n for n in range(top) if rng.random() < 0.4)
    tail = rng.randrange(2, top + 2) if rng.random() < tail_prob else None
    return SubsetPattern(fin, tail)


def atom_endpoints(expr):
    pts, stack = set(), [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, ps.Atom):
            pts.update(p for p in (e.atom.lo, e.atom.hi) if is_finite(p))
        elif isinstance(e, (ps.Union, ps.Inter)):
            stack.extend(e.children)
        elif isinstance(e, ps.Compl):
            stack.append(e.child)
    return sorted(pts)


def segments(points):
    """The line cut at sorted points: ("gap", lo, hi, sample) and ("pt", x) items."""
    out = []
    if not points:
        return [("gap", -INF, INF, Fraction(0))]
    out.append(("gap", -INF, points[0], points[0] - 1))
    for a, b in zip(points, points[1:]):
        out.append(("pt", a))
        out.append(("gap", a, b, (a + b) / 2))
    out.append(("pt", points[-1]))
    out.append(("gap", points[-1], INF, points[-1] + 1))
    return out


def oracle_I(expr):
    """(I0, I1) by scanning every open gap between consecutive endpoints.

    A set built from the atoms is constant on each gap; it contains an interval
    without an end point exactly when some gap inside it has a finite end
    outside it.
    """
    segs = segments(atom_endpoints(expr))

    def half(inside):
        for s in segs:
            if s[0] != "gap" or not inside(s[3]):
                continue
            for e in (s[1], s[2]):
                if is_finite(e) and not inside(e):
                    return False
        return True

    return half(expr.member), half(lambda x: not expr.member(x))


def oracle_nontrivial(expr):
    vals = {expr.member(s[3] if s[0] == "gap" else s[1]) for s in segments(atom_endpoints(expr))}
    return vals == {True, False}


def rand_tree(rng, branching, depth, density=0.6):
    tree = {()}
    frontier = [()]
    while frontier:
        s = frontier.pop()
        if len(s) == depth:
            continue
        for c in range(branching):
            if rng.random() < density:
                t = s + (c,)
                tree.add(t)
                frontier.append(t)
    return frozenset(tree)


def tree_members(tree, branching, depth, length):
    """Sequences of the given length (>= depth) whose length-depth prefix is in the tree."""
    return {s for s in itertools.product(range(branching), repeat=length) if s[:depth] in tree}
