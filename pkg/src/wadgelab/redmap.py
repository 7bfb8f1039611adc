"""Continuous piecewise maps of the line as exact, serializable values.

A map is a list of cells ``[lo, hi]`` each carrying one piece.  Total maps
cover the line with cells sharing their endpoints; partial maps carry an
explicit domain (a finite union) and evaluate only there.

Pieces are constants, affine maps, Cantor-affine maps
``x -> alpha * f_c(beta * x + gamma) + delta`` and deferred pieces, which wrap
a Python callable registered under a textual id so that maps built from
infinitely many anchors can still be written to a map file.
"""

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, DepthExceeded, OutsideDomain, ParseError, Unsupported, UnresolvableRange
from .exact import (
    INF, IntervalAtom, QSqrt2, as_rational, cantor_enclosure, cantor_fiber, cantor_value, format_scalar,
    is_finite, normalize, parse_scalar,
)
from .finite import FiniteUnion

DEFAULT_EPS = Fraction(1, 2 ** 40)


@dataclass(frozen=True)
class CertifiedInterval:
    """The true value lies in [lo, hi]."""

    lo: object
    hi: object

    def __str__(self):
        return f"[{format_scalar(self.lo)},{format_scalar(self.hi)}]"


# -- pieces -------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    c: object

    def __post_init__(self):
        object.__setattr__(self, "c", normalize(self.c))

    def __call__(self, x, eps=DEFAULT_EPS):
        return self.c

    direction = 0

    def text(self):
        return f"const {format_scalar(self.c)}"


@dataclass(frozen=True)
class Affine:
    slope: object
    intercept: object

    def __post_init__(self):
        object.__setattr__(self, "slope", normalize(self.slope))
        object.__setattr__(self, "intercept", normalize(self.intercept))
        if self.slope == 0:
            raise DomainError("affine piece with zero slope; use a constant")

    def __call__(self, x, eps=DEFAULT_EPS):
        if not is_finite(x):
            return x if self.slope > 0 else -x
        return normalize(self.slope * x + self.intercept)

    @property
    def direction(self):
        return 1 if self.slope > 0 else -1

    def solve(self, y):
        return normalize((y - self.intercept) / self.slope)

    def text(self):
        return f"affine {format_scalar(self.slope)} {format_scalar(self.intercept)}"


@dataclass(frozen=True)
class CantorAffine:
    alpha: object
    beta: object
    gamma: object
    delta: object

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, normalize(getattr(self, name)))
        if self.alpha * self.beta == 0:
            raise DomainError("Cantor-affine piece needs alpha*beta != 0")

    def __call__(self, x, eps=DEFAULT_EPS):
        if not is_finite(x):
            s = 1 if (self.alpha * self.beta > 0) == (x > 0) else -1
            return INF if s > 0 else -INF
        u = self.beta * x + self.gamma
        q = as_rational(u)
        if q is not None:
            return normalize(self.alpha * cantor_value(q) + self.delta)
        depth = max(1, math.ceil(math.log2(max(1.0, float(abs(self.alpha)) / float(eps)))) + 1)
        lo, hi = cantor_enclosure(u, depth)
        a, b = self.alpha * lo + self.delta, self.alpha * hi + self.delta
        if a == b:
            return normalize(a)
        return CertifiedInterval(min(a, b), max(a, b))

    @property
    def direction(self):
        return 1 if self.alpha * self.beta > 0 else -1

    def solve(self, y):
        """Some x with piece(x) = y, for rational y; the least such x when increasing."""
        w = as_rational((y - self.delta) / self.alpha)
        if w is None:
            raise UnresolvableRange("Cantor-affine preimage of an irrational value")
        lo, hi = cantor_fiber(w)
        u = lo if self.beta > 0 else hi
        return normalize((u - self.gamma) / self.beta)

    def fiber(self, y):
        """The closed interval {x : piece(x) = y} as (lo, hi)."""
        w = as_rational((y - self.delta) / self.alpha)
        if w is None:
            raise Unsupported("Cantor-affine preimage of an irrational value")
        lo, hi = cantor_fiber(w)
        a, b = (lo - self.gamma) / self.beta, (hi - self.gamma) / self.beta
        return (a, b) if a <= b else (b, a)

    def text(self):
        return "cantor " + " ".join(format_scalar(v) for v in (self.alpha, self.beta, self.gamma, self.delta))


DEFERRED_FACTORIES = {}


def register_deferred(prefix, factory):
    """factory(argument_text) -> (callable, direction)."""
    DEFERRED_FACTORIES[prefix] = factory


@dataclass(frozen=True, eq=False)
class Deferred:
    ident: str
    fn: object = field(repr=False)
    direction: int = 0
    hull: object = None

    def __call__(self, x, eps=DEFAULT_EPS):
        return self.fn(x)

    def text(self):
        return f"deferred {self.ident}"

    def __eq__(self, other):
        return isinstance(other, Deferred) and self.ident == other.ident

    def __hash__(self):
        return hash(self.ident)


def resolve_deferred(ident):
    prefix, _, arg = ident.partition(":")
    if prefix not in DEFERRED_FACTORIES:
        raise ParseError(f"unknown deferred piece {ident!r}")
    fn, direction = DEFERRED_FACTORIES[prefix](arg)
    return Deferred(ident, fn, direction)


# -- maps ---------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    lo: object
    hi: object
    piece: object

    def contains(self, x):
        return self.lo <= x <= self.hi


class PiecewiseMap:
    """Cells sorted by position; a partial map also records its domain."""

    def __init__(self, cells, partial=False, domain=None):
        cells = sorted(cells, key=lambda c: (c.lo, c.hi))
        for c in cells:
            if c.lo > c.hi:
                raise DomainError("cell with lo > hi")
        for a, b in zip(cells, cells[1:]):
            if b.lo < a.hi:
                raise DomainError("overlapping cells")
        self.cells = tuple(cells)
        self.partial = partial
        if partial:
            if domain is None:
                domain = FiniteUnion(IntervalAtom(c.lo, c.hi, is_finite(c.lo), is_finite(c.hi)) for c in cells)
            self.domain = domain
        else:
            self.domain = FiniteUnion.line()
            if not cells or is_finite(cells[0].lo) or is_finite(cells[-1].hi):
                raise DomainError("a total map must cover the line")
            for a, b in zip(cells, cells[1:]):
                if a.hi != b.lo:
                    raise DomainError("a total map needs adjacent cells")
        self._los = [c.lo for c in self.cells]

    def cell_at(self, x):
        i = bisect.bisect_right(self._los, x) - 1
        for j in (i, i - 1):
            if 0 <= j < len(self.cells) and self.cells[j].contains(x):
                return self.cells[j]
        return None

    def __call__(self, x, eps=DEFAULT_EPS):
        return evaluate(self, x, eps)

    def breakpoints(self):
        pts = set()
        for c in self.cells:
            for p in (c.lo, c.hi):
                if is_finite(p):
                    pts.add(p)
        return sorted(pts)

    def to_text(self):
        lines = [f"MAP {'partial' if self.partial else 'total'}"]
        if self.partial:
            lines.extend(f"DOM {a.dsl()}" for a in self.domain.atoms)
        for c in self.cells:
            lines.append(f"BP {format_scalar(c.lo)} {format_scalar(c.hi)}")
            lines.append(f"PIECE {c.piece.text()}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"PiecewiseMap({len(self.cells)} cells, partial={self.partial})"


def evaluate(f, x, eps=DEFAULT_EPS):
    x = normalize(x)
    if f.partial and not f.domain.contains(x):
        raise OutsideDomain(f"{format_scalar(x)} is outside the domain")
    cell = f.cell_at(x)
    if cell is None:
        raise OutsideDomain(f"no cell contains {format_scalar(x)}")
    return cell.piece(x, eps)


def identity():
    return PiecewiseMap([Cell(-INF, INF, Affine(1, 0))])


def affine_map(slope, intercept):
    return PiecewiseMap([Cell(-INF, INF, Affine(slope, intercept))])


def const_map(c):
    return PiecewiseMap([Cell(-INF, INF, Constant(c))])


def cantor_map(alpha=1, beta=1, gamma=0, delta=0):
    return PiecewiseMap([Cell(-INF, INF, CantorAffine(alpha, beta, gamma, delta))])


def deferred_map(ident, fn=None, direction=0):
    piece = resolve_deferred(ident) if fn is None else Deferred(ident, fn, direction)
    return PiecewiseMap([Cell(-INF, INF, piece)])


# -- composition --------------------------------------------------------------

def _compose_piece(gp, fp):
    if isinstance(gp, Constant):
        return gp
    if isinstance(gp, Affine):
        s, t = gp.slope, gp.intercept
        if isinstance(fp, Affine):
            if s * fp.slope == 0:
                return Constant(t)
            return Affine(s * fp.slope, s * fp.intercept + t)
        if isinstance(fp, CantorAffine):
            return CantorAffine(s * fp.alpha, fp.beta, fp.gamma, s * fp.delta + t)
    if isinstance(gp, CantorAffine) and isinstance(fp, Affine):
        return CantorAffine(gp.alpha, gp.beta * fp.slope, gp.beta * fp.intercept + gp.gamma, gp.delta)
    return Deferred(f"compose({gp.text()};{fp.text()})", lambda x, g=gp, f=fp: _apply_deferred(g, f, x),
                    0)


def _apply_deferred(g, f, x):
    y = f(x)
    if isinstance(y, CertifiedInterval):
        raise UnresolvableRange("inner value is not exact")
    return g(y)


def _g_eval(g, y):
    try:
        return evaluate(g, y)
    except OutsideDomain as exc:
        raise UnresolvableRange(str(exc)) from None


def compose(g, f):
    """The map x -> g(f(x)); symbolic where pieces allow it."""
    cells = []
    for cell in f.cells:
        p = cell.piece
        if isinstance(p, Constant):
            v = _g_eval(g, p.c)
            piece = Constant(v) if not isinstance(v, CertifiedInterval) else Deferred(
                f"compose-const({format_scalar(p.c)})", lambda x, c=p.c: g(c))
            cells.append(Cell(cell.lo, cell.hi, piece))
            continue
        if isinstance(p, Deferred):
            cells.append(Cell(cell.lo, cell.hi, Deferred(f"compose(map;{p.ident})",
                                                         lambda x, f0=p: _g_eval(g, f0(x)), 0)))
            continue
        cells.extend(_split_monotone(g, cell, p))
    return PiecewiseMap(cells, f.partial, f.domain if f.partial else None)


def _split_monotone(g, cell, p):
    y0, y1 = p(cell.lo), p(cell.hi)
    if isinstance(y0, CertifiedInterval) or isinstance(y1, CertifiedInterval):
        raise UnresolvableRange("cell image is not exact")
    ylo, yhi = min(y0, y1), max(y0, y1)
    cuts = sorted({b for b in g.breakpoints() if ylo < b < yhi})
    xs = [cell.lo, cell.hi]
    for y in cuts:
        xs.append(p.solve(y))
    xs = sorted(set(xs))
    out = []
    for a, b in zip(xs, xs[1:]):
        # probe the middle of the image, not the image of the middle: a flat
        # Cantor piece can send the middle of a sub-cell onto a cut of g
        ya, yb = p(a), p(b)
        if isinstance(ya, CertifiedInterval) or isinstance(yb, CertifiedInterval):
            ym = p(_inside(a, b))
        else:
            ym = ya if ya == yb else _inside(min(ya, yb), max(ya, yb))
        if isinstance(ym, CertifiedInterval):
            raise UnresolvableRange("cannot place a sub-cell image")
        gcell = g.cell_at(ym)
        if gcell is None or (g.partial and not _image_in_domain(g, p, a, b)):
            raise UnresolvableRange("image leaves the domain of the outer map")
        out.append(Cell(a, b, _compose_piece(gcell.piece, p)))
    if len(xs) == 1:
        y = p(xs[0])
        gcell = g.cell_at(y)
        if gcell is None:
            raise UnresolvableRange("image leaves the domain of the outer map")
        out.append(Cell(xs[0], xs[0], Constant(_g_eval(g, y))))
    return out


def _inside(a, b):
    if is_finite(a) and is_finite(b):
        return (a + b) / 2
    if is_finite(a):
        return a + 1
    if is_finite(b):
        return b - 1
    return Fraction(0)


def _image_in_domain(g, p, a, b):
    ya, yb = p(a), p(b)
    lo, hi = min(ya, yb), max(ya, yb)
    img = FiniteUnion([IntervalAtom(lo, hi, is_finite(lo), is_finite(hi))])
    return img.subset_of(g.domain)


# -- preimages ----------------------------------------------------------------

def preimage(f, F):
    """{x : f(x) in F} for a finite union F, exact."""
    atoms = []
    for cell in f.cells:
        cell_atom = IntervalAtom(cell.lo, cell.hi, is_finite(cell.lo), is_finite(cell.hi))
        p = cell.piece
        if isinstance(p, Constant):
            if F.contains(p.c):
                atoms.append(cell_atom)
            continue
        if isinstance(p, Deferred):
            raise Unsupported("preimage through a deferred piece")
        for a in F.atoms:
            pre = _piece_preimage(p, a)
            if pre is None:
                continue
            part = pre.intersect(cell_atom)
            if part is not None:
                atoms.append(part)
    result = FiniteUnion(atoms)
    return result.intersect(f.domain) if f.partial else result


def _piece_preimage(p, a):
    """Preimage of atom a under a monotone piece on the whole line."""
    inc = p.direction > 0
    if isinstance(p, Affine):
        lo = p.solve(a.lo) if is_finite(a.lo) else (-INF if inc else INF)
        hi = p.solve(a.hi) if is_finite(a.hi) else (INF if inc else -INF)
        lc, hc = a.lo_closed, a.hi_closed
    else:
        # f(x) >= y  <=>  x >= least point of the fiber (increasing case)
        if is_finite(a.lo):
            f0, f1 = p.fiber(a.lo)
            lo = (f0 if a.lo_closed else f1) if inc else (f1 if a.lo_closed else f0)
        else:
            lo = -INF if inc else INF
        if is_finite(a.hi):
            f0, f1 = p.fiber(a.hi)
            hi = (f1 if a.hi_closed else f0) if inc else (f0 if a.hi_closed else f1)
        else:
            hi = INF if inc else -INF
        lc, hc = a.lo_closed, a.hi_closed
    if not inc:
        lo, hi, lc, hc = hi, lo, hc, lc
    lc = lc and is_finite(lo)
    hc = hc and is_finite(hi)
    if lo > hi or (lo == hi and not (lc and hc)):
        return None
    return IntervalAtom(lo, hi, lc, hc)


# -- verification -------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    x: object
    in_a: bool
    fx: object
    in_b: object


@dataclass
class VerificationReport:
    samples: int = 0
    passes: int = 0
    failures: list = field(default_factory=list)
    inconclusive: int = 0

    @property
    def ok(self):
        return not self.failures

    def result_line(self):
        verdict = "pass" if self.ok else "fail"
        return (f"RESULT {verdict} samples={self.samples} fail={len(self.failures)} "
                f"inconclusive={self.inconclusive}")

    def witness_lines(self):
        return [f"WITNESS x={format_scalar(w.x)} fx={_fmt_value(w.fx)}" for w in self.failures]


def _fmt_value(v):
    return str(v) if isinstance(v, CertifiedInterval) else format_scalar(v)


def grid(window, n):
    lo, hi = window.lo, window.hi
    if n <= 1:
        return [(lo + hi) / 2]
    return [normalize(lo + (hi - lo) * Fraction(k, n - 1)) for k in range(n)]


def sample_points(f, window, grid_n, extra=()):
    pts = set(grid(window, grid_n))
    pts.update(b for b in f.breakpoints() if window.contains(b))
    pts.update(normalize(p) for p in extra if window.contains(p))
    pts = sorted(p for p in pts if window.contains(p))
    if f.partial:
        pts = [p for p in pts if f.domain.contains(p)]
    return pts


def verify_reduction(f, A, B, window, grid_n, extra=()):
    """Check x in A <=> f(x) in B on a grid plus breakpoints and extra anchors."""
    report = VerificationReport()
    for x in sample_points(f, window, grid_n, extra):
        report.samples += 1
        try:
            in_a = A.member(x)
        except DepthExceeded:
            report.inconclusive += 1
            continue
        y = evaluate(f, x)
        if isinstance(y, CertifiedInterval):
            report.inconclusive += 1
            continue
        try:
            in_b = B.member(y)
        except DepthExceeded:
            report.inconclusive += 1
            continue
        if in_a == in_b:
            report.passes += 1
        else:
            report.failures.append(Witness(x, in_a, y, in_b))
    return report


# -- coherence ----------------------------------------------------------------

def image_hull(f, atom):
    """(lo, hi) of f over a domain atom; pieces are monotone on their cells."""
    vals = []
    for cell in f.cells:
        lo, hi = max(cell.lo, atom.lo), min(cell.hi, atom.hi)
        if lo > hi:
            continue
        p = cell.piece
        if isinstance(p, Deferred) and p.hull is not None:
            vals.extend(p.hull)
            continue
        for x in (lo, hi):
            v = p(x)
            if isinstance(v, CertifiedInterval):
                vals.extend((v.lo, v.hi))
            else:
                vals.append(v)
    return min(vals), max(vals)


def coherence_check(f, regions=None):
    """Successive domain pieces with distinct image hulls have disjoint hulls ordered
    by one direction per region.  regions: list of (IntervalAtom, direction) with
    direction +1, -1 or 0 (inferred from the first distinct pair)."""
    if regions is None:
        regions = [(IntervalAtom.line(), 0)]
    pieces = list(f.domain.atoms)
    for region, direction in regions:
        inside = [a for a in pieces if region.contains_atom(a)]
        hulls = [image_hull(f, a) for a in inside]
        for h0, h1 in zip(hulls, hulls[1:]):
            if h0 == h1:
                continue
            if h0[1] < h1[0]:
                step = 1
            elif h1[1] < h0[0]:
                step = -1
            else:
                return False
            if direction == 0:
                direction = step
            elif step != direction:
                return False
    return True


# -- map files ----------------------------------------------------------------

def _parse_value(tok, line, col):
    try:
        return parse_scalar(tok)
    except DomainError as exc:
        raise ParseError(str(exc), line, col) from None


def parse_map(text):
    lines = [ln for ln in text.splitlines()]
    header = None
    domain_atoms, cells = [], []
    pending = None
    from .dsl import parse_expr  # interval atoms in DOM lines use the set DSL
    for no, raw in enumerate(lines, start=1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        head, _, rest = ln.partition(" ")
        if head == "MAP":
            if rest not in ("total", "partial"):
                raise ParseError("MAP must be total or partial", no, 5)
            header = rest
        elif head == "DOM":
            expr = parse_expr(rest)
            from .pointset import Atom
            if not isinstance(expr, Atom):
                raise ParseError("DOM expects an interval atom", no, 5)
            domain_atoms.append(expr.atom)
        elif head == "BP":
            toks = rest.split()
            if len(toks) != 2:
                raise ParseError("BP expects two endpoints", no, 4)
            if pending is not None:
                raise ParseError("BP without a PIECE line", no, 1)
            pending = (_parse_value(toks[0], no, 4), _parse_value(toks[1], no, 5 + len(toks[0])))
        elif head in ("STAGE", "EPS", "LEDGER"):
            continue  # stage-state trailer, not part of the map
        elif head == "PIECE":
            if pending is None:
                raise ParseError("PIECE without a preceding BP", no, 1)
            cells.append(Cell(pending[0], pending[1], _parse_piece(rest, no)))
            pending = None
        else:
            raise ParseError(f"unknown map line {head!r}", no, 1)
    if header is None:
        raise ParseError("missing MAP header", 1, 1)
    if pending is not None:
        raise ParseError("trailing BP without a PIECE line", len(lines), 1)
    partial = header == "partial"
    try:
        return PiecewiseMap(cells, partial, FiniteUnion(domain_atoms) if partial and domain_atoms else None)
    except DomainError as exc:
        raise ParseError(str(exc), 1, 1) from None


def _parse_piece(rest, no):
    toks = rest.split()
    if not toks:
        raise ParseError("empty PIECE", no, 7)
    kind, args = toks[0], toks[1:]
    arity = {"const": 1, "affine": 2, "cantor": 4, "deferred": 1}
    if kind not in arity:
        raise ParseError(f"unknown piece kind {kind!r}", no, 7)
    if len(args) != arity[kind]:
        from .errors import ArityError
        raise ArityError(f"piece {kind} takes {arity[kind]} arguments", no, 7)
    if kind == "deferred":
        return resolve_deferred(args[0])
    vals = [_parse_value(t, no, 7) for t in args]
    try:
        if kind == "const":
            return Constant(vals[0])
        if kind == "affine":
            return Affine(*vals)
        return CantorAffine(*vals)
    except DomainError as exc:
        raise ParseError(str(exc), no, 7) from None
