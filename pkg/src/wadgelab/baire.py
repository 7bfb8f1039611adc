"""The bridge between Baire space and the real line.

Points of Baire space are sequences of naturals.  ``lex_iso`` is the order
isomorphism onto [0, 1) given by block coding: x is sent to the binary number
0.1^{x(0)} 0 1^{x(1)} 0 ...  ``baire_to_real`` sends x to dec(x(0)) plus the
code of the shifted sequence, where dec is the zigzag enumeration of the
integers; it is a continuous bijection onto the line whose inverse is right
continuous.

Rationals correspond to eventually periodic sequences, so every point that
arises from a rational is kept exactly: either an eventually zero sequence
(a finite prefix) or a periodic generator (prefix plus a repeating block).
"""

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonRational, OutOfRange, ParseError, UnsupportedBaireMap
from .exact import INF, as_rational, floor_exact, is_finite, normalize, periodic_digits
from .redmap import CertifiedInterval, Cell, Deferred, PiecewiseMap, register_deferred

DEFAULT_DEPTH = 40


# -- the zigzag codec -----------------------------------------------------------

def dec(n):
    """omega -> Z: 0, 1, -1, 2, -2, ..."""
    if n < 0:
        raise OutOfRange("codes are natural numbers")
    return (n + 1) // 2 if n % 2 else -(n // 2)


def enc(z):
    return 2 * z - 1 if z > 0 else -2 * z


# -- points ---------------------------------------------------------------------------

def _strip_zeros(seq):
    seq = list(seq)
    while seq and seq[-1] == 0:
        seq.pop()
    return tuple(seq)


@dataclass(frozen=True)
class Periodic:
    """The sequence prefix + period + period + ..., kept in minimal form."""

    prefix: tuple
    period: tuple

    def __post_init__(self):
        pre, per = list(self.prefix), list(self.period)
        if not per or any(c < 0 for c in pre + per):
            raise OutOfRange("a periodic sequence needs a nonempty period of naturals")
        n = len(per)
        for k in range(1, n + 1):
            if n % k == 0 and per == per[:k] * (n // k):
                per = per[:k]
                break
        while pre and pre[-1] == per[-1]:
            per = [pre.pop()] + per[:-1]
        object.__setattr__(self, "prefix", tuple(pre))
        object.__setattr__(self, "period", tuple(per))

    def __call__(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    @property
    def ident(self):
        return f"per({','.join(map(str, self.prefix))};{','.join(map(str, self.period))})"

    def is_zero_tail(self):
        return self.period == (0,)

    def drop(self, k):
        if k <= len(self.prefix):
            return Periodic(self.prefix[k:], self.period)
        r = (k - len(self.prefix)) % len(self.period)
        return Periodic((), self.period[r:] + self.period[:r])


@dataclass(frozen=True)
class BairePoint:
    """EventuallyZero (``gen`` is None, ``prefix`` without trailing zeros) or
    DepthBounded (a generator exposing coordinates, with a depth budget)."""

    prefix: tuple = ()
    gen: object = None
    depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if self.gen is None:
            if any(c < 0 for c in self.prefix):
                raise OutOfRange("coordinates are natural numbers")
            object.__setattr__(self, "prefix", _strip_zeros(self.prefix))
        elif isinstance(self.gen, Periodic) and self.gen.is_zero_tail():
            object.__setattr__(self, "prefix", _strip_zeros(self.gen.prefix))
            object.__setattr__(self, "gen", None)

    @classmethod
    def zero(cls, prefix=()):
        return cls(tuple(prefix))

    @classmethod
    def periodic(cls, prefix, period, depth=DEFAULT_DEPTH):
        return cls((), Periodic(tuple(prefix), tuple(period)), depth)

    @property
    def kind(self):
        return "EventuallyZero" if self.gen is None else "DepthBounded"

    def __call__(self, i):
        if self.gen is None:
            return self.prefix[i] if i < len(self.prefix) else 0
        return self.gen(i)

    def coords(self, n):
        return [self(i) for i in range(n)]

    def as_periodic(self):
        if self.gen is None:
            return Periodic(self.prefix, (0,))
        if isinstance(self.gen, Periodic):
            return self.gen
        return None

    def drop(self, k):
        per = self.as_periodic()
        if per is not None:
            return BairePoint((), per.drop(k), self.depth)
        gen = self.gen
        return BairePoint((), Generator(f"drop{k}:{gen.ident}", lambda i: gen(i + k)), self.depth)

    def __str__(self):
        if self.gen is None:
            return "b:[" + ",".join(map(str, self.prefix)) + "]"
        return f"b:gen:{self.gen.ident}:{self.depth}"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        m = re.fullmatch(r"b:\[([0-9,\s]*)\]", text)
        if m:
            body = m.group(1).strip()
            return cls(tuple(int(t) for t in body.split(",")) if body else ())
        m = re.fullmatch(r"b:gen:per\(([0-9,]*);([0-9,]+)\):([0-9]+)", text)
        if m:
            pre = tuple(int(t) for t in m.group(1).split(",")) if m.group(1) else ()
            per = tuple(int(t) for t in m.group(2).split(","))
            return cls.periodic(pre, per, int(m.group(3)))
        raise ParseError(f"not a Baire point: {text!r}")


@dataclass(frozen=True)
class Generator:
    """An opaque coordinate function with a textual id; must be re-entrant."""

    ident: str
    fn: object

    def __call__(self, i):
        return self.fn(i)


# -- the order isomorphism with [0, 1) ------------------------------------------------------

def _bits(blocks):
    out = []
    for c in blocks:
        out.extend([1] * c)
        out.append(0)
    return out


def _bits_value(bits):
    v = 0
    for b in bits:
        v = 2 * v + b
    return v


def lex_iso(x):
    """The block code of x in [0, 1): exact for eventually periodic points,
    a certified interval of width <= 2^-depth otherwise."""
    per = x.as_periodic()
    if per is not None:
        p, q = _bits(per.prefix), _bits(per.period)
        head = Fraction(_bits_value(p), 2 ** len(p))
        tail = Fraction(_bits_value(q), (2 ** len(q) - 1) * 2 ** len(p))
        return head + tail
    bits, i = [], 0
    while len(bits) < x.depth:
        bits.extend(_bits([x(i)]))
        i += 1
    bits = bits[:x.depth]
    lo = Fraction(_bits_value(bits), 2 ** len(bits))
    return CertifiedInterval(lo, lo + Fraction(1, 2 ** len(bits)))


def _blocks(bits):
    out, run = [], 0
    for b in bits:
        if b:
            run += 1
        else:
            out.append(run)
            run = 0
    return out


def lex_iso_inv(r, depth=DEFAULT_DEPTH):
    """The sequence whose block code is the rational r in [0, 1)."""
    q = as_rational(normalize(r))
    if q is None:
        raise NonRational("the inverse code is defined on rationals")
    if not 0 <= q < 1:
        raise OutOfRange("the block code takes values in [0, 1)")
    pre, per = periodic_digits(q, 2)
    stream = list(pre) + list(per)
    # cut where a block ends, one period after the preperiod starts repeating
    for cut in range(len(pre) + 1, len(pre) + len(per) + 1):
        if stream[cut - 1] == 0:
            break
    rot = [per[(cut - len(pre) + j) % len(per)] for j in range(len(per))]
    head = _blocks(stream[:cut])
    return BairePoint((), Periodic(tuple(head), tuple(_blocks(rot))), depth)


# -- the bijection with the line ----------------------------------------------------------

def baire_to_real(x):
    head = dec(x(0))
    tail = lex_iso(x.drop(1))
    if isinstance(tail, CertifiedInterval):
        return CertifiedInterval(head + tail.lo, head + tail.hi)
    return normalize(head + tail)


def real_to_baire(r, depth=DEFAULT_DEPTH):
    q = as_rational(normalize(r))
    if q is None:
        raise NonRational("real_to_baire is defined on rationals")
    n = floor_exact(q)
    tail = lex_iso_inv(q - n, depth).as_periodic()
    return BairePoint((), Periodic((enc(n),) + tail.prefix, tail.period), depth)


def agree(x, y, k):
    """Whether x and y agree on coordinates 0..k-1."""
    return all(x(i) == y(i) for i in range(k))


def right_continuity_probe(r, coords=4, k_max=DEFAULT_DEPTH):
    """The least K <= k_max such that real_to_baire(r + 2^-k) agrees with
    real_to_baire(r) on the first ``coords`` coordinates for all K <= k <= k_max,
    or None."""
    base = real_to_baire(r)
    stable = None
    for k in range(k_max, 0, -1):
        if agree(real_to_baire(normalize(r) + Fraction(1, 2 ** k)), base, coords):
            stable = k
        else:
            break
    return stable


# -- transport of Baire-space maps -------------------------------------------------------------

class BaireMap:
    ident = ""

    def __call__(self, x):
        raise NotImplementedError

    def __str__(self):
        return self.ident


class IdentityMap(BaireMap):
    ident = "id"

    def __call__(self, x):
        return x


@dataclass(frozen=True)
class CoordinateShift(BaireMap):
    """x -> (x(k), x(k+1), ...)."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise UnsupportedBaireMap("shifts drop a nonnegative number of coordinates")

    @property
    def ident(self):
        return f"shift({self.k})"

    def __call__(self, x):
        return x.drop(self.k)


@dataclass(frozen=True)
class PrefixSubstitution(BaireMap):
    """Replace a leading source prefix by its target prefix; other points are fixed.

    Source prefixes must be pairwise incomparable, so the cylinders they
    determine are disjoint and the map is continuous.
    """

    rules: tuple

    def __post_init__(self):
        rules = tuple((tuple(a), tuple(b)) for a, b in self.rules)
        for i, (a, _) in enumerate(rules):
            for b, _ in rules[i + 1:]:
                n = min(len(a), len(b))
                if a[:n] == b[:n]:
                    raise UnsupportedBaireMap("source prefixes of a substitution must be incomparable")
        object.__setattr__(self, "rules", rules)

    @property
    def ident(self):
        def fmt(s):
            return "[" + ",".join(map(str, s)) + "]"
        return "sub(" + ";".join(f"{fmt(a)}>{fmt(b)}" for a, b in self.rules) + ")"

    def __call__(self, x):
        for src, dst in self.rules:
            if tuple(x.coords(len(src))) == src:
                rest = x.drop(len(src))
                per = rest.as_periodic()
                if per is not None:
                    return BairePoint((), Periodic(dst + per.prefix, per.period), x.depth)
                return BairePoint((), Generator(f"pre{list(dst)}:{rest.gen.ident}",
                                                lambda i, d=dst, r=rest: d[i] if i < len(d) else r(i - len(d))),
                                  x.depth)
        return x


def parse_baire_map(text):
    text = text.strip()
    if text == "id":
        return IdentityMap()
    m = re.fullmatch(r"shift\((\d+)\)", text)
    if m:
        return CoordinateShift(int(m.group(1)))
    m = re.fullmatch(r"sub\((.*)\)", text)
    if m:
        rules = []
        for part in filter(None, m.group(1).split(";")):
            rm = re.fullmatch(r"\[([0-9,]*)\]>\[([0-9,]*)\]", part.strip())
            if not rm:
                raise UnsupportedBaireMap(f"bad substitution rule {part!r}")
            rules.append(tuple(tuple(int(t) for t in g.split(",")) if g else () for g in rm.groups()))
        return PrefixSubstitution(tuple(rules))
    raise UnsupportedBaireMap(f"{text!r} is not in the catalog (id, shift(k), sub(...))")


def _as_catalog(g):
    if isinstance(g, str):
        return parse_baire_map(g)
    if isinstance(g, (IdentityMap, CoordinateShift, PrefixSubstitution)):
        return g
    raise UnsupportedBaireMap("only catalog maps (identity, coordinate shifts, prefix substitutions) transport")


def _transport_fn(g, depth):
    def h(t):
        if not is_finite(t):
            return t
        return baire_to_real(g(real_to_baire(t, depth)))
    return h


def _baire_factory(arg):
    return _transport_fn(parse_baire_map(arg), DEFAULT_DEPTH), 0


register_deferred("baire", _baire_factory)


def transport(g, A=None, B=None, depth=DEFAULT_DEPTH):
    """h = baire_to_real o g o real_to_baire as a total map of the line.

    A and B are accepted for symmetry with the other reduction builders; the
    caller verifies h with verify_reduction(h, A, B, ...).
    """
    g = _as_catalog(g)
    piece = Deferred(f"baire:{g.ident}", _transport_fn(g, depth), 0)
    return PiecewiseMap([Cell(-INF, INF, piece)])
