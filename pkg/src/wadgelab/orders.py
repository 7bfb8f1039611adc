"""Scattered linear orders, their shift automorphisms and embeddings into R.

Three orders are supported:

* ``Zomega``: finitely supported integer vectors under the anti-lexicographic
  order, with the partial shifts iota_n as automorphisms;
* ``OrdUpToOmegaOmega``: ordinals below omega^omega in Cantor normal form,
  embedded continuously;
* ``OmegaSqReversed``: ordinals below omega^2 with the reversed order,
  embedded discretely.

Every scheme maps an element ``i`` to a rational ``embed(i)`` and reserves the
half-open interval up to the next element as its private interval.  The copies
``xi_k(i)`` of the product order sit at quarter offsets of the private radius.
"""

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthExceeded, DomainError, WrongOrder
from .exact import INF, as_rational, floor_exact

ZOMEGA = "Zomega"
ORDINAL = "OrdUpToOmegaOmega"
OMEGA_SQ_REV = "OmegaSqReversed"


@functools.lru_cache(maxsize=4096)
def _pow2(k):
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def ilog2_floor(u):
    """Largest integer m with 2**m <= u, for an exact positive scalar u."""
    m = math.frexp(float(u))[1] - 1
    while _pow2(m) > u:
        m -= 1
    while _pow2(m + 1) <= u:
        m += 1
    return m


def ilog2_ceil(u):
    """Smallest integer c with 2**c >= u."""
    m = ilog2_floor(u)
    return m if _pow2(m) == u else m + 1


# -- Z^(omega) ---------------------------------------------------------------

class ZVec:
    """A finitely supported integer vector; stored as sorted (index, value) pairs."""

    __slots__ = ("entries",)

    def __init__(self, entries=()):
        if isinstance(entries, dict):
            entries = entries.items()
        clean = {}
        for i, v in entries:
            if i < 0:
                raise DomainError("negative index")
            if v:
                clean[int(i)] = int(v)
        object.__setattr__(self, "entries", tuple(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("ZVec is immutable")

    @classmethod
    def of(cls, *coords):
        return cls(enumerate(coords))

    @classmethod
    def unit(cls, n, value=1):
        return cls({n: value})

    def __getitem__(self, i):
        for j, v in self.entries:
            if j == i:
                return v
        return 0

    def top(self):
        """Largest index with a non-zero entry, or -1 for the zero vector."""
        return self.entries[-1][0] if self.entries else -1

    def replace(self, i, value):
        d = dict(self.entries)
        d[i] = value
        return ZVec(d)

    def add(self, i, delta):
        return self.replace(i, self[i] + delta)

    def restrict_from(self, n):
        """The coordinates with index >= n."""
        return ZVec((i, v) for i, v in self.entries if i >= n)

    def restrict_below(self, n):
        return ZVec((i, v) for i, v in self.entries if i < n)

    def merged(self, other):
        """Coordinates of ``self`` overwritten by ``other`` where ``other`` is non-zero."""
        d = dict(self.entries)
        d.update(other.entries)
        return ZVec(d)

    def coords(self, length):
        return [self[i] for i in range(length)]

    def __eq__(self, other):
        return isinstance(other, ZVec) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __lt__(self, other):
        return zvec_cmp(self, other) < 0

    def __le__(self, other):
        return zvec_cmp(self, other) <= 0

    def __gt__(self, other):
        return zvec_cmp(self, other) > 0

    def __ge__(self, other):
        return zvec_cmp(self, other) >= 0

    def __str__(self):
        return "z:[" + ",".join(f"{i}={v}" for i, v in self.entries) + "]"

    __repr__ = __str__

    @classmethod
    def parse(cls, text):
        m = re.fullmatch(r"\s*z:\[(.*)\]\s*", text)
        if not m:
            raise DomainError(f"not a ZVec: {text!r}")
        body = m.group(1).strip()
        pairs = []
        if body:
            for part in body.split(","):
                i, _, v = part.partition("=")
                try:
                    pairs.append((int(i), int(v)))
                except ValueError:
                    raise DomainError(f"bad ZVec entry {part!r}") from None
        return cls(pairs)


ZERO = ZVec()


def zvec_cmp(x, y):
    """Anti-lexicographic comparison: decided at the largest differing index."""
    dx, dy = dict(x.entries), dict(y.entries)
    for i in sorted(set(dx) | set(dy), reverse=True):
        a, b = dx.get(i, 0), dy.get(i, 0)
        if a != b:
            return -1 if a < b else 1
    return 0


@dataclass(frozen=True)
class ShiftWord:
    """A word in the shifts iota_n^(+-1); letters act left to right."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple((int(n), int(d)) for n, d in self.letters)
        for n, d in letters:
            if n < 0 or d not in (1, -1):
                raise DomainError(f"bad shift letter ({n}, {d})")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def iota(cls, n, direction=1):
        return cls(((n, direction),))

    def inverse(self):
        return ShiftWord(tuple((n, -d) for n, d in reversed(self.letters)))

    def max_index(self):
        return max((n for n, _ in self.letters), default=-1)

    def then(self, other):
        return ShiftWord(self.letters + other.letters)

    def __str__(self):
        if not self.letters:
            return "id"
        return "*".join(f"i{n}" if d == 1 else f"i{n}^-1" for n, d in self.letters)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "id":
            return cls()
        letters = []
        for tok in text.split("*"):
            m = re.fullmatch(r"i(\d+)(\^-1)?", tok.strip())
            if not m:
                raise DomainError(f"not a shift word: {text!r}")
            letters.append((int(m.group(1)), -1 if m.group(2) else 1))
        return cls(tuple(letters))


def _apply_letter(n, d, x):
    if x.top() > n:
        return x
    return x.add(n, d)


def apply_shift(w, x):
    for n, d in w.letters:
        x = _apply_letter(n, d, x)
    return x


# -- subsets of omega and the a* coding --------------------------------------

@dataclass(frozen=True)
class SubsetPattern:
    """A subset of omega written as a finite set plus an optional final tail [t, oo)."""

    finite: frozenset = frozenset()
    tail: object = None

    def __post_init__(self):
        fin = frozenset(int(n) for n in self.finite)
        if any(n < 0 for n in fin):
            raise DomainError("negative element in a subset of omega")
        tail = self.tail
        if tail is not None:
            tail = int(tail)
            if tail < 0:
                raise DomainError("negative tail threshold")
            fin = frozenset(n for n in fin if n < tail)
            while tail - 1 in fin:
                tail -= 1
                fin = fin - {tail}
        object.__setattr__(self, "finite", fin)
        object.__setattr__(self, "tail", tail)

    @classmethod
    def of(cls, *elems, tail=None):
        return cls(frozenset(elems), tail)

    def __contains__(self, n):
        return n in self.finite or (self.tail is not None and n >= self.tail)

    def is_infinite(self):
        return self.tail is not None

    def horizon(self):
        """An index beyond which membership is constant."""
        top = max(self.finite, default=-1) + 1
        return max(top, self.tail if self.tail is not None else 0)

    def elements_below(self, n):
        return [k for k in range(n) if k in self]

    def minus_below(self, n):
        return SubsetPattern(frozenset(k for k in self.finite if k >= n),
                             None if self.tail is None else max(self.tail, n))

    def __str__(self):
        body = "{" + ",".join(str(n) for n in sorted(self.finite)) + "}"
        return body if self.tail is None else f"{body}+tail({self.tail})"

    @classmethod
    def parse(cls, text):
        m = re.fullmatch(r"\s*\{([\d,\s]*)\}(?:\+tail\((\d+)\))?\s*", text)
        if not m:
            raise DomainError(f"not a subset pattern: {text!r}")
        body = m.group(1).strip()
        elems = [int(t) for t in body.split(",") if t.strip()] if body else []
        return cls(frozenset(elems), int(m.group(2)) if m.group(2) else None)


def almost_contained(a, b):
    """a is contained in b up to finitely many exceptions."""
    return a.tail is None or b.tail is not None


def least_exception_bound(a, b):
    """Least n0 with a minus n0 contained in b; requires a almost contained in b."""
    if not almost_contained(a, b):
        raise DomainError(f"{a} is not almost contained in {b}")
    bound = max(a.horizon(), b.horizon()) + 1
    missing = [n for n in range(bound) if n in a and n not in b]
    return missing[-1] + 1 if missing else 0


def marker(n):
    return ZVec.unit(n, 1)


def marker_index(z):
    """n if z is the marker 0^n 1 0^omega, else None."""
    if len(z.entries) == 1 and z.entries[0][1] == 1:
        return z.entries[0][0]
    return None


def astar_member(a, z):
    if z <= ZERO:
        return True
    n = marker_index(z)
    return n is not None and n in a


def sigma_preserves_star(a, b, w):
    """Decide sigma(a*) contained in b* for the automorphism given by the word w."""
    image0 = apply_shift(w, ZERO)
    if image0 > ZERO and not (image0 == marker(0) and 0 in b):
        return False
    big = w.max_index()
    # markers with index <= big may move
    for n in range(big + 1):
        if n in a and not astar_member(b, apply_shift(w, marker(n))):
            return False
    # markers above every letter index are fixed and must already lie in b
    if a.tail is not None and b.tail is None:
        return False
    limit = max(a.horizon(), b.horizon(), big + 1) + 1
    return all(n in b for n in range(big + 1, limit) if n in a)


# -- ordinals below omega^omega ----------------------------------------------

@dataclass(frozen=True, order=True)
class OrdinalCNF:
    """omega^e1*c1 + ... with strictly decreasing exponents and positive coefficients."""

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((int(e), int(c)) for e, c in self.terms)
        for (e, c) in terms:
            if e < 0 or c <= 0:
                raise DomainError("bad Cantor normal form term")
        if any(terms[i][0] <= terms[i + 1][0] for i in range(len(terms) - 1)):
            raise DomainError("exponents must strictly decrease")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def finite(cls, k):
        return cls(((0, k),)) if k else cls()

    @classmethod
    def omega_pow(cls, n, coeff=1):
        return cls(((n, coeff),))

    def is_zero(self):
        return not self.terms

    def is_finite(self):
        return not self.terms or self.terms[0][0] == 0

    def finite_value(self):
        if not self.is_finite():
            return None
        return self.terms[0][1] if self.terms else 0

    def is_limit(self):
        return bool(self.terms) and self.terms[-1][0] > 0

    def is_power(self):
        """n if the ordinal is omega^n, else None."""
        if len(self.terms) == 1 and self.terms[0][1] == 1:
            return self.terms[0][0]
        return None

    def leading_exponent(self):
        return self.terms[0][0] if self.terms else -1

    def successor(self):
        return ord_add(self, OrdinalCNF.finite(1))

    def predecessor(self):
        if not self.terms or self.terms[-1][0] != 0:
            return None
        e, c = self.terms[-1]
        return OrdinalCNF(self.terms[:-1] + (((0, c - 1),) if c > 1 else ()))

    def fundamental(self, m):
        """The m-th term of the standard fundamental sequence of a limit."""
        if not self.is_limit():
            raise DomainError("not a limit ordinal")
        e, c = self.terms[-1]
        head = self.terms[:-1] + (((e, c - 1),) if c > 1 else ())
        return ord_add(OrdinalCNF(head), OrdinalCNF(((e - 1, m),)) if m else OrdinalCNF())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            else:
                base = "w" if e == 1 else f"w^{e}"
                parts.append(base if c == 1 else f"{base}*{c}")
        return "+".join(parts)

    @classmethod
    def parse(cls, text):
        t = text.replace(" ", "")
        if t == "0":
            return cls()
        terms = []
        for part in t.split("+"):
            m = re.fullmatch(r"w(?:\^(\d+))?(?:\*(\d+))?|(\d+)", part)
            if not m:
                raise DomainError(f"bad ordinal term {part!r}")
            if m.group(3) is not None:
                terms.append((0, int(m.group(3))))
            else:
                terms.append((int(m.group(1) or 1), int(m.group(2) or 1)))
        acc = cls()
        for e, c in terms:
            acc = ord_add(acc, cls(((e, c),)))
        return acc


def ord_add(alpha, beta):
    if not beta.terms:
        return alpha
    e, c = beta.terms[0]
    head = [t for t in alpha.terms if t[0] > e]
    same = [t for t in alpha.terms if t[0] == e]
    lead = (e, c + (same[0][1] if same else 0))
    return OrdinalCNF(tuple(head) + (lead,) + beta.terms[1:])


# -- order elements -----------------------------------------------------------

@dataclass(frozen=True)
class OrderElement:
    order: str
    point: object
    copy: int = 0

    def _key(self):
        if self.order == OMEGA_SQ_REV:
            return (_Reversed(self.point), self.copy)
        return (self.point, self.copy)

    def __lt__(self, other):
        if self.order != other.order:
            raise WrongOrder("elements of different orders")
        return self._key() < other._key()


@dataclass(frozen=True)
class _Reversed:
    value: object

    def __lt__(self, other):
        return other.value < self.value


# -- located results ----------------------------------------------------------

@dataclass(frozen=True)
class PrivateInterval:
    """x lies in the private interval [embed(element), next) at the given offset."""

    element: object
    offset: object


@dataclass(frozen=True)
class Anchor:
    element: object
    copy: int


@dataclass(frozen=True)
class Gap:
    cut: object
    lo: object
    hi: object


@dataclass(frozen=True)
class BandLimit:
    """x is an endpoint of a gap: a limit of embedded points that is not attained."""

    cut: object
    point: object
    level: int = 0


@dataclass(frozen=True)
class Cut:
    """The cut of Z^(omega) just below the block {z : z restricted to [n,oo) = top}."""

    n: int
    top: ZVec

    def apply(self, w):
        top = self.top
        for m, d in w.letters:
            if m >= self.n:
                top = _apply_letter(m, d, top)
        return Cut(self.n, top)


# -- embedding schemes --------------------------------------------------------

class EmbeddingScheme:
    tag = None

    def __init__(self, arity=4):
        self.arity = arity

    def _check(self, e):
        if isinstance(e, OrderElement):
            if e.order != self.tag:
                raise WrongOrder(f"{e.order} element given to a {self.tag} scheme")
            if not 0 <= e.copy < self.arity:
                raise WrongOrder("copy index out of range")
            return e.point, e.copy
        return e, 0

    def embed(self, e):
        point, copy = self._check(e)
        return self.anchor(point, copy)

    def radius(self, point):
        return self.margin(point) / 2

    def anchor(self, point, k):
        """xi_k(point): quarter offsets inside the private radius."""
        return self.embed_point(point) + k * self.radius(point) / 4

    def anchors(self, point):
        return [self.anchor(point, k) for k in range(self.arity)]

    def _private(self, point, x):
        base = self.embed_point(point)
        offset = x - base
        step = self.radius(point) / 4
        q = as_rational(offset / step)
        if q is not None and q.denominator == 1 and 0 <= q < self.arity:
            return Anchor(point, int(q))
        return PrivateInterval(point, offset)


def _b(n):
    return 2 * n + 1


def _s(b, k):
    return b + 2 - _pow2(1 - k)


def _w(k):
    return _pow2(-k - 2)


@functools.lru_cache(maxsize=1 << 16)
def _zomega_embed(z, top):
    v = Fraction(z[0], abs(z[0]) + 1)
    for n in range(1, top + 1):
        v = ZomegaScheme._place(v, n, z[n])
    return v


class ZomegaScheme(EmbeddingScheme):
    """Nested band placement of Z^(omega); level n fills (-b_n, b_n) with b_n = 2n+1."""

    tag = ZOMEGA

    def embed_point(self, z, level=None):
        top = max(z.top(), 0) if level is None else max(level, z.top())
        return _zomega_embed(z, top)

    @staticmethod
    def _place(v, n, k):
        b = _b(n - 1)
        if k > 0:
            return _s(b, k) + _w(k) * (v + b) / (2 * b)
        if k < 0:
            return -_s(b, -k) - _w(-k) * (b - v) / (2 * b)
        return v

    def lift(self, v, n, top):
        """Place an inner level-(n-1) value under the coordinates of ``top`` (indices >= n)."""
        for m in range(n, max(top.top(), n - 1) + 1):
            v = self._place(v, m, top[m])
        return v

    def successor(self, z):
        return z.add(0, 1)

    def margin(self, z):
        return self.embed_point(self.successor(z)) - self.embed_point(z)

    def cut_bounds(self, cut):
        b = _b(cut.n - 1)
        hi = self.lift(Fraction(-b), cut.n, cut.top)
        lo = self.lift(Fraction(b), cut.n, cut.top.add(cut.n, -1))
        return lo, hi

    def enumerate(self, lo, hi, depth):
        """Points with |coordinates| <= depth and level <= depth whose private
        interval meets [lo, hi], in increasing order."""
        top_level = 0
        while top_level < depth and not (-_b(top_level) < lo and hi < _b(top_level)):
            top_level += 1
        out = []

        def rec(n, top):
            for k in range(-depth, depth + 1):
                t = top.replace(n, k)
                if n == 0:
                    left = self.embed_point(t)
                    if left <= hi and lo < left + self.margin(t):
                        out.append(t)
                    continue
                b = _b(n - 1)
                if self.lift(Fraction(-b), n, t) <= hi and lo <= self.lift(Fraction(b), n, t):
                    rec(n - 1, t)

        rec(top_level, ZERO)
        out.sort()
        return out

    def locate(self, x, max_depth=64):
        n = 0
        while not (-_b(n) < x < _b(n)):
            n += 1
            if n > max_depth:
                raise DepthExceeded(f"no level <= {max_depth} contains the point")
        kind, payload = self._decode(x, n)
        if kind == "elem":
            return self._private(payload, x)
        if kind == "cut":
            lo, hi = self.cut_bounds(payload)
            return Gap(payload, lo, hi)
        cut, _ = payload
        return BandLimit(cut, x, cut.n)

    def _decode(self, x, n):
        if n == 0:
            k = floor_exact(x / (1 - x)) if x >= 0 else floor_exact(x / (1 + x))
            return "elem", ZVec.of(k)
        b = _b(n - 1)
        if -b < x < b:
            return self._decode(x, n - 1)
        if x == b:
            return "limit", (Cut(n, ZVec.unit(n)), "lo")
        if x == -b:
            return "limit", (Cut(n, ZERO), "hi")
        y = x if x > 0 else -x
        k = 1 - ilog2_ceil(b + 2 - y)
        sgn = 1 if x > 0 else -1
        if k == 0:
            return "cut", Cut(n, ZVec.unit(n, 1 if sgn > 0 else 0))
        lo, width = _s(b, k), _w(k)
        if y == lo:
            # infimum of copy k, or supremum of copy -k
            return "limit", ((Cut(n, ZVec.unit(n, k)), "hi") if sgn > 0
                             else (Cut(n, ZVec.unit(n, -k + 1)), "lo"))
        if y < lo + width:
            inner = (y - lo) * 2 * b / width - b
            kind, payload = self._decode(sgn * inner, n - 1)
            return kind, _with_coord(kind, payload, n, sgn * k)
        if y == lo + width:
            return "limit", ((Cut(n, ZVec.unit(n, k + 1)), "lo") if sgn > 0
                             else (Cut(n, ZVec.unit(n, -k)), "hi"))
        return "cut", Cut(n, ZVec.unit(n, k + 1) if sgn > 0 else ZVec.unit(n, -k))


def _with_coord(kind, payload, n, k):
    if kind == "elem":
        return payload.replace(n, k)
    if kind == "cut":
        return Cut(payload.n, payload.top.replace(n, k))
    cut, side = payload
    return Cut(cut.n, cut.top.replace(n, k)), side


def _e(m, alpha):
    """e_m on ordinals below omega^m: values in [0, 1)."""
    if m == 1:
        k = alpha.finite_value()
        return 1 - _pow2(-k)
    c = 0
    rest = alpha
    if alpha.terms and alpha.terms[0][0] == m - 1:
        c = alpha.terms[0][1]
        rest = OrdinalCNF(alpha.terms[1:])
    return (1 - _pow2(-c)) + _pow2(-c - 1) * _e(m - 1, rest)


def _band_exact(v):
    u = 1 - v
    # 2^-(c+1) < u <= 2^-c
    return -ilog2_ceil(u)


def _decode_e(m, v):
    c = _band_exact(v)
    if m == 1:
        return OrdinalCNF.finite(c)
    inner = (v - (1 - _pow2(-c))) * _pow2(c + 1)
    beta = _decode_e(m - 1, inner)
    return ord_add(OrdinalCNF.omega_pow(m - 1, c) if c else OrdinalCNF(), beta)


class OrdinalScheme(EmbeddingScheme):
    """Continuous embedding of omega^omega onto [0, oo); omega^n sits at n."""

    tag = ORDINAL

    def __init__(self, arity=2):
        super().__init__(arity)

    def embed_point(self, alpha):
        if alpha.is_finite():
            return 1 - _pow2(-alpha.finite_value())
        n, c = alpha.terms[0]
        reduced = OrdinalCNF((((n, c - 1),) if c > 1 else ()) + alpha.terms[1:])
        return n + _e(n + 1, reduced)

    def successor(self, alpha):
        return alpha.successor()

    def margin(self, alpha):
        return self.embed_point(alpha.successor()) - self.embed_point(alpha)

    def block(self, x):
        """The ordinal alpha with embed(alpha) <= x < embed(alpha + 1), for x >= 0."""
        n = floor_exact(x)
        v = x - n
        if n == 0:
            return OrdinalCNF.finite(_band_exact(v))
        return ord_add(OrdinalCNF.omega_pow(n), _decode_e(n + 1, v))

    def enumerate(self, lo, hi, depth):
        """Ordinals with exponents and coefficients <= depth whose block meets [lo, hi]."""
        out = []

        def rec(m, chosen, base, width, head):
            for c in range(depth + 1):
                a = base + width * (1 - _pow2(-c))
                b = base + width * (1 - _pow2(-c - 1))
                if a > hi or b <= lo:
                    continue
                terms = chosen + [(m - 1, c)] if c else chosen
                if m == 1:
                    alpha = head
                    for e, k in terms:
                        alpha = ord_add(alpha, OrdinalCNF.omega_pow(e, k))
                    out.append(alpha)
                else:
                    rec(m - 1, terms, a, width * _pow2(-c - 1), head)

        for n in range(0, depth + 1):
            if n + 1 <= lo or n > hi:
                continue
            head = OrdinalCNF.omega_pow(n) if n else OrdinalCNF()
            rec(n + 1, [], Fraction(n), Fraction(1), head)
        out.sort()
        return out

    def locate(self, x, max_depth=64):
        if x < 0:
            return Gap("below", -INF, Fraction(0))
        if floor_exact(x) > max_depth:
            raise DepthExceeded("exponent beyond the depth budget")
        return self._private(self.block(x), x)


class OmegaSqReversedScheme(EmbeddingScheme):
    """Discrete embedding of omega^2 reversed into (-oo, 1)."""

    tag = OMEGA_SQ_REV

    @staticmethod
    def _parts(alpha):
        if alpha.leading_exponent() > 1:
            raise WrongOrder("ordinal not below omega^2")
        m = k = 0
        for e, c in alpha.terms:
            if e == 1:
                m = c
            else:
                k = c
        return m, k

    def embed_point(self, alpha):
        m, k = self._parts(alpha)
        if k == 0:
            return Fraction(-2 * m)
        return -(2 * m + 1 - _pow2(-k))

    def successor(self, alpha):
        """The next larger element in the reversed order, or None at limits and 0."""
        return alpha.predecessor()

    def margin(self, alpha):
        m, k = self._parts(alpha)
        return Fraction(1) if k == 0 else _pow2(-k)

    @staticmethod
    def element(m, k):
        return ord_add(OrdinalCNF.omega_pow(1, m) if m else OrdinalCNF(), OrdinalCNF.finite(k))

    def enumerate(self, lo, hi, depth):
        """Elements omega*m + k with m, k <= depth whose private interval meets [lo, hi],
        listed in the reversed order (increasing embedded value)."""
        out = []
        for m in range(depth + 1):
            for k in range(depth + 1):
                a = self.element(m, k)
                left = self.embed_point(a)
                if left <= hi and lo < left + self.margin(a):
                    out.append(a)
        out.sort(key=self.embed_point)
        return out

    def locate(self, x, max_depth=64):
        if x >= 1:
            return Gap("above", Fraction(1), INF)
        if x >= 0:
            return self._private(OrdinalCNF(), x)
        c = -floor_exact(x)  # ceil(-x)
        if c > 2 * max_depth + 2:
            raise DepthExceeded("limit index beyond the depth budget")
        if c % 2 == 0:
            return self._private(self.element(c // 2, 0), x)
        m = (c - 1) // 2
        if -x == c:
            return BandLimit(("limit", m), x, 1)
        k = -ilog2_floor(x + 2 * m + 1)
        return self._private(self.element(m, k), x)


def scheme_for(tag, arity=None):
    if tag == ZOMEGA:
        return ZomegaScheme(4 if arity is None else arity)
    if tag == ORDINAL:
        return OrdinalScheme(2 if arity is None else arity)
    if tag == OMEGA_SQ_REV:
        return OmegaSqReversedScheme(4 if arity is None else arity)
    raise WrongOrder(f"unknown order {tag!r}")
