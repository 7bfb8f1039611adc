"""Exact scalars in Q(sqrt 2), interval atoms and the Cantor function.

Rational values are plain :class:`fractions.Fraction` objects; a scalar with a
non-zero sqrt(2) part is a :class:`QSqrt2`.  The two types mix freely in
arithmetic and comparisons, and ``math.inf`` stands in for the infinite
endpoints of intervals.
"""

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import DomainError, NonRational, OutOfRange

INF = math.inf


class Cmp(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def _sgn(q):
    return (q > 0) - (q < 0)


class QSqrt2:
    """The number ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @staticmethod
    def coerce(x):
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Fraction)):
            return QSqrt2(x, 0)
        return NotImplemented

    def sign(self):
        a, b = self.a, self.b
        if b == 0:
            return _sgn(a)
        if a == 0 or _sgn(a) == _sgn(b):
            return _sgn(b) if a == 0 else _sgn(a)
        # opposite signs: the larger of a^2 and 2 b^2 wins
        return _sgn(a) if a * a > 2 * b * b else _sgn(b)

    def is_rational(self):
        return self.b == 0

    def __add__(self, other):
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return o
        norm = o.a * o.a - 2 * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        num = self * QSqrt2(o.a, -o.b)
        return QSqrt2(num.a / norm, num.b / norm)

    def __rtruediv__(self, other):
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other):
        if isinstance(other, float):
            if math.isinf(other):
                return -1 if other > 0 else 1
            raise TypeError("floats are not exact scalars")
        o = QSqrt2.coerce(other)
        if o is NotImplemented:
            return None
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, float):
            return False if math.isinf(other) else NotImplemented
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __floor__(self):
        return floor_exact(self)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __repr__(self):
        return f"QSqrt2({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


SQRT2 = QSqrt2(0, 1)


def normalize(x):
    """Collapse rational-valued ``QSqrt2`` to ``Fraction``; ints become ``Fraction``."""
    if isinstance(x, QSqrt2):
        return x.a if x.b == 0 else x
    if isinstance(x, int):
        return Fraction(x)
    return x


def as_rational(x):
    """Return ``x`` as a ``Fraction`` or ``None`` if it is irrational or infinite."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, QSqrt2):
        return x.a if x.b == 0 else None
    return None


def is_finite(x):
    return not (isinstance(x, float) and math.isinf(x))


def sign(x):
    if isinstance(x, QSqrt2):
        return x.sign()
    if isinstance(x, float):
        return 1 if x > 0 else -1
    return _sgn(x)


def scalar_cmp(x, y):
    if x == y:
        return Cmp.EQ
    return Cmp.LT if x < y else Cmp.GT


def is_dyadic(x):
    q = as_rational(x)
    if q is None:
        raise NonRational(f"{format_scalar(x)} is not rational")
    d = q.denominator
    return d & (d - 1) == 0


def _sqrt2_bounds(bits):
    """Rationals lo < sqrt(2) < hi with hi - lo = 2**-bits."""
    s = isqrt(2 << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


def floor_exact(x):
    if isinstance(x, (int, Fraction)):
        return math.floor(x)
    if isinstance(x, float):
        raise OutOfRange("floor of an infinite value")
    if x.b == 0:
        return math.floor(x.a)
    bits = 32
    while True:
        lo, hi = _sqrt2_bounds(bits)
        if x.b < 0:
            lo, hi = hi, lo
        f_lo = math.floor(x.a + x.b * lo)
        if f_lo == math.floor(x.a + x.b * hi):
            return f_lo
        bits *= 2


def simplest_between(lo, hi):
    """The rational of least denominator (then least |numerator|) in the open interval."""
    if not lo < hi:
        raise DomainError("empty interval")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -simplest_between(-hi, -lo)
    if not is_finite(hi):
        return Fraction(floor_exact(lo) + 1)
    return _simplest_pos(lo, hi)


def _simplest_pos(lo, hi):
    fl = floor_exact(lo)
    if fl + 1 < hi:
        return Fraction(fl + 1)
    # fl <= lo < hi <= fl + 1
    frac_lo = lo - fl
    frac_hi = hi - fl
    upper = INF if frac_lo == 0 else 1 / frac_lo
    return fl + 1 / simplest_between(1 / frac_hi, upper)


# -- serialization ----------------------------------------------------------

def format_rational(q):
    q = _frac(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        raise TypeError("floats are not exact scalars")
    if isinstance(x, QSqrt2):
        if x.b == 0:
            return format_rational(x.a)
        sep = "+" if x.b > 0 else "-"
        return f"{format_rational(x.a)}{sep}{format_rational(abs(x.b))}*sqrt2"
    return format_rational(x)


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(rf"^({_RAT})?(?:([+-]?)(?:(\d+(?:/\d+)?)\*)?sqrt2)?$")


def parse_rational(text):
    text = text.strip()
    if not re.fullmatch(_RAT, text):
        raise DomainError(f"not a rational: {text!r}")
    return Fraction(text)


def parse_scalar(text):
    """Parse ``p/q``, ``p/q+r/s*sqrt2``, ``sqrt2``, ``inf`` or ``-inf``."""
    t = text.replace(" ", "")
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return -INF
    m = _SCALAR_RE.match(t)
    if not t or not m or (m.group(1) is None and "sqrt2" not in t):
        raise DomainError(f"not a scalar: {text!r}")
    a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    if "sqrt2" not in t:
        return a
    coeff = Fraction(m.group(3)) if m.group(3) else Fraction(1)
    if m.group(2) == "-":
        coeff = -coeff
    return normalize(QSqrt2(a, coeff))


# -- interval atoms ---------------------------------------------------------

@dataclass(frozen=True)
class IntervalAtom:
    """An interval of the extended line with open or closed ends."""

    lo: object
    hi: object
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = normalize(self.lo), normalize(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi:
            raise DomainError(f"interval with lo > hi: {format_scalar(lo)} > {format_scalar(hi)}")
        if self.lo_closed and not is_finite(lo) or self.hi_closed and not is_finite(hi):
            raise DomainError("closed flag on an infinite endpoint")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise DomainError("a degenerate interval must be a closed singleton")

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, x):
        return cls(x, x, True, True)

    @classmethod
    def line(cls):
        return cls(-INF, INF, False, False)

    def is_point(self):
        return self.lo == self.hi

    def length(self):
        return self.hi - self.lo

    def contains(self, x):
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    __contains__ = contains

    def contains_atom(self, other):
        lo_ok = other.lo > self.lo or (other.lo == self.lo and (self.lo_closed or not other.lo_closed))
        hi_ok = other.hi < self.hi or (other.hi == self.hi and (self.hi_closed or not other.hi_closed))
        return lo_ok and hi_ok

    def intersect(self, other):
        if self.lo > other.lo or (self.lo == other.lo and not self.lo_closed):
            lo, lc = self.lo, self.lo_closed
        else:
            lo, lc = other.lo, other.lo_closed
        if self.hi < other.hi or (self.hi == other.hi and not self.hi_closed):
            hi, hc = self.hi, self.hi_closed
        else:
            hi, hc = other.hi, other.hi_closed
        if lo > hi or (lo == hi and not (lc and hc)):
            return None
        return IntervalAtom(lo, hi, lc, hc)

    def midpoint(self):
        if is_finite(self.lo) and is_finite(self.hi):
            return (self.lo + self.hi) / 2
        if is_finite(self.lo):
            return self.lo + 1
        if is_finite(self.hi):
            return self.hi - 1
        return Fraction(0)

    def dsl(self):
        lf = "closed" if self.lo_closed else "open"
        hf = "closed" if self.hi_closed else "open"
        return f"(iv {format_scalar(self.lo)} {format_scalar(self.hi)} {lf} {hf})"

    def __str__(self):
        if self.is_point():
            return "{" + format_scalar(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_scalar(self.lo)},{format_scalar(self.hi)}{right}"


# -- ternary expansions and the Cantor function ----------------------------

@dataclass(frozen=True)
class TernaryExpansion:
    preperiod: tuple
    period: tuple

    def digits(self):
        """Yield the digits forever."""
        yield from self.preperiod
        while True:
            yield from self.period

    def value(self):
        p, r = len(self.preperiod), len(self.period)
        head = _digits_int(self.preperiod, 3)
        cyc = _digits_int(self.period, 3)
        return (Fraction(head) + Fraction(cyc, 3 ** r - 1)) / 3 ** p


def _digits_int(digits, base):
    n = 0
    for d in digits:
        n = n * base + d
    return n


def periodic_digits(q, base):
    """Canonical (preperiod, period) of ``q`` in [0, 1) by long division."""
    q = _frac(q)
    num, den = q.numerator, q.denominator
    seen = {}
    digits = []
    r = num
    while r not in seen:
        seen[r] = len(digits)
        r *= base
        digits.append(r // den)
        r %= den
    start = seen[r]
    return tuple(digits[:start]), tuple(digits[start:])


def _minimize(pre, per):
    pre, per = list(pre), list(per)
    # shortest period
    n = len(per)
    for k in range(1, n + 1):
        if n % k == 0 and per == per[:k] * (n // k):
            per = per[:k]
            break
    while pre and pre[-1] == per[-1]:
        per = [per[-1]] + per[:-1]
        pre.pop()
    return tuple(pre), tuple(per)


def ternary_of(q):
    q = _frac(q)
    if not 0 <= q <= 1:
        raise OutOfRange(f"{format_rational(q)} is outside [0,1]")
    if q == 1:
        return TernaryExpansion((), (2,))
    pre, per = periodic_digits(q, 3)
    if per == (0,) and pre and pre[-1] == 1:
        pre = pre[:-1] + (0,)
        per = (2,)
    return TernaryExpansion(*_minimize(pre, per))


def _binary_value(pre, per):
    p, r = len(pre), len(per)
    head = _digits_int(pre, 2)
    cyc = _digits_int(per, 2)
    return (Fraction(head) + Fraction(cyc, 2 ** r - 1)) / 2 ** p


def cantor_value(q):
    """Exact value of the Cantor function at a rational, extended by f(x+n) = f(x)+n."""
    q = _frac(q)
    n = math.floor(q)
    t = q - n
    if t == 0:
        return Fraction(n)
    # ternary long division; stop at the first digit 1 or when a remainder repeats
    den = t.denominator
    bits, seen, r = [], {}, t.numerator
    while r not in seen:
        seen[r] = len(bits)
        d, r = divmod(3 * r, den)
        if d == 1:
            return n + Fraction(2 * _digits_int(bits, 2) + 1, 2 ** (len(bits) + 1))
        bits.append(d // 2)
    start = seen[r]
    return n + _binary_value(bits[:start], bits[start:])


def cantor_enclosure(x, depth):
    """Value of f_c at any exact scalar, or a certified interval (lo, hi).

    Returns ``(v, v)`` when the scan meets a digit 1 within ``depth`` digits
    (the value is then a dyadic rational) or when ``x`` is rational.
    """
    q = as_rational(x)
    if q is not None:
        v = cantor_value(q)
        return v, v
    n = floor_exact(x)
    t = x - n
    acc = Fraction(0)
    for m in range(1, depth + 1):
        t = 3 * t
        d = floor_exact(t)
        t = t - d
        if d == 1:
            v = n + acc + Fraction(1, 2 ** m)
            return v, v
        acc += Fraction(d // 2, 2 ** m)
    return n + acc, n + acc + Fraction(1, 2 ** depth)


def in_cantor_set(q):
    q = _frac(q)
    if not 0 <= q <= 1:
        return False
    # long division, stopping at the first digit 1; a final 1 followed by zeros
    # is the same point as 0...0222..., which lies in the set
    num, den = q.numerator, q.denominator
    if num == den:
        return True
    seen, r = set(), num
    while r not in seen:
        seen.add(r)
        d, r = divmod(3 * r, den)
        if d == 1:
            return r == 0
    return True


def cantor_preimage_member(x, offset):
    return is_dyadic(cantor_value(_frac(x)) - _frac(offset))


def cantor_fiber(w):
    """The closed interval f_c^{-1}(w) for rational ``w`` as (lo, hi)."""
    w = _frac(w)
    n = math.floor(w)
    u = w - n
    if u == 0:
        return Fraction(n), Fraction(n)
    pre, per = periodic_digits(u, 2)
    if per == (0,):
        # dyadic: the flat interval over the removed third at depth len(pre)
        k = len(pre)
        num = 0
        for b in pre[:-1]:
            num = 3 * num + 2 * b
        left = Fraction(3 * num + 1, 3 ** k)
        return n + left, n + left + Fraction(1, 3 ** k)
    tern = TernaryExpansion(tuple(2 * b for b in pre), tuple(2 * b for b in per))
    v = n + tern.value()
    return v, v
