"""Canonical enumerations of the rationals and the dyadic rationals.

Both orders are of type omega and come with a fast "least element inside an
open interval" search, which is what the stage constructions need.

* rationals p/q (q > 0, reduced) are keyed by (max(|p|, q), q, |p|, sign), so the
  enumeration starts 0, 1, -1, 2, -2, 1/2, -1/2, ...
* dyadics m/2^e (reduced) are keyed by (max(|m|, 2^e), e, |m|, sign).
"""

import itertools
import math
from fractions import Fraction

from .errors import DomainError
from .exact import INF, QSqrt2, floor_exact, is_finite, normalize, simplest_between

SQRT2 = QSqrt2(0, 1)


def rational_key(r):
    r = Fraction(r)
    p, q = r.numerator, r.denominator
    return (max(abs(p), q), q, abs(p), 0 if p >= 0 else 1)


def dyadic_key(d):
    d = Fraction(d)
    m, den = d.numerator, d.denominator
    if den & (den - 1):
        raise DomainError(f"{d} is not dyadic")
    e = den.bit_length() - 1
    return (max(abs(m), den), e, abs(m), 0 if m >= 0 else 1)


def least_rational_in(lo, hi):
    """The rational of least key in the open interval (lo, hi)."""
    lo, hi = normalize(lo), normalize(hi)
    if not lo < hi:
        raise DomainError("empty interval")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -least_rational_in(-hi, -lo)
    # 0 <= lo < hi
    if lo < 1 < hi:
        return Fraction(1)
    if hi <= 1:
        return simplest_between(lo, hi)
    # 1 <= lo: the key is led by the numerator; search among reciprocals
    r = simplest_between(0 if not is_finite(hi) else 1 / hi, 1 / lo)
    return 1 / r


def iter_rationals():
    """All rationals in key order."""
    for h in itertools.count(1):
        level = []
        for q in range(1, h + 1):
            for p in range(-h, h + 1):
                if max(abs(p), q) == h and math.gcd(p, q) == 1:
                    level.append(Fraction(p, q))
        if h == 1:
            level.append(Fraction(0))
        level = sorted(set(level), key=rational_key)
        yield from level


def least_dyadic_in(lo, hi, lo_closed=False, hi_closed=False):
    """The dyadic of least key in the interval with the given end flags, or None."""
    if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
        return None

    def inside(v):
        return (lo < v or (lo_closed and lo == v)) and (v < hi or (hi_closed and hi == v))

    if inside(0):
        return Fraction(0)
    best, best_key = None, None
    for e in itertools.count():
        den = 1 << e
        if best_key is not None and den > best_key[0]:
            break
        for sgn in (1, -1):
            a, closed = (lo, lo_closed) if sgn > 0 else (-hi, hi_closed)
            if not is_finite(a) or a < 0:
                m = 1
            else:
                t = a * den
                m = -floor_exact(-t) if closed else floor_exact(t) + 1
                m = max(m, 1)
            if e > 0 and m % 2 == 0:
                m += 1
            v = Fraction(sgn * m, den)
            if inside(v):
                k = dyadic_key(v)
                if best_key is None or k < best_key:
                    best, best_key = v, k
    return best


def iter_dyadics():
    """All dyadic rationals in key order."""
    yield Fraction(0)
    for h in itertools.count(1):
        level = []
        e = 0
        while (1 << e) <= h:
            den = 1 << e
            for m in range(-h, h + 1):
                if m == 0 or (e > 0 and m % 2 == 0):
                    continue
                if max(abs(m), den) == h:
                    level.append(Fraction(m, den))
            e += 1
        yield from sorted(set(level), key=dyadic_key)


def nth(iterable_factory, n, _cache={}):
    """The n-th element of a deterministic enumeration (memoized per factory)."""
    key = iterable_factory.__name__
    state = _cache.get(key)
    if state is None:
        state = _cache[key] = ([], iterable_factory())
    seq, it = state
    while len(seq) <= n:
        seq.append(next(it))
    return seq[n]


def prefix(iterable_factory, n):
    return [nth(iterable_factory, k) for k in range(n)]


def irrational_slot(k):
    """q_k = sqrt2 + p_k, the fixed dense sequence of irrationals."""
    return normalize(SQRT2 + nth(iter_rationals, k))


def least_irrational_in(lo, hi):
    """The q_k of least index in the open interval (lo, hi)."""
    def shift(x):
        return x if not is_finite(x) else x - SQRT2
    return normalize(SQRT2 + least_rational_in(shift(lo), shift(hi)))


def irrational_key(x):
    return rational_key(normalize(x - SQRT2))


__all__ = [
    "INF", "SQRT2", "rational_key", "dyadic_key", "least_rational_in", "iter_rationals",
    "least_dyadic_in", "iter_dyadics", "nth", "prefix", "irrational_slot", "least_irrational_in",
    "irrational_key",
]
