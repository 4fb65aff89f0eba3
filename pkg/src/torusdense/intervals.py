"""Closed intervals with MPFR endpoints and outward rounding.

Every operation rounds the lower endpoint toward -inf and the upper endpoint
toward +inf, so an Interval always contains the real value it was built to
enclose.  Endpoints are ``gmpy2.mpfr``; the working precision of a result is
the larger of its operands' precisions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

__all__ = ["Interval", "cos_sin_2pi", "pi_interval", "round_up", "round_down", "to_fraction"]


@lru_cache(maxsize=None)
def _ctx(prec: int, rnd: int) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=rnd)


def _down(prec):
    return _ctx(prec, gmpy2.RoundDown)


def _up(prec):
    return _ctx(prec, gmpy2.RoundUp)


_ZERO = mpfr(0)


def _near(prec):
    return _ctx(prec, gmpy2.RoundToNearest)


def round_down(x: Fraction | int | float, prec: int = 53) -> mpfr:
    """Largest precision-``prec`` binary float <= x."""
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, int):
        x = Fraction(x)
    return _exact_fraction_to_mpfr(x, prec, gmpy2.RoundDown)


def round_up(x: Fraction | int | float, prec: int = 53) -> mpfr:
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, int):
        x = Fraction(x)
    return _exact_fraction_to_mpfr(x, prec, gmpy2.RoundUp)


def _exact_fraction_to_mpfr(x: Fraction, prec: int, rnd: int) -> mpfr:
    # adding the exact rational to an exact zero rounds it once, in the context's direction
    return _ctx(prec, rnd).add(_ZERO, gmpy2.mpq(x.numerator, x.denominator))


def to_fraction(m: mpfr) -> Fraction:
    n, d = m.as_integer_ratio()
    return Fraction(int(n), int(d))


def _neg(x: mpfr) -> mpfr:
    return _near(x.precision).minus(x)


def _abs(x: mpfr) -> mpfr:
    return _near(x.precision).abs(x)


def float_down(x: mpfr) -> float:
    """Largest double <= x, including past the double exponent range."""
    f = float(_down(53).add(x, 0))
    return math.nextafter(f, -math.inf) if f > x else f


def float_up(x: mpfr) -> float:
    f = float(_up(53).add(x, 0))
    return math.nextafter(f, math.inf) if f < x else f


def _bits(x) -> int:
    if isinstance(x, int):
        return max(53, x.bit_length())
    return 53


def _prec(*xs) -> int:
    return max(x.precision for x in xs)


class Interval:
    """A closed interval [lo, hi] with mpfr endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if not isinstance(lo, mpfr):
            lo = round_down(lo, _bits(lo))
        if not isinstance(hi, mpfr):
            hi = round_up(hi, _bits(hi))
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_fraction(cls, x: Fraction | int, prec: int = 53) -> "Interval":
        x = Fraction(x)
        return cls(round_down(x, prec), round_up(x, prec))

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, prec: int = 53) -> "Interval":
        return cls(round_down(Fraction(lo), prec), round_up(Fraction(hi), prec))

    @classmethod
    def hull(cls, items) -> "Interval":
        items = list(items)
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    # -- queries ----------------------------------------------------------
    @property
    def precision(self) -> int:
        return _prec(self.lo, self.hi)

    def width(self) -> mpfr:
        p = self.precision
        return _up(p).sub(self.hi, self.lo)

    def radius(self) -> mpfr:
        p = self.precision
        return _up(p).div(self.width(), 2)

    def mid(self) -> mpfr:
        p = self.precision + 1
        return _near(p).div(_near(p).add(self.lo, self.hi), 2)

    def magnitude(self) -> mpfr:
        return max(_abs(self.lo), _abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Fraction):
            return to_fraction(self.lo) <= x <= to_fraction(self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def inside_open(self, lo, hi) -> bool:
        """True iff the whole interval lies strictly within (lo, hi)."""
        lo = Fraction(lo) if not isinstance(lo, Fraction) else lo
        hi = Fraction(hi) if not isinstance(hi, Fraction) else hi
        return lo < to_fraction(self.lo) and to_fraction(self.hi) < hi

    def intersects(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def to_floats(self) -> tuple[float, float]:
        """Outward-rounded IEEE double endpoints."""
        return float_down(self.lo), float_up(self.hi)

    def hex_pair(self) -> list[str]:
        lo, hi = self.to_floats()
        return [lo.hex(), hi.hex()]

    @classmethod
    def from_hex_pair(cls, pair) -> "Interval":
        return cls(mpfr(float.fromhex(pair[0]), 53), mpfr(float.fromhex(pair[1]), 53))

    def __float__(self) -> float:
        return float(self.mid())

    def __repr__(self) -> str:
        lo, hi = self.to_floats()
        return f"Interval({lo!r}, {hi!r})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval.from_fraction(other, self.precision)
        if isinstance(other, float):
            return Interval(mpfr(other, 53))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = _prec(self.lo, o.lo, self.hi, o.hi)
        return Interval(_down(p).add(self.lo, o.lo), _up(p).add(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(_neg(self.hi), _neg(self.lo))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = _prec(self.lo, o.lo, self.hi, o.hi)
        return Interval(_down(p).sub(self.lo, o.hi), _up(p).sub(self.hi, o.lo))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = _prec(self.lo, o.lo, self.hi, o.hi)
        d, u = _down(p), _up(p)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        return Interval(min(d.mul(a, b) for a, b in pairs), max(u.mul(a, b) for a, b in pairs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        p = _prec(self.lo, o.lo, self.hi, o.hi)
        d, u = _down(p), _up(p)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        return Interval(min(d.div(a, b) for a, b in pairs), max(u.div(a, b) for a, b in pairs))

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(mpfr(0), max(_neg(self.lo), self.hi))

    def sqrt(self) -> "Interval":
        p = self.precision
        lo = max(self.lo, mpfr(0))
        return Interval(_down(p).sqrt(lo), _up(p).sqrt(self.hi))

    def widen(self, r) -> "Interval":
        """Grow both sides by a nonnegative radius ``r``."""
        p = self.precision
        r = r if isinstance(r, mpfr) else round_up(r, p)
        return Interval(_down(p).sub(self.lo, r), _up(p).add(self.hi, r))


def pi_interval(prec: int) -> Interval:
    return Interval(_down(prec).const_pi(), _up(prec).const_pi())


def cos_sin_2pi(lo: Fraction, hi: Fraction, prec: int) -> tuple[Interval, Interval]:
    """Enclosures of cos(2 pi r) and sin(2 pi r) for every r in [lo, hi].

    ``hi - lo`` must be tiny (it is charged as a Lipschitz radius); the caller
    supplies rational bounds on the phase.  Uses a midpoint evaluation in
    MPFR at ``prec + 10`` bits and bounds every rounding step explicitly.
    """
    work = prec + 10
    shift = math.floor(lo)
    lo -= shift
    hi -= shift
    mid_q = (lo + hi) / 2
    near = _near(work)
    m = near.add(_ZERO, gmpy2.mpq(mid_q.numerator, mid_q.denominator))
    x = near.mul(near.mul(near.const_pi(), 2), m)
    c, s = near.cos(x), near.sin(x)
    # |m - mid| <= 2^-work, |x - 2 pi m| <= 8 ulp at |x| < 2pi+1,
    # cos/sin correctly rounded: total <= 2^(5-work) + 2 pi * (hi-lo)/2.
    slack = Fraction(1, 1 << (work - 5)) + Fraction(355, 113) * (hi - lo) * 2
    r = round_up(slack, 64)
    u, d = _up(work), _down(work)
    cos_iv = Interval(max(d.sub(c, r), mpfr(-1)), min(u.add(c, r), mpfr(1)))
    sin_iv = Interval(max(d.sub(s, r), mpfr(-1)), min(u.add(s, r), mpfr(1)))
    return cos_iv, sin_iv
