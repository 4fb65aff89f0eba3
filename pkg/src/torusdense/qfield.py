"""Exact arithmetic: rationals, the real quadratic field Q(sqrt D), 2x2 matrices.

``BigRat`` is :class:`fractions.Fraction`.  A :class:`QuadExt` stores
``(p + q*sqrt(D)) / r`` with integers ``p, q``, ``r > 0`` and
``gcd(p, q, r) = 1``, so structural equality is value equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import NotHyperbolic, NotUnimodular, RationalSpectrum
from .intervals import Interval, round_down, round_up

BigRat = Fraction
Number = Union[int, Fraction, "QuadExt"]

__all__ = [
    "BigRat",
    "QuadExt",
    "IntMat2",
    "EigenData",
    "mat_pow",
    "eigen_data",
    "enclose",
    "lowest_terms",
    "squarefree_part",
    "parse_quadext",
]


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, D)`` with ``n = s*s*D`` and ``D`` square-free (n > 0)."""
    if n <= 0:
        raise ValueError("squarefree_part needs a positive integer")
    s, d, f = 1, n, 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            s *= f
        f += 1 if f == 2 else 2
    return s, d


class QuadExt:
    """An element of Q(sqrt D)."""

    __slots__ = ("p", "q", "r", "D")

    def __init__(self, p: int = 0, q: int = 0, r: int = 1, D: int = 0):
        if r == 0:
            raise ZeroDivisionError("QuadExt with zero denominator")
        if r < 0:
            p, q, r = -p, -q, -r
        if q == 0:
            D = 0
        g = math.gcd(math.gcd(p, q), r)
        if g > 1:
            p //= g
            q //= g
            r //= g
        self.p, self.q, self.r, self.D = p, q, r, D

    # -- construction -----------------------------------------------------
    @classmethod
    def from_parts(cls, rat, irr=0, D: int = 0) -> "QuadExt":
        rat, irr = Fraction(rat), Fraction(irr)
        r = rat.denominator * irr.denominator // math.gcd(rat.denominator, irr.denominator)
        return cls(rat.numerator * (r // rat.denominator), irr.numerator * (r // irr.denominator), r, D)

    @classmethod
    def coerce(cls, x) -> "QuadExt":
        if isinstance(x, QuadExt):
            return x
        if isinstance(x, int):
            return cls(x, 0, 1)
        if isinstance(x, Fraction):
            return cls(x.numerator, 0, x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadExt")

    # -- parts ------------------------------------------------------------
    @property
    def rat_part(self) -> Fraction:
        return Fraction(self.p, self.r)

    @property
    def irr_part(self) -> Fraction:
        return Fraction(self.q, self.r)

    def is_rational(self) -> bool:
        return self.q == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.p, -self.q, self.r, self.D)

    def norm(self) -> Fraction:
        """x * conjugate(x), a rational."""
        return Fraction(self.p * self.p - self.D * self.q * self.q, self.r * self.r)

    # -- arithmetic -------------------------------------------------------
    def _field(self, other: "QuadExt") -> int:
        if self.D and other.D and self.D != other.D:
            raise ValueError(f"mixing Q(sqrt {self.D}) and Q(sqrt {other.D})")
        return self.D or other.D

    def __add__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        if self.r == o.r:
            return QuadExt(self.p + o.p, self.q + o.q, self.r, D)
        return QuadExt(self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, self.r * o.r, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.p, -self.q, self.r, self.D)

    def __sub__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return QuadExt(self.p * other, self.q * other, self.r, self.D)
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        return QuadExt(
            self.p * o.p + D * self.q * o.q,
            self.p * o.q + self.q * o.p,
            self.r * o.r,
            D,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        n = self.p * self.p - self.D * self.q * self.q
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt D)")
        # 1/x = r * conj / (p^2 - D q^2)
        return QuadExt(self.r * self.p, -self.r * self.q, n, self.D)

    def __truediv__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QuadExt.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadExt(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order ------------------------------------------------------------
    def sign(self) -> int:
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        sq = 1 if q > 0 else -1
        if p == 0 or (p > 0) == (q > 0):
            return sq
        return (1 if p > 0 else -1) if p * p > self.D * q * q else sq

    def __eq__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return self.p == o.p and self.q == o.q and self.r == o.r and (self.q == 0 or self.D == o.D)

    def __hash__(self):
        if self.q == 0:
            return hash(Fraction(self.p, self.r))
        return hash((self.p, self.q, self.r, self.D))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return self.p != 0 or self.q != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- rounding ---------------------------------------------------------
    def _sqrt_part_floor(self, scale_bits: int = 0) -> int:
        """floor(q * sqrt(D) * 2**scale_bits); never exact when q != 0."""
        q = self.q
        s = math.isqrt(q * q * self.D << (2 * scale_bits))
        return s if q > 0 else -s - 1

    def floor(self) -> int:
        if self.q == 0:
            return self.p // self.r
        # numerator lies strictly between two consecutive integers
        return (self.p + self._sqrt_part_floor()) // self.r

    __floor__ = floor

    def round_nearest(self) -> int:
        return (self + Fraction(1, 2)).floor()

    def frac(self) -> "QuadExt":
        return self - self.floor()

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        """Dyadic rationals lo <= self <= hi with hi - lo <= 2**(1-bits)."""
        if self.q == 0:
            v = Fraction(self.p, self.r)
            return v, v
        f = self._sqrt_part_floor(bits)
        scale = 1 << bits
        lo = Fraction(self.p * scale + f, self.r * scale)
        hi = Fraction(self.p * scale + f + 1, self.r * scale)
        return lo, hi

    def __float__(self) -> float:
        lo, hi = self.bounds(60)
        return float((lo + hi) / 2)

    # -- text -------------------------------------------------------------
    def __str__(self) -> str:
        rat = self.rat_part
        if self.q == 0:
            return _frac_str(rat)
        return f"{_frac_str(rat)} + {_frac_str(self.irr_part)}*sqrt({self.D})"

    def __repr__(self) -> str:
        return f"QuadExt({self})"


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_quadext(text: str) -> QuadExt:
    """Inverse of ``str(QuadExt)``: ``"p/q"`` or ``"p/q + r/s*sqrt(D)"``."""
    text = text.strip()
    if "sqrt" not in text:
        return QuadExt.coerce(Fraction(text))
    rat, _, irr = text.partition(" + ")
    coef, _, rad = irr.partition("*sqrt(")
    return QuadExt.from_parts(Fraction(rat), Fraction(coef), int(rad.rstrip(")")))


def enclose(x: Number, precision_bits: int) -> Interval:
    """Rigorous floating enclosure of x with width <= 2**(1-p) * max(1, |x|)."""
    if precision_bits < 8:
        raise ValueError("precision_bits must be >= 8")
    x = QuadExt.coerce(x)
    work = precision_bits + 3
    lo, hi = x.bounds(work)
    return Interval(round_down(lo, work), round_up(hi, work))


def lowest_terms(a: Fraction, b: Fraction) -> tuple[int, int]:
    """(l, k) with a/b = l/k, gcd(l, k) = 1 and k > 0."""
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        raise ZeroDivisionError("lowest_terms with b = 0")
    ratio = a / b
    return ratio.numerator, ratio.denominator


# --------------------------------------------------------------------------
# 2x2 matrices


class IntMat2(NamedTuple):
    """Row-major 2x2 matrix ``[[a, b], [c, d]]`` (integer or rational entries)."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows) -> "IntMat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    def rows(self) -> list[list]:
        return [[self.a, self.b], [self.c, self.d]]

    def mul(self, o: "IntMat2") -> "IntMat2":
        return IntMat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __matmul__(self, o):
        if isinstance(o, IntMat2):
            return self.mul(o)
        return self.apply(o)

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def minus_identity(self) -> "IntMat2":
        return IntMat2(self.a - 1, self.b, self.c, self.d - 1)

    def adjugate(self) -> "IntMat2":
        return IntMat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "IntMat2":
        det = self.det
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        adj = self.adjugate()
        if det in (1, -1):
            return IntMat2(*(e * det for e in adj))
        return IntMat2(*(Fraction(e, det) for e in adj))

    def transpose(self) -> "IntMat2":
        return IntMat2(self.a, self.c, self.b, self.d)


IDENTITY = IntMat2(1, 0, 0, 1)


def mat_pow(A: IntMat2, n: int) -> IntMat2:
    """Exact n-th power; negative n goes through the (integral) inverse."""
    if n < 0:
        A, n = A.inverse(), -n
    result = IDENTITY
    while n:
        if n & 1:
            result = result.mul(A)
        A = A.mul(A)
        n >>= 1
    return result


# --------------------------------------------------------------------------
# eigen-geometry


@dataclass(frozen=True)
class EigenData:
    lambda_u: QuadExt
    lambda_s: QuadExt
    v_u: tuple[QuadExt, QuadExt]
    v_s: tuple[QuadExt, QuadExt]
    H: float
    D: int
    lam: float  # upper bound on |lambda_s|
    lam_u: float  # lower bound on |lambda_u|

    @property
    def unit_v_u_norm(self) -> Interval:
        return vector_norm(self.v_u, 80)

    @property
    def unit_v_s_norm(self) -> Interval:
        return vector_norm(self.v_s, 80)


def vector_norm(v, bits: int = 80) -> Interval:
    """Enclosure of the Euclidean length of a QuadExt 2-vector."""
    sq = QuadExt.coerce(v[0]) * v[0] + QuadExt.coerce(v[1]) * v[1]
    return enclose(sq, bits).sqrt()


def _eigenvector(A: IntMat2, lam: QuadExt) -> tuple[QuadExt, QuadExt]:
    if A.b != 0:
        return QuadExt(1), (lam - A.a) / A.b
    return (lam - A.d) / A.c, QuadExt(1)


def eigen_data(A: IntMat2) -> EigenData:
    """Exact eigen-pairs of a hyperbolic unimodular matrix over Q(sqrt D)."""
    det, tr = A.det, A.trace
    if det not in (1, -1):
        raise NotUnimodular(f"|det| must be 1, got {det}")
    if (det == 1 and abs(tr) <= 2) or (det == -1 and tr == 0):
        raise NotHyperbolic(f"matrix {A.rows()} has an eigenvalue of modulus 1")
    disc = tr * tr - 4 * det
    s, D = squarefree_part(disc)
    if D == 1:
        raise RationalSpectrum(f"discriminant {disc} is a perfect square")
    plus = QuadExt(tr, s, 2, D)
    minus = QuadExt(tr, -s, 2, D)
    lam_u, lam_s = (plus, minus) if tr > 0 else (minus, plus)
    v_u = _eigenvector(A, lam_u)
    v_s = _eigenvector(A, lam_s)
    # cond(P) for P = [v_u/|v_u|, v_s/|v_s|] is sqrt((1+|c|)/(1-|c|)), c = cos(angle)
    prec = 80
    dot = enclose(v_u[0] * v_s[0] + v_u[1] * v_s[1], prec)
    c = abs(dot) / (vector_norm(v_u, prec) * vector_norm(v_s, prec))
    one = Interval.from_fraction(1, prec)
    cond = ((one + c) / (one - c)).sqrt()
    H = max(1.0, cond.to_floats()[1])
    lam = enclose(abs(lam_s), prec).to_floats()[1]
    lam_u_lo = enclose(abs(lam_u), prec).to_floats()[0]
    return EigenData(lam_u, lam_s, v_u, v_s, H, D, lam, lam_u_lo)
