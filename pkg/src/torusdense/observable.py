"""Trigonometric-polynomial observables, rigorous evaluation, Birkhoff sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .intervals import Interval, cos_sin_2pi
from .qfield import IntMat2, QuadExt
from .torus import PeriodicPoint, TorusPoint, _common_denominator

Freq = tuple[int, int]


def _canonical(k: Freq) -> tuple[Freq, int]:
    """Map k and -k to one representative; the int is the sign flip for sin."""
    if k[0] < 0 or (k[0] == 0 and k[1] < 0):
        return (-k[0], -k[1]), -1
    return k, 1


class TrigPolynomial:
    """c0 + sum_k a_k cos(2 pi k.x) + b_k sin(2 pi k.x) with rational coefficients."""

    __slots__ = ("const", "terms")

    def __init__(self, const=0, terms: dict[Freq, tuple[Fraction, Fraction]] | None = None):
        self.const = Fraction(const)
        merged: dict[Freq, list[Fraction]] = {}
        for k, (a, b) in (terms or {}).items():
            kk, sgn = _canonical(tuple(k))
            if kk == (0, 0):
                self.const += Fraction(a)
                continue
            acc = merged.setdefault(kk, [Fraction(0), Fraction(0)])
            acc[0] += Fraction(a)
            acc[1] += sgn * Fraction(b)
        self.terms = {k: (a, b) for k, (a, b) in sorted(merged.items()) if a or b}

    # -- builders ---------------------------------------------------------
    @classmethod
    def cos(cls, k1: int, k2: int, coef=1) -> "TrigPolynomial":
        return cls(0, {(k1, k2): (Fraction(coef), Fraction(0))})

    @classmethod
    def sin(cls, k1: int, k2: int, coef=1) -> "TrigPolynomial":
        return cls(0, {(k1, k2): (Fraction(0), Fraction(coef))})

    @classmethod
    def constant(cls, c) -> "TrigPolynomial":
        return cls(c)

    @classmethod
    def parse(cls, text: str) -> "TrigPolynomial":
        """Parse lines (or ';'-separated items) of ``cos k1 k2 c``, ``sin k1 k2 c``, ``const c``."""
        out = cls()
        for raw in text.replace(";", "\n").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0].lower()
            if kind == "const" and len(parts) == 2:
                out = out + cls.constant(Fraction(parts[1]))
            elif kind in ("cos", "sin") and len(parts) == 4:
                k1, k2, c = int(parts[1]), int(parts[2]), Fraction(parts[3])
                out = out + (cls.cos(k1, k2, c) if kind == "cos" else cls.sin(k1, k2, c))
            else:
                raise ValueError(f"bad observable line: {raw!r}")
        return out

    def to_text(self) -> str:
        lines = []
        for (k1, k2), (a, b) in self.terms.items():
            if a:
                lines.append(f"cos {k1} {k2} {a.numerator}/{a.denominator}")
            if b:
                lines.append(f"sin {k1} {k2} {b.numerator}/{b.denominator}")
        if self.const or not lines:
            lines.append(f"const {self.const.numerator}/{self.const.denominator}")
        return "\n".join(lines)

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        terms: dict[Freq, list[Fraction]] = {k: list(v) for k, v in self.terms.items()}
        for k, (a, b) in other.terms.items():
            acc = terms.setdefault(k, [Fraction(0), Fraction(0)])
            acc[0] += a
            acc[1] += b
        return TrigPolynomial(self.const + other.const, {k: tuple(v) for k, v in terms.items()})

    def __neg__(self) -> "TrigPolynomial":
        return self.scale(-1)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + (-other)

    def scale(self, c) -> "TrigPolynomial":
        c = Fraction(c)
        return TrigPolynomial(self.const * c, {k: (a * c, b * c) for k, (a, b) in self.terms.items()})

    def compose(self, A: IntMat2) -> "TrigPolynomial":
        """psi o f: frequency k becomes k^T A."""
        terms = {}
        for (k1, k2), ab in self.terms.items():
            kk = (k1 * A.a + k2 * A.c, k1 * A.b + k2 * A.d)
            terms[kk] = ab
        return TrigPolynomial(self.const, terms)

    def coefficient_mass(self) -> Fraction:
        return sum((abs(a) + abs(b) for a, b in self.terms.values()), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return self.const == other.const and self.terms == other.terms

    def __repr__(self) -> str:
        return f"TrigPolynomial({self.to_text()!r})"

    # -- evaluation -------------------------------------------------------
    def eval(self, pt: TorusPoint, precision: int = 128) -> Interval:
        """Rigorous enclosure of the observable at ``pt``."""
        work = precision + 10
        total = Interval.from_fraction(self.const, work)
        for (k1, k2), (a, b) in self.terms.items():
            phase = pt.x1 * k1 + pt.x2 * k2
            lo, hi = phase.bounds(work + 10)
            c, s = cos_sin_2pi(lo, hi, precision)
            if a:
                total = total + c * Interval.from_fraction(a, work)
            if b:
                total = total + s * Interval.from_fraction(b, work)
        return total

    def eval_numerators(self, u1: int, u2: int, N: int, precision: int = 128) -> Interval:
        """Evaluate at the rational point (u1/N, u2/N)."""
        work = precision + 10
        total = Interval.from_fraction(self.const, work)
        for (k1, k2), (a, b) in self.terms.items():
            r = Fraction((k1 * u1 + k2 * u2) % N, N)
            c, s = cos_sin_2pi(r, r, precision)
            if a:
                total = total + c * Interval.from_fraction(a, work)
            if b:
                total = total + s * Interval.from_fraction(b, work)
        return total

    def eval_float(self, x1: float, x2: float) -> float:
        """Plain double evaluation for plotting and sanity checks (not rigorous)."""
        v = float(self.const)
        for (k1, k2), (a, b) in self.terms.items():
            t = 2 * math.pi * (k1 * x1 + k2 * x2)
            v += float(a) * math.cos(t) + float(b) * math.sin(t)
        return v


@dataclass(frozen=True)
class HolderData:
    theta: Fraction
    C: float

    def bound(self, distance: float) -> float:
        """Upper bound on |phi(x) - phi(y)| when d(x, y) <= distance."""
        if distance <= 0:
            return 0.0
        return _up_float(self.C * distance ** float(self.theta))


def _up_float(x: float) -> float:
    return math.nextafter(math.nextafter(x, math.inf), math.inf)


def holder_constant(phi: TrigPolynomial, theta=1) -> HolderData:
    """Lipschitz constant 2 pi sum |k| (|a_k| + |b_k|), rescaled for theta < 1.

    For theta < 1 the constant is C * diam^(1-theta) with diam = sqrt(2)/2,
    valid because d(x, y) <= diam on the torus.
    """
    theta = Fraction(theta)
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    prec = 80
    total = Interval.from_fraction(0, prec)
    for (k1, k2), (a, b) in phi.terms.items():
        knorm = Interval.from_fraction(k1 * k1 + k2 * k2, prec).sqrt()
        total = total + knorm * Interval.from_fraction(abs(a) + abs(b), prec)
    # 710/113 > 2 pi
    C = (total * Interval.from_fraction(Fraction(710, 113), prec)).to_floats()[1]
    if theta != 1 and C > 0:
        C = _up_float(C * (math.sqrt(2) / 2) ** (1 - float(theta)) * (1 + 1e-12))
    return HolderData(theta, C)


@dataclass(frozen=True)
class SumEnclosure:
    interval: Interval
    term_count: int

    @property
    def lo(self) -> float:
        return self.interval.to_floats()[0]

    @property
    def hi(self) -> float:
        return self.interval.to_floats()[1]

    def width(self) -> float:
        lo, hi = self.interval.to_floats()
        return hi - lo


def birkhoff_sum(phi: TrigPolynomial, z: PeriodicPoint, precision: int = 128,
                 length: int | None = None, A: IntMat2 | None = None) -> SumEnclosure:
    """Enclosure of sum_{i < length} phi(f^i z), ``length`` defaulting to the period.

    Uses the cached orbit when it is long enough; otherwise iterates the
    rational point exactly with ``A``.
    """
    n = z.period if length is None else length
    if z.orbit and n <= len(z.orbit):
        return sum_along(phi, z.orbit[:n], precision)
    if A is None:
        if z.orbit and n % len(z.orbit) == 0:
            reps = n // len(z.orbit)
            one = sum_along(phi, z.orbit, precision)
            return SumEnclosure(one.interval * reps, n)
        raise ValueError("need the matrix to iterate beyond the cached orbit")
    return rational_orbit_sum(phi, A, z.point, n, precision)


def sum_along(phi: TrigPolynomial, points: Sequence[TorusPoint], precision: int = 128) -> SumEnclosure:
    work = precision + 10
    total = Interval.from_fraction(0, work)
    for pt in points:
        total = total + phi.eval(pt, precision)
    return SumEnclosure(total, len(points))


def rational_orbit_sum(phi: TrigPolynomial, A: IntMat2, pt: TorusPoint, length: int,
                       precision: int = 128) -> SumEnclosure:
    """Sum over ``length`` iterates of a rational point, iterating numerators mod N."""
    u1, u2, N = _common_denominator(pt)
    a, b, c, d = A
    work = precision + 10
    total = Interval.from_fraction(0, work)
    for _ in range(length):
        total = total + phi.eval_numerators(u1, u2, N, precision)
        u1, u2 = (a * u1 + b * u2) % N, (c * u1 + d * u2) % N
    return SumEnclosure(total, length)
