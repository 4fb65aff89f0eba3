"""The toral automorphism f = A mod Z^2: points, lifts, distance, periodic orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CapExceeded, NotPeriodicWithin
from .intervals import Interval
from .qfield import IntMat2, QuadExt, enclose, mat_pow

DEFAULT_CAP = 10**6

LiftedPoint = tuple  # (QuadExt, QuadExt), unreduced coordinates in R^2


@dataclass(frozen=True)
class TorusPoint:
    x1: QuadExt
    x2: QuadExt

    @classmethod
    def reduce(cls, x1, x2) -> "TorusPoint":
        return cls(QuadExt.coerce(x1).frac(), QuadExt.coerce(x2).frac())

    @classmethod
    def rational(cls, x1, x2) -> "TorusPoint":
        return cls.reduce(Fraction(x1), Fraction(x2))

    def lift(self) -> LiftedPoint:
        return (self.x1, self.x2)

    def is_rational(self) -> bool:
        return self.x1.is_rational() and self.x2.is_rational()

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        if not self.is_rational():
            raise ValueError("point has irrational coordinates")
        return self.x1.rat_part, self.x2.rat_part

    def __str__(self) -> str:
        return f"({self.x1}, {self.x2})"

    def sort_key(self):
        return (float(self.x1), float(self.x2), str(self))


def project(v: LiftedPoint) -> TorusPoint:
    return TorusPoint.reduce(v[0], v[1])


@dataclass(frozen=True)
class PeriodicPoint:
    point: TorusPoint
    period: int
    orbit: tuple = field(repr=False, compare=False, hash=False)

    def __str__(self) -> str:
        return f"{self.point} [period {self.period}]"

    def same_orbit(self, other: "PeriodicPoint") -> bool:
        return other.point in self.orbit


def apply(A: IntMat2, pt: TorusPoint) -> TorusPoint:
    return project(A.apply(pt.lift()))


def apply_lifted(A: IntMat2, v: LiftedPoint) -> LiftedPoint:
    return A.apply(v)


def torus_displacement(a: TorusPoint, b: TorusPoint) -> tuple[QuadExt, QuadExt]:
    """Shortest lifted vector from b to a (each coordinate in [-1/2, 1/2])."""
    d1 = a.x1 - b.x1
    d2 = a.x2 - b.x2
    return d1 - d1.round_nearest(), d2 - d2.round_nearest()


def torus_distance(a: TorusPoint, b: TorusPoint, precision: int = 64) -> Interval:
    """Flat quotient distance; the nearest translate is found coordinatewise."""
    r1, r2 = torus_displacement(a, b)
    sq = r1 * r1 + r2 * r2
    if not sq:
        return Interval.from_fraction(0, precision)
    return enclose(sq, precision).sqrt()


def orbit_segment(A: IntMat2, pt: LiftedPoint, start: int, stop: int) -> list[LiftedPoint]:
    """Exact lifted iterates A^i pt for i = start..stop inclusive."""
    if start > stop:
        raise ValueError("orbit_segment needs start <= stop")
    v = mat_pow(A, start).apply(pt) if start else tuple(pt)
    out = [v]
    for _ in range(stop - start):
        v = A.apply(v)
        out.append(v)
    return out


def _common_denominator(pt: TorusPoint) -> tuple[int, int, int]:
    f1, f2 = pt.as_fractions()
    N = math.lcm(f1.denominator, f2.denominator)
    return f1.numerator * (N // f1.denominator), f2.numerator * (N // f2.denominator), N


def minimal_period(A: IntMat2, pt: TorusPoint, n_max: int = 10**6) -> int:
    """Least k <= n_max with A^k pt = pt on the torus (pt rational)."""
    u1, u2, N = _common_denominator(pt)
    a, b, c, d = A
    v1, v2 = u1, u2
    for k in range(1, n_max + 1):
        v1, v2 = (a * v1 + b * v2) % N, (c * v1 + d * v2) % N
        if v1 == u1 and v2 == u2:
            return k
    raise NotPeriodicWithin(f"{pt} is not periodic within {n_max} steps")


def rational_orbit(A: IntMat2, pt: TorusPoint, length: int) -> list[TorusPoint]:
    """The first ``length`` forward iterates of a rational point, exactly."""
    u1, u2, N = _common_denominator(pt)
    a, b, c, d = A
    out = []
    for _ in range(length):
        out.append(TorusPoint(QuadExt(u1, 0, N), QuadExt(u2, 0, N)))
        u1, u2 = (a * u1 + b * u2) % N, (c * u1 + d * u2) % N
    return out


def periodic_point(A: IntMat2, pt: TorusPoint, n_max: int = 10**6) -> PeriodicPoint:
    pi = minimal_period(A, pt, n_max)
    return PeriodicPoint(pt, pi, tuple(rational_orbit(A, pt, pi)))


# --------------------------------------------------------------------------
# exact enumeration of Fix(f^n) through the lattice (A^n - I)^{-1} Z^2 / Z^2


@dataclass(frozen=True)
class FixedPointLattice:
    """Fix(f^n) as integer numerators over the common denominator ``N``.

    ``M = A^n - I``; coset representatives of Z^2 / M Z^2 are
    ``(i, j)`` with ``0 <= i < h_a`` and ``0 <= j < h_c`` where
    ``[[h_a, h_b], [0, h_c]]`` is a Hermite basis of ``M Z^2``.
    """

    A: IntMat2
    n: int
    M: IntMat2
    N: int
    h_a: int
    h_b: int
    h_c: int

    @property
    def count(self) -> int:
        return self.N

    def numerators(self, i: int, j: int) -> tuple[int, int]:
        # z = M^{-1} (i, j) = adj(M)(i, j) / det
        adj = self.M.adjugate()
        det = self.M.det
        s = 1 if det > 0 else -1
        u1 = s * (adj.a * i + adj.b * j) % self.N
        u2 = s * (adj.c * i + adj.d * j) % self.N
        return u1, u2

    def index(self, u1: int, u2: int) -> int:
        """Coset index i*h_c + j of the fixed point with numerators (u1, u2)."""
        M, N = self.M, self.N
        m1 = (M.a * u1 + M.b * u2) // N
        m2 = (M.c * u1 + M.d * u2) // N
        j = m2 % self.h_c
        s = (m2 - j) // self.h_c
        i = (m1 - s * self.h_b) % self.h_a
        return i * self.h_c + j

    def iter_numerators(self) -> Iterable[tuple[int, int]]:
        for i in range(self.h_a):
            for j in range(self.h_c):
                yield self.numerators(i, j)


def _hermite_basis(M: IntMat2) -> tuple[int, int, int]:
    """Upper-triangular basis [[a, b], [0, c]] of the column lattice of M."""
    g, s, t = _xgcd(M.c, M.d)
    det = M.det
    a = abs(det // g)
    c = abs(g)
    top = M.a * s + M.b * t
    if g < 0:
        top = -top
    return a, top % a, c


def _xgcd(x: int, y: int) -> tuple[int, int, int]:
    s0, s1, t0, t1 = 1, 0, 0, 1
    while y:
        q, r = divmod(x, y)
        x, y = y, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return x, s0, t0


def fixed_point_lattice(A: IntMat2, n: int, cap: int = DEFAULT_CAP) -> FixedPointLattice:
    if n < 1:
        raise ValueError("period must be positive")
    M = mat_pow(A, n).minus_identity()
    N = abs(M.det)
    if N == 0:
        raise ValueError("A^n - I is singular; A is not hyperbolic")
    if N > cap:
        raise CapExceeded(f"Fix(f^{n}) has {N} points, above cap {cap}")
    h_a, h_b, h_c = _hermite_basis(M)
    return FixedPointLattice(A, n, M, N, h_a, h_b, h_c)


def enumerate_periodic(A: IntMat2, n: int, cap: int = DEFAULT_CAP) -> set[PeriodicPoint]:
    """All |det(A^n - I)| fixed points of f^n with their exact minimal periods."""
    lat = fixed_point_lattice(A, n, cap)
    N = lat.N
    a, b, c, d = A
    seen: dict[tuple[int, int], PeriodicPoint] = {}
    for u in lat.iter_numerators():
        if u in seen:
            continue
        cycle = [u]
        v1, v2 = u
        while True:
            v1, v2 = (a * v1 + b * v2) % N, (c * v1 + d * v2) % N
            if (v1, v2) == u:
                break
            cycle.append((v1, v2))
        pts = tuple(TorusPoint(QuadExt(x, 0, N), QuadExt(y, 0, N)) for x, y in cycle)
        for k, w in enumerate(cycle):
            seen[w] = PeriodicPoint(pts[k], len(cycle), pts[k:] + pts[:k])
    return set(seen.values())


def group_orbits(points: Sequence[PeriodicPoint]) -> list[PeriodicPoint]:
    """One representative per orbit (the smallest point), deterministically ordered."""
    reps = {}
    for p in points:
        key = min(p.orbit, key=TorusPoint.sort_key)
        reps[key] = PeriodicPoint(key, p.period, _rotate_to(p.orbit, key))
    return sorted(reps.values(), key=lambda p: (p.period, p.point.sort_key()))


def _rotate_to(orbit: tuple, start: TorusPoint) -> tuple:
    k = orbit.index(start)
    return orbit[k:] + orbit[:k]
