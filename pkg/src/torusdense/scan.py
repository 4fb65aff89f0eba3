"""Birkhoff sums of every periodic orbit up to a period bound, and density statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .intervals import Interval
from .observable import TrigPolynomial, rational_orbit_sum
from .qfield import IntMat2, QuadExt
from .torus import DEFAULT_CAP, TorusPoint, fixed_point_lattice


@dataclass(frozen=True)
class OrbitSum:
    period: int
    u1: int
    u2: int
    N: int
    lo: float
    hi: float

    @property
    def point(self) -> TorusPoint:
        return TorusPoint(QuadExt(self.u1, 0, self.N), QuadExt(self.u2, 0, self.N))

    @property
    def mid(self) -> float:
        return (self.lo + self.hi) / 2

    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)


def _error_bound(terms: int, phi: TrigPolynomial) -> float:
    # cos/sin of a double phase within 2^-46, coefficient rounding, and
    # recursive summation of `terms` values each bounded by B
    mass = float(phi.coefficient_mass())
    B = mass + abs(float(phi.const))
    return terms * mass * 2.0**-45 + terms * (terms + 1) * B * 2.0**-52 + 1e-300


def scan_sums(A: IntMat2, phi: TrigPolynomial, period_max: int, *, cap: int = DEFAULT_CAP,
              backend: str | None = None, certified: bool = False,
              precision: int = 96) -> list[OrbitSum]:
    """All orbits of minimal period <= period_max with enclosed Birkhoff sums.

    The fast path evaluates in double precision and pads each sum with an
    a-priori rounding bound (which assumes libm cos/sin are within one ulp);
    ``certified=True`` re-evaluates every orbit with MPFR enclosures instead.
    """
    freqs = list(phi.terms)
    cos_coef = [float(a) for a, _ in phi.terms.values()]
    sin_coef = [float(b) for _, b in phi.terms.values()]
    out: list[OrbitSum] = []
    for n in range(1, period_max + 1):
        lat = fixed_point_lattice(A, n, cap)
        r1, r2, periods, sums = kernels.scan_orbits(
            tuple(A), tuple(lat.M), lat.N, lat.h_a, lat.h_b, lat.h_c,
            freqs, cos_coef, sin_coef, float(phi.const), backend=backend)
        for u1, u2, per, s in zip(r1, r2, periods, sums):
            if per != n:
                continue
            g = math.gcd(math.gcd(u1, u2), lat.N)
            if certified:
                pt = TorusPoint(QuadExt(u1, 0, lat.N), QuadExt(u2, 0, lat.N))
                lo, hi = rational_orbit_sum(phi, A, pt, per, precision).interval.to_floats()
            else:
                e = _error_bound(per * max(1, len(freqs)), phi)
                lo = math.nextafter(s - e, -math.inf)
                hi = math.nextafter(s + e, math.inf)
            out.append(OrbitSum(per, u1 // g, u2 // g, lat.N // g, lo, hi))
    return out


@dataclass(frozen=True)
class DensityScan:
    window: tuple[float, float]
    bins: int
    edges: list[float]
    counts: list[int]
    max_gap: float | None
    distinct: list[float]
    orbits: list[OrbitSum]


def distinct_values(orbits: list[OrbitSum], tol: float = 1e-9) -> list[float]:
    """Sorted midpoints with values closer than ``tol`` merged."""
    mids = sorted(o.mid for o in orbits)
    out: list[float] = []
    for m in mids:
        if not out or m - out[-1] > tol:
            out.append(m)
    return out


def scan_density(A: IntMat2, phi: TrigPolynomial, period_max: int, window: tuple[float, float],
                 bins: int = 50, *, cap: int = DEFAULT_CAP, backend: str | None = None,
                 orbits: list[OrbitSum] | None = None) -> DensityScan:
    """Histogram of orbit sums over ``window`` and the largest gap between sums in it."""
    lo, hi = window
    if orbits is None:
        orbits = scan_sums(A, phi, period_max, cap=cap, backend=backend)
    inside = [v for v in distinct_values(orbits) if lo <= v <= hi]
    if hi <= lo or bins <= 0:
        return DensityScan(window, bins, [], [], None, inside, orbits)
    width = (hi - lo) / bins
    edges = [lo + i * width for i in range(bins)] + [hi]
    counts = [0] * bins
    for o in orbits:
        v = o.mid
        if lo <= v <= hi:
            counts[min(bins - 1, int((v - lo) / width))] += 1
    gaps = [b - a for a, b in zip(inside, inside[1:])]
    return DensityScan(window, bins, edges, counts, max(gaps) if gaps else None, inside, orbits)
