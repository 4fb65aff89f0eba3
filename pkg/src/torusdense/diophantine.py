"""Gaps of two-generator groups and the search for m a + n b inside a window.

``a < 0 < b`` are enclosures of twice the Birkhoff sums of two periodic
orbits.  The combinations m a + n b with m, n >= k_min are searched in
three stages: a direct scan over small m, a stepped landing along a
semiconvergent of |a|/b whose combination g is positive and below the
window width, and a lattice path used when |a|/b is indistinguishable from
a rational l/k, in which case only multiples of |b/k| are reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import NotCoprime, PrecisionExhausted
from .intervals import Interval, to_fraction
from .torus import _xgcd

Refiner = Callable[[int], tuple[Interval, Interval]]


def gap(a, b) -> Fraction:
    """Least positive element of {k a + l b : k, l in Z} for a/b rational."""
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        raise ZeroDivisionError("gap needs b != 0")
    k = (a / b).denominator
    return abs(b / k)


def bezout_combo(l: int, k: int, sign: int = 1) -> tuple[int, int]:
    """Smallest (m0, n0) with m0, n0 >= 1 and m0 l + n0 k = sign."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if math.gcd(l, k) != 1:
        raise NotCoprime(f"gcd({l}, {k}) != 1")
    if l * k >= 0:
        raise ValueError("need l and k of opposite signs for a positive solution")
    g, s, t = _xgcd(l, k)
    m, n = s * sign * g, t * sign * g  # g is +-1
    step_m, step_n = (k, -l) if k > 0 else (-k, l)
    i = max(-((m - 1) // step_m), -((n - 1) // step_n))
    return m + step_m * i, n + step_n * i


def ari_family(m0: int, n0: int, l: int, k: int, i0: int) -> tuple[int, int]:
    """(m0 + k i0, n0 - l i0); keeps m l + n k fixed."""
    return m0 + k * i0, n0 - l * i0


@dataclass(frozen=True)
class ComboQuery:
    a: Interval
    b: Interval
    t: Fraction
    w: Fraction
    k_min: int = 1
    search_bound: int = 10**12
    refine: Refiner | None = field(default=None, compare=False, repr=False)
    precision_ceiling: int = 4096
    scan_budget: int = 2000

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "w", Fraction(self.w))
        if not (self.a.hi < 0 < self.b.lo):
            raise ValueError("need a < 0 < b")
        if self.w <= 0:
            raise ValueError("half-width must be positive")
        if self.k_min < 1:
            raise ValueError("k_min must be >= 1")

    @property
    def window(self) -> tuple[Fraction, Fraction]:
        return self.t - self.w, self.t + self.w


@dataclass(frozen=True)
class Found:
    m: int
    n: int
    value: Interval
    route: str  # "scan", "step" or "lattice"


@dataclass(frozen=True)
class Obstructed:
    best_gap: float
    evidence: list = field(default_factory=list)  # (m, n, value lo, value hi)
    lattice: tuple[int, int] | None = None  # (l, k) with a/b ~ l/k when detected


ComboResult = Found | Obstructed


class _Generators:
    """a and b at the current precision, refined on demand."""

    def __init__(self, q: ComboQuery):
        self.q = q
        self.a, self.b = q.a, q.b
        self.precision = max(q.a.precision, q.b.precision)

    def width(self) -> Fraction:
        return to_fraction(max(self.a.width(), self.b.width()))

    def can_refine(self) -> bool:
        return self.q.refine is not None

    def refine(self) -> None:
        nxt = 2 * self.precision
        if nxt > self.q.precision_ceiling:
            raise PrecisionExhausted(f"precision {nxt} above ceiling {self.q.precision_ceiling}")
        self.a, self.b = self.q.refine(nxt)
        self.precision = nxt

    def ensure(self, size: int) -> None:
        """Refine until size * width < w / 10, when a refiner is available."""
        if not self.can_refine():
            return
        while size * self.width() >= self.q.w / 10:
            self.refine()

    def value(self, m: int, n: int) -> Interval:
        return self.a * m + self.b * n

    def ensure_ratio(self, Q: int) -> None:
        """Refine until |a|/b is sharp enough for convergents with denominator near Q."""
        if not self.can_refine():
            return
        while Q * Q * self.width() * 4 >= to_fraction(self.b.lo):
            if 2 * self.precision > self.q.precision_ceiling:
                return
            self.refine()

    def check(self, m: int, n: int) -> Interval | None:
        self.ensure(m + n)
        v = self.value(m, n)
        lo, hi = self.q.window
        return v if v.inside_open(lo, hi) else None


def _scan(gen: _Generators, q: ComboQuery) -> Found | None:
    lo, hi = q.window
    a, b = float(gen.a.mid()), float(gen.b.mid())
    flo, fhi = float(lo), float(hi)
    slack = 1e-9 * (1 + abs(flo) + abs(fhi))
    for m in range(q.k_min, q.k_min + q.scan_budget):
        n = max(q.k_min, math.floor((flo - m * a) / b) + 1)
        for cand in (n - 1, n):
            if cand < q.k_min or m * a + cand * b > fhi + slack:
                continue
            v = gen.check(m, cand)
            if v is not None:
                return Found(m, cand, v, "scan")
    return None


def _convergents(x: Fraction):
    """(p, q) pairs of the continued-fraction convergents of x > 0."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = math.floor(x)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield a, p1, q1
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def _base(gen: _Generators, q: ComboQuery) -> tuple[int, int]:
    """(m0, k_min) with m0 >= k_min and m0 a + k_min b below the window centre."""
    a, b = to_fraction(gen.a.hi), to_fraction(gen.b.hi)
    m0 = q.k_min
    excess = q.k_min * b + m0 * a - q.t
    if excess > 0:
        m0 += math.ceil(excess / -a)
    return m0, q.k_min


def _land(gen: _Generators, q: ComboQuery, step: tuple[int, int], route: str) -> Found | None:
    """Walk from the base by multiples of the positive combination ``step`` towards t."""
    m0, n0 = _base(gen, q)
    dq, dp = step
    for _ in range(4):
        v0 = gen.value(m0, n0).mid()
        g = gen.value(dq, dp).mid()
        h = max(0, round(to_fraction(q.t - to_fraction(v0)) / to_fraction(g)))
        for hh in (h, h + 1, h - 1):
            if hh < 0:
                continue
            v = gen.check(m0 + hh * dq, n0 + hh * dp)
            if v is not None:
                return Found(m0 + hh * dq, n0 + hh * dp, v, route)
        if not gen.can_refine():
            return None
        gen.refine()
    return None


def _lattice(gen: _Generators, q: ComboQuery, l: int, k: int) -> ComboResult:
    """Multiples of |b/k| when a/b = l/k is taken as exact."""
    lo, hi = q.window
    c = gen.b / k
    cf = to_fraction(c.mid())

    def combo(j: int) -> tuple[int, int]:
        if j == 0:
            m, n = k, -l
        else:
            m0, n0 = bezout_combo(l, k, 1 if j > 0 else -1)
            m, n = abs(j) * m0, abs(j) * n0
        step_m, step_n = k, -l
        i = max(0, -((m - q.k_min) // step_m), -((n - q.k_min) // step_n))
        return ari_family(m, n, l, k, i)

    j0 = round(q.t / cf)
    for j in (j0, j0 - 1, j0 + 1):
        m, n = combo(j)
        v = gen.check(m, n)
        if v is not None:
            return Found(m, n, v, "lattice")
    evidence = []
    for j in sorted({math.floor(lo / cf), math.ceil(hi / cf)}):
        m, n = combo(j)
        lo_v, hi_v = gen.value(m, n).to_floats()
        evidence.append((m, n, lo_v, hi_v))
    return Obstructed(float(c.mid()), evidence, (l, k))


def search_combo(q: ComboQuery) -> ComboResult:
    """Find m, n >= k_min with m a + n b rigorously inside (t - w, t + w)."""
    gen = _Generators(q)
    found = _scan(gen, q)
    if found is not None:
        return found
    best = None
    evidence: list = []
    while True:
        r = to_fraction(abs(gen.a).mid()) / to_fraction(gen.b.mid())
        r_precision = gen.precision
        restart = False
        prev_p, prev_q = 1, 0  # the convergent above r from which semiconvergents start
        for idx, (pq_a, P, Q) in enumerate(_convergents(r)):
            if Q > q.search_bound:
                break
            gen.ensure(P + Q)
            gen.ensure_ratio(Q)
            if gen.precision != r_precision:
                # convergents of the stale ratio stop matching the true ones
                restart = True
                break
            g = gen.value(Q, P)
            if g.lo <= 0 <= g.hi:
                if gen.can_refine() and 2 * gen.precision <= q.precision_ceiling:
                    gen.refine()
                    restart = True
                    break
                return _lattice(gen, q, -P, Q)
            if idx % 2 == 0:
                # P/Q below r: semiconvergents (prev + j (P, Q)) above r
                g_prev = gen.value(prev_q, prev_p)
                ratio = to_fraction(g_prev.mid()) / -to_fraction(g.mid())
                j_pos = max(1, math.floor(ratio))  # last index with a positive combination
                j = j_pos
                if g_prev.hi >= 2 * q.w:
                    need = (to_fraction(g_prev.mid()) - 2 * q.w) / -to_fraction(g.mid())
                    j = min(j_pos, max(1, math.floor(need) + 1))
                for jj in (j, j - 1):
                    sp, sq = prev_p + jj * P, prev_q + jj * Q
                    if jj < 1 or sq > q.search_bound:
                        continue
                    gs = gen.value(sq, sp)
                    if gs.lo <= 0:
                        continue
                    if best is None or gs.hi < best:
                        best = gs.hi
                        evidence.append((sq, sp) + gs.to_floats())
                    if gs.hi < 2 * q.w:
                        landed = _land(gen, q, (sq, sp), "step")
                        if landed is not None:
                            return landed
                    break
            else:
                prev_p, prev_q = P, Q
        if not restart:
            break
    return Obstructed(float(best) if best is not None else math.inf, evidence[-5:])


def detect_lattice(values: Sequence, tol: float) -> float | None:
    """Largest c > 2 tol with every value within tol of c Z, by a real Euclid descent."""
    mids = [float(v.mid()) if isinstance(v, Interval) else float(v) for v in values]
    mags = sorted((abs(x) for x in mids if abs(x) > tol), reverse=True)
    if not mags:
        return None
    c = mags[0]
    for v in mags[1:]:
        x, y = max(c, v), min(c, v)
        while y > tol:
            x, y = y, abs(x - round(x / y) * y)
        c = x
        if c <= 2 * tol:
            return None
    if c <= 2 * tol:
        return None
    if all(abs(x - round(x / c) * c) <= tol for x in mids):
        return c
    return None


def sums_vanish(values: Sequence, tol: float) -> bool:
    mids = [float(v.mid()) if isinstance(v, Interval) else float(v) for v in values]
    return all(abs(x) <= tol for x in mids)
