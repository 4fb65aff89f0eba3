"""Four-segment periodic pseudo-orbits and their exact periodic shadows.

For f = A mod Z^2 the periodic shadow of a periodic pseudo-orbit is the
unique solution of one 2x2 linear system over Q(sqrt D): with seam errors
e_n = x_{n+1} - A x_n (minimal mod Z^2), the correction c_0 = z_0 - x_0
satisfies (A^L - I) c_0 = sum_j A^(L-1-j) e_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import BadMultiples, CapExceeded, DecayViolated, IrrationalResidue, ShadowBoundViolated
from .heteroclinic import HeteroclinicPair
from .intervals import Interval
from .qfield import EigenData, IntMat2, QuadExt, enclose, mat_pow
from .torus import PeriodicPoint, TorusPoint, project, rational_orbit, torus_distance, _common_denominator

L_CAP = 5000
_UP = gmpy2.context(precision=64, round=gmpy2.RoundUp)

ZERO_VEC = (QuadExt(0), QuadExt(0))


def up(*factors) -> mpfr:
    """Product of nonnegative factors rounded up (no underflow to zero)."""
    out = mpfr(1, 64)
    for f in factors:
        out = _UP.mul(out, f if isinstance(f, mpfr) else _UP.add(mpfr(0, 64), f))
    return out


def up_pow(x: float, n: int) -> mpfr:
    return _UP.pow(mpfr(x, 64), n)


@dataclass(frozen=True)
class PseudoOrbit:
    pair: HeteroclinicPair
    lengths: tuple[int, int, int, int]
    points: tuple[TorusPoint, ...] = field(repr=False)
    seam_errors: tuple[tuple[QuadExt, QuadExt], ...] = field(repr=False)
    delta: mpfr  # upper bound on the largest seam error (Euclidean)
    delta_apriori: mpfr  # 2 H lam^L0 delta0

    @property
    def L(self) -> int:
        return sum(self.lengths)

    @property
    def L0(self) -> int:
        return min(self.lengths)

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.L0, max(self.lengths))

    @property
    def y_index(self) -> int:
        return self.lengths[0]

    def seam_positions(self) -> list[int]:
        return [n for n, e in enumerate(self.seam_errors) if e[0] or e[1]]


def _block(A: IntMat2, lift, back: int, length: int) -> list[TorusPoint]:
    pt = project(mat_pow(A, -back).apply(lift))
    out = [pt]
    for _ in range(length - 1):
        pt = project(A.apply(pt.lift()))
        out.append(pt)
    return out


def _seam(A: IntMat2, last: TorusPoint, nxt: TorusPoint) -> tuple[QuadExt, QuadExt]:
    img = A.apply(last.lift())
    d1 = nxt.x1 - img[0]
    d2 = nxt.x2 - img[1]
    return d1 - d1.round_nearest(), d2 - d2.round_nearest()


def _vec_norm_up(v, bits: int) -> mpfr:
    sq = v[0] * v[0] + v[1] * v[1]
    if not sq:
        return mpfr(0, 64)
    return enclose(sq, bits).sqrt().hi


def _bits_for(lam: float, L0: int) -> int:
    return 64 + math.ceil(2 * L0 * math.log2(1 / lam)) if 0 < lam < 1 else 64


def build_pseudo_orbit(pair: HeteroclinicPair, A: IntMat2, L1: int, L2: int, L3: int, L4: int,
                       L_max: int = L_CAP) -> PseudoOrbit:
    """The periodic pseudo-orbit f^-L1(y) .. f^(L2-1)(y), f^-L3(x) .. f^(L4-1)(x)."""
    pp, pq = pair.p.period, pair.q.period
    if min(L1, L2, L3, L4) < 1:
        raise BadMultiples("segment lengths must be positive")
    if L1 % pp or L4 % pp or L2 % pq or L3 % pq:
        raise BadMultiples(f"L1, L4 must be multiples of {pp} and L2, L3 multiples of {pq}")
    L = L1 + L2 + L3 + L4
    if L > L_max:
        raise CapExceeded(f"L = {L} exceeds cap {L_max}")
    ys = _block(A, pair.y.lift, L1, L1 + L2)
    xs = _block(A, pair.x.lift, L3, L3 + L4)
    points = ys + xs
    errors = [ZERO_VEC] * L
    errors[L1 + L2 - 1] = _seam(A, points[L1 + L2 - 1], points[L1 + L2])
    errors[L - 1] = _seam(A, points[L - 1], points[0])
    L0 = min(L1, L2, L3, L4)
    bits = _bits_for(pair.lam, L0)
    delta = max(_vec_norm_up(errors[L1 + L2 - 1], bits), _vec_norm_up(errors[L - 1], bits))
    apriori = up(2.0, pair.H, up_pow(pair.lam, L0), pair.delta0)
    if delta > apriori:
        raise DecayViolated(f"seam error {float(delta):.3e} above 2 H lam^L0 delta0 = {float(apriori):.3e}")
    return PseudoOrbit(pair, (L1, L2, L3, L4), tuple(points), tuple(errors), delta, apriori)


def mu_constant(eig: EigenData) -> float:
    """Lipschitz shadowing constant H (1/(1-|lam_s|) + 1/(|lam_u|-1)), rounded up."""
    prec = 80
    one = Interval.from_fraction(1, prec)
    lam_s = Interval(mpfr(eig.lam, 53))
    lam_u = Interval(mpfr(eig.lam_u, 53))
    total = one / (one - lam_s) + one / (lam_u - one)
    return (total * Interval(mpfr(eig.H, 53))).to_floats()[1]


@dataclass(frozen=True)
class ShadowCertificate:
    z: PeriodicPoint  # indexed at the position of y
    z0: TorusPoint  # shadow of the first pseudo-orbit point
    L: int
    max_dist: mpfr
    delta: mpfr
    mu: float
    correction: tuple[QuadExt, QuadExt] = field(repr=False)

    @property
    def a_posteriori_ratio(self) -> float:
        if self.delta == 0:
            return 0.0
        return float(_UP.div(self.max_dist, self.delta))

    @property
    def mu_delta(self) -> mpfr:
        return up(self.mu, self.delta)


def shadow_correction(po: PseudoOrbit, A: IntMat2) -> tuple[QuadExt, QuadExt]:
    """Solve (A^L - I) c = sum_j A^(L-1-j) e_j exactly."""
    L = po.L
    s0, s1 = QuadExt(0), QuadExt(0)
    for j in po.seam_positions():
        e = po.seam_errors[j]
        w = mat_pow(A, L - 1 - j).apply(e)
        s0, s1 = s0 + w[0], s1 + w[1]
    if not s0 and not s1:
        return ZERO_VEC
    M = mat_pow(A, L).minus_identity()
    det = M.det
    adj = M.adjugate()
    return (adj.a * s0 + adj.b * s1) / det, (adj.c * s0 + adj.d * s1) / det


def _min_period_dividing(A: IntMat2, pt: TorusPoint, L: int) -> int:
    u1, u2, N = _common_denominator(pt)
    for k in sorted(d for d in range(1, L + 1) if L % d == 0):
        M = mat_pow(A, k)
        if (M.a * u1 + M.b * u2 - u1) % N == 0 and (M.c * u1 + M.d * u2 - u2) % N == 0:
            return k
    return L


def is_L_periodic(A: IntMat2, pt: TorusPoint, L: int) -> bool:
    """(A^L - I) pt in Z^2, checked exactly."""
    if not pt.is_rational():
        return False
    f1, f2 = pt.as_fractions()
    M = mat_pow(A, L).minus_identity()
    return (M.a * f1 + M.b * f2).denominator == 1 and (M.c * f1 + M.d * f2).denominator == 1


def max_shadow_distance(z0: TorusPoint, po: PseudoOrbit, A: IntMat2, bits: int | None = None) -> mpfr:
    """Upper bound on max_n d(f^n z0, x_n) over one period."""
    if bits is None:
        bits = _bits_for(po.pair.lam, po.L0)
    u1, u2, N = _common_denominator(z0)
    a, b, c, d = A
    worst = mpfr(0, 64)
    for x in po.points:
        zn = TorusPoint(QuadExt(u1, 0, N), QuadExt(u2, 0, N))
        dist = torus_distance(zn, x, bits)
        if dist.hi > worst:
            worst = dist.hi
        u1, u2 = (a * u1 + b * u2) % N, (c * u1 + d * u2) % N
    return worst


def shadow_periodic(po: PseudoOrbit, A: IntMat2, eig: EigenData) -> ShadowCertificate:
    """Exact L-periodic point shadowing ``po``; raises if sqrt(D) parts survive."""
    c = shadow_correction(po, A)
    x0 = po.points[0]
    z1, z2 = x0.x1 + c[0], x0.x2 + c[1]
    if not z1.is_rational() or not z2.is_rational():
        raise IrrationalResidue(f"shadow point kept irrational parts {z1.irr_part}, {z2.irr_part}")
    z0 = TorusPoint.reduce(z1, z2)
    L = po.L
    if not is_L_periodic(A, z0, L):
        raise IrrationalResidue("shadow point is not L-periodic")
    zy = rational_orbit(A, z0, po.y_index + 1)[-1]
    period = _min_period_dividing(A, zy, L)
    z = PeriodicPoint(zy, period, tuple(rational_orbit(A, zy, period)))
    max_dist = max_shadow_distance(z0, po, A)
    return ShadowCertificate(z, z0, L, max_dist, po.delta, mu_constant(eig), c)


def verify_shadow(cert: ShadowCertificate, po: PseudoOrbit, A: IntMat2, precision: int | None = None) -> mpfr:
    """Recompute max_n d(f^n z, x_n) and check it against mu * delta."""
    bits = None if precision is None else max(precision, _bits_for(po.pair.lam, po.L0))
    if not is_L_periodic(A, cert.z0, cert.L):
        raise ShadowBoundViolated("shadow point is not L-periodic")
    dist = max_shadow_distance(cert.z0, po, A, bits)
    if dist > cert.mu_delta:
        raise ShadowBoundViolated(f"max distance {float(dist):.3e} exceeds mu*delta {float(cert.mu_delta):.3e}")
    return dist
