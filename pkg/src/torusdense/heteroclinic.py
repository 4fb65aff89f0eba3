"""Stable/unstable lines of periodic points and their transverse intersections.

For a linear automorphism the stable and unstable manifolds of a periodic
point are straight lines with irrational slope, so heteroclinic points are
exact solutions of a 2x2 system over Q(sqrt D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .errors import DecayViolated
from .intervals import Interval
from .qfield import EigenData, IntMat2, QuadExt, enclose, mat_pow, vector_norm
from .torus import LiftedPoint, PeriodicPoint, TorusPoint, project, torus_distance

DEFAULT_RADIUS = 2


@dataclass(frozen=True)
class InvariantLine:
    base: LiftedPoint
    direction: tuple[QuadExt, QuadExt]
    stable: bool

    def at(self, t) -> LiftedPoint:
        return (self.base[0] + self.direction[0] * t, self.base[1] + self.direction[1] * t)


def invariant_line(P: PeriodicPoint | TorusPoint, which: str, eig: EigenData) -> InvariantLine:
    """Line through the canonical lift of P along v_s ("stable") or v_u ("unstable")."""
    pt = P.point if isinstance(P, PeriodicPoint) else P
    if which not in ("stable", "unstable"):
        raise ValueError("which must be 'stable' or 'unstable'")
    stable = which == "stable"
    return InvariantLine(pt.lift(), eig.v_s if stable else eig.v_u, stable)


@dataclass(frozen=True)
class Intersection:
    point: TorusPoint
    lift: LiftedPoint
    t: QuadExt  # stable-line parameter
    u: QuadExt  # unstable-line parameter
    m: tuple[int, int]  # integer translate applied to the unstable line
    dist_s: float  # upper bound on |t v_s|
    dist_u: float  # upper bound on |u v_u|

    @property
    def reach(self) -> float:
        return max(self.dist_s, self.dist_u)


def _solve(Ls: InvariantLine, Lu: InvariantLine, m: tuple[int, int]):
    vs, vu = Ls.direction, Lu.direction
    r0 = Lu.base[0] + m[0] - Ls.base[0]
    r1 = Lu.base[1] + m[1] - Ls.base[1]
    # t vs - u vu = r
    det = vu[0] * vs[1] - vs[0] * vu[1]
    t = (vu[0] * r1 - vu[1] * r0) / det
    u = (vs[0] * r1 - vs[1] * r0) / det
    return t, u


def intersect_lines(Ls: InvariantLine, Lu: InvariantLine, search_radius: int = DEFAULT_RADIUS,
                    include_trivial: bool = False) -> list[Intersection]:
    """Intersections of Ls with the translates Lu + m, |m|_inf <= search_radius.

    Results are projected to the torus, de-duplicated, and sorted by the
    larger of the two along-line distances, ties broken on (t, u).  The
    trivial solution t = u = 0 (shared base point) is dropped unless
    ``include_trivial``.
    """
    if not Ls.stable or Lu.stable:
        raise ValueError("need a stable line and an unstable line")
    ns = vector_norm(Ls.direction, 80)
    nu = vector_norm(Lu.direction, 80)
    found: dict[TorusPoint, Intersection] = {}
    rng = range(-search_radius, search_radius + 1)
    for m in product(rng, rng):
        t, u = _solve(Ls, Lu, m)
        if not include_trivial and not t and not u:
            continue
        lift = Ls.at(t)
        pt = project(lift)
        ds = (enclose(abs(t), 80) * ns).to_floats()[1]
        du = (enclose(abs(u), 80) * nu).to_floats()[1]
        cand = Intersection(pt, lift, t, u, m, ds, du)
        old = found.get(pt)
        if old is None or _order_key(cand) < _order_key(old):
            found[pt] = cand
    return sorted(found.values(), key=_order_key)


class _Lex:
    """Exact lexicographic key on (t, u) for tie-breaking."""

    __slots__ = ("t", "u")

    def __init__(self, t, u):
        self.t, self.u = t, u

    def __lt__(self, other):
        if self.t != other.t:
            return self.t < other.t
        return self.u < other.u

    def __eq__(self, other):
        return self.t == other.t and self.u == other.u


def _order_key(c: Intersection):
    return (c.reach, _Lex(c.t, c.u))


@dataclass(frozen=True)
class HeteroclinicPair:
    """x in W^s(p) with W^u(q), y in W^s(q) with W^u(p), plus decay data."""

    p: PeriodicPoint
    q: PeriodicPoint
    x: Intersection
    y: Intersection
    delta0: float
    H: float
    lam: float

    @property
    def d_xp(self) -> float:
        return self.x.dist_s

    @property
    def d_xq(self) -> float:
        return self.x.dist_u

    @property
    def d_yq(self) -> float:
        return self.y.dist_s

    @property
    def d_yp(self) -> float:
        return self.y.dist_u


def hetero_pair(p: PeriodicPoint, q: PeriodicPoint, eig: EigenData,
                search_radius: int = DEFAULT_RADIUS) -> HeteroclinicPair:
    """Nearest heteroclinic points in both directions and delta_0.

    Distances to p and q are measured along the invariant lines (the lifted
    displacement), which bound the torus distances from above.
    """
    xs = intersect_lines(invariant_line(p, "stable", eig), invariant_line(q, "unstable", eig), search_radius)
    ys = intersect_lines(invariant_line(q, "stable", eig), invariant_line(p, "unstable", eig), search_radius)
    x, y = xs[0], ys[0]
    delta0 = max(x.dist_s, x.dist_u, y.dist_s, y.dist_u)
    return HeteroclinicPair(p, q, x, y, delta0, eig.H, eig.lam)


def trivial_pair(p: PeriodicPoint, eig: EigenData) -> HeteroclinicPair:
    """Zero-size pair with x = y = p = q, whose pseudo-orbits are true orbits."""
    zero = QuadExt(0)
    pt = Intersection(p.point, p.point.lift(), zero, zero, (0, 0), 0.0, 0.0)
    return HeteroclinicPair(p, p, pt, pt, 0.0, eig.H, eig.lam)


def _iterate(A: IntMat2, v: LiftedPoint, n: int) -> TorusPoint:
    return project(mat_pow(A, n).apply(v))


def decay_check(pair: HeteroclinicPair, n: int, A: IntMat2) -> Interval:
    """Enclosure of d(f^n x, f^n p); raises DecayViolated if any of the four bounds fails.

    The bounds are d(f^n x, f^n p) <= H lam^n d(x, p), d(f^-n x, f^-n q) <= H lam^n d(x, q),
    and the same pair for y with the roles of p and q exchanged.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    bits = 64 + math.ceil(n * 2 * math.log2(1 / pair.lam)) if pair.lam > 0 else 64
    factor = pair.H * pair.lam**n * (1 + 1e-9)
    checks = [
        (pair.x.lift, pair.p.point, n, pair.d_xp, "x->p"),
        (pair.x.lift, pair.q.point, -n, pair.d_xq, "x<-q"),
        (pair.y.lift, pair.q.point, n, pair.d_yq, "y->q"),
        (pair.y.lift, pair.p.point, -n, pair.d_yp, "y<-p"),
    ]
    first = None
    for lift, base, k, ref, name in checks:
        d = torus_distance(_iterate(A, lift, k), _iterate(A, base.lift(), k), bits)
        bound = factor * ref
        if float(d.lo) > bound:
            raise DecayViolated(f"{name}: distance {float(d.lo):.3e} exceeds {bound:.3e} at n={n}")
        if first is None:
            first = d
    return first
