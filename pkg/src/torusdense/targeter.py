"""Certified periodic points whose Birkhoff sum lands in a requested window.

Given periodic orbits p, q with S(p) < 0 < S(q), a pseudo-orbit that winds
m times around p and n times around q (joined through the heteroclinic
points x, y) has Birkhoff sum close to 2 m S(p) + 2 n S(q) + K, where K
collects the four convergent series along the heteroclinic excursions.
Choosing (m, n) so that this lands near K0 and shadowing the pseudo-orbit
by an exact periodic point gives the witness; its sum is then enclosed
directly, so the final membership claim never relies on the estimates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from . import diophantine
from .errors import CapExceeded, HypothesisViolation, Obstructed, PrecisionExhausted
from .heteroclinic import DEFAULT_RADIUS, HeteroclinicPair, hetero_pair
from .intervals import Interval, to_fraction
from .observable import HolderData, TrigPolynomial, holder_constant, rational_orbit_sum
from .qfield import EigenData, IntMat2, eigen_data, mat_pow
from .scan import scan_density, scan_sums  # noqa: F401  (scan_density is part of this module's surface)
from .shadowing import (
    L_CAP,
    PseudoOrbit,
    ShadowCertificate,
    build_pseudo_orbit,
    mu_constant,
    shadow_periodic,
    up,
    up_pow,
    verify_shadow,
)
from .torus import DEFAULT_CAP, PeriodicPoint, TorusPoint, periodic_point, project

log = logging.getLogger(__name__)

_UP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_DOWN = gmpy2.context(precision=64, round=gmpy2.RoundDown)

SERIES = ("K1", "K2", "K3", "K4")


@dataclass
class HitConfig:
    precision_bits: int = 128
    L_max: int = L_CAP
    search_bound: int = 10**12
    precision_ceiling: int = 4096
    search_radius: int = DEFAULT_RADIUS
    theta: Fraction = Fraction(1)
    max_rounds: int = 12
    k_tail_bits: int = 40  # K is enclosed to a tail of 2^-k_tail_bits (or eps/18 if smaller)
    lattice_period_max: int = 6
    lattice_tol: float = 1e-9
    enum_cap: int = DEFAULT_CAP


@dataclass
class ErrorBudget:
    """eps split into four series slots, a shadow slot and a Diophantine slot."""

    eps: Fraction
    slots: dict[str, Fraction]
    consumed: dict[str, float] = field(default_factory=dict)

    @classmethod
    def split(cls, eps) -> "ErrorBudget":
        eps = Fraction(eps)
        slots = {name: eps / 9 for name in SERIES}
        slots["shadow"] = 4 * eps / 9
        slots["diophantine"] = eps / 9
        return cls(eps, slots)

    def closes(self) -> bool:
        return all(Fraction(self.consumed.get(k, 0.0)) <= v for k, v in self.slots.items())


@dataclass(frozen=True)
class KConstants:
    K1: Interval
    K2: Interval
    K3: Interval
    K4: Interval
    L_tilde: tuple[int, int, int, int]  # truncation lengths meeting eps/18
    terms: int  # terms summed in each enclosure
    tail: float  # tail bound added to each enclosure

    @property
    def K(self) -> Interval:
        return self.K1 + self.K2 + self.K3 + self.K4

    def as_tuple(self) -> tuple[Interval, Interval, Interval, Interval]:
        return self.K1, self.K2, self.K3, self.K4


def _tail_factory(holder: HolderData, pair: HeteroclinicPair):
    """N -> upper bound on C (H delta0)^theta lam^(theta N) / (1 - lam^theta)."""
    theta_f = float(holder.theta)
    if Fraction(theta_f) > holder.theta:
        theta_f = math.nextafter(theta_f, 0.0)  # a smaller exponent only enlarges the bound
    theta = mpfr(theta_f, 64)
    lam_t = _UP.pow(mpfr(pair.lam, 64), theta)
    denom = _DOWN.sub(mpfr(1, 64), lam_t)
    if denom <= 0:
        raise ValueError("contraction rate must be below 1")
    head = _UP.div(up(holder.C, _UP.pow(up(pair.H, pair.delta0), theta)), denom)

    def tail(N: int) -> mpfr:
        return _UP.mul(head, _UP.pow(lam_t, N))

    return tail, head


def _first_below(tail, bound: Fraction) -> int:
    if tail(0) <= 0:
        return 0
    N = 0
    while to_fraction(tail(N)) > bound:
        N = max(2 * N, 1) if N < 8 else N + max(1, N // 4)
    lo = N // 2
    while lo < N:
        mid = (lo + N) // 2
        if to_fraction(tail(mid)) > bound:
            lo = mid + 1
        else:
            N = mid
    return N


def _series(phi: TrigPolynomial, step: IntMat2, start, base, first: int, count: int,
            precision: int) -> Interval:
    """sum_{i=first}^{first+count-1} phi(f^(+-i) start) - phi(f^(+-i) base)."""
    total = Interval.from_fraction(0, precision + 10)
    if count <= 0:
        return total
    s, b = start, base
    if first:
        s, b = project(step.apply(s.lift())), project(step.apply(b.lift()))
    for _ in range(count):
        total = total + (phi.eval(s, precision) - phi.eval(b, precision))
        s, b = project(step.apply(s.lift())), project(step.apply(b.lift()))
    return total


def k_constants(pair: HeteroclinicPair, phi: TrigPolynomial, A: IntMat2, eps,
                holder: HolderData | None = None, precision: int = 128,
                tail_bits: int = 40) -> KConstants:
    """Enclose K1..K4 and record the lengths after which each tail is below eps/18."""
    if holder is None:
        holder = holder_constant(phi)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if holder.C == 0 or pair.delta0 == 0:
        zero = Interval.from_fraction(0, precision)
        return KConstants(zero, zero, zero, zero, (0, 0, 0, 0), 0, 0.0)
    tail, _ = _tail_factory(holder, pair)
    L_tilde = _first_below(tail, eps / 18)
    N = max(L_tilde, _first_below(tail, min(eps / 18, Fraction(1, 2**tail_bits))))
    bound = tail(N)
    fwd, back = A, mat_pow(A, -1)
    x, y = project(pair.x.lift), project(pair.y.lift)
    p, q = pair.p.point, pair.q.point
    K1 = _series(phi, back, y, p, 1, N, precision).widen(bound)
    K2 = _series(phi, fwd, y, q, 0, N, precision).widen(bound)
    K3 = _series(phi, back, x, q, 1, N, precision).widen(bound)
    K4 = _series(phi, fwd, x, p, 0, N, precision).widen(bound)
    return KConstants(K1, K2, K3, K4, (L_tilde,) * 4, N, float(bound))


def plan_lengths(m: int, n: int, pair: HeteroclinicPair) -> tuple[int, int, int, int, Fraction]:
    """L1 = L4 = m pi(p), L2 = L3 = n pi(q), and alpha = L0 / max Li."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    L1 = L4 = m * pair.p.period
    L2 = L3 = n * pair.q.period
    return L1, L2, L3, L4, Fraction(min(L1, L2), max(L1, L2))


@dataclass
class RoundTrace:
    k: int
    m: int
    n: int
    L: int
    delta: float
    shadow_apriori: float
    outcome: str


@dataclass(frozen=True)
class Plan:
    k: int
    m: int
    n: int
    lengths: tuple[int, int, int, int]
    alpha: Fraction
    combo: Interval  # enclosure of 2 m S(p) + 2 n S(q)
    route: str
    rounds: tuple[RoundTrace, ...]

    @property
    def L(self) -> int:
        return sum(self.lengths)


@dataclass(frozen=True)
class TargetCertificate:
    A: IntMat2
    phi: TrigPolynomial
    K0: Fraction
    eps: Fraction
    pair: HeteroclinicPair
    S_p: Interval
    S_q: Interval
    plan: Plan
    kc: KConstants
    shadow: ShadowCertificate
    sum_L: Interval  # sum over L iterates of z
    sum_period: Interval  # sum over the minimal period of z
    precision: int
    budget: ErrorBudget
    verdict: str
    note: str = ""
    pseudo_orbit: PseudoOrbit | None = field(default=None, repr=False, compare=False)

    @property
    def z(self) -> PeriodicPoint:
        return self.shadow.z

    @property
    def L(self) -> int:
        return self.plan.L


def _as_periodic(A: IntMat2, pt) -> PeriodicPoint:
    if isinstance(pt, PeriodicPoint):
        return pt
    return periodic_point(A, pt)


def _window(K0: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    return K0 - eps, K0 + eps


def _lattice_or_violation(A, phi, S_p, S_q, K0, eps, cfg: HitConfig):
    """Raised when S(p) < 0 < S(q) fails: a lattice that misses the window is reported first."""
    lo, hi = _window(K0, eps)
    sums = [o.interval() for o in scan_sums(A, phi, cfg.lattice_period_max, cap=cfg.enum_cap)]
    msg = f"S(p) = {S_p!r}, S(q) = {S_q!r}: need S(p) < 0 < S(q)"
    if diophantine.sums_vanish(sums, cfg.lattice_tol):
        if not lo < 0 < hi:
            raise Obstructed(f"all periodic sums vanish; window misses 0 ({msg})", 0.0, [], 0.0)
        raise HypothesisViolation(msg)
    c = diophantine.detect_lattice(sums, cfg.lattice_tol)
    if c is not None:
        cf = Fraction(c)
        j = math.floor(lo / cf) + 1
        if not j * cf < hi:
            evidence = [float((j - 1) * cf), float(j * cf)]
            raise Obstructed(f"periodic sums lie in {c:.12g} Z, which misses the window ({msg})",
                             c, evidence, c)
    raise HypothesisViolation(msg)


def hit_target(A: IntMat2, phi: TrigPolynomial, p, q, K0, eps, config: HitConfig | None = None) -> TargetCertificate:
    """Periodic z with S(z) certified inside (K0 - eps, K0 + eps)."""
    cfg = config or HitConfig()
    K0, eps = Fraction(K0), Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    prec = cfg.precision_bits
    eig = eigen_data(A)
    p, q = _as_periodic(A, p), _as_periodic(A, q)

    def sums(bits: int) -> tuple[Interval, Interval]:
        sp = rational_orbit_sum(phi, A, p.point, p.period, bits).interval
        sq = rational_orbit_sum(phi, A, q.point, q.period, bits).interval
        return sp, sq

    S_p, S_q = sums(prec)
    if not (S_p.hi < 0 < S_q.lo):
        _lattice_or_violation(A, phi, S_p, S_q, K0, eps, cfg)

    pair = hetero_pair(p, q, eig, cfg.search_radius)
    holder = holder_constant(phi, cfg.theta)
    kc = k_constants(pair, phi, A, eps, holder, prec, cfg.k_tail_bits)
    K = kc.K
    t = K0 - to_fraction(K.mid())
    w = eps / 9 - to_fraction(K.radius())
    if w <= 0:
        raise PrecisionExhausted("K enclosure wider than the Diophantine slot")

    def refine(bits: int) -> tuple[Interval, Interval]:
        sp, sq = sums(bits)
        return sp * 2, sq * 2

    budget = ErrorBudget.split(eps)
    mu = mu_constant(eig)
    lt = kc.L_tilde
    k = max(1, -(-lt[0] // p.period), -(-lt[3] // p.period), -(-lt[1] // q.period), -(-lt[2] // q.period))
    rounds: list[RoundTrace] = []
    theta = float(holder.theta)
    lo, hi = _window(K0, eps)
    for _ in range(cfg.max_rounds):
        query = diophantine.ComboQuery(S_p * 2, S_q * 2, t, w, k_min=k, search_bound=cfg.search_bound,
                                       refine=refine, precision_ceiling=cfg.precision_ceiling)
        res = diophantine.search_combo(query)
        if isinstance(res, diophantine.Obstructed):
            raise Obstructed(f"no combination 2m S(p) + 2n S(q) reaches the window (k >= {k})",
                             res.best_gap, res.evidence, res.lattice)
        L1, L2, L3, L4, alpha = plan_lengths(res.m, res.n, pair)
        L, L0 = L1 + L2 + L3 + L4, min(L1, L2, L3, L4)
        if L > cfg.L_max:
            raise CapExceeded(f"L = {L} exceeds cap {cfg.L_max} at k = {k}")
        delta = up(2.0, pair.H, up_pow(pair.lam, L0), pair.delta0)
        shadow_apriori = up(L, holder.C, _UP.pow(up(mu, delta), theta)) if delta > 0 else mpfr(0)
        trace = RoundTrace(k, res.m, res.n, L, float(delta), float(shadow_apriori), "")
        rounds.append(trace)
        if to_fraction(shadow_apriori) > budget.slots["shadow"]:
            trace.outcome = "shadow slot open"
            log.info("round k=%d m=%d n=%d L=%d delta=%.3e shadow=%.3e/%s: escalate",
                     k, res.m, res.n, L, float(delta), float(shadow_apriori), float(budget.slots["shadow"]))
            k *= 2
            continue
        po = build_pseudo_orbit(pair, A, L1, L2, L3, L4, cfg.L_max)
        cert = shadow_periodic(po, A, eig)
        verify_shadow(cert, po, A)
        bits = prec
        while True:
            s = rational_orbit_sum(phi, A, cert.z.point, L, bits).interval
            if s.inside_open(lo, hi):
                outcome = "hit"
                break
            if to_fraction(s.hi) <= lo or to_fraction(s.lo) >= hi:
                outcome = "miss"
                break
            bits *= 2
            if bits > cfg.precision_ceiling:
                raise PrecisionExhausted("sum enclosure straddles the window edge at the ceiling")
        trace.outcome = outcome
        log.info("round k=%d m=%d n=%d L=%d delta=%.3e shadow=%.3e: %s",
                 k, res.m, res.n, L, float(po.delta), float(shadow_apriori), outcome)
        if outcome == "miss":
            k *= 2
            continue
        tails = [to_fraction(_tail_factory(holder, pair)[0](Li)) if kc.terms else 0
                 for Li in (L1, L2, L3, L4)]
        for name, tl in zip(SERIES, tails):
            budget.consumed[name] = float(tl)
        budget.consumed["shadow"] = float(up(L, holder.C, _UP.pow(cert.max_dist, theta))) if cert.max_dist > 0 else 0.0
        dev = max(abs(to_fraction(res.value.lo) - t), abs(to_fraction(res.value.hi) - t))
        budget.consumed["diophantine"] = float(dev + to_fraction(K.radius()))
        period = cert.z.period
        if period == L:
            sum_period, note = s, ""
        else:
            sum_period = rational_orbit_sum(phi, A, cert.z.point, period, bits).interval
            note = f"minimal period {period} < L = {L}; the certified sum is over L iterates"
        plan = Plan(k, res.m, res.n, (L1, L2, L3, L4), alpha, res.value, res.route, tuple(rounds))
        return TargetCertificate(A, phi, K0, eps, pair, S_p, S_q, plan, kc, cert, s, sum_period,
                                 bits, budget, "success", note, po)
    raise CapExceeded(f"no round certified a hit within {cfg.max_rounds} escalations")
