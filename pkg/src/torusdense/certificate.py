"""JSON form of a TargetCertificate and an independent replay of its checks.

Exact quantities are written as strings ("p/q" for rationals,
"p/q + r/s*sqrt(D)" for quadratic irrationals); everything approximate is an
interval pair of hex floats.  Upper bounds on nonnegative quantities are
written as [0, bound] (or [1, bound] for constants that are at least 1).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from gmpy2 import mpfr

from .errors import CertificateError, TorusDenseError
from .heteroclinic import HeteroclinicPair, Intersection
from .intervals import Interval, float_up, to_fraction
from .observable import TrigPolynomial, rational_orbit_sum
from .qfield import IntMat2, QuadExt, eigen_data, parse_quadext
from .shadowing import ShadowCertificate, build_pseudo_orbit, is_L_periodic, mu_constant, verify_shadow
from .targeter import TargetCertificate
from .torus import PeriodicPoint, TorusPoint, minimal_period, rational_orbit

CHECKS = ("system", "heteroclinic", "periodicity", "shadow", "sum")


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _hex(x: float) -> str:
    return float(x).hex()


def _upper(x, floor: float = 0.0) -> list[str]:
    hi = float_up(x) if isinstance(x, mpfr) else float(x)
    return [_hex(floor), _hex(hi)]


def _point(pt: TorusPoint) -> list[str]:
    return [str(pt.x1), str(pt.x2)]


def _intersection(c: Intersection) -> dict:
    return {
        "point": _point(c.point),
        "lift": [str(c.lift[0]), str(c.lift[1])],
        "t": str(c.t),
        "u": str(c.u),
        "translate": list(c.m),
        "dist_s": _upper(c.dist_s),
        "dist_u": _upper(c.dist_u),
    }


def to_json(cert: TargetCertificate) -> dict[str, Any]:
    pair, plan, kc, sh = cert.pair, cert.plan, cert.kc, cert.shadow
    return {
        "system": {
            "matrix": list(cert.A),
            "observable": cert.phi.to_text().split("\n"),
            "precision_bits": cert.precision,
        },
        "request": {"K0": frac_str(cert.K0), "eps": frac_str(cert.eps)},
        "pair": {
            "p": {"point": _point(pair.p.point), "period": pair.p.period, "sum": cert.S_p.hex_pair()},
            "q": {"point": _point(pair.q.point), "period": pair.q.period, "sum": cert.S_q.hex_pair()},
            "x": _intersection(pair.x),
            "y": _intersection(pair.y),
            "delta0": _upper(pair.delta0),
            "H": _upper(pair.H, 1.0),
            "lambda": _upper(pair.lam),
        },
        "plan": {
            "k": plan.k,
            "m": plan.m,
            "n": plan.n,
            "lengths": list(plan.lengths),
            "L": plan.L,
            "alpha": frac_str(plan.alpha),
            "combo": plan.combo.hex_pair(),
            "route": plan.route,
            "rounds": [
                {"k": r.k, "m": r.m, "n": r.n, "L": r.L, "delta": _upper(r.delta),
                 "shadow_apriori": _upper(r.shadow_apriori), "outcome": r.outcome}
                for r in plan.rounds
            ],
            "budget": {
                "eps": frac_str(cert.budget.eps),
                "slots": {k: frac_str(v) for k, v in cert.budget.slots.items()},
                "consumed": {k: _upper(v) for k, v in cert.budget.consumed.items()},
            },
        },
        "k_constants": {
            "K1": kc.K1.hex_pair(),
            "K2": kc.K2.hex_pair(),
            "K3": kc.K3.hex_pair(),
            "K4": kc.K4.hex_pair(),
            "K": kc.K.hex_pair(),
            "L_tilde": list(kc.L_tilde),
            "terms": kc.terms,
            "tail": _upper(kc.tail),
        },
        "shadow": {
            "z": _point(sh.z.point),
            "period": sh.z.period,
            "L": sh.L,
            "y_index": plan.lengths[0],
            "max_dist": _upper(sh.max_dist),
            "delta": _upper(sh.delta),
            "mu": _upper(sh.mu, 1.0),
            "a_posteriori_ratio": _upper(sh.a_posteriori_ratio),
        },
        "sum": {
            "over_L": cert.sum_L.hex_pair(),
            "over_period": cert.sum_period.hex_pair(),
            "precision_bits": cert.precision,
        },
        "verdict": {"status": cert.verdict, "note": cert.note},
    }


def dumps(cert: TargetCertificate) -> str:
    return json.dumps(to_json(cert), indent=2) + "\n"


# --------------------------------------------------------------------------
# replay


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _parse_point(pair) -> TorusPoint:
    return TorusPoint(parse_quadext(pair[0]), parse_quadext(pair[1]))


def _hi(pair) -> float:
    return float.fromhex(pair[1])


def _has_period(A: IntMat2, pt: TorusPoint, period: int) -> bool:
    try:
        return period >= 1 and minimal_period(A, pt, period) == period
    except TorusDenseError:
        return False


def _fail(check: str, message: str):
    raise CertificateError(check, message)


def _rebuild_intersection(d: dict) -> Intersection:
    lift = (parse_quadext(d["lift"][0]), parse_quadext(d["lift"][1]))
    return Intersection(_parse_point(d["point"]), lift, parse_quadext(d["t"]), parse_quadext(d["u"]),
                        tuple(d["translate"]), _hi(d["dist_s"]), _hi(d["dist_u"]))


def replay(data: dict, precision: int | None = None) -> dict[str, str]:
    """Re-run every check of a certificate; raises CertificateError naming the first failure."""
    results: dict[str, str] = {}
    try:
        A = IntMat2(*data["system"]["matrix"])
        phi = TrigPolynomial.parse("\n".join(data["system"]["observable"]))
        eig = eigen_data(A)
        K0, eps = _frac(data["request"]["K0"]), _frac(data["request"]["eps"])
    except (KeyError, TypeError, ValueError, TorusDenseError) as exc:
        _fail("system", f"unreadable system or request: {exc}")
    if precision is None:
        precision = int(data["system"].get("precision_bits", 128))
    results["system"] = "hyperbolic, unimodular"

    try:
        pd, qd = data["pair"]["p"], data["pair"]["q"]
        p_pt, q_pt = _parse_point(pd["point"]), _parse_point(qd["point"])
        x, y = _rebuild_intersection(data["pair"]["x"]), _rebuild_intersection(data["pair"]["y"])
    except (KeyError, TypeError, ValueError) as exc:
        _fail("heteroclinic", f"unreadable pair: {exc}")
    for name, pt, per in (("p", p_pt, pd["period"]), ("q", q_pt, qd["period"])):
        if not pt.is_rational() or not _has_period(A, pt, per):
            _fail("heteroclinic", f"{name} does not have minimal period {per}")
    for name, c, s_base, u_base in (("x", x, p_pt, q_pt), ("y", y, q_pt, p_pt)):
        on_s = (s_base.x1 + c.t * eig.v_s[0], s_base.x2 + c.t * eig.v_s[1])
        on_u = (u_base.x1 + c.m[0] + c.u * eig.v_u[0], u_base.x2 + c.m[1] + c.u * eig.v_u[1])
        if on_s != c.lift or on_u != c.lift:
            _fail("heteroclinic", f"{name} is not on the stated stable/unstable lines")
    p = PeriodicPoint(p_pt, pd["period"], tuple(rational_orbit(A, p_pt, pd["period"])))
    q = PeriodicPoint(q_pt, qd["period"], tuple(rational_orbit(A, q_pt, qd["period"])))
    delta0 = max(x.dist_s, x.dist_u, y.dist_s, y.dist_u)
    pair = HeteroclinicPair(p, q, x, y, delta0, eig.H, eig.lam)
    results["heteroclinic"] = "x, y exact on the invariant lines"

    sd = data["shadow"]
    try:
        z = _parse_point(sd["z"])
        L, period, y_index = int(sd["L"]), int(sd["period"]), int(sd["y_index"])
        lengths = tuple(int(v) for v in data["plan"]["lengths"])
    except (KeyError, TypeError, ValueError) as exc:
        _fail("periodicity", f"unreadable shadow point: {exc}")
    if not z.is_rational():
        _fail("periodicity", "z has irrational coordinates")
    if sum(lengths) != L or lengths[0] != y_index:
        _fail("periodicity", "segment lengths disagree with L")
    if not is_L_periodic(A, z, L):
        _fail("periodicity", "(A^L - I) z is not integral")
    if L % period or not _has_period(A, z, period):
        _fail("periodicity", f"z does not have minimal period {period}")
    results["periodicity"] = f"(A^L - I) z in Z^2 for L = {L}; minimal period {period}"

    try:
        po = build_pseudo_orbit(pair, A, *lengths, L_max=max(L, 1))
    except TorusDenseError as exc:
        _fail("shadow", f"pseudo-orbit rebuild failed: {exc}")
    z0 = rational_orbit(A, z, (L - y_index) % L + 1)[-1]
    mu = mu_constant(eig)
    sh = ShadowCertificate(PeriodicPoint(z, period, ()), z0, L, mpfr(0), po.delta, mu, ())
    try:
        dist = verify_shadow(sh, po, A, precision)
    except TorusDenseError as exc:
        _fail("shadow", str(exc))
    results["shadow"] = f"max distance {float_up(dist):.3e} <= mu delta {float_up(sh.mu_delta):.3e}"

    lo, hi = K0 - eps, K0 + eps
    bits = precision
    while True:
        s = rational_orbit_sum(phi, A, z, L, bits).interval
        if s.inside_open(lo, hi):
            break
        if to_fraction(s.hi) <= lo or to_fraction(s.lo) >= hi or bits >= 4 * precision:
            _fail("sum", f"enclosure {s!r} not inside ({float(lo)}, {float(hi)})")
        bits *= 2
    stored = Interval.from_hex_pair(data["sum"]["over_L"])
    if not s.intersects(stored):
        _fail("sum", f"recomputed {s!r} disagrees with stored {stored!r}")
    results["sum"] = f"{s!r} inside ({float(lo)}, {float(hi)}) at {bits} bits"
    results["_enclosure"] = s.hex_pair()
    return results


def load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
