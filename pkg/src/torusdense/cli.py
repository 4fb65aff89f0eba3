"""Batch command line: scan, hit, lattice, verify.

Exit codes: 0 success, 1 configuration or input error, 2 a cap was exceeded
(enumeration, L, or precision), 3 the target is obstructed, 4 the sign
hypothesis S(p) < 0 < S(q) fails, 5 a certificate check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import certificate
from .diophantine import detect_lattice, sums_vanish
from .errors import (
    CapExceeded,
    CertificateError,
    HypothesisViolation,
    Obstructed,
    PrecisionExhausted,
    TorusDenseError,
)
from .observable import TrigPolynomial
from .qfield import IntMat2, eigen_data
from .scan import scan_density, scan_sums
from .targeter import HitConfig, hit_target
from .torus import DEFAULT_CAP, TorusPoint, periodic_point

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_OBSTRUCTED, EXIT_HYPOTHESIS, EXIT_VERIFY = range(6)


class ConfigError(ValueError):
    pass


@dataclass
class SystemConfig:
    matrix: IntMat2
    observable: TrigPolynomial
    precision_bits: int = 128
    period_max: int = 12
    L_max: int = 5000
    search_bound: int = 10**12
    enum_cap: int = DEFAULT_CAP
    extra: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "SystemConfig":
        """``key = value`` lines; ``observable`` takes ';'-separated terms."""
        values: dict[str, str] = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {n}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
        if "matrix" not in values or "observable" not in values:
            raise ConfigError("config needs 'matrix' and 'observable'")
        try:
            entries = [int(v) for v in values.pop("matrix").replace(",", " ").split()]
            if len(entries) != 4:
                raise ConfigError("matrix needs four integers")
            A = IntMat2(*entries)
            eigen_data(A)
            phi = TrigPolynomial.parse(values.pop("observable"))
            ints = {}
            for key in ("precision_bits", "period_max", "L_max", "search_bound", "enum_cap"):
                if key in values:
                    ints[key] = int(values.pop(key))
        except ConfigError:
            raise
        except (ValueError, TorusDenseError) as exc:
            raise ConfigError(str(exc)) from exc
        if ints.get("precision_bits", 128) < 16:
            raise ConfigError("precision_bits must be >= 16")
        return cls(A, phi, extra=values, **ints)

    @classmethod
    def load(cls, path: str) -> "SystemConfig":
        try:
            return cls.parse(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_window(text: str) -> tuple[float, float]:
    if ".." not in text:
        raise ConfigError(f"window must look like lo..hi, got {text!r}")
    lo, hi = text.split("..", 1)
    try:
        return float(Fraction(lo)), float(Fraction(hi))
    except ValueError as exc:
        raise ConfigError(f"bad window {text!r}") from exc


def parse_point(text: str) -> TorusPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"point must look like x1,x2, got {text!r}")
    try:
        return TorusPoint.rational(Fraction(parts[0].strip()), Fraction(parts[1].strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad point {text!r}") from exc


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _hist_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(f"{p.stem}_hist{p.suffix or '.csv'}"))


def cmd_scan(args, cfg: SystemConfig) -> int:
    N = args.period_max if args.period_max is not None else cfg.period_max
    lo, hi = parse_window(args.window)
    dens = scan_density(cfg.matrix, cfg.observable, N, (lo, hi), args.bins, cap=cfg.enum_cap, backend=args.backend)
    rows = [(o.period, f"{o.u1}/{o.N}", f"{o.u2}/{o.N}", o.lo.hex(), o.hi.hex()) for o in dens.orbits]
    hist = [(a, b, c) for a, b, c in zip(dens.edges, dens.edges[1:], dens.counts)]
    orbit_csv = _csv(rows, ("period", "x1", "x2", "sum_lo", "sum_hi"))
    hist_csv = _csv([(repr(a), repr(b), c) for a, b, c in hist], ("bin_lo", "bin_hi", "count"))
    if args.out:
        write_atomic(args.out, orbit_csv)
        write_atomic(args.hist or _hist_path(args.out), hist_csv)
    else:
        sys.stdout.write(orbit_csv)
    gap = "none" if dens.max_gap is None else repr(dens.max_gap)
    print(f"orbits: {len(dens.orbits)}  distinct sums in window: {len(dens.distinct)}  max_gap: {gap}")
    return EXIT_OK


def cmd_hit(args, cfg: SystemConfig) -> int:
    p, q = parse_point(args.p), parse_point(args.q)
    try:
        K0, eps = Fraction(args.target), Fraction(args.eps)
    except ValueError as exc:
        raise ConfigError(f"bad target or eps: {exc}") from exc
    if eps <= 0:
        raise ConfigError("eps must be positive")
    try:
        pp, qq = periodic_point(cfg.matrix, p), periodic_point(cfg.matrix, q)
    except TorusDenseError as exc:
        raise ConfigError(f"p or q is not periodic: {exc}") from exc
    hc = HitConfig(precision_bits=cfg.precision_bits, L_max=cfg.L_max, search_bound=cfg.search_bound,
                   enum_cap=cfg.enum_cap)
    cert = hit_target(cfg.matrix, cfg.observable, pp, qq, K0, eps, hc)
    if args.cert:
        write_atomic(args.cert, certificate.dumps(cert))
    lo, hi = cert.sum_L.to_floats()
    print(f"verdict: {cert.verdict}")
    print(f"z = {cert.z.point}  (minimal period {cert.z.period})")
    print(f"L = {cert.L}  (m, n) = ({cert.plan.m}, {cert.plan.n})")
    print(f"S(z) in [{lo!r}, {hi!r}]  window ({float(K0 - eps)!r}, {float(K0 + eps)!r})")
    if cert.note:
        print(f"note: {cert.note}")
    return EXIT_OK


def cmd_lattice(args, cfg: SystemConfig) -> int:
    N = args.period_max if args.period_max is not None else cfg.period_max
    orbits = scan_sums(cfg.matrix, cfg.observable, N, cap=cfg.enum_cap, backend=args.backend)
    values = [o.interval() for o in orbits]
    if sums_vanish(values, args.tol):
        print(f"all sums vanish ({len(values)} orbits, period <= {N})")
        return EXIT_OK
    c = detect_lattice(values, args.tol)
    if c is None:
        print(f"no lattice structure detected at tol {args.tol:g} ({len(values)} orbits, period <= {N})")
    else:
        print(f"lattice c = {c!r} ({len(values)} orbits, period <= {N})")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        data = certificate.load(args.cert)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read certificate: {exc}") from exc
    results = certificate.replay(data, args.precision)
    for name in certificate.CHECKS:
        print(f"{name}: ok  {results[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torusdense", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log escalation rounds")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="Birkhoff sums of all orbits up to a period, with a histogram")
    s.add_argument("--config", required=True)
    s.add_argument("--period-max", type=int)
    s.add_argument("--window", required=True, help="lo..hi (use --window=-5..5 for negative lo)")
    s.add_argument("--bins", type=int, default=50)
    s.add_argument("--out", help="orbit CSV; the histogram goes to <out>_hist.csv unless --hist is given")
    s.add_argument("--hist")
    s.add_argument("--backend", choices=("compiled", "python"))

    h = sub.add_parser("hit", help="certified periodic point with S(z) in (K0 - eps, K0 + eps)")
    h.add_argument("--config", required=True)
    h.add_argument("--target", required=True, help="K0 (exact decimal or p/q)")
    h.add_argument("--eps", required=True)
    h.add_argument("--p", required=True, help='"x1,x2" of an orbit with negative sum')
    h.add_argument("--q", required=True, help='"x1,x2" of an orbit with positive sum')
    h.add_argument("--cert", help="write the certificate JSON here")

    la = sub.add_parser("lattice", help="test whether all periodic sums lie in c Z")
    la.add_argument("--config", required=True)
    la.add_argument("--period-max", type=int)
    la.add_argument("--tol", type=float, default=1e-9)
    la.add_argument("--backend", choices=("compiled", "python"))

    v = sub.add_parser("verify", help="replay a certificate")
    v.add_argument("--cert", required=True)
    v.add_argument("--precision", type=int, default=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = SystemConfig.load(args.config)
        return {"scan": cmd_scan, "hit": cmd_hit, "lattice": cmd_lattice}[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CapExceeded, PrecisionExhausted) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except Obstructed as exc:
        print(f"obstructed: {exc}", file=sys.stderr)
        print(f"best_gap: {exc.best_gap!r}")
        for item in exc.evidence:
            print(f"evidence: {item}")
        return EXIT_OBSTRUCTED
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except CertificateError as exc:
        print(f"verify failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
