"""Time the compiled orbit scan against the pure-Python fallback.

    python benchmarks/bench_kernels.py --period-max 10 --repeat 3
"""

import argparse
import statistics
import time

from torusdense import kernels
from torusdense.observable import TrigPolynomial
from torusdense.qfield import IntMat2
from torusdense.scan import scan_sums
from torusdense.torus import fixed_point_lattice


def timed(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--matrix", default="2 1 1 1")
    ap.add_argument("--observable", default="cos 1 0 1; sin 1 1 1/2")
    ap.add_argument("--period-max", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    A = IntMat2(*(int(v) for v in args.matrix.split()))
    phi = TrigPolynomial.parse(args.observable)
    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    freqs = list(phi.terms)
    cos_coef = [float(a) for a, _ in phi.terms.values()]
    sin_coef = [float(b) for _, b in phi.terms.values()]
    lats = [fixed_point_lattice(A, n) for n in range(1, args.period_max + 1)]

    def kernel_only(name):
        for lat in lats:
            kernels.scan_orbits(tuple(A), tuple(lat.M), lat.N, lat.h_a, lat.h_b, lat.h_c,
                                freqs, cos_coef, sin_coef, float(phi.const), backend=name)

    print("kernel only (all Fix(f^n), n <= period_max):")
    kernel_times = {}
    for name in backends:
        kernel_times[name], _ = timed(lambda: kernel_only(name), args.repeat)
        print(f"  {name:9s} {kernel_times[name]:8.3f}s")
    if len(kernel_times) == 2:
        print(f"  speedup   {kernel_times['python'] / kernel_times['compiled']:8.1f}x")

    print("end to end scan_sums (includes per-orbit enclosure bookkeeping):")
    results = {}
    for name in backends:
        results[name] = timed(lambda: scan_sums(A, phi, args.period_max, backend=name), args.repeat)
        secs, orbits = results[name]
        print(f"  {name:9s} {secs:8.3f}s  {len(orbits)} orbits up to period {args.period_max}")
    if len(results) == 2:
        (ts, slow), (tf, fast) = results["python"], results["compiled"]
        worst = max(abs(a.mid - b.mid) for a, b in zip(slow, fast))
        print(f"  speedup   {ts / tf:8.1f}x  max |difference| of sums {worst:.2e}")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
