"""Pure-Python twin of the compiled orbit scan (same inputs, same outputs)."""

import math


def scan_orbits(A, M, N, h_a, h_b, h_c, freqs, cos_coef, sin_coef, const):
    a, b, c, d = A
    ma, mb, mc, md = M
    sgn = 1 if ma * md - mb * mc > 0 else -1
    terms = list(zip(freqs, cos_coef, sin_coef))
    two_pi = 2.0 * math.pi
    seen = bytearray(N)
    reps1, reps2, periods, sums = [], [], [], []
    for i in range(h_a):
        for j in range(h_c):
            if seen[i * h_c + j]:
                continue
            u1 = sgn * (md * i - mb * j) % N
            u2 = sgn * (-mc * i + ma * j) % N
            v1, v2 = u1, u2
            per = 0
            acc = 0.0
            while True:
                m1 = (ma * v1 + mb * v2) // N
                m2 = (mc * v1 + md * v2) // N
                jj = m2 % h_c
                s = (m2 - jj) // h_c
                seen[((m1 - s * h_b) % h_a) * h_c + jj] = 1
                acc += const
                for (k1, k2), ca, sa in terms:
                    x = two_pi * (((k1 * v1 + k2 * v2) % N) / N)
                    if ca:
                        acc += ca * math.cos(x)
                    if sa:
                        acc += sa * math.sin(x)
                per += 1
                v1, v2 = (a * v1 + b * v2) % N, (c * v1 + d * v2) % N
                if v1 == u1 and v2 == u2:
                    break
            reps1.append(u1)
            reps2.append(u2)
            periods.append(per)
            sums.append(acc)
    return reps1, reps2, periods, sums
