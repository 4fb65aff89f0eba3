# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit scan over Fix(f^n) in 64/128-bit integer arithmetic."""

from libc.math cimport cos, sin, M_PI
from libc.stdlib cimport malloc, free

cdef extern from *:
    ctypedef long long i128 "__int128"

ctypedef long long i64


cdef inline i64 mod128(i128 x, i64 n) nogil:
    cdef i128 r = x % n
    if r < 0:
        r += n
    return <i64>r


cdef inline i64 floordiv128(i128 x, i64 n) nogil:
    cdef i128 q = x / n
    if (x % n != 0) and ((x < 0) != (n < 0)):
        q -= 1
    return <i64>q


def scan_orbits(tuple A, tuple M, i64 N, i64 h_a, i64 h_b, i64 h_c,
                list freqs, list cos_coef, list sin_coef, double const):
    """Group Fix(f^n) into orbits and sum the observable along each.

    Returns (rep_u1, rep_u2, periods, sums) as Python lists, one entry per
    orbit, in order of the smallest coset index on the orbit.
    """
    cdef i64 a = A[0], b = A[1], c = A[2], d = A[3]
    cdef i64 ma = M[0], mb = M[1], mc = M[2], md = M[3]
    cdef int nt = len(freqs)
    cdef i64 *k1 = <i64 *>malloc(nt * sizeof(i64))
    cdef i64 *k2 = <i64 *>malloc(nt * sizeof(i64))
    cdef double *ca = <double *>malloc(nt * sizeof(double))
    cdef double *sa = <double *>malloc(nt * sizeof(double))
    cdef unsigned char *seen = <unsigned char *>malloc(N * sizeof(unsigned char))
    cdef i64 i, j, idx, u1, u2, v1, v2, t1, m1, m2, jj, s, ii, per, ph
    cdef i64 det = ma * md - mb * mc
    cdef i64 sgn = 1 if det > 0 else -1
    cdef double acc, r, x
    cdef int t
    if seen == NULL or k1 == NULL or k2 == NULL or ca == NULL or sa == NULL:
        raise MemoryError()
    for t in range(nt):
        k1[t] = freqs[t][0]
        k2[t] = freqs[t][1]
        ca[t] = cos_coef[t]
        sa[t] = sin_coef[t]
    for idx in range(N):
        seen[idx] = 0
    reps1, reps2, periods, sums = [], [], [], []
    try:
        for i in range(h_a):
            for j in range(h_c):
                idx = i * h_c + j
                if seen[idx]:
                    continue
                # z = adj(M) (i, j) / det, numerators mod N
                u1 = mod128(<i128>sgn * (<i128>md * i - <i128>mb * j), N)
                u2 = mod128(<i128>sgn * (-<i128>mc * i + <i128>ma * j), N)
                v1 = u1
                v2 = u2
                per = 0
                acc = 0.0
                with nogil:
                    while True:
                        m1 = floordiv128(<i128>ma * v1 + <i128>mb * v2, N)
                        m2 = floordiv128(<i128>mc * v1 + <i128>md * v2, N)
                        jj = m2 % h_c
                        if jj < 0:
                            jj += h_c
                        s = (m2 - jj) // h_c
                        ii = mod128(<i128>m1 - <i128>s * h_b, h_a)
                        seen[ii * h_c + jj] = 1
                        acc += const
                        for t in range(nt):
                            ph = mod128(<i128>k1[t] * v1 + <i128>k2[t] * v2, N)
                            r = <double>ph / <double>N
                            x = 2.0 * M_PI * r
                            if ca[t] != 0.0:
                                acc += ca[t] * cos(x)
                            if sa[t] != 0.0:
                                acc += sa[t] * sin(x)
                        per += 1
                        t1 = mod128(<i128>a * v1 + <i128>b * v2, N)
                        v2 = mod128(<i128>c * v1 + <i128>d * v2, N)
                        v1 = t1
                        if v1 == u1 and v2 == u2:
                            break
                reps1.append(u1)
                reps2.append(u2)
                periods.append(per)
                sums.append(acc)
    finally:
        free(seen)
        free(k1)
        free(k2)
        free(ca)
        free(sa)
    return reps1, reps2, periods, sums
