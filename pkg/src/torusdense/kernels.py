"""Kernel selection: the compiled orbit scan when built, else the Python twin."""

from __future__ import annotations

import os

from . import _fallback

try:
    if os.environ.get("TORUSDENSE_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from ._ext import orbitscan as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

# the compiled path keeps numerators and N in int64 with 128-bit products
_I64_LIMIT = 1 << 62


def fits_compiled(A, M, N, freqs) -> bool:
    small = max(abs(x) for x in (*A, *(k for f in freqs for k in f), 1)) < (1 << 31)
    return N < _I64_LIMIT and small and max(abs(x) for x in M) < _I64_LIMIT


def scan_orbits(A, M, N, h_a, h_b, h_c, freqs, cos_coef, sin_coef, const, backend=None):
    """Dispatch to a backend; ``backend`` forces "compiled" or "python"."""
    use = backend or BACKEND
    if use == "compiled" and _compiled is not None and fits_compiled(A, M, N, freqs):
        return _compiled.scan_orbits(tuple(A), tuple(M), N, h_a, h_b, h_c,
                                     list(freqs), list(cos_coef), list(sin_coef), float(const))
    if use == "compiled" and backend == "compiled" and _compiled is None:
        raise RuntimeError("compiled kernel not built")
    return _fallback.scan_orbits(A, M, N, h_a, h_b, h_c, freqs, cos_coef, sin_coef, const)
