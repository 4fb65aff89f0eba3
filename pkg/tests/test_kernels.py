import os
import subprocess
import sys

import pytest

from torusdense import kernels
from torusdense.observable import TrigPolynomial
from torusdense.qfield import IntMat2
from torusdense.scan import scan_density, scan_sums

CAT = IntMat2(2, 1, 1, 1)
PHI = TrigPolynomial.parse("cos 1 0 1; sin 2 1 -1/3; const 1/7")

compiled_only = pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled kernel not built")


@compiled_only
@pytest.mark.parametrize("A", [CAT, IntMat2(3, 1, 2, 1), IntMat2(1, 1, 1, 0)])
def test_backends_agree(A):
    fast = scan_sums(A, PHI, 7, backend="compiled")
    slow = scan_sums(A, PHI, 7, backend="python")
    assert [(o.period, o.u1, o.u2, o.N) for o in fast] == [(o.period, o.u1, o.u2, o.N) for o in slow]
    for f, s in zip(fast, slow):
        assert abs(f.mid - s.mid) < 1e-12
        assert f.lo <= s.hi and s.lo <= f.hi


def test_fast_enclosures_contain_certified_sums():
    fast = scan_sums(CAT, PHI, 6)
    cert = scan_sums(CAT, PHI, 6, certified=True)
    for f, c in zip(fast, cert):
        assert f.lo <= c.lo and c.hi <= f.hi


def test_orbit_count_by_period():
    # orbits of minimal period n for the cat map: 1, 2, 5, 10, 24, 50
    orbits = scan_sums(CAT, PHI, 6)
    counts = [sum(1 for o in orbits if o.period == n) for n in range(1, 7)]
    assert counts == [1, 2, 5, 10, 24, 50]


def test_density_histogram():
    dens = scan_density(CAT, TrigPolynomial.cos(1, 0), 6, (-5, 5), bins=10)
    assert sum(dens.counts) == sum(1 for o in dens.orbits if -5 <= o.mid <= 5)
    assert len(dens.edges) == 11 and dens.edges[0] == -5 and dens.edges[-1] == 5


def test_pure_python_switch():
    env = dict(os.environ, TORUSDENSE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from torusdense import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_forcing_missing_compiled_kernel_raises(monkeypatch):
    monkeypatch.setattr(kernels, "_compiled", None)
    with pytest.raises(RuntimeError):
        kernels.scan_orbits((2, 1, 1, 1), (1, 0, 0, 1), 1, 1, 0, 1, [], [], [], 0.0, backend="compiled")
