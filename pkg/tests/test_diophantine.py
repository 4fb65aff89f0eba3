import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from torusdense.diophantine import (
    ComboQuery,
    Found,
    Obstructed,
    ari_family,
    bezout_combo,
    detect_lattice,
    gap,
    search_combo,
    sums_vanish,
)
from torusdense.errors import NotCoprime
from torusdense.intervals import Interval
from torusdense.qfield import QuadExt, enclose

NEG_GOLDEN = QuadExt(-1, -1, 2, 5)  # -(sqrt5 + 1)/2
POS_GOLDEN = QuadExt(-1, 1, 2, 5)  # (sqrt5 - 1)/2


def golden(bits):
    return enclose(NEG_GOLDEN, bits), enclose(POS_GOLDEN, bits)


def exact(x):
    return Interval.from_fraction(Fraction(x), 128)


def test_gap():
    assert gap(Fraction(-3, 4), Fraction(1, 2)) == Fraction(1, 4)
    assert gap(Fraction(2), Fraction(3)) == 1
    with pytest.raises(ZeroDivisionError):
        gap(1, 0)


def test_bezout_and_family():
    assert bezout_combo(-3, 2, 1) == (1, 2)
    assert bezout_combo(-1, 1, -1) == (2, 1)
    assert ari_family(1, 2, -3, 2, 5) == (11, 17)
    with pytest.raises(NotCoprime):
        bezout_combo(-2, 4)


@given(st.integers(-60, -1), st.integers(1, 60), st.sampled_from([1, -1]))
def test_bezout_minimal(l, k, sign):
    if math.gcd(l, k) != 1:
        return
    m, n = bezout_combo(l, k, sign)
    assert m >= 1 and n >= 1 and m * l + n * k == sign
    # stepping back along the family leaves the positive quadrant
    assert m - k < 1 or n + l < 1


def test_golden_window_scan():
    a, b = golden(128)
    res = search_combo(ComboQuery(a, b, Fraction(1, 20), Fraction(1, 20)))
    assert isinstance(res, Found)
    # 3 a + 8 b = (5 sqrt5 - 11)/2 ~ 0.0902 is the first hit scanning m upward
    assert (res.m, res.n, res.route) == (3, 8, "scan")
    assert res.value.inside_open(0, Fraction(1, 10))


@pytest.mark.parametrize("w", [Fraction(1, 10**6), Fraction(1, 10**9), Fraction(1, 10**12)])
def test_golden_narrow_window_steps(w):
    a, b = golden(64)
    t = Fraction(1, 3)
    res = search_combo(ComboQuery(a, b, t, w, refine=golden, precision_ceiling=4096))
    assert isinstance(res, Found) and res.route == "step"
    exact_value = NEG_GOLDEN * res.m + POS_GOLDEN * res.n
    assert (exact_value - (t - w)).sign() > 0 and (exact_value - (t + w)).sign() < 0


def test_search_bound_obstructs():
    a, b = golden(64)
    res = search_combo(ComboQuery(a, b, Fraction(1, 3), Fraction(1, 10**15), refine=golden, search_bound=10**6))
    assert isinstance(res, Obstructed)
    assert res.best_gap > 2e-15


def test_golden_positive_gaps_shrink_by_phi_squared():
    # positive combinations come every other Fibonacci denominator; the last one
    # below the default bound of 1e12 (Q ~ 5.9e11) has g ~ 4.7e-13 > 2w
    a, b = golden(64)
    res = search_combo(ComboQuery(a, b, Fraction(1, 3), Fraction(1, 10**13), refine=golden))
    assert isinstance(res, Obstructed)
    gaps = [e[3] for e in res.evidence]
    phi2 = ((1 + 5**0.5) / 2) ** 2
    assert all(abs(x / y - phi2) < 1e-6 for x, y in zip(gaps, gaps[1:]))
    assert 2e-13 < res.best_gap < 2e-13 * phi2
    assert res.evidence[-1][0] < 10**12 < res.evidence[-1][0] * phi2


def test_lattice_obstruction():
    res = search_combo(ComboQuery(exact("-3/4"), exact("1/2"), Fraction(3, 8), Fraction(3, 40)))
    assert isinstance(res, Obstructed)
    assert res.best_gap == 0.25
    assert res.lattice == (-3, 2)
    assert sorted(v[2] for v in res.evidence) == [0.25, 0.5]


def test_lattice_hit():
    res = search_combo(ComboQuery(exact("-3/4"), exact("1/2"), Fraction(1, 4), Fraction(1, 20)))
    assert isinstance(res, Found)
    assert res.m * Fraction(-3, 4) + res.n * Fraction(1, 2) == Fraction(1, 4)


def test_k_min_respected():
    res = search_combo(ComboQuery(exact(-1), exact(1), 0, Fraction(1, 2), k_min=7))
    assert isinstance(res, Found) and (res.m, res.n) == (7, 7)


def test_query_validation():
    with pytest.raises(ValueError):
        ComboQuery(exact(1), exact(1), 0, 1)
    with pytest.raises(ValueError):
        ComboQuery(exact(-1), exact(1), 0, 0)


def _brute(a, b, lo, hi, bound=400):
    for m in range(1, bound + 1):
        n = max(1, math.floor((lo - m * a) / b) + 1)
        if n <= bound and m * a + n * b < hi:
            return m, n
    return None


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(1, 9), st.integers(1, 30), st.integers(1, 9),
       st.integers(-100, 100), st.integers(1, 12), st.integers(2, 100))
def test_rational_instances_match_brute_force(an, ad, bn, bd, tn, td, wd):
    a, b = -Fraction(an, ad), Fraction(bn, bd)
    t, w = Fraction(tn, td), Fraction(1, wd)
    res = search_combo(ComboQuery(exact(a), exact(b), t, w))
    brute = _brute(a, b, t - w, t + w)
    if isinstance(res, Found):
        assert t - w < res.m * a + res.n * b < t + w
        assert res.m >= 1 and res.n >= 1
    else:
        assert brute is None


def test_detect_lattice():
    assert detect_lattice([1, -2, 3.5], 1e-9) == pytest.approx(0.5)
    assert detect_lattice([-(1 + 5**0.5) / 2, (5**0.5 - 1) / 2], 1e-9) is None
    assert detect_lattice([0.0, 0.0], 1e-9) is None
    assert detect_lattice([0.3, 0.6, 0.9 + 1e-12], 1e-9) == pytest.approx(0.3)


def test_sums_vanish():
    assert sums_vanish([0.0, 1e-12, -1e-12], 1e-9)
    assert not sums_vanish([0.0, 0.1], 1e-9)
