import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from torusdense.observable import TrigPolynomial, birkhoff_sum, holder_constant, rational_orbit_sum
from torusdense.qfield import IntMat2
from torusdense.torus import TorusPoint, enumerate_periodic, group_orbits

CAT = IntMat2(2, 1, 1, 1)


def test_parse_and_text_roundtrip():
    phi = TrigPolynomial.parse("cos 1 0 1; sin 1 1 3/10\nconst -1/2  # trailing comment")
    assert phi.const == Fraction(-1, 2)
    assert TrigPolynomial.parse(phi.to_text()) == phi


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        TrigPolynomial.parse("tan 1 0 1")


def test_frequency_sign_is_canonical():
    # cos is even and sin odd under k -> -k
    assert TrigPolynomial.cos(-1, 0) == TrigPolynomial.cos(1, 0)
    assert TrigPolynomial.sin(-1, 0) == TrigPolynomial.sin(1, 0, -1)


def test_compose_with_matrix():
    # cos 2 pi x1 after (x1, x2) -> (2 x1 + x2, x1 + x2)
    assert TrigPolynomial.cos(1, 0).compose(CAT) == TrigPolynomial.cos(2, 1)


def test_eval_matches_float():
    phi = TrigPolynomial.parse("cos 1 0 1; sin 2 1 -2/3; const 1/7")
    p = TorusPoint.rational(Fraction(3, 11), Fraction(5, 13))
    iv = phi.eval(p, 100)
    assert abs(float(iv.mid()) - phi.eval_float(3 / 11, 5 / 13)) < 1e-14
    assert float(iv.width()) < 1e-25


def test_holder_constant():
    h = holder_constant(TrigPolynomial.cos(1, 0))
    assert 2 * math.pi <= h.C <= 2 * math.pi * (1 + 1e-6)
    h2 = holder_constant(TrigPolynomial.parse("cos 3 4 1/5"))  # |k| = 5
    assert 2 * math.pi <= h2.C <= 2 * math.pi * (1 + 1e-6)
    assert holder_constant(TrigPolynomial.constant(3)).C == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.fractions(-2, 2, max_denominator=20))
def test_coboundary_sums_vanish(k1, k2, c):
    psi = TrigPolynomial.sin(k1, k2, c) + TrigPolynomial.cos(k2, k1, c)
    phi = psi.compose(CAT) + psi.scale(-1)
    for orbit in group_orbits(list(enumerate_periodic(CAT, 3))):
        assert birkhoff_sum(phi, orbit, 80).interval.contains(0)


def test_rational_orbit_sum_repeats_period():
    phi = TrigPolynomial.cos(1, 0)
    p = TorusPoint.rational(Fraction(1, 5), Fraction(2, 5))
    one = rational_orbit_sum(phi, CAT, p, 2, 100).interval
    six = rational_orbit_sum(phi, CAT, p, 6, 100).interval
    assert six.intersects(one * 3)
