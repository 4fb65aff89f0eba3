from fractions import Fraction

import pytest

from torusdense import IntMat2, TorusPoint, TrigPolynomial, eigen_data, periodic_point
from torusdense.heteroclinic import hetero_pair

CAT = IntMat2(2, 1, 1, 1)

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def cat():
    return CAT


@pytest.fixture(scope="session")
def cat_eig():
    return eigen_data(CAT)


@pytest.fixture(scope="session")
def cos_phi():
    return TrigPolynomial.cos(1, 0)


@pytest.fixture(scope="session")
def golden_pq():
    """p has sum -(sqrt5+1)/2, q has sum (sqrt5-1)/2 under cos 2 pi x1."""
    p = periodic_point(CAT, TorusPoint.rational(Fraction(2, 5), Fraction(4, 5)))
    q = periodic_point(CAT, TorusPoint.rational(Fraction(1, 5), Fraction(2, 5)))
    return p, q


@pytest.fixture(scope="session")
def golden_pair(golden_pq, cat_eig):
    return hetero_pair(*golden_pq, cat_eig)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
