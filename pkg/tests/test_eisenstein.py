import math
from fractions import Fraction

import pytest
import sympy

from qtrace.elliptic import eisenstein, eisenstein_value, eval_at, serre_derivative, zeta_even
from qtrace.elliptic.checks import serre_ratio_check
from qtrace.scalar import Scalar
from qtrace.series import LogSeries


def to_sympy(s: Scalar):
    return sum(((sympy.Rational(re.numerator, re.denominator) + sympy.I * sympy.Rational(im.numerator, im.denominator))
                * sympy.pi ** p for p, (re, im) in s.items()), sympy.Integer(0))


def sigma_brute(n, power):
    return sum(d ** power for d in range(1, n + 1) if n % d == 0)


def test_zeta_four_from_bernoulli():
    assert zeta_even(4) == Scalar.rational(Fraction(1, 90), 0, 4)
    assert to_sympy(zeta_even(6)) == sympy.zeta(6)


def test_constant_terms():
    assert eisenstein(1, 0)[0] == Scalar.rational(Fraction(1, 45), 0, 4)
    assert eisenstein(0, 0)[0] == Scalar.rational(Fraction(1, 3), 0, 2)


def test_first_coefficients_of_g4():
    E = eisenstein(1, 2)
    assert E[1] == Scalar.rational(Fraction(16, 3), 0, 4)
    assert E[2] == Scalar.rational(Fraction(16, 3) * 9, 0, 4)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_coefficients_match_symbolic_oracle(k):
    N = 20
    E = eisenstein(k, N)
    w = 2 * k + 2
    pref = 2 * (2 * sympy.pi * sympy.I) ** w / sympy.factorial(w - 1)
    for n in range(1, N + 1):
        assert sympy.expand(to_sympy(E[n]) - pref * sigma_brute(n, w - 1)) == 0


def test_weight_and_order():
    E = eisenstein(2, 7)
    assert E.weight == 6 and E.order == 7


def test_numeric_value_depends_only_on_q():
    a = eisenstein_value(4, 5j)
    b = eisenstein_value(4, 5j + 1)
    assert abs(a - b) < 1e-10


def test_float_value_matches_exact_series():
    tau = 0.2 + 0.9j
    exact, _ = eval_at(eisenstein(1, 40).expansion, (), tau)
    assert abs(exact - eisenstein_value(4, tau)) < 1e-9


class TestSerreDerivative:
    def test_constant_weight_zero(self):
        c = LogSeries({(0, 0): 7}, var="q")
        assert serre_derivative(c, 0).expansion.is_zero()

    def test_q_weight_zero(self):
        q = LogSeries({(1, 0): 1}, trunc=5, var="q")
        assert serre_derivative(q, 0).expansion == q * Scalar.two_pi_i_power(2)

    def test_weight_raised_by_two(self):
        assert serre_derivative(eisenstein(1, 5)).weight == 6

    def test_g4_is_fourteen_g6(self):
        # q dE4/dq = (E2 E4 - E6)/3 with G~_2k = 2 zeta(2k) E_2k gives 14 G~_6 exactly
        N = 15
        lhs = serre_derivative(eisenstein(1, N), 4).expansion
        rhs = eisenstein(2, N).expansion * 14
        assert lhs.equal_terms(rhs)

    def test_ratio_constant_across_tau(self):
        report = serre_ratio_check(4)
        assert report.passed, report.summary()
        assert abs(report.details["ratios"][0] - 14) < 1e-9
