from fractions import Fraction

import pytest

from qtrace.elliptic import eisenstein, kernel_P, wp_P_relation_check, wp_recursion_check, wp_series
from qtrace.scalar import Scalar
from qtrace.series import MultiSeries


def G(k, n, N=6):
    return eisenstein(k, N)[n]


class TestKernel:
    def test_p1_leading_x_terms(self):
        ker = kernel_P(0, 3, 3).expansion
        tpi = Scalar.two_pi_i_power(1)
        assert ker.coefficient((1, 0)) == tpi
        assert ker.coefficient((2, 0)) == tpi
        # x q picks up 1/(1-q) from l = 1
        assert ker.coefficient((1, 1)) == tpi

    def test_p2_negative_powers(self):
        ker = kernel_P(1, 2, 4).expansion
        pref = Scalar.two_pi_i_power(2)
        assert ker.coefficient((-1, 1)) == pref
        assert ker.coefficient((-2, 2)) == pref * 2
        assert ker.coefficient((-1, 2)) == pref

    def test_negative_m_rejected(self):
        with pytest.raises(ValueError):
            kernel_P(-1, 2, 2)


class TestWpSeries:
    def test_leading_pole(self):
        for m in range(1, 5):
            assert wp_series(m, 4, 2).expansion.coefficient((-m, 0)) == 1

    def test_wp2_coefficients(self):
        e = wp_series(2, 4, 3).expansion
        for n in range(4):
            assert e.coefficient((2, n)) == G(1, n) * 3
            assert e.coefficient((4, n)) == G(2, n) * 5

    def test_wp1_cubic_term(self):
        e = wp_series(1, 5, 3).expansion
        for n in range(4):
            assert e.coefficient((3, n)) == -G(1, n)

    def test_wp2_is_even_in_z(self):
        e = wp_series(2, 8, 3).expansion
        assert all(k[0] % 2 == 0 for k in e.terms)

    def test_weight(self):
        assert wp_series(3, 4, 2).weight == 3


class TestRecursion:
    @pytest.mark.parametrize("m", range(1, 7))
    def test_holds_exactly(self, m):
        r = wp_recursion_check(m, 8, 8)
        assert r.passed and r.exact and r.details["n_mismatches"] == 0

    def test_corrupted_input_detected(self):
        lower = wp_series(2, 8, 8).expansion
        bad = lower + MultiSeries({(2, 3): Fraction(1, 7)}, vars=("z", "q"))
        r = wp_recursion_check(2, 8, 8, lower=bad)
        assert not r.passed
        assert r.details["first_mismatch"]["exponents"] == ["1", "3"]


class TestPRelation:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_holds_exactly(self, m):
        r = wp_P_relation_check(m, 4, 4)
        assert r.passed, r.details

    def test_perturbed_g2_detected(self):
        g2 = MultiSeries({(0, n): c for (n, _), c in eisenstein(0, 4).expansion.terms.items()},
                         vars=("z", "q"), trunc=(None, 5))
        g2 = g2 + MultiSeries({(0, 2): Scalar.rational(1, 0, 2)}, vars=("z", "q"))
        r = wp_P_relation_check(1, 4, 4, g2=g2)
        assert not r.passed and r.max_deviation > 0
