import cmath
import math

import mpmath
import pytest

from qtrace.elliptic import (DEFAULT_GRID, RExpr, UnsupportedGenerator, eisenstein_value, eval_at,
                             lattice_crosscheck, modular_covariance_check, theta_covariance_check,
                             theta_j, theta_weight_check, wp_lattice, wp_series, wp_value)
from qtrace.elliptic.numeric import wp_lattice_extrapolated


def test_grid_has_small_nome():
    assert len(DEFAULT_GRID) == 9
    assert all(abs(cmath.exp(2j * math.pi * tau)) <= 0.05 for _, tau in DEFAULT_GRID)


class TestValues:
    def test_g4_matches_mpmath_lattice_constant(self):
        # at tau = i, G_4 = Gamma(1/4)^8 / (960 pi^2)
        oracle = float(mpmath.gamma(0.25) ** 8 / (960 * mpmath.pi ** 2))
        assert abs(eisenstein_value(4, 1j) - oracle) < 1e-10

    def test_g2_at_i(self):
        # the quasimodular law forces G~_2(i) = pi
        assert abs(eisenstein_value(2, 1j) - math.pi) < 1e-12

    def test_series_evaluation_matches_closed_form(self):
        z, tau = 0.13 + 0.05j, 0.1 + 1.1j
        v, tail = eval_at(wp_series(2, 16, 16), (z,), tau)
        assert abs(v - wp_value(2, z, tau)) < 1e-6 and tail < 1e-4

    def test_outside_band_rejected(self):
        with pytest.raises(ValueError):
            wp_value(2, 2j, 1j)

    @pytest.mark.parametrize("m", [2, 3])
    def test_lattice_oracle(self, m):
        z, tau = 0.3 + 0.1j, 0.2 + 1.05j
        assert abs(wp_value(m, z, tau) - wp_lattice_extrapolated(m, z, tau)) < 1e-6

    def test_raw_box_sum_converges_slowly(self):
        z, tau = 0.3 + 0.1j, 1.0j
        exact = wp_value(2, z, tau)
        assert abs(wp_lattice(2, z, tau, 20) - exact) > abs(wp_lattice(2, z, tau, 60) - exact)


class TestCovariance:
    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("g", ["S", "T"])
    def test_transformation_laws(self, m, g):
        r = modular_covariance_check(m, g)
        assert r.passed, r.details["laws"]

    def test_wp1_quasi_periodicity_is_not_periodicity(self):
        z, tau = 0.2 + 0.1j, 1.1j
        jump = wp_value(1, z + 1, tau) - wp_value(1, z, tau)
        assert abs(jump - eisenstein_value(2, tau)) < 1e-10

    def test_wrong_weight_fails(self):
        # wp_3 is weight 3; reading its values as weight 2 must fail under S
        from qtrace.group import S
        z, tau = 0.2 + 0.1j, 1.0j
        j = S.j(tau)
        assert abs(j ** -2 * wp_value(3, z / j, S.act(tau)) - wp_value(3, z, tau)) > 1e-3

    def test_lattice_crosscheck(self):
        assert lattice_crosscheck(2).passed


class TestTheta:
    def test_eisenstein(self):
        G4 = RExpr.G(4)
        assert theta_j(G4, 1) == RExpr.atom(("qd", ("G", 4))) + RExpr.G(2) * G4 * 4

    def test_constant(self):
        assert theta_j(RExpr.const(5), 1).is_zero()

    def test_leibniz(self):
        f, g = RExpr.G(4), RExpr.G(6)
        assert theta_j(f * g, 2) == theta_j(f, 2) * g + f * theta_j(g, 2)

    def test_unsupported_generators(self):
        for bad in (RExpr.G(2), RExpr.wp(1, 1, 2), RExpr.zdiff(1, 2)):
            with pytest.raises(UnsupportedGenerator):
                theta_j(bad, 1)

    def test_weight_bookkeeping(self):
        exprs = [RExpr.G(4), RExpr.G(6) * RExpr.G(4), RExpr.wp(2, 1, 2), RExpr.wp(3, 1, 3) * RExpr.G(4)]
        assert theta_weight_check(exprs, 3).passed

    @pytest.mark.parametrize("f,j,n", [(RExpr.G(4), 1, 1), (RExpr.wp(2, 1, 2), 1, 2),
                                       (RExpr.wp(2, 1, 2), 3, 3)])
    def test_numeric_weight(self, f, j, n):
        r = theta_covariance_check(f, j, n, "S", tol=1e-7)
        assert r.passed, r.details
