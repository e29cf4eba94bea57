"""Eisenstein series, the kernels P_{m+1}, the wp family and the ring R."""

from .eisenstein import (Eisenstein, ModularSeries, eisenstein, eisenstein_coefficient,
                         eisenstein_weight, serre_derivative, zeta_even)
from .weierstrass import (Kernel, WpSeries, kernel_P, kernel_in_z, wp_P_relation_check,
                          wp_recursion_check, wp_series)
from .numeric import eisenstein_value, eval_at, wp_lattice, wp_value
from .ring import RExpr, UnsupportedGenerator, theta_j
from .checks import (DEFAULT_GRID, lattice_crosscheck, load_samples, modular_covariance_check,
                     serre_ratio_check, theta_covariance_check, theta_weight_check)

__all__ = [
    "Eisenstein", "ModularSeries", "eisenstein", "eisenstein_coefficient", "eisenstein_weight",
    "serre_derivative", "zeta_even", "Kernel", "WpSeries", "kernel_P", "kernel_in_z",
    "wp_P_relation_check", "wp_recursion_check", "wp_series", "eisenstein_value", "eval_at",
    "wp_lattice", "wp_value", "RExpr", "UnsupportedGenerator", "theta_j", "DEFAULT_GRID",
    "lattice_crosscheck", "load_samples", "modular_covariance_check", "serre_ratio_check",
    "theta_covariance_check", "theta_weight_check",
]
