"""Kernels P_{m+1}(x; q), the Laurent family wp_m(z; q) and their exact identities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from ..scalar import Scalar, PI_I
from ..series import MultiSeries
from .eisenstein import eisenstein, zeta_nonpositive
from ..report import CheckReport


@dataclass(frozen=True)
class Kernel:
    """``P_{m+1}(x; q)`` with positive x-powers kept up to ``x_range``."""

    m: int
    x_range: int
    q_order: int
    expansion: MultiSeries
    prefactor: str = "(2 pi i)^(m+1) included; 1/(1-q^l) expanded as sum_k q^(lk)"


@dataclass(frozen=True)
class WpSeries:
    """Laurent expansion of ``wp~_m(z; q)`` in (z, q)."""

    m: int
    z_order: int
    q_order: int
    expansion: MultiSeries

    @property
    def weight(self) -> int:
        return self.m


def _binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


@lru_cache(maxsize=None)
def kernel_P(m: int, x_range: int, q_order: int) -> Kernel:
    """Exact ``P_{m+1}(x; q)``.

    ``(2 pi i)^{m+1} sum_{l>0} ( l^m/m! x^l/(1-q^l) - (-1)^m l^m/m! q^l x^{-l}/(1-q^l) )``

    Positive x-powers are truncated above ``x_range``; every negative power
    that reaches ``q**q_order`` is kept, so the series is complete in q.
    """
    if m < 0:
        raise ValueError("kernel_P needs m >= 0")
    pref = Scalar.two_pi_i_power(m + 1)
    terms = {}

    def put(key, c):
        terms[key] = terms[key] + c if key in terms else c

    for l in range(1, x_range + 1):
        c = pref * Fraction(l**m, math.factorial(m))
        for k in range(0, q_order // l + 1):
            put((l, l * k), c)
    for l in range(1, q_order + 1):
        c = pref * Fraction((-1) ** (m + 1) * l**m, math.factorial(m))
        for k in range(1, q_order // l + 1):
            put((-l, l * k), c)
    ms = MultiSeries(terms, vars=("x", "q"), trunc=(x_range + 1, q_order + 1))
    return Kernel(m, x_range, q_order, ms)


@lru_cache(maxsize=None)
def wp_series(m: int, z_order: int, q_order: int) -> WpSeries:
    """``wp~_m(z; q) = z^{-m} + (-1)^m sum_{k>=1} C(2k+1, m-1) G~_{2k+2}(q) z^{2k+2-m}``.

    z-powers up to ``z_order`` and q-powers up to ``q_order`` are kept.
    """
    if m < 1:
        raise ValueError("wp_series needs m >= 1")
    terms = {(-m, 0): Scalar.coerce(1)}
    k = 1
    while 2 * k + 2 - m <= z_order:
        b = _binom(2 * k + 1, m - 1)
        if b:
            g = eisenstein(k, q_order).expansion
            for (n, _), c in g.terms.items():
                terms[(2 * k + 2 - m, n)] = c * ((-1) ** m * b)
        k += 1
    ms = MultiSeries(terms, vars=("z", "q"), trunc=(z_order + 1, q_order + 1))
    return WpSeries(m, z_order, q_order, ms)


def _q0_laurent(m: int, z_order: int) -> MultiSeries:
    """Laurent expansion at z = 0 of ``(2 pi i)^m/(m-1)! sum_{l>=1} l^{m-1} q_z^l``.

    The sum is ``(2 pi i)^m/(m-1)! (d/dt)^{m-1} e^t/(1-e^t)`` at ``t = 2 pi i z``
    and ``e^t/(1-e^t) = -1/t + sum_j zeta(-j) t^j/j!``.
    """
    terms = {(-m, 0): Scalar.coerce((-1) ** m)}
    for j in range(0, z_order + 1):
        c = Fraction(zeta_nonpositive(m - 1 + j), math.factorial(m - 1) * math.factorial(j))
        if c:
            terms[(j, 0)] = Scalar.two_pi_i_power(m + j, c)
    return MultiSeries(terms, vars=("z", "q"), trunc=(z_order + 1, None))


def kernel_in_z(m: int, z_order: int, q_order: int) -> MultiSeries:
    """``P_m(q_z; q)`` as a series in (z, q), ``m >= 1``.

    For ``q**n`` with ``n >= 1`` only finitely many ``x**(+-l)`` occur and each
    is replaced by ``exp(+-2 pi i l z)`` truncated at ``z**z_order``.  The
    ``q**0`` coefficient is an infinite sum in x; it is resummed in closed
    form and expanded at ``z = 0`` (see :func:`_q0_laurent`).
    """
    if m < 1:
        raise ValueError("kernel_in_z needs m >= 1")
    ker = kernel_P(m - 1, q_order, q_order).expansion
    terms = {}
    for (e, n), c in ker.terms.items():
        if n == 0:
            continue
        for j in range(z_order + 1):
            key = (j, n)
            val = c * Scalar.two_pi_i_power(j, Fraction(e**j, math.factorial(j)))
            terms[key] = terms[key] + val if key in terms else val
    body = MultiSeries(terms, vars=("z", "q"), trunc=(z_order + 1, q_order + 1))
    return body + _q0_laurent(m, z_order).truncate(q=q_order + 1)


def wp_recursion_check(m: int, z_order: int = 8, q_order: int = 8,
                       lower: Optional[MultiSeries] = None,
                       upper: Optional[MultiSeries] = None) -> CheckReport:
    """Exact test of ``wp~_{m+1} = -(1/m) d/dz wp~_m`` on the common truncation."""
    lower = lower if lower is not None else wp_series(m, z_order, q_order).expansion
    upper = upper if upper is not None else wp_series(m + 1, z_order, q_order).expansion
    rhs = lower.diff("z") * Fraction(-1, m)
    diffs = upper.difference_report(rhs)
    return _exact_report(f"wp_recursion[m={m}]", diffs,
                         {"m": m, "z_order": z_order, "q_order": q_order})


def wp_P_relation_rhs(m: int, z_order: int, q_order: int,
                      g2: Optional[MultiSeries] = None) -> MultiSeries:
    """``(-1)^m (P_m(q_z; q) - d^{m-1}/dz^{m-1} (G~_2(q) z - pi i))``."""
    if g2 is None:
        g2 = MultiSeries({(0, n): c for (n, _), c in eisenstein(0, q_order).expansion.terms.items()},
                         vars=("z", "q"), trunc=(None, q_order + 1))
    z = MultiSeries({(1, 0): 1}, vars=("z", "q"))
    linear = g2 * z - MultiSeries({(0, 0): PI_I}, vars=("z", "q"))
    for _ in range(m - 1):
        linear = linear.diff("z")
    return (kernel_in_z(m, z_order, q_order) - linear) * ((-1) ** m)


def wp_P_relation_check(m: int, z_order: int = 4, q_order: int = 4,
                        g2: Optional[MultiSeries] = None) -> CheckReport:
    """Exact coefficient comparison of ``wp~_m`` with its P-kernel form.

    ``g2`` replaces the ``G~_2(q)`` series on the kernel side (used to
    confirm that a perturbed input is detected).
    """
    lhs = wp_series(m, z_order, q_order).expansion
    rhs = wp_P_relation_rhs(m, z_order, q_order, g2)
    diffs = lhs.difference_report(rhs)
    return _exact_report(f"wp_P_relation[m={m}]", diffs,
                         {"m": m, "z_order": z_order, "q_order": q_order})


def _exact_report(name, diffs, params) -> CheckReport:
    details = {
        "n_mismatches": len(diffs),
        "first_mismatch": None if not diffs else {
            "exponents": [str(e) for e in diffs[0][0]],
            "lhs": str(diffs[0][1]),
            "rhs": str(diffs[0][2]),
        },
    }
    dev = max((abs(complex(a) - complex(b)) for _, a, b in diffs), default=0.0)
    return CheckReport(name=name, passed=not diffs, max_deviation=dev, tolerance=0.0,
                       exact=True, params=params, details=details)
