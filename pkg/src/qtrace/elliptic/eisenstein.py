"""Exact q-expansions of the Eisenstein series and the Serre-type derivative."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from ..scalar import Scalar
from ..series import LogSeries, euler_op


@lru_cache(maxsize=None)
def zeta_even(n: int) -> Scalar:
    """``zeta(n)`` for even ``n >= 2`` as an exact rational multiple of ``pi**n``.

    Uses ``zeta(2k) = (-1)**(k+1) B_{2k} (2 pi)**(2k) / (2 (2k)!)``.
    """
    if n < 2 or n % 2:
        raise ValueError("zeta_even needs an even argument >= 2")
    k = n // 2
    b = Fraction(str(sympy.bernoulli(n)))
    r = (-1) ** (k + 1) * b * 2**n / (2 * math.factorial(n))
    return Scalar.rational(r, 0, n)


@lru_cache(maxsize=None)
def zeta_nonpositive(n: int) -> Fraction:
    """``zeta(-n)`` for ``n >= 0`` (rational)."""
    if n < 0:
        raise ValueError("zeta_nonpositive needs n >= 0")
    return Fraction(str(sympy.zeta(-n)))


@lru_cache(maxsize=None)
def divisor_sigma(n: int, power: int) -> int:
    return int(sympy.divisor_sigma(n, power))


@dataclass(frozen=True)
class ModularSeries:
    """A q-expansion tagged with its modular weight."""

    expansion: LogSeries
    weight: int

    def __getitem__(self, n):
        return self.expansion[n]

    @property
    def order(self):
        return None if self.expansion.trunc is None else self.expansion.trunc - 1


@dataclass(frozen=True)
class Eisenstein(ModularSeries):
    """``G~_{2k+2}(q)`` to order ``q**N``."""

    k: int = 0


def eisenstein_coefficient(k: int, n: int) -> Scalar:
    """Coefficient of ``q**n`` in ``G~_{2k+2}``."""
    w = 2 * k + 2
    if n == 0:
        return zeta_even(w) * 2
    return Scalar.two_pi_i_power(w, Fraction(2 * divisor_sigma(n, w - 1), math.factorial(w - 1)))


@lru_cache(maxsize=None)
def eisenstein(k: int, N: int) -> Eisenstein:
    """Exact ``G~_{2k+2}(q) = 2 zeta(2k+2) + 2(2 pi i)^{2k+2}/(2k+1)! sum sigma_{2k+1}(n) q^n``.

    ``k = 0`` gives ``G~_2`` with constant term ``pi**2/3``.  Coefficients of
    ``q**0 .. q**N`` are kept.
    """
    if k < 0 or N < 0:
        raise ValueError("eisenstein needs k >= 0 and N >= 0")
    coefs = [eisenstein_coefficient(k, n) for n in range(N + 1)]
    return Eisenstein(LogSeries.from_coefficients(coefs, var="q"), 2 * k + 2, k)


def eisenstein_weight(weight: int, N: int) -> Eisenstein:
    """``G~_weight`` for even ``weight >= 2``."""
    if weight < 2 or weight % 2:
        raise ValueError("Eisenstein weights are even and >= 2")
    return eisenstein(weight // 2 - 1, N)


def serre_derivative(f, k: int | None = None) -> ModularSeries:
    """``(2 pi i)^2 q d/dq f + k G~_2 f``; raises the modular weight by 2.

    ``f`` may be a :class:`ModularSeries` (its weight is used when ``k`` is
    omitted) or a bare q-series in the variable ``q``.
    """
    if isinstance(f, ModularSeries):
        if k is None:
            k = f.weight
        f = f.expansion
    if k is None:
        raise ValueError("weight k is required for a bare series")
    if f.var != "q":
        raise ValueError("serre_derivative acts on series in q")
    N = f.trunc - 1 if f.trunc is not None else max(int(e) for e in f.exponents() or [0])
    two_pi_i_sq = Scalar.two_pi_i_power(2)
    if f.kind == "float":
        g2 = eisenstein(0, max(N, 0)).expansion.to_float()
        two_pi_i_sq = complex(two_pi_i_sq)
    else:
        g2 = eisenstein(0, max(N, 0)).expansion
    out = euler_op(f) * two_pi_i_sq
    if k:
        out = out + (g2 * f) * k
    return ModularSeries(out, k + 2)
