"""Floating-point evaluation of the q-expansions and a lattice-sum oracle."""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ..series import MultiSeries, LogSeries

TWO_PI_I = 2j * math.pi


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError(f"tau={tau} is not in the upper half-plane")
    return tau


@lru_cache(maxsize=None)
def _sigma_table(power: int, N: int) -> np.ndarray:
    out = np.zeros(N + 1)
    for d in range(1, N + 1):
        out[d::d] += float(d) ** power
    return out


def eisenstein_value(weight: int, tau: complex, q_order: int = 40, qderiv: bool = False) -> complex:
    """``G~_weight(q_tau)`` summed to ``q**q_order``.

    With ``qderiv`` the value of ``(2 pi i)^2 q d/dq G~_weight`` is returned.
    """
    tau = _check_tau(tau)
    if weight < 2 or weight % 2:
        raise ValueError("weight must be even and >= 2")
    q = cmath.exp(TWO_PI_I * tau)
    n = np.arange(q_order + 1)
    coef = 2 * TWO_PI_I**weight / math.factorial(weight - 1) * _sigma_table(weight - 1, q_order)
    if qderiv:
        return complex(TWO_PI_I**2 * np.sum(coef * n * q**n))
    const = 2 * _zeta_float(weight)
    return complex(const + np.sum(coef[1:] * q ** n[1:]))


def _zeta_float(n: int) -> float:
    from .eisenstein import zeta_even
    return complex(zeta_even(n)).real


@lru_cache(maxsize=None)
def _eulerian(n: int) -> Tuple[int, ...]:
    """Eulerian numbers A(n, k), k = 0..n-1."""
    row = [1]
    for i in range(2, n + 1):
        new = [0] * i
        for k in range(i):
            a = (k + 1) * row[k] if k < len(row) else 0
            b = (i - k) * row[k - 1] if k >= 1 else 0
            new[k] = a + b
        row = new
    return tuple(row)


def polylog_neg(s: int, x: complex) -> complex:
    """``Li_{-s}(x) = sum_{l>=1} l^s x^l`` continued as a rational function (s >= 0)."""
    if s == 0:
        return x / (1 - x)
    coeffs = _eulerian(s)
    num = sum(c * x**k for k, c in enumerate(coeffs))
    return x * num / (1 - x) ** (s + 1)


def in_band(z: complex, tau: complex) -> bool:
    """Whether the q-expansion of ``wp~_m(z; q)`` converges (``|Im z| < Im tau``)."""
    return abs(complex(z).imag) < complex(tau).imag


def wp_value(m: int, z: complex, tau: complex, q_order: int = 40, qderiv: bool = False) -> complex:
    """``wp~_m(z; q_tau)`` from its q-expansion, holding ``q_z`` in closed form.

    ``(-1)^m [ (2 pi i)^m/(m-1)! ( Li_{1-m}(q_z) + sum_{n=1}^{q_order} q^n
    sum_{l|n} l^{m-1} (q_z^l + (-1)^m q_z^{-l}) ) - d^{m-1}/dz^{m-1}(G~_2 z - pi i) ]``

    Converges for ``|Im z| < Im tau``.  With ``qderiv`` returns
    ``(2 pi i)^2 q d/dq`` of the same expression at fixed ``z``.
    """
    tau = _check_tau(tau)
    z = complex(z)
    if m < 1:
        raise ValueError("m >= 1 required")
    if not in_band(z, tau):
        raise ValueError(f"z={z} is outside the convergence band |Im z| < Im tau={tau.imag}")
    q = cmath.exp(TWO_PI_I * tau)
    x = cmath.exp(TWO_PI_I * z)
    total = 0j if qderiv else polylog_neg(m - 1, x)
    sign = (-1) ** m
    qn = 1.0 + 0j
    for n in range(1, q_order + 1):
        qn *= q
        inner = 0j
        for l in range(1, n + 1):
            if n % l == 0:
                inner += l ** (m - 1) * (x**l + sign * x ** (-l))
        total += (n if qderiv else 1) * qn * inner
    total *= TWO_PI_I**m / math.factorial(m - 1)
    if qderiv:
        total *= TWO_PI_I**2
    if m == 1:
        g2 = eisenstein_value(2, tau, q_order, qderiv)
        total -= g2 * z if qderiv else g2 * z - cmath.pi * 1j
    elif m == 2:
        total -= eisenstein_value(2, tau, q_order, qderiv)
    return sign * total


def wp_lattice(m: int, z: complex, tau: complex, N: int = 60) -> complex:
    """Direct lattice sum over ``|k|, |l| <= N`` for ``m`` in {2, 3}.

    ``wp_2 = 1/z^2 + sum' (1/(z-w)^2 - 1/w^2)``, ``wp_3 = sum_w 1/(z-w)^3``
    with ``w = k tau + l``.
    """
    z, tau = complex(z), _check_tau(tau)
    k = np.arange(-N, N + 1)[:, None]
    l = np.arange(-N, N + 1)[None, :]
    w = (k * tau + l).ravel()
    w = w[w != 0]
    if m == 2:
        return complex(1 / z**2 + np.sum(1 / (z - w) ** 2 - 1 / w**2))
    if m == 3:
        return complex(1 / z**3 + np.sum(1 / (z - w) ** 3))
    raise ValueError("lattice oracle implemented for m = 2, 3")


def wp_lattice_extrapolated(m: int, z: complex, tau: complex, N: int = 60) -> complex:
    """Box sums at N, 4N/5, 2N/3 and N/2 extrapolated to the full lattice.

    The box-truncation error expands as ``a/N^2 + b/N^3 + c/N^4 + ...``; the
    four sums are combined to cancel the first three terms.  No box exceeds N.
    """
    sizes = (N, (4 * N) // 5, (2 * N) // 3, N // 2)
    powers = (2, 3, 4)
    A = np.array([[1.0] + [float(n) ** -p for p in powers] for n in sizes])
    vals = np.array([wp_lattice(m, z, tau, n) for n in sizes])
    return complex(np.linalg.solve(A, vals)[0])


def _var_values(s: MultiSeries, z: Sequence[complex], tau: complex) -> dict:
    tau = _check_tau(tau)
    zs = list(z) if isinstance(z, (list, tuple)) else [z]
    values = {}
    zi = 0
    for v in s.vars:
        if v == "q":
            values[v] = cmath.exp(TWO_PI_I * tau)
        elif v == "log q":
            values[v] = TWO_PI_I * tau
        elif v == "x":
            values[v] = cmath.exp(TWO_PI_I * complex(zs[0]))
        elif v.startswith("z"):
            idx = int(v[1:]) - 1 if len(v) > 1 else zi
            values[v] = complex(zs[idx])
            zi += 1
        elif v.startswith("log "):
            values[v] = cmath.log(values[v[4:]])
        else:
            raise KeyError(f"no evaluation rule for variable {v!r}")
    return values


def eval_at(s, z: Sequence[complex] = (), tau: complex = 1j) -> Tuple[complex, float]:
    """Numeric value of a series at ``(z; tau)`` plus a tail estimate.

    ``q`` is ``e^{2 pi i tau}``, ``log q`` is ``2 pi i tau``, ``x`` is
    ``q_z``; variables ``z``, ``z1``, ``z2``, ... take the entries of ``z``.
    The tail estimate is the magnitude of the highest-order retained term.
    """
    if isinstance(s, LogSeries):
        s = s.to_multi()
    elif hasattr(s, "expansion"):
        s = s.expansion
    return s.evaluate(_var_values(s, z, tau))
