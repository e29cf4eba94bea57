"""Finitely supported N^n-indexed families of functions and the operators acting on them."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from ..elliptic import numeric
from ..elliptic.eisenstein import eisenstein
from ..group import GroupElement, parse_group_element
from ..scalar import Scalar
from ..series import MultiSeries, euler_op

Index = Tuple[int, ...]
Evaluator = Callable[[Tuple[complex, ...], complex], complex]

EVALUATOR = "evaluator"
SERIES = "series"
TWO_PI_I = 2j * math.pi

DEFAULT_SUPPORT_BOUND = 4


def _zero(z, tau):
    return 0j


class VectorSeq:
    """``Phi = (phi_mu)`` indexed by mu in N^n, zero outside a finite support.

    Components are either evaluators ``f(z, tau) -> complex`` with ``z`` an
    n-tuple, or series in (q, log q, z1, ..., zn).
    """

    def __init__(self, n: int, components: Mapping[Sequence[int], object],
                 support_bound: int = DEFAULT_SUPPORT_BOUND, q_order: int = 40):
        if n < 1:
            raise ValueError("n >= 1 required")
        self.n = n
        self.support_bound = support_bound
        self.q_order = q_order
        comps: Dict[Index, object] = {}
        kinds = set()
        for mu, f in components.items():
            mu = tuple(int(i) for i in mu)
            if len(mu) != n or min(mu) < 0:
                raise ValueError(f"index {mu} is not in N^{n}")
            if max(mu) > support_bound:
                raise ValueError(f"index {mu} exceeds the support bound {support_bound}")
            if isinstance(f, MultiSeries):
                kinds.add(SERIES)
                if f.is_zero():
                    continue
            elif callable(f):
                kinds.add(EVALUATOR)
            else:
                raise TypeError(f"component {mu} is neither a series nor a callable")
            comps[mu] = f
        if len(kinds) > 1:
            raise TypeError("evaluator and series components cannot be mixed")
        self.mode = kinds.pop() if kinds else EVALUATOR
        self.components = comps

    def _like(self, comps) -> "VectorSeq":
        return VectorSeq(self.n, comps, self.support_bound, self.q_order)

    @property
    def support(self):
        return sorted(self.components)

    def component(self, mu: Sequence[int]):
        return self.components.get(tuple(mu))

    def is_zero(self) -> bool:
        return not self.components

    def evaluate(self, z: Sequence[complex], tau: complex) -> Dict[Index, complex]:
        z = tuple(complex(v) for v in z)
        if len(z) != self.n:
            raise ValueError(f"expected {self.n} z-values")
        out = {}
        for mu, f in self.components.items():
            if self.mode == SERIES:
                out[mu] = numeric.eval_at(f, z, tau)[0]
            else:
                out[mu] = complex(f(z, tau))
        return out

    def __add__(self, other: "VectorSeq") -> "VectorSeq":
        self._check(other)
        comps = dict(self.components)
        for mu, g in other.components.items():
            if mu in comps:
                f = comps[mu]
                comps[mu] = f + g if self.mode == SERIES else _sum_fn(f, g)
            else:
                comps[mu] = g
        return self._like(comps)

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "VectorSeq":
        if self.mode == SERIES:
            return self._like({mu: f * c for mu, f in self.components.items()})
        c = complex(c)
        return self._like({mu: _scaled_fn(f, c) for mu, f in self.components.items()})

    def times(self, fn) -> "VectorSeq":
        """Multiply every component by a function of (z, tau) (or a series in series mode)."""
        if self.mode == SERIES:
            return self._like({mu: f * fn for mu, f in self.components.items()})
        return self._like({mu: _product_fn(f, fn) for mu, f in self.components.items()})

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("families over different numbers of variables")
        if self.mode != other.mode and self.components and other.components:
            raise TypeError("cannot combine evaluator and series families")

    def max_deviation(self, other: "VectorSeq", samples) -> float:
        dev = 0.0
        for z, tau in samples:
            a, b = self.evaluate(z, tau), other.evaluate(z, tau)
            for mu in set(a) | set(b):
                dev = max(dev, abs(a.get(mu, 0j) - b.get(mu, 0j)))
        return dev


def _sum_fn(f, g):
    return lambda z, tau: f(z, tau) + g(z, tau)


def _scaled_fn(f, c):
    return lambda z, tau: c * f(z, tau)


def _product_fn(f, g):
    return lambda z, tau: f(z, tau) * g(z, tau)


def shift(Phi: VectorSeq, j: int) -> VectorSeq:
    """``(d_j Phi)_mu = phi_{mu + e_j}`` (j is 1-based)."""
    if not 1 <= j <= Phi.n:
        raise ValueError(f"shift index j={j} out of range 1..{Phi.n}")
    comps = {}
    for mu, f in Phi.components.items():
        if mu[j - 1] >= 1:
            nu = mu[:j - 1] + (mu[j - 1] - 1,) + mu[j:]
            comps[nu] = f
    return Phi._like(comps)


def shift_sum(Phi: VectorSeq) -> VectorSeq:
    """``sum_i d_i Phi``."""
    out = Phi._like({})
    for i in range(1, Phi.n + 1):
        out = out + shift(Phi, i)
    return out


# finite differences

@dataclass(frozen=True)
class Stencil:
    """Central differences with step ``h``; Richardson combines h and h/2."""

    step: float = 1e-5
    richardson: bool = False

    def derivative(self, g: Callable[[complex], complex], x: complex) -> complex:
        def central(h):
            return (g(x + h) - g(x - h)) / (2 * h)
        d = central(self.step)
        if self.richardson:
            d = (4 * central(self.step / 2) - d) / 3
        return d


DEFAULT_STENCIL = Stencil()


def _dtau(f, z, tau, st: Stencil) -> complex:
    return st.derivative(lambda t: f(z, t), tau)


def _dz(f, z, tau, i: int, st: Stencil) -> complex:
    def g(w):
        zz = list(z)
        zz[i] = w
        return f(tuple(zz), tau)
    return st.derivative(g, z[i])


def _O_evaluator(f, n: int, j: int, alpha: complex, st: Stencil, q_order: int):
    def out(z, tau):
        g2 = numeric.eisenstein_value(2, tau, q_order)
        val = TWO_PI_I * _dtau(f, z, tau, st) + g2 * alpha * f(z, tau)
        for i in range(n):
            d = _dz(f, z, tau, i, st)
            val += g2 * z[i] * d
            if i != j - 1:
                val -= numeric.wp_value(1, z[i] - z[j - 1], tau, q_order) * d
        return val
    return out


def _g2_series(q_order: int) -> MultiSeries:
    g2 = eisenstein(0, q_order).expansion
    return MultiSeries({(n,): c for (n, _), c in g2.terms.items()}, vars=("q",), trunc=(q_order + 1,))


def _exact_alpha(alpha):
    if isinstance(alpha, (int, Fraction)):
        return Fraction(alpha)
    if isinstance(alpha, Scalar):
        return alpha
    raise TypeError("series mode needs an exact alpha (int or Fraction)")


def _O_series(f: MultiSeries, n: int, j: int, alpha, q_order: int) -> MultiSeries:
    if n != 1:
        raise NotImplementedError("series mode supports n = 1 only")
    zvar = next(v for v in f.vars if v.startswith("z"))
    two_pi_i_sq = Scalar.two_pi_i_power(2)
    body = euler_op(f, "q") * two_pi_i_sq if "q" in f.vars else f * 0
    inner = f * _exact_alpha(alpha) + f.euler(zvar)
    return body + _g2_series(q_order) * inner


def apply_O(Phi: VectorSeq, j: int, alpha, stencil: Stencil = DEFAULT_STENCIL) -> VectorSeq:
    """Component-wise
    ``O_j(alpha) = (2 pi i)^2 q d/dq + G~_2 alpha + G~_2 sum_i z_i d/dz_i - sum_{i != j} wp~_1(z_i - z_j) d/dz_i``.
    """
    if not 1 <= j <= Phi.n:
        raise ValueError(f"j={j} out of range 1..{Phi.n}")
    if Phi.mode == SERIES:
        return Phi._like({mu: _O_series(f, Phi.n, j, alpha, Phi.q_order)
                          for mu, f in Phi.components.items()})
    alpha = complex(alpha)
    return Phi._like({mu: _O_evaluator(f, Phi.n, j, alpha, stencil, Phi.q_order)
                      for mu, f in Phi.components.items()})


def g2_times(Phi: VectorSeq) -> VectorSeq:
    if Phi.mode == SERIES:
        return Phi.times(_g2_series(Phi.q_order))
    q_order = Phi.q_order
    return Phi.times(lambda z, tau: numeric.eisenstein_value(2, tau, q_order))


def apply_D(Phi: VectorSeq, j: int, alpha, stencil: Stencil = DEFAULT_STENCIL) -> VectorSeq:
    """``D_j(alpha) = O_j(alpha) + G~_2 sum_i d_i``."""
    return apply_O(Phi, j, alpha, stencil) + g2_times(shift_sum(Phi))


def apply_D_product(Phi: VectorSeq, j: int, alphas: Sequence, stencil: Stencil = DEFAULT_STENCIL) -> VectorSeq:
    """``prod_{l=1}^k D_j(alpha_l) Phi``, the rightmost factor applied first."""
    out = Phi
    for a in reversed(list(alphas)):
        out = apply_D(out, j, a, stencil)
    return out


def apply_action(Phi: VectorSeq, g, a, log_shift: Union[int, Callable[[complex], int]] = 0) -> VectorSeq:
    """``Phi|_{g,a}``:
    ``(c tau + d)^{-a} prod_i exp(-log(c tau + d) d_i) Phi(z/(c tau + d); g tau)``.

    ``log(c tau + d)`` is the principal branch plus ``2 pi i log_shift``
    (an integer or a function of tau); the same logarithm defines the power.
    """
    if Phi.mode != EVALUATOR:
        raise TypeError("the SL2(Z) action needs evaluator components")
    g = parse_group_element(g)
    a = complex(a)
    comps = dict(Phi.components)
    n = Phi.n

    def transformed(mu):
        def out(z, tau):
            jt = g.j(tau)
            k_shift = log_shift(tau) if callable(log_shift) else log_shift
            L = g.log_j(tau) + TWO_PI_I * k_shift
            zp = tuple(v / jt for v in z)
            tp = g.act(tau)
            total = 0j
            for nu, f in comps.items():
                k = tuple(b - c for b, c in zip(nu, mu))
                if min(k) < 0:
                    continue
                coef = 1.0 + 0j
                for ki in k:
                    coef *= (-L) ** ki / math.factorial(ki)
                total += coef * f(zp, tp)
            return cmath.exp(-a * L) * total
        return out

    # mu ranges over indices dominated by the support
    targets = set()
    for nu in comps:
        for mu in itertools.product(*[range(c + 1) for c in nu]):
            targets.add(mu)
    return Phi._like({mu: transformed(mu) for mu in sorted(targets)})


class ModularOperator:
    """Composition tree over the primitives O_j(alpha), D_j(alpha), d_i and scalars.

    ``weight_gain`` is 2 per O or D node and 0 for shifts and scalars.
    """

    def __init__(self, node: tuple):
        kind = node[0]
        if kind not in ("O", "D", "shift", "scale", "compose", "identity"):
            raise ValueError(f"unknown operator node {kind!r}")
        self.node = node

    @classmethod
    def O(cls, j: int, alpha) -> "ModularOperator":
        return cls(("O", j, alpha))

    @classmethod
    def D(cls, j: int, alpha) -> "ModularOperator":
        return cls(("D", j, alpha))

    @classmethod
    def shift(cls, i: int) -> "ModularOperator":
        return cls(("shift", i))

    @classmethod
    def scale(cls, c) -> "ModularOperator":
        return cls(("scale", c))

    @classmethod
    def identity(cls) -> "ModularOperator":
        return cls(("identity",))

    @classmethod
    def D_product(cls, j: int, alphas: Sequence) -> "ModularOperator":
        op = cls.identity()
        for a in alphas:
            op = op @ cls.D(j, a)
        return op

    def __matmul__(self, other: "ModularOperator") -> "ModularOperator":
        """``self @ other`` applies ``other`` first."""
        return ModularOperator(("compose", self, other))

    @property
    def weight_gain(self) -> int:
        kind = self.node[0]
        if kind in ("O", "D"):
            return 2
        if kind == "compose":
            return self.node[1].weight_gain + self.node[2].weight_gain
        return 0

    def apply(self, Phi: VectorSeq, stencil: Stencil = DEFAULT_STENCIL) -> VectorSeq:
        kind = self.node[0]
        if kind == "O":
            return apply_O(Phi, self.node[1], self.node[2], stencil)
        if kind == "D":
            return apply_D(Phi, self.node[1], self.node[2], stencil)
        if kind == "shift":
            return shift(Phi, self.node[1])
        if kind == "scale":
            return Phi.scaled(self.node[1])
        if kind == "identity":
            return Phi
        return self.node[1].apply(self.node[2].apply(Phi, stencil), stencil)

    def __repr__(self):
        kind = self.node[0]
        if kind == "compose":
            return f"{self.node[1]!r} {self.node[2]!r}"
        if kind == "identity":
            return "1"
        return f"{kind}{self.node[1:]}"
