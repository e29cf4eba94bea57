"""Integer matrices of determinant one acting on the upper half-plane."""

from __future__ import annotations

import cmath
from dataclasses import dataclass


@dataclass(frozen=True)
class GroupElement:
    """``g = ((alpha, beta), (gamma, delta))`` in SL2(Z)."""

    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        for v in (self.alpha, self.beta, self.gamma, self.delta):
            if not isinstance(v, int):
                raise TypeError("SL2(Z) entries must be integers")
        if self.alpha * self.delta - self.beta * self.gamma != 1:
            raise ValueError(f"determinant of {self.as_tuple()} is not 1")

    def as_tuple(self):
        return ((self.alpha, self.beta), (self.gamma, self.delta))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        a, b, c, d = self.alpha, self.beta, self.gamma, self.delta
        e, f, g, h = other.alpha, other.beta, other.gamma, other.delta
        return GroupElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.delta, -self.beta, -self.gamma, self.alpha)

    def j(self, tau: complex) -> complex:
        """Automorphy factor ``gamma*tau + delta``."""
        val = self.gamma * tau + self.delta
        if val == 0:
            raise ZeroDivisionError("gamma*tau + delta vanishes")
        return val

    def log_j(self, tau: complex) -> complex:
        """Principal branch of ``log(gamma*tau + delta)``."""
        return cmath.log(self.j(tau))

    def act(self, tau: complex) -> complex:
        if tau.imag <= 0:
            raise ValueError(f"tau={tau} is not in the upper half-plane")
        return (self.alpha * tau + self.beta) / self.j(tau)

    def __str__(self):
        for name, g in NAMED.items():
            if g == self:
                return name
        return f"[[{self.alpha},{self.beta}],[{self.gamma},{self.delta}]]"


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)
S_INV = S.inverse()
T_INV = T.inverse()

NAMED = {"I": IDENTITY, "S": S, "T": T, "S^-1": S_INV, "T^-1": T_INV}
GENERATORS = (S, T, S_INV, T_INV)


def parse_group_element(value) -> GroupElement:
    """Accept a generator name, a 2x2 nested list, or a GroupElement."""
    if isinstance(value, GroupElement):
        return value
    if isinstance(value, str):
        key = value.strip().replace("inv", "^-1").replace("^^", "^")
        if key in NAMED:
            return NAMED[key]
        raise ValueError(f"unknown group element {value!r}")
    (a, b), (c, d) = value
    return GroupElement(int(a), int(b), int(c), int(d))


def branch_defect(g1: GroupElement, g2: GroupElement, tau: complex) -> int:
    """Integer k with log j(g1, g2 tau) + log j(g2, tau) = log j(g1 g2, tau) + 2 pi i k.

    Non-zero k means the principal branch of ``log(gamma*tau + delta)`` is
    not additive along this product, so log-mixing components pick up a
    monodromy factor.
    """
    lhs = g1.log_j(g2.act(tau)) + g2.log_j(tau)
    rhs = (g1 @ g2).log_j(tau)
    return round(((lhs - rhs) / (2j * cmath.pi)).real)
