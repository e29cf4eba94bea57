"""Seeded random data: modules, operators and graded spaces with small rational entries."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from . import linalg as la
from .algebra import FDAlgebra, RightModule, complex_numbers, direct_sum, regular_module
from .graded import GradedSpace


def random_rational(rng: random.Random, height: int = 5) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_matrix(rng: random.Random, r: int, c: int, height: int = 5):
    return la.qmat([[random_rational(rng, height) for _ in range(c)] for _ in range(r)])


def random_invertible(rng: random.Random, n: int, height: int = 3):
    while True:
        Q = random_matrix(rng, n, n, height)
        if Q.det() != 0:
            return Q


def random_module_over_C(rng: random.Random, max_dim: int = 5) -> RightModule:
    n = rng.randint(1, max_dim)
    return RightModule(complex_numbers(), [la.eye(n)])


def random_free_module(P: FDAlgebra, rng: random.Random, max_rank: int = 2) -> RightModule:
    """P^r written in a random basis."""
    M = direct_sum(*[regular_module(P)] * rng.randint(1, max_rank))
    return M.conjugate(random_invertible(rng, M.dim))


def random_graded_space(rng: random.Random, max_dim: int = 5, weights=None) -> GradedSpace:
    """P = C, N = 0, S diagonalizable with small rational weights in a random basis."""
    n = rng.randint(1, max_dim)
    pool = weights or [Fraction(k, 2) for k in range(-2, 7)]
    diag = [rng.choice(pool) for _ in range(n)]
    D = la.qmat([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])
    Q = random_invertible(rng, n)
    return GradedSpace(Q * D * Q.inv())


def random_logarithmic_space(rng: random.Random, h: Optional[Fraction] = None) -> GradedSpace:
    """A Jordan block S = h Id, N = E_12 plus a semisimple summand, over P = C."""
    h = h if h is not None else random_rational(rng, 3)
    k = rng.randint(0, 2)
    n = 2 + k
    S = [[0] * n for _ in range(n)]
    N = [[0] * n for _ in range(n)]
    S[0][0] = S[1][1] = h
    N[0][1] = 1
    for i in range(2, n):
        S[i][i] = h + rng.randint(1, 3)
    return GradedSpace(S, N)
