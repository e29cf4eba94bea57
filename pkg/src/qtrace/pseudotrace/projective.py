"""Projective bases and the pseudotrace ``phi_M(T) = phi(sum_i alpha_i(T(m_i)))``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..report import CheckReport
from . import linalg as la
from .algebra import FDAlgebra, RightModule, StructureError, SymFn, symmetry_violations


class NotEquivariant(ValueError):
    """An operator fails to commute with the action of some algebra basis element."""

    def __init__(self, what: str, indices: Sequence[int]):
        self.indices = list(indices)
        names = ", ".join(f"e_{k}" for k in self.indices)
        super().__init__(f"{what} is not P-equivariant: fails for basis element(s) {names}")


class InvalidProjectiveBasis(ValueError):
    pass


@dataclass(frozen=True)
class NotProjective:
    """Verdict: the projective-basis linear system has no solution."""

    reason: str

    def __bool__(self):
        return False


@dataclass
class ProjBasis:
    """Elements m_i of M with P-linear functionals alpha_i : M -> P (dim P x dim M matrices)."""

    module: RightModule
    elements: List[DomainMatrix]
    functionals: List[DomainMatrix]
    null_directions: List[List[DomainMatrix]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.elements) != len(self.functionals):
            raise InvalidProjectiveBasis("need as many functionals as elements")

    @property
    def size(self) -> int:
        return len(self.elements)

    def violations(self) -> List[str]:
        M = self.module
        P = M.algebra
        out = []
        for i, A in enumerate(self.functionals):
            if A.shape != (P.dim, M.dim):
                out.append(f"alpha_{i} has shape {A.shape}")
                continue
            bad = [k for k in range(P.dim) if not la.eq(A * M.action[k], P.right[k] * A)]
            if bad:
                out.append(f"alpha_{i} is not P-linear (basis element(s) {bad})")
        if out:
            return out
        if not la.eq(self.reconstruction(), la.eye(M.dim)):
            out.append("sum_i m_i alpha_i(m) != m")
        return out

    def reconstruction(self) -> DomainMatrix:
        """Matrix of ``m -> sum_i m_i . alpha_i(m)``."""
        M = self.module
        total = la.zeros(M.dim, M.dim)
        for m, A in zip(self.elements, self.functionals):
            # m . p = sum_k p_k action[k] m, so the map is sum_k (action[k] m) (row k of A)
            for k in range(M.algebra.dim):
                col = M.action[k] * m
                row = A.extract([k], list(range(M.dim)))
                total = total + col * row
        return total

    def verify(self) -> "ProjBasis":
        problems = self.violations()
        if problems:
            raise InvalidProjectiveBasis("; ".join(problems))
        return self

    def transformed(self, U: DomainMatrix) -> "ProjBasis":
        """Basis ``{U m_i}, {alpha_i U^{-1}}`` for an invertible P-equivariant U."""
        Ui = U.inv()
        return ProjBasis(self.module, [U * m for m in self.elements],
                         [A * Ui for A in self.functionals])

    def to_json(self) -> dict:
        return {"elements": [[str(la.to_fraction(r[0])) for r in la.rows_of(m)] for m in self.elements],
                "functionals": [la.to_json_rows(A) for A in self.functionals]}


def _projective_system(M: RightModule):
    """Linear system in the entries of alpha_0 .. alpha_{s-1}, with m_i the standard basis of M."""
    P = M.algebra
    dP, dM = P.dim, M.dim
    s = dM
    block = dP * dM
    n_unknowns = s * block
    act = [la.rows_of(a) for a in M.action]
    right = [la.rows_of(r) for r in P.right]
    rows, rhs = [], []

    def var(i, k, c):
        return i * block + k * dM + c

    # P-linearity: A_i action[k] - right[k] A_i = 0
    for i in range(s):
        for k in range(dP):
            for a in range(dP):
                for b in range(dM):
                    row = {}
                    for c in range(dM):
                        if act[k][c][b] != 0:
                            key = var(i, a, c)
                            row[key] = row.get(key, QQ(0)) + act[k][c][b]
                    for c in range(dP):
                        if right[k][a][c] != 0:
                            key = var(i, c, b)
                            row[key] = row.get(key, QQ(0)) - right[k][a][c]
                    if any(v != 0 for v in row.values()):
                        rows.append(row)
                        rhs.append(QQ(0))
    # reproduction: sum_i sum_k action[k][r][i] A_i[k][c] = delta_rc
    for r in range(dM):
        for c in range(dM):
            row = {}
            for i in range(s):
                for k in range(dP):
                    if act[k][r][i] != 0:
                        key = var(i, k, c)
                        row[key] = row.get(key, QQ(0)) + act[k][r][i]
            rows.append(row)
            rhs.append(QQ(1) if r == c else QQ(0))
    dense = [[row.get(j, QQ(0)) for j in range(n_unknowns)] for row in rows]
    A = DomainMatrix(dense, (len(dense), n_unknowns), QQ)
    b = DomainMatrix([[v] for v in rhs], (len(rhs), 1), QQ)
    return A, b, s, block


def find_projective_basis(M: RightModule):
    """Certified projective basis of M, or a :class:`NotProjective` verdict.

    The elements m_i are the standard basis vectors of M and the functionals
    are the particular solution (free parameters zero) of the exact linear
    system expressing P-linearity and ``sum_i m_i alpha_i(m) = m``.
    """
    A, b, s, block = _projective_system(M)
    x, null = la.solve_affine(A, b)
    if x is None:
        return NotProjective("no P-linear functionals reproduce every module element")
    dP, dM = M.algebra.dim, M.dim
    elements = [la.unit_vector(dM, i) for i in range(s)]
    functionals = [la.vec_to_matrix(x, dP, dM, i * block) for i in range(s)]
    directions = [[la.vec_to_matrix(v, dP, dM, i * block) for i in range(s)] for v in null]
    return ProjBasis(M, elements, functionals, directions).verify()


def is_projective(M: RightModule) -> bool:
    return not isinstance(find_projective_basis(M), NotProjective)


def pseudotrace(phi: SymFn, basis: ProjBasis, T) -> Fraction:
    """``phi(sum_i alpha_i(T m_i))`` for T in End_P(M)."""
    M = basis.module
    T = T if isinstance(T, DomainMatrix) else la.qmat(T)
    if phi.dim != M.algebra.dim:
        raise StructureError(f"phi has {phi.dim} entries for an algebra of dimension {M.algebra.dim}")
    bad = M.equivariance_violations(T)
    if bad:
        raise NotEquivariant("operator", bad)
    total = la.zeros(M.algebra.dim, 1)
    for m, A in zip(basis.elements, basis.functionals):
        total = total + A * (T * m)
    return la.to_fraction(phi(total))


def module_pseudotrace(phi: SymFn, M: RightModule, T) -> Fraction:
    """Pseudotrace on M using the basis found by :func:`find_projective_basis`."""
    B = find_projective_basis(M)
    if isinstance(B, NotProjective):
        raise StructureError(f"module is not projective: {B.reason}")
    return pseudotrace(phi, B, T)


def _random_rational(rng: random.Random, height: int = 5) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_combination(mats: Sequence[DomainMatrix], shape, rng: random.Random, height: int = 5):
    return la.linear_combination([_random_rational(rng, height) for _ in mats], mats, shape)


def random_equivariant(M1: RightModule, M2: RightModule, rng: random.Random) -> DomainMatrix:
    """A random element of Hom_P(M1, M2) with small rational coordinates."""
    basis = M1.hom_basis(M2)
    if not basis:
        return la.zeros(M2.dim, M1.dim)
    return random_combination(basis, (M2.dim, M1.dim), rng)


def random_automorphism(M: RightModule, rng: random.Random, tries: int = 50) -> DomainMatrix:
    basis = M.endomorphism_basis()
    for _ in range(tries):
        U = random_combination(basis, (M.dim, M.dim), rng)
        if U.det() != 0:
            return U
    return la.eye(M.dim)


def random_projective_basis(basis: ProjBasis, rng: random.Random) -> ProjBasis:
    """Another valid basis: shift along the solution space, then conjugate by a random automorphism."""
    functionals = list(basis.functionals)
    for direction in basis.null_directions:
        c = la.to_q(_random_rational(rng))
        if c != 0:
            functionals = [A + D * c for A, D in zip(functionals, direction)]
    shifted = ProjBasis(basis.module, list(basis.elements), functionals)
    return shifted.transformed(random_automorphism(basis.module, rng)).verify()


def basis_independence_check(phi: SymFn, M: RightModule, T, trials: int = 5,
                             seed: int = 0) -> CheckReport:
    """Pseudotrace of T under the found basis and ``trials`` randomized valid bases."""
    rng = random.Random(seed)
    base = find_projective_basis(M)
    if isinstance(base, NotProjective):
        raise StructureError(f"module is not projective: {base.reason}")
    ref = pseudotrace(phi, base, T)
    values = [ref]
    for _ in range(trials):
        values.append(pseudotrace(phi, random_projective_basis(base, rng), T))
    dev = max(abs(float(v - ref)) for v in values)
    return CheckReport(
        name="pseudotrace_basis_independence",
        passed=all(v == ref for v in values),
        max_deviation=dev,
        exact=True,
        params={"trials": trials, "seed": seed, "module_dim": M.dim},
        details={"values": [str(v) for v in values]},
    )


def cyclicity_check(phi: SymFn, M1: RightModule, M2: RightModule, alpha, beta) -> CheckReport:
    """``phi_{M1}(beta alpha) = phi_{M2}(alpha beta)`` for alpha: M1 -> M2, beta: M2 -> M1."""
    alpha = alpha if isinstance(alpha, DomainMatrix) else la.qmat(alpha)
    beta = beta if isinstance(beta, DomainMatrix) else la.qmat(beta)
    bad = M1.equivariance_violations(alpha, M2)
    if bad:
        raise NotEquivariant("alpha", bad)
    bad = M2.equivariance_violations(beta, M1)
    if bad:
        raise NotEquivariant("beta", bad)
    lhs = module_pseudotrace(phi, M1, beta * alpha)
    rhs = module_pseudotrace(phi, M2, alpha * beta)
    return CheckReport(
        name="pseudotrace_cyclicity",
        passed=lhs == rhs,
        max_deviation=abs(float(lhs - rhs)),
        exact=True,
        params={"dim_M1": M1.dim, "dim_M2": M2.dim},
        details={"lhs": str(lhs), "rhs": str(rhs)},
    )


def require_symmetric(P: FDAlgebra, phi: SymFn) -> None:
    bad = symmetry_violations(P, phi)
    if bad:
        i, j = bad[0]
        raise StructureError(f"phi is not symmetric: phi(e_{i} e_{j}) != phi(e_{j} e_{i})")
