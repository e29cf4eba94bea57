"""Structure-constant algebras, symmetric linear functions and right modules."""

from __future__ import annotations

from typing import List, Optional, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from . import linalg as la


class StructureError(ValueError):
    """Input data violates an algebra or module axiom."""


class FDAlgebra:
    """Finite-dimensional associative algebra with basis e_0 .. e_{d-1}.

    ``mul[i][j][k]`` is the coefficient of e_k in e_i e_j.  Associativity
    and the unit laws are checked exactly at construction.
    """

    def __init__(self, mul: Sequence, unit: Sequence, check: bool = True):
        d = len(mul)
        if d == 0:
            raise StructureError("algebra of dimension 0")
        self.dim = d
        self.mul = [[[la.to_q(mul[i][j][k]) for k in range(d)] for j in range(d)] for i in range(d)]
        if len(unit) != d:
            raise StructureError("unit has the wrong length")
        self.unit = la.qvec(unit)
        # R[j]: right multiplication by e_j on column coordinates
        self.right = [DomainMatrix([[self.mul[i][j][k] for i in range(d)] for k in range(d)], (d, d), QQ)
                      for j in range(d)]
        self.left = [DomainMatrix([[self.mul[i][j][k] for j in range(d)] for k in range(d)], (d, d), QQ)
                     for i in range(d)]
        if check:
            problems = self.axiom_violations()
            if problems:
                raise StructureError("; ".join(problems[:3]))

    def _combo(self, mats, p: DomainMatrix) -> DomainMatrix:
        coeffs = [row[0] for row in la.rows_of(p)]
        return la.linear_combination(coeffs, mats, mats[0].shape)

    def right_matrix(self, p: DomainMatrix) -> DomainMatrix:
        """Matrix of ``x -> x p``."""
        return self._combo(self.right, p)

    def left_matrix(self, p: DomainMatrix) -> DomainMatrix:
        """Matrix of ``x -> p x``."""
        return self._combo(self.left, p)

    def product(self, p: DomainMatrix, q: DomainMatrix) -> DomainMatrix:
        return self.right_matrix(q) * p

    def basis(self, i: int) -> DomainMatrix:
        return la.unit_vector(self.dim, i)

    def axiom_violations(self) -> List[str]:
        d = self.dim
        out = []
        for j in range(d):
            for k in range(d):
                # (x e_j) e_k = x (e_j e_k) for every x
                lhs = self.right[k] * self.right[j]
                rhs = la.linear_combination(self.mul[j][k], self.right, (d, d))
                if not la.eq(lhs, rhs):
                    out.append(f"associativity fails for (e_i e_{j}) e_{k}")
        if not la.eq(self.right_matrix(self.unit), la.eye(d)):
            out.append("unit is not a right identity")
        if not la.eq(self.left_matrix(self.unit), la.eye(d)):
            out.append("unit is not a left identity")
        return out

    def to_json(self) -> dict:
        d = self.dim
        return {"dim": d,
                "mul": [[[str(la.to_fraction(self.mul[i][j][k])) for k in range(d)] for j in range(d)]
                        for i in range(d)],
                "unit": [str(la.to_fraction(r[0])) for r in la.rows_of(self.unit)]}

    @classmethod
    def from_json(cls, data: dict) -> "FDAlgebra":
        try:
            mul, unit = data["mul"], data["unit"]
        except (KeyError, TypeError) as exc:
            raise StructureError("algebra JSON needs 'mul' and 'unit'") from exc
        if "dim" in data and int(data["dim"]) != len(mul):
            raise StructureError("'dim' disagrees with the size of 'mul'")
        return cls(mul, unit)


class SymFn:
    """Linear function ``phi(p) = sum_i phi_i p_i`` on an algebra."""

    def __init__(self, coeffs: Sequence):
        self.coeffs = [la.to_q(c) for c in coeffs]

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __call__(self, p: DomainMatrix):
        return sum((c * r[0] for c, r in zip(self.coeffs, la.rows_of(p))), QQ(0))

    def to_json(self) -> dict:
        return {"phi": [str(la.to_fraction(c)) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "SymFn":
        if isinstance(data, dict):
            data = data.get("phi")
        if not isinstance(data, list):
            raise StructureError("phi JSON must be a list or {'phi': [...]}")
        return cls(data)


def symmetry_violations(P: FDAlgebra, phi: SymFn) -> List[tuple]:
    """Basis pairs (i, j) with ``phi(e_i e_j) != phi(e_j e_i)``."""
    if phi.dim != P.dim:
        raise StructureError(f"phi has {phi.dim} entries for an algebra of dimension {P.dim}")
    bad = []
    for i in range(P.dim):
        for j in range(i + 1, P.dim):
            if phi(P.product(P.basis(i), P.basis(j))) != phi(P.product(P.basis(j), P.basis(i))):
                bad.append((i, j))
    return bad


def check_symmetric(P: FDAlgebra, phi: SymFn) -> bool:
    """True iff ``phi(pq) = phi(qp)`` on all basis pairs."""
    return not symmetry_violations(P, phi)


class RightModule:
    """Right P-module on column vectors: ``m . e_k = action[k] @ m``.

    Checked: ``action(e_i e_j) = action[j] action[i]`` and ``action(1) = Id``.
    """

    def __init__(self, algebra: FDAlgebra, action: Sequence, check: bool = True):
        if len(action) != algebra.dim:
            raise StructureError(f"{len(action)} action matrices for an algebra of dimension {algebra.dim}")
        self.algebra = algebra
        self.action = [a if isinstance(a, DomainMatrix) else la.qmat(a) for a in action]
        self.dim = self.action[0].shape[0]
        for a in self.action:
            if a.shape != (self.dim, self.dim):
                raise StructureError("action matrices must be square and of equal size")
        if check:
            problems = self.axiom_violations()
            if problems:
                raise StructureError("; ".join(problems[:3]))

    def act(self, p: DomainMatrix) -> DomainMatrix:
        """Matrix of ``m -> m . p``."""
        coeffs = [r[0] for r in la.rows_of(p)]
        return la.linear_combination(coeffs, self.action, (self.dim, self.dim))

    def axiom_violations(self) -> List[str]:
        P = self.algebra
        out = []
        for i in range(P.dim):
            for j in range(P.dim):
                prod = la.linear_combination(P.mul[i][j], self.action, (self.dim, self.dim))
                if not la.eq(prod, self.action[j] * self.action[i]):
                    out.append(f"action of e_{i} e_{j} is not action(e_{j}) action(e_{i})")
        if not la.eq(self.act(P.unit), la.eye(self.dim)):
            out.append("the unit does not act as the identity")
        return out

    def equivariance_violations(self, T: DomainMatrix, target: Optional["RightModule"] = None) -> List[int]:
        """Basis indices k with ``T(m . e_k) != T(m) . e_k``."""
        target = target or self
        if T.shape != (target.dim, self.dim):
            raise StructureError(f"operator shape {T.shape} does not map a {self.dim}-dim module "
                                 f"to a {target.dim}-dim module")
        return [k for k in range(self.algebra.dim) if not la.eq(T * self.action[k], target.action[k] * T)]

    def is_equivariant(self, T: DomainMatrix, target: Optional["RightModule"] = None) -> bool:
        return not self.equivariance_violations(T, target)

    def hom_basis(self, target: "RightModule") -> List[DomainMatrix]:
        """Basis of Hom_P(self, target) as target.dim x self.dim matrices."""
        return la.intertwiner_basis(target.action, self.action, target.dim, self.dim)

    def endomorphism_basis(self) -> List[DomainMatrix]:
        return self.hom_basis(self)

    def conjugate(self, Q: DomainMatrix) -> "RightModule":
        """The same module in the basis given by the columns of Q."""
        Qi = Q.inv()
        return RightModule(self.algebra, [Qi * a * Q for a in self.action], check=False)

    def restrict(self, B: DomainMatrix) -> "RightModule":
        """Submodule spanned by the columns of B (must be P-stable)."""
        return RightModule(self.algebra, [restrict_operator(a, B) for a in self.action], check=False)

    def to_json(self) -> dict:
        return {"dim": self.dim, "action": [la.to_json_rows(a) for a in self.action]}

    @classmethod
    def from_json(cls, algebra: FDAlgebra, data: dict) -> "RightModule":
        try:
            action = data["action"]
        except (KeyError, TypeError) as exc:
            raise StructureError("module JSON needs 'action'") from exc
        M = cls(algebra, action)
        if "dim" in data and int(data["dim"]) != M.dim:
            raise StructureError("'dim' disagrees with the action matrices")
        return M


def restrict_operator(X: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    """Matrix of X on the column span of B, which X must preserve."""
    sol = []
    XB = X * B
    for j in range(B.shape[1]):
        x, _ = la.solve_affine(B, la.column(XB, j))
        if x is None:
            raise StructureError("subspace is not invariant under the operator")
        sol.append([r[0] for r in la.rows_of(x)])
    k = B.shape[1]
    return DomainMatrix([[sol[j][i] for j in range(k)] for i in range(k)], (k, k), QQ)


def direct_sum(*modules: RightModule) -> RightModule:
    P = modules[0].algebra
    dim = sum(M.dim for M in modules)
    action = []
    for k in range(P.dim):
        rows = [[QQ(0)] * dim for _ in range(dim)]
        off = 0
        for M in modules:
            r = la.rows_of(M.action[k])
            for i in range(M.dim):
                for j in range(M.dim):
                    rows[off + i][off + j] = r[i][j]
            off += M.dim
        action.append(DomainMatrix(rows, (dim, dim), QQ))
    return RightModule(P, action, check=False)


# standard algebras and modules

def complex_numbers() -> FDAlgebra:
    """P = C (dimension one)."""
    return FDAlgebra([[[1]]], [1])


def dual_numbers() -> FDAlgebra:
    """C[eps]/(eps^2) with basis (1, eps)."""
    return FDAlgebra([[[1, 0], [0, 1]], [[0, 1], [0, 0]]], [1, 0])


def matrix_algebra(n: int) -> FDAlgebra:
    """n x n matrices with basis E_ab at index a*n + b."""
    d = n * n
    mul = [[[0] * d for _ in range(d)] for _ in range(d)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                mul[a * n + b][b * n + c][a * n + c] = 1
    unit = [1 if a == b else 0 for a in range(n) for b in range(n)]
    return FDAlgebra(mul, unit)


def upper_triangular(n: int) -> FDAlgebra:
    """Upper triangular n x n matrices, basis E_ab (a <= b) in lexicographic order."""
    idx = [(a, b) for a in range(n) for b in range(a, n)]
    pos = {ab: i for i, ab in enumerate(idx)}
    d = len(idx)
    mul = [[[0] * d for _ in range(d)] for _ in range(d)]
    for (a, b), i in pos.items():
        for (c, e), j in pos.items():
            if b == c:
                mul[i][j][pos[(a, e)]] = 1
    unit = [1 if a == b else 0 for a, b in idx]
    return FDAlgebra(mul, unit)


def regular_module(P: FDAlgebra) -> RightModule:
    """P acting on itself by right multiplication."""
    return RightModule(P, list(P.right))


def free_module(P: FDAlgebra, rank: int) -> RightModule:
    return direct_sum(*[regular_module(P)] * rank)


def row_vectors(n: int) -> RightModule:
    """Row vectors of length n over ``matrix_algebra(n)``: ``v . E_ab`` has entry b equal to v_a."""
    P = matrix_algebra(n)
    action = []
    for a in range(n):
        for b in range(n):
            rows = [[0] * n for _ in range(n)]
            rows[b][a] = 1
            action.append(rows)
    return RightModule(P, action)


def trivial_dual_module() -> RightModule:
    """C over the dual numbers with eps acting as 0."""
    return RightModule(dual_numbers(), [[[1]], [[0]]])
