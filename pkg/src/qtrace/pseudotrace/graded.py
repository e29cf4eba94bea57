"""Graded spaces with a non-semisimple grading operator L(0) = S + N and their formal q-pseudotraces."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..series import LogSeries
from . import linalg as la
from .algebra import FDAlgebra, RightModule, StructureError, SymFn, complex_numbers, restrict_operator
from .projective import NotEquivariant, NotProjective, find_projective_basis, pseudotrace


class NonProjectiveEigenspace(StructureError):
    def __init__(self, weight: Fraction, reason: str):
        self.weight = weight
        super().__init__(f"eigenspace of weight {weight} is not a projective module: {reason}")


class GradedSpace:
    """Finite-dimensional space with semisimple part S, nilpotent part N and a right P-action.

    S must be diagonalizable with rational eigenvalues, ``SN = NS``, and the
    P-action must commute with S and N.
    """

    def __init__(self, S, N=None, action: Optional[Sequence] = None,
                 algebra: Optional[FDAlgebra] = None, check: bool = True):
        self.S = S if isinstance(S, DomainMatrix) else la.qmat(S)
        self.dim = self.S.shape[0]
        if self.S.shape != (self.dim, self.dim):
            raise StructureError("S must be square")
        if N is None:
            self.N = la.zeros(self.dim, self.dim)
        else:
            self.N = N if isinstance(N, DomainMatrix) else la.qmat(N)
        self.algebra = algebra or complex_numbers()
        if action is None:
            if self.algebra.dim != 1:
                raise StructureError("an action is required for an algebra of dimension > 1")
            action = [la.eye(self.dim)]
        self.module = RightModule(self.algebra, action)
        if self.module.dim != self.dim:
            raise StructureError("the action does not match the dimension of S")
        self._eigen = None
        if check:
            problems = self.axiom_violations()
            if problems:
                raise StructureError("; ".join(problems))

    @property
    def L0(self) -> DomainMatrix:
        return self.S + self.N

    def axiom_violations(self) -> List[str]:
        out = []
        if self.N.shape != self.S.shape:
            return ["N and S have different shapes"]
        power = la.eye(self.dim)
        for _ in range(self.dim):
            power = power * self.N
        if not la.is_zero(power):
            out.append("N is not nilpotent")
        if not la.eq(self.S * self.N, self.N * self.S):
            out.append("S and N do not commute")
        for k, a in enumerate(self.module.action):
            if not la.eq(a * self.S, self.S * a):
                out.append(f"action of e_{k} does not commute with S")
            if not la.eq(a * self.N, self.N * a):
                out.append(f"action of e_{k} does not commute with N")
        try:
            self.eigenspaces()
        except StructureError as exc:
            out.append(str(exc))
        return out

    def eigenspaces(self) -> List[Tuple[Fraction, DomainMatrix]]:
        """``[(weight, basis columns of W_[weight])]`` sorted by weight."""
        if self._eigen is None:
            vals = self.S.to_Matrix().eigenvals()
            spaces = []
            total = 0
            for v in vals:
                if not v.is_rational:
                    raise StructureError(f"eigenvalue {v} of S is not rational")
                w = Fraction(int(v.p), int(v.q))
                null = la.nullspace(self.S - la.eye(self.dim) * la.to_q(w))
                B = null[0]
                for col in null[1:]:
                    B = B.hstack(col)
                spaces.append((w, B))
                total += len(null)
            if total != self.dim:
                raise StructureError("S is not diagonalizable")
            self._eigen = sorted(spaces, key=lambda t: t[0])
        return self._eigen

    def weights(self) -> List[Fraction]:
        return [w for w, _ in self.eigenspaces()]

    def projector(self, weight) -> DomainMatrix:
        """Spectral projector onto W_[weight] along the other eigenspaces."""
        spaces = self.eigenspaces()
        V = None
        keep = []
        for w, B in spaces:
            V = B if V is None else V.hstack(B)
            keep += [w == Fraction(weight)] * B.shape[1]
        D = DomainMatrix([[QQ(1) if (i == j and keep[i]) else QQ(0) for j in range(self.dim)]
                          for i in range(self.dim)], (self.dim, self.dim), QQ)
        return V * D * V.inv()

    def nilpotency_index(self) -> int:
        """Smallest k with N^k = 0."""
        power = la.eye(self.dim)
        for k in range(self.dim + 1):
            if la.is_zero(power):
                return k
            power = power * self.N
        return self.dim + 1

    def shifted(self, c) -> "GradedSpace":
        """Same space with S replaced by S + c Id."""
        return GradedSpace(self.S + la.eye(self.dim) * la.to_q(c), self.N, self.module.action,
                           self.algebra)

    def to_json(self) -> dict:
        return {"dim": self.dim, "S": la.to_json_rows(self.S), "N": la.to_json_rows(self.N),
                "action": [la.to_json_rows(a) for a in self.module.action],
                "algebra": self.algebra.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "GradedSpace":
        if not isinstance(data, dict) or "S" not in data:
            raise StructureError("graded space JSON needs 'S'")
        algebra = FDAlgebra.from_json(data["algebra"]) if "algebra" in data else None
        W = cls(data["S"], data.get("N"), data.get("action"), algebra)
        if "dim" in data and int(data["dim"]) != W.dim:
            raise StructureError("'dim' disagrees with S")
        return W


class OperatorSeries:
    """Matrix-valued ``sum X[e, m] x**e (log x)**m`` with finitely many terms."""

    def __init__(self, terms: Dict[Tuple[Fraction, int], DomainMatrix], dim: int, var: str = "x"):
        self.dim = dim
        self.var = var
        self.terms = {}
        for (e, m), X in terms.items():
            if not la.is_zero(X):
                key = (Fraction(e), int(m))
                self.terms[key] = self.terms[key] + X if key in self.terms else X

    def __add__(self, other: "OperatorSeries") -> "OperatorSeries":
        out = dict(self.terms)
        for k, X in other.terms.items():
            out[k] = out[k] + X if k in out else X
        return OperatorSeries(out, self.dim, self.var)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c) -> "OperatorSeries":
        return OperatorSeries({k: X * la.to_q(c) for k, X in self.terms.items()}, self.dim, self.var)

    def left_mul(self, A: DomainMatrix) -> "OperatorSeries":
        return OperatorSeries({k: A * X for k, X in self.terms.items()}, self.dim, self.var)

    def shift(self, c) -> "OperatorSeries":
        """Multiply by ``x**c``."""
        c = Fraction(c)
        return OperatorSeries({(e + c, m): X for (e, m), X in self.terms.items()}, self.dim, self.var)

    def diff(self) -> "OperatorSeries":
        """Formal d/dx term by term: ``x^e (log x)^m -> e x^{e-1} (log x)^m + m x^{e-1} (log x)^{m-1}``."""
        out: Dict = {}
        for (e, m), X in self.terms.items():
            for key, c in (((e - 1, m), e), ((e - 1, m - 1), m)):
                if c:
                    Y = X * la.to_q(c)
                    out[key] = out[key] + Y if key in out else Y
        return OperatorSeries(out, self.dim, self.var)

    def entry(self, i: int, j: int) -> LogSeries:
        terms = {}
        for (e, m), X in self.terms.items():
            v = la.entry(X, i, j)
            if v != 0:
                terms[(e, m)] = la.to_fraction(v)
        return LogSeries(terms, var=self.var, max_logpower=max([8] + [m for _, m in terms]))

    def __eq__(self, other):
        if not isinstance(other, OperatorSeries):
            return NotImplemented
        return (self.dim == other.dim and self.terms.keys() == other.terms.keys()
                and all(la.eq(X, other.terms[k]) for k, X in self.terms.items()))

    def __repr__(self):
        return f"OperatorSeries({sorted(self.terms)}, dim={self.dim})"


def x_pow_L0(W: GradedSpace, sign: int = 1, var: str = "x") -> OperatorSeries:
    """``x^{+-L(0)} = sum_n x^{+-n} pi_n sum_j (+-N)^j / j! (log x)^j``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    terms = {}
    Nsign = W.N * la.to_q(sign)
    for w, _ in W.eigenspaces():
        pi = W.projector(w)
        power = la.eye(W.dim)
        j = 0
        while not la.is_zero(power):
            terms[(sign * w, j)] = pi * power * la.to_q(Fraction(1, math.factorial(j)))
            power = power * Nsign
            j += 1
    return OperatorSeries(terms, W.dim, var)


def derivative_law_holds(W: GradedSpace) -> bool:
    """``d/dx x^{L(0)} = L(0) x^{L(0)-1}`` as an identity of operator series."""
    X = x_pow_L0(W)
    return X.diff() == X.shift(-1).left_mul(W.L0)


def formal_q_pseudotrace(W: GradedSpace, phi: SymFn, a=None, var: str = "q") -> LogSeries:
    """``sum_n sum_i phi_{W_[n]}(pi_n a N^i / i!) q^n (log q)^i``.

    Each eigenspace W_[n] must be a projective right P-module; a must commute
    with the P-action.  The log-power bound is the nilpotency index of N minus 1.
    """
    a = la.eye(W.dim) if a is None else (a if isinstance(a, DomainMatrix) else la.qmat(a))
    if a.shape != (W.dim, W.dim):
        raise StructureError(f"operator shape {a.shape} does not match the space of dimension {W.dim}")
    bad = W.module.equivariance_violations(a)
    if bad:
        raise NotEquivariant("operator", bad)
    terms: Dict[Tuple[Fraction, int], Fraction] = {}
    for w, B in W.eigenspaces():
        Mn = W.module.restrict(B)
        basis = find_projective_basis(Mn)
        if isinstance(basis, NotProjective):
            raise NonProjectiveEigenspace(w, basis.reason)
        pi = W.projector(w)
        power = la.eye(W.dim)
        i = 0
        while not la.is_zero(power):
            X = restrict_operator(pi * a * power, B)
            c = pseudotrace(phi, basis, X) / math.factorial(i)
            if c:
                terms[(w, i)] = terms.get((w, i), 0) + c
            power = power * W.N
            i += 1
    bound = max(W.nilpotency_index() - 1, 0)
    return LogSeries(terms, var=var, max_logpower=max(bound, 1))
