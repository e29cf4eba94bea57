"""Exact rational matrices on top of sympy's DomainMatrix over QQ."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def to_q(x):
    """Coerce an int, Fraction, "p/q" string or decimal float to an element of QQ.

    Floats are read through their shortest decimal representation, so 0.1
    becomes 1/10 rather than its binary expansion.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, QQ.dtype):
        return x
    if isinstance(x, int):
        return QQ(x)
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    if isinstance(x, float):
        f = Fraction(repr(x))
        return QQ(f.numerator, f.denominator)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return QQ(f.numerator, f.denominator)
    try:
        return QQ.convert(x)
    except Exception as exc:
        raise TypeError(f"cannot read {x!r} as an exact rational") from exc


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def qmat(rows: Sequence[Sequence]) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if not rows:
        raise ValueError("empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged matrix rows")
    return DomainMatrix([[to_q(v) for v in r] for r in rows], (len(rows), width), QQ)


def qvec(entries: Sequence) -> DomainMatrix:
    """Column vector."""
    return qmat([[v] for v in entries])


def eye(n: int) -> DomainMatrix:
    return DomainMatrix.eye(n, QQ).to_dense()


def zeros(r: int, c: int) -> DomainMatrix:
    return DomainMatrix.zeros((r, c), QQ).to_dense()


def unit_vector(n: int, i: int) -> DomainMatrix:
    v = [[QQ(0)] for _ in range(n)]
    v[i][0] = QQ(1)
    return DomainMatrix(v, (n, 1), QQ)


def entry(M: DomainMatrix, i: int, j: int):
    return M.rep.to_ddm()[i][j]


def rows_of(M: DomainMatrix) -> List[list]:
    return [list(r) for r in M.rep.to_ddm()]


def column(M: DomainMatrix, j: int) -> DomainMatrix:
    return M.extract(list(range(M.shape[0])), [j])


def to_fraction_rows(M: DomainMatrix) -> List[List[Fraction]]:
    return [[to_fraction(v) for v in r] for r in rows_of(M)]


def to_json_rows(M: DomainMatrix) -> List[List[str]]:
    return [[str(to_fraction(v)) for v in r] for r in rows_of(M)]


def eq(A: DomainMatrix, B: DomainMatrix) -> bool:
    """Entrywise equality, independent of sparse or dense storage."""
    return A.shape == B.shape and rows_of(A) == rows_of(B)


def is_zero(M: DomainMatrix) -> bool:
    return all(v == 0 for r in rows_of(M) for v in r)


def linear_combination(coeffs, mats: Sequence[DomainMatrix], shape) -> DomainMatrix:
    out = zeros(*shape)
    for c, M in zip(coeffs, mats):
        if c != 0:
            out = out + M * to_q(c)
    return out


def scale(M: DomainMatrix, c) -> DomainMatrix:
    return M * to_q(c)


def solve_affine(A: DomainMatrix, b: DomainMatrix) -> Tuple[Optional[DomainMatrix], List[DomainMatrix]]:
    """Solutions of ``A x = b``: a particular solution (free variables 0) or None, and a nullspace basis."""
    n_rows, n_cols = A.shape
    aug = A.hstack(b)
    # the projective-basis systems are sparse; the automatic choice (fraction-free) is far slower here
    R, pivots = aug.rref(method="GJ")
    if n_cols in pivots:
        return None, []
    R_rows = rows_of(R)
    x = [QQ(0)] * n_cols
    for r, p in enumerate(pivots):
        x[p] = R_rows[r][n_cols]
    particular = DomainMatrix([[v] for v in x], (n_cols, 1), QQ)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    null = []
    for f in free:
        v = [QQ(0)] * n_cols
        v[f] = QQ(1)
        for r, p in enumerate(pivots):
            v[p] = -R_rows[r][f]
        null.append(DomainMatrix([[e] for e in v], (n_cols, 1), QQ))
    return particular, null


def nullspace(A: DomainMatrix) -> List[DomainMatrix]:
    _, null = solve_affine(A, zeros(A.shape[0], 1))
    return null


def vec_to_matrix(x: DomainMatrix, r: int, c: int, offset: int = 0) -> DomainMatrix:
    """Row-major reshape of entries ``offset .. offset + r*c`` of column vector x."""
    flat = [row[0] for row in rows_of(x)]
    return DomainMatrix([flat[offset + i * c: offset + (i + 1) * c] for i in range(r)], (r, c), QQ)


def commutation_system(left: Sequence[DomainMatrix], right: Sequence[DomainMatrix],
                       r: int, c: int) -> DomainMatrix:
    """Coefficient matrix of ``X right_k - left_k X = 0`` in the row-major entries of X (r x c)."""
    eqs = []
    for L, R in zip(left, right):
        Lr, Rr = rows_of(L), rows_of(R)
        for a in range(r):
            for b in range(c):
                row = [QQ(0)] * (r * c)
                for k in range(c):
                    if Rr[k][b] != 0:
                        row[a * c + k] += Rr[k][b]
                for k in range(r):
                    if Lr[a][k] != 0:
                        row[k * c + b] -= Lr[a][k]
                eqs.append(row)
    if not eqs:
        return zeros(1, r * c)
    return DomainMatrix(eqs, (len(eqs), r * c), QQ)


def intertwiner_basis(left: Sequence[DomainMatrix], right: Sequence[DomainMatrix],
                      r: int, c: int) -> List[DomainMatrix]:
    """Basis of ``{X (r x c) : X right_k = left_k X for all k}``."""
    return [vec_to_matrix(v, r, c) for v in nullspace(commutation_system(left, right, r, c))]
