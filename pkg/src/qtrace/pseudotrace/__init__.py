"""Associative algebras, projective modules, pseudotraces and formal q-pseudotraces."""

from . import linalg as la
from .algebra import (FDAlgebra, RightModule, StructureError, SymFn, check_symmetric, complex_numbers,
                      direct_sum, dual_numbers, free_module, matrix_algebra, regular_module, row_vectors,
                      symmetry_violations, trivial_dual_module, upper_triangular)
from .projective import (InvalidProjectiveBasis, NotEquivariant, NotProjective, ProjBasis,
                         basis_independence_check, cyclicity_check, find_projective_basis,
                         module_pseudotrace, pseudotrace, random_automorphism, random_equivariant,
                         random_projective_basis, require_symmetric)
from .graded import (GradedSpace, NonProjectiveEigenspace, OperatorSeries, derivative_law_holds,
                     formal_q_pseudotrace, x_pow_L0)

__all__ = [
    "la", "FDAlgebra", "RightModule", "StructureError", "SymFn", "check_symmetric", "complex_numbers",
    "direct_sum", "dual_numbers", "free_module", "matrix_algebra", "regular_module", "row_vectors",
    "symmetry_violations", "trivial_dual_module", "upper_triangular", "InvalidProjectiveBasis",
    "NotEquivariant", "NotProjective", "ProjBasis", "basis_independence_check", "cyclicity_check",
    "find_projective_basis", "module_pseudotrace", "pseudotrace", "random_automorphism",
    "random_equivariant", "random_projective_basis", "require_symmetric",
    "GradedSpace", "NonProjectiveEigenspace", "OperatorSeries", "derivative_law_holds",
    "formal_q_pseudotrace", "x_pow_L0",
]
