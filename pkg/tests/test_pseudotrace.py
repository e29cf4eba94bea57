import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtrace.pseudotrace import (GradedSpace, InvalidProjectiveBasis, NonProjectiveEigenspace,
                                NotEquivariant, NotProjective, ProjBasis, StructureError, SymFn,
                                basis_independence_check, check_symmetric, complex_numbers,
                                cyclicity_check, derivative_law_holds, direct_sum, dual_numbers,
                                find_projective_basis, formal_q_pseudotrace, free_module, la,
                                matrix_algebra, module_pseudotrace, pseudotrace, random_equivariant,
                                regular_module, row_vectors, trivial_dual_module, upper_triangular,
                                x_pow_L0)
from qtrace.pseudotrace.algebra import FDAlgebra, RightModule
from qtrace.pseudotrace.generators import (random_free_module, random_graded_space,
                                           random_logarithmic_space, random_matrix,
                                           random_module_over_C)
from qtrace.series import LogSeries

TRACE_2 = SymFn([1, 0, 0, 1])
EPS = SymFn([0, 1])
seeds = st.integers(min_value=0, max_value=10**6)


def dual_log_space(h=Fraction(3, 2)):
    P = dual_numbers()
    N = [[0, 1], [0, 0]]
    return GradedSpace([[h, 0], [0, h]], N, action=[la.eye(2), la.qmat(N)], algebra=P)


class TestAlgebra:
    def test_wrong_unit_rejected(self):
        # e_0 e_0 = e_1, so e_0 is not a unit
        with pytest.raises(StructureError):
            FDAlgebra([[[0, 1], [1, 0]], [[1, 0], [0, 1]]], [1, 0])

    def test_non_associative_rejected(self):
        # (e_1 e_1) e_1 = e_2 e_1 = 0 but e_1 (e_1 e_1) = e_1 e_2 = e_0
        mul = [[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
               [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
               [[0, 0, 1], [0, 0, 0], [0, 0, 0]]]
        with pytest.raises(StructureError):
            FDAlgebra(mul, [1, 0, 0])

    def test_action_must_reverse_products(self):
        P = matrix_algebra(2)
        left_action = [P.left_matrix(P.basis(i)) for i in range(4)]
        with pytest.raises(StructureError):
            RightModule(P, left_action)

    def test_triangular_algebra_is_associative(self):
        assert not upper_triangular(3).axiom_violations()


class TestSymmetric:
    def test_matrix_trace(self):
        assert check_symmetric(matrix_algebra(2), TRACE_2)

    def test_entry_extractor(self):
        assert not check_symmetric(matrix_algebra(2), SymFn([1, 0, 0, 0]))

    def test_dual_numbers(self):
        assert check_symmetric(dual_numbers(), EPS)


class TestProjectiveBasis:
    def test_free_module(self):
        P = dual_numbers()
        B = find_projective_basis(regular_module(P))
        assert isinstance(B, ProjBasis) and not B.violations()

    def test_row_vectors(self):
        B = find_projective_basis(row_vectors(2))
        assert isinstance(B, ProjBasis)
        assert la.eq(B.reconstruction(), la.eye(2))

    def test_trivial_dual_module_not_projective(self):
        verdict = find_projective_basis(trivial_dual_module())
        assert isinstance(verdict, NotProjective) and not verdict

    def test_corrupted_functional_detected(self):
        B = find_projective_basis(free_module(dual_numbers(), 2))
        bad = list(B.functionals)
        bad[0] = bad[0] + la.qmat([[1, 0, 0, 0], [0, 0, 0, 0]])
        with pytest.raises(InvalidProjectiveBasis):
            ProjBasis(B.module, B.elements, bad).verify()

    @given(seeds)
    def test_returned_basis_is_certified(self, seed):
        rng = random.Random(seed)
        P = rng.choice([dual_numbers(), matrix_algebra(2), upper_triangular(2)])
        B = find_projective_basis(random_free_module(P, rng))
        assert not B.violations()


class TestPseudotrace:
    def test_complex_numbers_give_matrix_trace(self):
        rng = random.Random(7)
        for _ in range(50):
            M = random_module_over_C(rng)
            T = random_matrix(rng, M.dim, M.dim)
            assert module_pseudotrace(SymFn([1]), M, T) == sum(la.to_fraction(la.entry(T, i, i)) for i in range(M.dim))

    def test_dual_multiplication(self):
        P = dual_numbers()
        M = regular_module(P)
        T = la.eye(2) * la.to_q(3) + P.right[1] * la.to_q(5)
        assert module_pseudotrace(EPS, M, T) == 5

    def test_zero_operator(self):
        M = row_vectors(2)
        assert module_pseudotrace(TRACE_2, M, la.zeros(2, 2)) == 0

    def test_non_equivariant_rejected(self):
        with pytest.raises(NotEquivariant, match="e_1"):
            module_pseudotrace(EPS, regular_module(dual_numbers()), [[1, 0], [0, 2]])

    def test_non_projective_rejected(self):
        with pytest.raises(StructureError):
            module_pseudotrace(EPS, trivial_dual_module(), [[1]])

    @given(seeds)
    def test_linear_in_operator(self, seed):
        rng = random.Random(seed)
        M = random_free_module(dual_numbers(), rng)
        A, B = random_equivariant(M, M, rng), random_equivariant(M, M, rng)
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        lhs = module_pseudotrace(EPS, M, A + B * la.to_q(c))
        assert lhs == module_pseudotrace(EPS, M, A) + c * module_pseudotrace(EPS, M, B)


class TestBasisIndependence:
    def test_free_module(self):
        rng = random.Random(3)
        M = free_module(dual_numbers(), 2)
        r = basis_independence_check(EPS, M, random_equivariant(M, M, rng), trials=5, seed=11)
        assert r.passed and len(set(r.details["values"])) == 1

    def test_row_vectors_alternative_basis(self):
        M = row_vectors(2)
        T = la.qmat([[2, 0], [0, 2]])
        base = find_projective_basis(M)
        # m = e_2 with alpha(v) = sum_b v_b E_2b
        alt = ProjBasis(M, [la.unit_vector(2, 1)], [la.qmat([[0, 0], [0, 0], [1, 0], [0, 1]])]).verify()
        assert pseudotrace(TRACE_2, base, T) == pseudotrace(TRACE_2, alt, T) == 2

    @given(seeds)
    def test_random_modules(self, seed):
        rng = random.Random(seed)
        M = random_free_module(matrix_algebra(2), rng, max_rank=1)
        assert basis_independence_check(TRACE_2, M, random_equivariant(M, M, rng), seed=seed).passed


class TestCyclicity:
    def test_random_pairs(self):
        rng = random.Random(5)
        P = dual_numbers()
        for _ in range(20):
            M1, M2 = random_free_module(P, rng), random_free_module(P, rng)
            a, b = random_equivariant(M1, M2, rng), random_equivariant(M2, M1, rng)
            assert cyclicity_check(EPS, M1, M2, a, b).passed

    def test_zero_map(self):
        M = free_module(dual_numbers(), 1)
        r = cyclicity_check(EPS, M, M, la.zeros(2, 2), la.eye(2))
        assert r.passed and r.details["lhs"] == "0"

    def test_inclusion_and_projection(self):
        P = dual_numbers()
        M1, M2 = regular_module(P), free_module(P, 2)
        incl = la.qmat([[1, 0], [0, 1], [0, 0], [0, 0]])
        proj = la.qmat([[1, 0, 0, 0], [0, 1, 0, 0]])
        twist = la.eye(2) + P.right[1] * la.to_q(4)
        r = cyclicity_check(EPS, M1, M2, incl * twist, proj)
        assert r.passed and r.details["lhs"] == "4"

    @given(seeds)
    def test_conjugation_invariance(self, seed):
        rng = random.Random(seed)
        M = random_free_module(dual_numbers(), rng)
        T = random_equivariant(M, M, rng)
        from qtrace.pseudotrace import random_automorphism
        U = random_automorphism(M, rng)
        assert module_pseudotrace(EPS, M, U * T * U.inv()) == module_pseudotrace(EPS, M, T)


class TestGraded:
    def test_semisimple_power(self):
        W = GradedSpace([[Fraction(1, 3), 0], [0, Fraction(1, 3)]])
        X = x_pow_L0(W)
        assert list(X.terms) == [(Fraction(1, 3), 0)] and la.eq(X.terms[(Fraction(1, 3), 0)], la.eye(2))

    def test_jordan_block(self):
        W = dual_log_space(Fraction(2))
        X = x_pow_L0(W)
        assert la.eq(X.terms[(2, 0)], la.eye(2))
        assert la.eq(X.terms[(2, 1)], la.qmat([[0, 1], [0, 0]]))
        assert len(X.terms) == 2

    @given(seeds)
    def test_derivative_law(self, seed):
        rng = random.Random(seed)
        W = random_logarithmic_space(rng) if seed % 2 else random_graded_space(rng)
        assert derivative_law_holds(W)

    def test_non_commuting_N_rejected(self):
        with pytest.raises(StructureError):
            GradedSpace([[1, 0], [0, 2]], [[0, 1], [0, 0]])


class TestFormalQPseudotrace:
    def test_dual_log_example(self):
        W = dual_log_space()
        s = formal_q_pseudotrace(W, EPS)
        assert s == LogSeries({(Fraction(3, 2), 1): 1}, var="q", max_logpower=1)

    def test_semisimple_shadow(self):
        s = formal_q_pseudotrace(dual_log_space(), SymFn([1, 0]))
        assert s.terms == LogSeries({(Fraction(3, 2), 0): 1}, var="q").terms

    def test_graded_dimension(self):
        rng = random.Random(1)
        for _ in range(50):
            W = random_graded_space(rng)
            s = formal_q_pseudotrace(W, SymFn([1]))
            for w, B in W.eigenspaces():
                assert s.coefficient(w, 0) == B.shape[1]
            assert sum(s.coefficient(w, 0) for w in W.weights()) == W.dim

    @given(seeds, st.fractions(min_value=-3, max_value=3, max_denominator=4))
    def test_grading_shift_multiplies_by_q_power(self, seed, c):
        rng = random.Random(seed)
        W = random_logarithmic_space(rng)
        base = formal_q_pseudotrace(W, SymFn([1]))
        shifted = formal_q_pseudotrace(W.shifted(c), SymFn([1]))
        assert shifted.terms == {(e + c, m): v for (e, m), v in base.terms.items()}

    def test_non_equivariant_operator(self):
        with pytest.raises(NotEquivariant):
            formal_q_pseudotrace(dual_log_space(), EPS, [[1, 0], [0, 2]])

    def test_non_projective_eigenspace(self):
        # eps acts by zero on a one-dimensional space
        W = GradedSpace([[1]], action=[la.eye(1), la.zeros(1, 1)], algebra=dual_numbers())
        with pytest.raises(NonProjectiveEigenspace):
            formal_q_pseudotrace(W, EPS)
