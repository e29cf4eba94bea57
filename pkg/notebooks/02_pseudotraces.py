"""
Pseudotraces over the dual numbers
==================================
"""

# %%
import random

from qtrace.pseudotrace import (GradedSpace, SymFn, cyclicity_check, dual_numbers, find_projective_basis,
                                formal_q_pseudotrace, free_module, la, module_pseudotrace,
                                random_equivariant, regular_module, trivial_dual_module)

P = dual_numbers()
eps = SymFn([0, 1])

# %% [markdown]
# Multiplication by 3 + 5 eps on P itself; phi reads off the eps part.

# %%
T = la.eye(2) * la.to_q(3) + P.right[1] * la.to_q(5)
print(module_pseudotrace(eps, regular_module(P), T))

# %%
print(find_projective_basis(trivial_dual_module()))

# %%
rng = random.Random(0)
M1, M2 = free_module(P, 1), free_module(P, 2)
print(cyclicity_check(eps, M1, M2, random_equivariant(M1, M2, rng), random_equivariant(M2, M1, rng)).summary())

# %% [markdown]
# A Jordan block in L(0) produces a log q term.

# %%
N = [[0, 1], [0, 0]]
W = GradedSpace([[2, 0], [0, 2]], N, action=[la.eye(2), la.qmat(N)], algebra=P)
print(formal_q_pseudotrace(W, eps))
print(formal_q_pseudotrace(W, SymFn([1, 0])))
