"""
The SL2(Z) action on vector sequences
=====================================
"""

# %%
from fractions import Fraction

from qtrace.group import S, S_INV, T
from qtrace.modular import (covariance_check, first_order_solution, first_order_system,
                            group_law_check, smooth_family, solution_invariance_check, wp2_family)

# %%
Phi = smooth_family(2, seed=1)
print(group_law_check(Phi, S, T, 1.5).summary())

# %% [markdown]
# For S^-1 S^-1 the principal logarithm is not additive; the defect is reported.

# %%
r = group_law_check(Phi, S_INV, S_INV, 1.5)
print(r.details["branch_defects"], r.summary())

# %%
print(covariance_check(wp2_family(), S, 2, 1).summary())

# %% [markdown]
# A first-order system solved by the flow of G2, and its transform under S.

# %%
alpha = Fraction(3, 2)
r = solution_invariance_check(first_order_system(1, alpha), first_order_solution(1, alpha), "S")
print(r.details["residual"], r.details["residual_transformed"])
