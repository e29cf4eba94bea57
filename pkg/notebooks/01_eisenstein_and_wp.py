"""
Exact q-expansions: Eisenstein series and the wp family
=======================================================
"""

# %%
from qtrace.elliptic import eisenstein, serre_derivative, wp_series, wp_recursion_check
from qtrace.elliptic import modular_covariance_check, lattice_crosscheck, wp_value
from qtrace.elliptic.numeric import wp_lattice_extrapolated

# %% [markdown]
# Coefficients are exact: a rational times a power of pi.

# %%
G4 = eisenstein(1, 5)
for n in range(6):
    print(f"q^{n}: {G4[n]}")

# %% [markdown]
# The Serre derivative of G4 is exactly 14 G6.

# %%
lhs = serre_derivative(eisenstein(1, 10), 4).expansion
print(lhs.equal_terms(eisenstein(2, 10).expansion * 14))

# %%
print(wp_series(2, 4, 2).expansion)
print(wp_recursion_check(3, 8, 8).summary())

# %% [markdown]
# Numerics: q-expansion against a brute-force lattice sum, and weight-2 covariance.

# %%
z, tau = 0.3 + 0.1j, 0.2 + 1.05j
print(abs(wp_value(2, z, tau) - wp_lattice_extrapolated(2, z, tau)))
print(modular_covariance_check(2, "S").summary())
print(lattice_crosscheck(2).summary())
