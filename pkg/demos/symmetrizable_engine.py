"""Symmetrizable operators beyond the boundary-integral setting.

Run with ``python3 demos/symmetrizable_engine.py``.
"""
# %%
import numpy as np

from nps.counterexample import kernel_report, krein_example, norm_growth
from nps.symmetrizable import (bari_construct, complex_power, factorize, functional_calculus,
                               resolvent_growth_check)

# %% A pair built from a non-orthogonal Riesz-type basis with eigenvalues 2^-k.
F = np.eye(8) + 0.1 * np.triu(np.ones((8, 8)), 1)
pair = bari_construct(F, 0.5 ** np.arange(8))
spec = factorize(pair)
print("eigenvalues", np.round(spec.lam, 12))
print(f"biorthogonality residual {spec.biorthogonality_residual():.2e}")

# %% Functional calculus and its norm bounds.
r = functional_calculus(spec, np.exp, dphi=np.exp)
print(f"|exp(K*)| = {r.norm:.6f}, bounds [{r.lower_bound:.6f}, {r.upper_bound:.6f}]")

# %% Resolvent growth near the eigenvalue 1/2.
rep = resolvent_growth_check(spec, 0.5)
for row in rep.rows[::2]:
    print(f"|z - 1/2| = {abs(row.z - 0.5):.1e}: {row.lower:.3e} <= {row.norm:.3e} <= {row.upper:.3e}")

# %% Complex powers.
v = np.ones(8)
print("K*^(1.5+1i) v =", np.round(complex_power(spec, 1.5 + 1j, v), 6))

# %% Kernels of K and K* in the bordered example.
rep = kernel_report(krein_example([1, 1, 1]))
for name, e in rep.entries.items():
    print(f"ker {name:2s}: {np.round(e.vector, 6)}, residual {e.residual:.1e}")
norms, ratios = norm_growth((4, 16, 64))
print("norm of the ker AS vector for N = 4, 16, 64:", np.round(norms, 4))
