"""Spectral zeta function of the unit sphere.

Run with ``python3 demos/sphere_zeta.py``.
"""
# %%
import math

from nps.zeta_eta import heat_trace_residue, zeta_determinant_sphere, zeta_S2

# %% Special values.
for z in (-1.0, 0.0, 1.0, 3.0):
    print(f"zeta_S2({z:+.0f}) = {zeta_S2(z):+.15f}")

# %% The pole at z = 2 seen from the small-time heat trace.
fit = heat_trace_residue()
print(f"a_-2 = {fit.a_m2:.8f}, a_-1 = {fit.a_m1:.2e}")

# %% Zeta-regularized determinant against the two candidate closed forms.
det = zeta_determinant_sphere()
print(f"exp(-zeta_S2'(0))         = {det.det:.15f}")
print(f"2^(1/6) e^(1/12) / G      = {det.closed_form:.15f}")
print(f"2^(-1/6) e^(1/12) / G     = {det.closed_form_stated:.15f}")
print(f"Glaisher constant G       = {det.glaisher:.15f}")
print(f"log2/6 from the two forms = {math.log(det.closed_form / det.closed_form_stated) / 2:.15f}")
