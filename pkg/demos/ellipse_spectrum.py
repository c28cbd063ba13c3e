"""Neumann-Poincare spectrum and Dirichlet solves on an ellipse.

Run with ``python3 demos/ellipse_spectrum.py``.
"""
# %%
import numpy as np

from nps import Curve2D, SymmetrizablePair, assemble, factorize
from nps.dirichlet import DirichletProblem, solve_dirichlet
from nps.nystrom import factorization_residual, plemelj_residual

# %% Assemble the weighted operators on a copy rescaled so that S is positive.
curve = Curve2D.ellipse(1.0, 0.5)
ops = assemble(curve, 256)
print(f"scale factor {ops.scale_factor:.4f}")
print(f"|SK* - KS| = {plemelj_residual(ops):.2e}, |K - SA| = {factorization_residual(ops):.2e}")

# %% The eigenvalues are +-((a-b)/(a+b))^m = +-3^-m besides the eigenvalue 1.
spec = factorize(SymmetrizablePair.from_operators(ops))
for j, lam in enumerate(spec.lam[:9]):
    print(f"lambda_{j} = {lam:+.15f}")
print(f"numerical rank {spec.rank} of {spec.pair.n}")

# %% Harmonic data are reproduced inside the curve.
f = lambda x, y: x**3 - 3 * x * y**2
pts = np.array([[0.2, 0.1], [-0.5, 0.2], [0.0, -0.3]])
sol = solve_dirichlet(DirichletProblem(curve, f, "interior", pts), ops)
for p, u in zip(pts, sol.values):
    print(f"u{tuple(p.tolist())} = {u:+.12f}   exact {f(*p):+.12f}")
