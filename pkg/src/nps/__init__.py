"""Neumann-Poincare operators as symmetrizable operators: discretization,
spectral calculus, zeta functions and ratio asymptotics."""

__version__ = "0.1.0"

from .errors import (BranchError, ConsistencyError, DomainError, GeometryError, NPSError,
                     NumericError, PairingError, ParameterError, PlacementError, PoleError,
                     PositivityError, RankError, SingularityError, SymmetrizabilityError,
                     TruncationError)
from .geometry import Curve2D, SurfaceRev, shape_constants, willmore_inequality_check
from .nystrom import DiscretizedOperators, assemble
from .symmetrizable import SpectralData, SymmetrizablePair, factorize, functional_calculus, resolvent
from .counterexample import krein_example, kernel_report
from .zeta_eta import SphereSpectrum, eta_function, riemann_zeta, zeta_S2
from .dirichlet import DirichletProblem, solve_dirichlet
from .asymptotics import ratio_table, perturbed_identity_ratio_check, sharp_ratio_constants

__all__ = [
    "BranchError", "ConsistencyError", "DomainError", "GeometryError", "NPSError", "NumericError",
    "PairingError", "ParameterError", "PlacementError", "PoleError", "PositivityError",
    "RankError", "SingularityError", "SymmetrizabilityError", "TruncationError",
    "Curve2D", "SurfaceRev", "shape_constants", "willmore_inequality_check",
    "DiscretizedOperators", "assemble", "SpectralData", "SymmetrizablePair", "factorize",
    "functional_calculus", "resolvent", "krein_example", "kernel_report", "SphereSpectrum",
    "eta_function", "riemann_zeta", "zeta_S2", "DirichletProblem", "solve_dirichlet",
    "ratio_table", "perturbed_identity_ratio_check", "sharp_ratio_constants",
]
