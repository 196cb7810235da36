"""Standard Galerkin spline discretization of the 1D shallow water equations with RK4 time stepping."""

__version__ = "0.1.0"

from .mesh import Mesh, make_mesh, quasiuniform_mesh_a, quasiuniform_mesh_b, uniform_mesh
from .mms import get_mms, mms_library
from .projection import (
    BandedSpdMatrix,
    NonSmoothV,
    ProjectedFunction,
    Projector,
    SingularMatrixError,
    assemble_mass,
    build_nonsmooth_v,
    error_norms,
    project,
)
from .quadrature import QuadratureRule, gauss_rule, integrate
from .spline import SplineSpace, build_space
from .studies import RateTable, order, projection_study, spatial_study, temporal_study
from .swsolver import RK4, BlowUpError, ShallowWaterGalerkin, State, flux_f, flux_phi, rk4_step

__all__ = [
    "Mesh", "make_mesh", "uniform_mesh", "quasiuniform_mesh_a", "quasiuniform_mesh_b",
    "SplineSpace", "build_space",
    "QuadratureRule", "gauss_rule", "integrate",
    "BandedSpdMatrix", "ProjectedFunction", "Projector", "NonSmoothV", "SingularMatrixError",
    "assemble_mass", "project", "error_norms", "build_nonsmooth_v",
    "ShallowWaterGalerkin", "State", "BlowUpError", "RK4", "rk4_step", "flux_phi", "flux_f",
    "get_mms", "mms_library",
    "RateTable", "order", "spatial_study", "temporal_study", "projection_study",
]
