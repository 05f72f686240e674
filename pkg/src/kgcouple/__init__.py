"""Coupling-eigenvalue solver and spectral comparison bounds for the
Klein-Gordon equation with attractive central potentials in d >= 1
dimensions."""

from . import comparison, exact, numerics, potentials, solver
from .comparison import (
    BoundReport,
    ComparisonPair,
    ConditionProfile,
    OrderingReport,
    build_exponential_bound,
    build_square_well_bound,
    condition_eta,
    condition_mu,
    condition_rho_sigma,
    coupling_derivative,
    energy_sign_scan,
    verify_ordering,
)
from .exact import SquareWellSpec, square_well_coupling
from .numerics import Bracket, IvpState, Mesh, find_root, integrate_ivp, integrate_weighted
from .potentials import (
    ClassReport,
    PotentialShape,
    coulomb_like,
    coulomb_w_profile,
    exponential,
    gaussian,
    hulthen,
    piecewise_table,
    sech_squared,
    square_well,
    validate,
    yukawa,
)
from .solver import (
    CouplingSolution,
    SolverSettings,
    SpectralCurve,
    SpectralQuery,
    effective_coefficient,
    pointwise_energy_residual,
    shoot,
    solve_coupling,
    sweep_curve,
)

__version__ = "0.1.0"
