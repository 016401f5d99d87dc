"""Spheroidal eigenvalues from connection coefficients and characteristic curves.

The eigenvalue ``Lambda`` of a Hamiltonian 2x2 system on ``0 < z < 1`` is a
zero of the connection coefficient ``Theta(Lambda, u)``.  Following the
characteristic curves of the first-order PDE satisfied by ``Lambda(u)``
from such a zero to ``Lambda = 0`` yields eigenvalues of the angular
spheroidal wave equation.
"""

from .characteristics import GEN, RED, CharState, TraceResult, integrate, trace_to_eigenvalue
from .connection import (
    SeriesState,
    ThetaResult,
    convergence_order,
    series_init,
    series_step,
    theta_frobenius,
    theta_limit,
)
from .errors import (
    Blowup,
    BranchLoss,
    DegenerateData,
    DomainError,
    MaxIterations,
    NoConvergence,
    NoCrossing,
    NoRootInWindow,
    SingularStep,
    SpheroidalError,
    TruncationUnstable,
)
from .oracle import OracleResult, OracleSpec, oracle_eigenvalues
from .params import (
    BurgersChart,
    CswParams,
    ModeOrder,
    ParamVec,
    SpheroidalChart,
    burgers_to_spheroidal,
    chart_to_burgers,
    chart_to_spheroidal,
    csw_from_u,
    eval_psi,
    spheroidal_to_u,
    surface_u3,
    u_from_csw,
)
from .rootfind import Bracket, RootResult, find_surface_roots, refine_root, scan_brackets, theta_on_surface

__version__ = "0.1.0"
