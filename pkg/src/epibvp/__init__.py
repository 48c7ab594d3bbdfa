"""Solver and verifier toolkit for the singular boundary value problem

    u'' = u^2 / (8 t^2) + lam / 2   on (0, 1/2],

arising as the radial reduction of a stationary epitaxial-growth equation,
with Dirichlet (u(1/2) = 0) or Navier (u(1/2) = u'(1/2)) endpoint
conditions.  The package shoots from a series launch at the singular
endpoint, tracks the two solution branches across the deposition rate lam,
brackets the fold where they merge, and runs closed-form existence and
nonexistence certificates that rigorously confine that fold.
"""

from .certificates import (
    Certificate,
    CertificateKind,
    Verdict,
    certificates_for,
    f_criterion,
    fixed_point_c0,
    lower_function_dirichlet,
    lower_function_navier,
    nonexistence_dirichlet,
    nonexistence_navier,
    truncated_monotone_solve,
    universal_bound,
    universal_certificate,
)
from .continuation import (
    BifurcationDiagram,
    Branch,
    DiagramPoint,
    default_fold_bracket,
    default_fold_tol,
    locate_fold,
    sweep,
)
from .errors import (
    BracketError,
    DomainError,
    EpibvpError,
    IntegrationError,
    RelaxationError,
    UnvalidatedTrajectoryError,
    WindowTooSmallError,
)
from .integrator import (
    ValidationReport,
    first_integral_residual,
    integrate,
    integrate_rk4,
    launch_state,
    representation_residual,
    validate,
)
from .model import (
    BoundaryKind,
    ProblemSpec,
    RadialProfile,
    SeriesLaunch,
    Trajectory,
    from_u_frame,
    reconstruct_phi,
    rhs,
    to_u_frame,
)
from .shooting import RootSet, ShootingRoot, boundary_residual, find_shooting_roots

__version__ = "1.0.0"

__all__ = [
    "BifurcationDiagram",
    "BoundaryKind",
    "BracketError",
    "Branch",
    "Certificate",
    "CertificateKind",
    "DiagramPoint",
    "DomainError",
    "EpibvpError",
    "IntegrationError",
    "ProblemSpec",
    "RadialProfile",
    "RelaxationError",
    "RootSet",
    "SeriesLaunch",
    "ShootingRoot",
    "Trajectory",
    "UnvalidatedTrajectoryError",
    "ValidationReport",
    "Verdict",
    "WindowTooSmallError",
    "boundary_residual",
    "certificates_for",
    "default_fold_bracket",
    "default_fold_tol",
    "f_criterion",
    "find_shooting_roots",
    "first_integral_residual",
    "fixed_point_c0",
    "from_u_frame",
    "integrate",
    "integrate_rk4",
    "launch_state",
    "locate_fold",
    "lower_function_dirichlet",
    "lower_function_navier",
    "nonexistence_dirichlet",
    "nonexistence_navier",
    "reconstruct_phi",
    "representation_residual",
    "rhs",
    "sweep",
    "to_u_frame",
    "truncated_monotone_solve",
    "universal_bound",
    "universal_certificate",
    "validate",
]
