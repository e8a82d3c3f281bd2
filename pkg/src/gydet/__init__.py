"""Functional determinants of one-dimensional fluctuation operators.

The operators are ``K_g = -d^2/dt^2 - g omega2(t)`` on a finite window
with Dirichlet, periodic or antiperiodic conditions. Ratios
``Det K_1 / Det K_ref`` come from initial-value problems, from a
homotopy in ``g``, or from a finite-difference oracle; zero modes are
handled through primed determinants.
"""

from .errors import (
    DegenerateReferenceError,
    GydetError,
    IntegrationError,
    MarginalZeroModeWarning,
    PeriodicityWarning,
    ProfileDomainError,
    ProfileSyntaxError,
    ZeroModeError,
)
from .gelfand import (
    DetRatioResult,
    Method,
    det_ratio,
    det_ratio_antiperiodic,
    det_ratio_dirichlet,
    det_ratio_homotopy,
    det_ratio_periodic,
    gy_solve,
)
from .models import instanton_geometry, instanton_primed_det, m_for_period
from .ode import TimeWindow, gy_basis
from .oracle import det_ratio_fd, primed_det_fd
from .profiles import Constant, DoubleWell, Expression, Instanton, Kink, Sampled, parse_profile
from .special import ellip_ke, jacobi_sncndn
from .wronski import BoundaryCondition, green
from .zeromode import primed_det

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "Constant",
    "DegenerateReferenceError",
    "DetRatioResult",
    "DoubleWell",
    "Expression",
    "GydetError",
    "Instanton",
    "IntegrationError",
    "Kink",
    "MarginalZeroModeWarning",
    "Method",
    "PeriodicityWarning",
    "ProfileDomainError",
    "ProfileSyntaxError",
    "Sampled",
    "TimeWindow",
    "ZeroModeError",
    "det_ratio",
    "det_ratio_antiperiodic",
    "det_ratio_dirichlet",
    "det_ratio_fd",
    "det_ratio_homotopy",
    "det_ratio_periodic",
    "ellip_ke",
    "green",
    "gy_basis",
    "gy_solve",
    "instanton_geometry",
    "instanton_primed_det",
    "jacobi_sncndn",
    "m_for_period",
    "parse_profile",
    "primed_det",
    "primed_det_fd",
]
