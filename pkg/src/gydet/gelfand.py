"""Determinant ratios by the initial-value route and by the g-homotopy.

Initial-value route
    Solve ``K_1 D = 0`` with ``D(t_a) = 0, D'(t_a) = 1`` and the dual
    ``Dbar(t_a) = 1, Dbar'(t_a) = 0``. Then

    * Dirichlet:      ``Det K_0^-1 K_1 = D(t_b) / (t_b - t_a)``
    * periodic:       ``[2 - D'(t_b) - Dbar(t_b)] / [4 sin^2(w T / 2)]``
    * antiperiodic:   ``[2 + D'(t_b) + Dbar(t_b)] / [4 cos^2(w T / 2)]``

    where ``w`` is the frequency of the constant reference operator
    ``-d^2/dt^2 - w^2`` used for the two periodic cases.

Homotopy route
    ``d/dg log Det = -int dt omega2(t) G_g(t, t)`` integrated over
    ``g in [0, 1]`` with Gauss-Legendre nodes, the Green function built
    from a fresh solution pair at every node.
"""

from dataclasses import dataclass, field
import enum
import math
import warnings

import numpy as np

from .errors import DegenerateReferenceError, PeriodicityWarning, ZeroModeError
from .ode import DEFAULT_TOL, gy_basis
from .profiles import Constant
from .quadrature import adaptive_simpson, gauss_legendre
from .wronski import BoundaryCondition, fundamental_matrix, green, proximity

__all__ = [
    "Method",
    "Diagnostics",
    "DetRatioResult",
    "GYData",
    "gy_solve",
    "default_omega_ref",
    "reference_factor",
    "det_ratio_dirichlet",
    "det_ratio_periodic",
    "det_ratio_antiperiodic",
    "det_ratio",
    "trace_omega2_green",
    "det_ratio_homotopy",
]

DEGENERATE_REFERENCE = 1e-12
QUAD_TOL = 1e-9


class Method(enum.Enum):
    GY = "gy"
    HOMOTOPY = "homotopy"
    FD_ORACLE = "fd_oracle"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class Diagnostics:
    wronskian_drift: float = 0.0
    zero_mode_residual: float = math.nan
    steps: int = 0


@dataclass(frozen=True)
class DetRatioResult:
    """A determinant ratio and how it was obtained.

    ``formula`` is a short human-readable name of the expression that
    produced ``value``.
    """

    value: float
    bc: BoundaryCondition
    method: Method
    omega_ref: float = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    formula: str = ""


@dataclass(frozen=True, eq=False)
class GYData:
    """Endpoint data of the initial-value solutions ``D`` and ``Dbar``."""

    D_b: float
    Ddot_b: float
    Dbar_b: float
    Dbardot_b: float
    g: float
    pair: object = field(default=None, repr=False)

    @property
    def wronskian(self):
        """``Dbar_b Ddot_b - Dbardot_b D_b``; equals 1 for an exact solve."""
        return self.Dbar_b * self.Ddot_b - self.Dbardot_b * self.D_b


def gy_solve(profile, window, g=1.0, tol=DEFAULT_TOL):
    """Integrate both initial-value problems and return their endpoint data."""
    pair = gy_basis(profile, g, window, tol)
    dbar_b, dbardot_b = pair.eta.end
    d_b, ddot_b = pair.xi.end
    return GYData(d_b, ddot_b, dbar_b, dbardot_b, g, pair)


def default_omega_ref(profile, window):
    """``sqrt`` of the window average of ``omega2``.

    Raises
    ------
    ValueError
        If the average is not positive; an explicit reference is needed then.
    """
    mean = adaptive_simpson(profile, window.t_a, window.t_b, tol=1e-12) / window.length
    if not mean > 0:
        raise ValueError(
            f"mean omega2 over the window is {mean:.6g} <= 0; pass omega_ref explicitly"
        )
    return math.sqrt(mean)


def reference_factor(bc, omega_ref, length):
    """``4 sin^2(w T/2)`` (periodic) or ``4 cos^2(w T/2)`` (antiperiodic)."""
    bc = BoundaryCondition.parse(bc)
    half = 0.5 * omega_ref * length
    if bc is BoundaryCondition.PERIODIC:
        value = 4.0 * math.sin(half) ** 2
    elif bc is BoundaryCondition.ANTIPERIODIC:
        value = 4.0 * math.cos(half) ** 2
    else:
        raise ValueError("reference factor applies to periodic/antiperiodic only")
    if value < DEGENERATE_REFERENCE:
        raise DegenerateReferenceError(
            f"reference operator -d^2/dt^2 - {omega_ref:g}^2 has a {bc.value} zero mode "
            f"on a window of length {length:g}; choose another omega_ref"
        )
    return value


def _diagnostics(pair, bc):
    return Diagnostics(pair.drift, proximity(pair, bc), pair.steps)


def det_ratio_dirichlet(profile, window, tol=DEFAULT_TOL):
    """``Det K_0^-1 K_1`` for Dirichlet conditions, ``D(t_b) / (t_b - t_a)``.

    A zero mode gives a value near zero; ``diagnostics.zero_mode_residual``
    then falls below the threshold.
    """
    data = gy_solve(profile, window, 1.0, tol)
    bc = BoundaryCondition.DIRICHLET
    return DetRatioResult(
        data.D_b / window.length,
        bc,
        Method.GY,
        None,
        _diagnostics(data.pair, bc),
        "D(t_b)/(t_b - t_a)",
    )


def _warn_if_not_periodic(profile, window):
    wa, wb = float(profile(window.t_a)), float(profile(window.t_b))
    if abs(wa - wb) > 1e-8 * max(1.0, abs(wa)):
        warnings.warn(
            f"omega2(t_a)={wa:.6g} and omega2(t_b)={wb:.6g} differ; "
            "the profile is not periodic over the window",
            PeriodicityWarning,
            stacklevel=3,
        )


def _det_ratio_pa(profile, window, omega_ref, tol, bc):
    _warn_if_not_periodic(profile, window)
    if omega_ref is None:
        omega_ref = default_omega_ref(profile, window)
    denom = reference_factor(bc, omega_ref, window.length)
    data = gy_solve(profile, window, 1.0, tol)
    s = bc.sign
    numer = 2.0 - s * (data.Ddot_b + data.Dbar_b)
    formula = (
        "[2 - D'(t_b) - Dbar(t_b)] / [4 sin^2(w_ref T/2)]"
        if s > 0
        else "[2 + D'(t_b) + Dbar(t_b)] / [4 cos^2(w_ref T/2)]"
    )
    return DetRatioResult(
        numer / denom, bc, Method.GY, omega_ref, _diagnostics(data.pair, bc), formula
    )


def det_ratio_periodic(profile, window, omega_ref=None, tol=DEFAULT_TOL):
    """Periodic ratio against ``-d^2/dt^2 - omega_ref^2``.

    Raises
    ------
    DegenerateReferenceError
        If ``omega_ref * T`` is a multiple of ``2 pi``.
    """
    return _det_ratio_pa(profile, window, omega_ref, tol, BoundaryCondition.PERIODIC)


def det_ratio_antiperiodic(profile, window, omega_ref=None, tol=DEFAULT_TOL):
    """Antiperiodic ratio against ``-d^2/dt^2 - omega_ref^2``.

    Raises
    ------
    DegenerateReferenceError
        If ``omega_ref * T`` is an odd multiple of ``pi``.
    """
    return _det_ratio_pa(profile, window, omega_ref, tol, BoundaryCondition.ANTIPERIODIC)


def det_ratio(profile, window, bc, omega_ref=None, tol=DEFAULT_TOL):
    """Dispatch to the initial-value formula for `bc`."""
    bc = BoundaryCondition.parse(bc)
    if bc is BoundaryCondition.DIRICHLET:
        return det_ratio_dirichlet(profile, window, tol)
    return _det_ratio_pa(profile, window, omega_ref, tol, bc)


def trace_omega2_green(profile, window, bc, g, tol=DEFAULT_TOL, quad_tol=QUAD_TOL, pair=None):
    """``int dt omega2(t) G_g(t, t)`` over the window.

    Returns
    -------
    trace : float
    pair : SolutionPair
        The solutions used for ``G_g``.
    """
    bc = BoundaryCondition.parse(bc)
    if pair is None:
        pair = gy_basis(profile, g, window, tol)

    def integrand(t):
        return profile(t) * green(pair, bc, t, t)

    return adaptive_simpson(integrand, window.t_a, window.t_b, tol=quad_tol), pair


def _homotopy_log(profile, window, bc, nodes, weights, tol, quad_tol):
    """``int_0^1 dg trace`` plus per-node bookkeeping."""
    total = 0.0
    dets, drift, residual, steps = [], 0.0, math.inf, 0
    for g, wg in zip(nodes, weights):
        pair = gy_basis(profile, g, window, tol)
        det = fundamental_matrix(pair, bc).det / pair.W
        if dets and np.sign(det) != np.sign(dets[-1][1]):
            raise ZeroModeError(
                f"homotopy crosses a {bc.value} zero mode between g={dets[-1][0]:.6g} "
                f"and g={g:.6g}"
            )
        dets.append((g, det))
        try:
            trace, _ = trace_omega2_green(profile, window, bc, g, tol, quad_tol, pair)
        except ZeroModeError as exc:
            raise ZeroModeError(f"zero mode along the homotopy at g={g:.6g}: {exc}") from exc
        total += wg * trace
        drift = max(drift, pair.drift)
        residual = min(residual, proximity(pair, bc))
        steps += pair.steps
    return total, drift, residual, steps


def det_ratio_homotopy(
    profile, window, bc, omega_ref=None, n_g=32, tol=DEFAULT_TOL, quad_tol=QUAD_TOL
):
    """Determinant ratio from the integrated trace of the Green function.

    Dirichlet: ``exp(-int_0^1 dg Tr[omega2 G_g])`` (the ratio is 1 at g=0).
    Periodic/antiperiodic: the same integral minus its value for the
    constant reference ``omega_ref^2``. For periodic conditions both
    operators have the constant zero mode at ``g = 0``, so the ratio there
    is ``<omega2> / omega_ref^2`` rather than 1 and the result carries that
    factor.

    Raises
    ------
    ZeroModeError
        If some ``K_g`` along the path has a zero mode; the message names
        the offending ``g``.
    """
    bc = BoundaryCondition.parse(bc)
    nodes, weights = gauss_legendre(n_g)
    log_det, drift, residual, steps = _homotopy_log(
        profile, window, bc, nodes, weights, tol, quad_tol
    )
    log_det = -log_det
    if bc is not BoundaryCondition.DIRICHLET:
        _warn_if_not_periodic(profile, window)
        if omega_ref is None:
            omega_ref = default_omega_ref(profile, window)
        reference_factor(bc, omega_ref, window.length)
        ref_log, ref_drift, _, ref_steps = _homotopy_log(
            Constant(omega_ref**2), window, bc, nodes, weights, tol, quad_tol
        )
        log_det += ref_log
        if bc is BoundaryCondition.PERIODIC:
            # both operators share the constant zero mode at g=0; the ratio of
            # their lowest eigenvalues, -g<omega2> over -g omega_ref^2, survives
            mean = adaptive_simpson(profile, window.t_a, window.t_b, tol=1e-12) / window.length
            log_det += math.log(mean / omega_ref**2)
        drift = max(drift, ref_drift)
        steps += ref_steps
    return DetRatioResult(
        math.exp(log_det),
        bc,
        Method.HOMOTOPY,
        omega_ref,
        Diagnostics(drift, residual, steps),
        "exp(-int_0^1 dg int dt omega2(t) G_g(t,t))",
    )
