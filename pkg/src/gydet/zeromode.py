"""Zero modes and primed determinants.

When ``K_1`` has a single zero mode ``eta`` (normalised, ``int eta^2 = 1``)
the determinant with that eigenvalue removed is

* Dirichlet: ``Det' K_1 = -1 / (eta'(t_b) eta'(t_a))``
* periodic / antiperiodic (``s = +1 / -1``), with ``xi`` any second
  solution and ``W`` the Wronskian of ``(eta, xi)``::

      Det' K_1 = -(xi_b - s xi_a) / (eta_b W) = -(xi'_b - s xi'_a) / (eta'_b W)

The normalisation matches the unprimed ratios of :mod:`gydet.gelfand`:
``Det K_0 = t_b - t_a`` for Dirichlet and ``Det(-d^2 - w^2) = 4 sin^2(wT/2)``
(``4 cos^2``) for the periodic (antiperiodic) case.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
import scipy.linalg

from .errors import MarginalZeroModeWarning, ZeroModeError
from .ode import DEFAULT_TOL, SolutionPair, gy_basis
from .wronski import (
    ZERO_MODE_THRESHOLD,
    BoundaryCondition,
    boundary_functional,
    degeneracy,
    fundamental_matrix,
    proximity,
)

__all__ = [
    "REJECT_THRESHOLD",
    "NormalizedMode",
    "ZeroModeFit",
    "zero_mode_residual",
    "classify_residual",
    "normalize_mode",
    "find_zero_mode",
    "primed_det_dirichlet",
    "primed_det_pa",
    "primed_det_spectral",
    "PrimedDetResult",
    "primed_det",
]

REJECT_THRESHOLD = 1e-4
AGREEMENT = 1e-6


def zero_mode_residual(pair, bc):
    """Scale-free distance of ``K_g`` from having a zero mode under `bc`.

    Relative size of the eigenvalue nearest zero; see
    :func:`gydet.wronski.proximity`.
    """
    return proximity(pair, bc)


def classify_residual(residual, what="zero mode"):
    """``"accept"``, ``"marginal"`` (with a warning) or raise.

    Raises
    ------
    ZeroModeError
        If `residual` exceeds the rejection threshold.
    """
    if not residual <= REJECT_THRESHOLD:
        raise ZeroModeError(
            f"no {what}: boundary residual {residual:.3e} exceeds {REJECT_THRESHOLD:g}"
        )
    if residual < ZERO_MODE_THRESHOLD:
        return "accept"
    warnings.warn(
        f"{what} residual {residual:.3e} is in the marginal band "
        f"[{ZERO_MODE_THRESHOLD:g}, {REJECT_THRESHOLD:g}]",
        MarginalZeroModeWarning,
        stacklevel=3,
    )
    return "marginal"


@dataclass(frozen=True, eq=False)
class NormalizedMode:
    """A unit-norm solution of ``K h = 0`` and its endpoint data.

    Attributes
    ----------
    eta : Trajectory
    norm_residual : float
        ``|int eta^2 dt - 1|`` after rescaling.
    eta_a, eta_b, etadot_a, etadot_b : float
    scale : float
        Factor applied to the input trajectory.
    """

    eta: object
    norm_residual: float
    eta_a: float
    eta_b: float
    etadot_a: float
    etadot_b: float
    scale: float

    def boundary_residual(self, bc):
        """Eigenvalue shift implied by the boundary mismatch, in relative units.

        For a solution of ``K eta = 0`` that misses the boundary condition
        slightly, Green's identity gives the nearby eigenvalue as
        ``eta_a eta'_a - eta_b eta'_b`` (Dirichlet) or
        ``s (eta_a eta'_b - eta'_a eta_b)`` (periodic ``s = 1``,
        antiperiodic ``s = -1``); it is divided by an operator scale read
        off the mode.
        """
        bc = BoundaryCondition.parse(bc)
        if bc is BoundaryCondition.DIRICHLET:
            shift = self.eta_a * self.etadot_a - self.eta_b * self.etadot_b
        else:
            shift = bc.sign * (self.eta_a * self.etadot_b - self.etadot_a * self.eta_b)
        e = self.eta
        peak = np.max(np.abs(e.values))
        scale = np.max(np.abs(e.accelerations)) / peak + (math.pi / e.window.length) ** 2
        return abs(shift) / scale


def normalize_mode(eta):
    """Rescale `eta` to unit L2 norm over its window.

    Raises
    ------
    ValueError
        For an identically vanishing trajectory.
    """
    norm2 = eta.inner()
    if not norm2 > 0.0:
        raise ValueError("cannot normalise a vanishing trajectory")
    scale = 1.0 / math.sqrt(norm2)
    eta_n = eta.scaled(scale)
    (ea, eda), (eb, edb) = eta_n.start, eta_n.end
    return NormalizedMode(eta_n, abs(eta_n.inner() - 1.0), ea, eb, eda, edb, scale)


@dataclass(frozen=True, eq=False)
class ZeroModeFit:
    """Normalised zero mode, a complementary solution and their Wronskian."""

    mode: NormalizedMode
    xi: object
    W: float
    bc: BoundaryCondition
    residual: float
    status: str


def _least_boundary_combination(pair, bc):
    """Unit coefficient vector minimising boundary mismatch over L2 norm."""
    T = pair.window.length
    lam = fundamental_matrix(pair, bc).entries
    if bc is not BoundaryCondition.DIRICHLET:
        lam = lam * np.array([[1.0], [T]])
    B = lam.T @ lam
    G = pair.gram() / T
    try:
        _, vecs = scipy.linalg.eigh(B, G)
        c = vecs[:, 0]
    except np.linalg.LinAlgError:
        # Gram matrix numerically singular: annihilate the larger row
        r = lam[int(np.argmax(np.linalg.norm(lam, axis=1)))]
        c = np.array([-r[1], r[0]])
    return c / np.linalg.norm(c)


def find_zero_mode(pair, bc):
    """Extract the zero mode of ``K_g`` from a solution pair.

    The mode is the combination of the pair with the smallest boundary
    mismatch relative to its L2 norm; for an exact zero mode this is the
    mode itself, for a near one it is the best approximation to the
    eigenfunction. The complementary solution is orthogonal to it in
    coefficient space.

    Raises
    ------
    ZeroModeError
        If the residual exceeds the rejection threshold, or the zero space
        is two-dimensional.
    """
    bc = BoundaryCondition.parse(bc)
    if degeneracy(pair, bc) < math.sqrt(ZERO_MODE_THRESHOLD):
        raise ZeroModeError(
            f"second zero mode detected: every solution satisfies the {bc.value} "
            "condition; only a single zero mode is supported"
        )
    residual = proximity(pair, bc)
    status = classify_residual(residual, f"{bc.value} zero mode")

    coeffs = _least_boundary_combination(pair, bc)
    basis = np.array([coeffs, [-coeffs[1], coeffs[0]]])
    rotated = pair.transformed(basis)
    mode = normalize_mode(rotated.eta)
    return ZeroModeFit(mode, rotated.xi, rotated.W * mode.scale, bc, residual, status)


def primed_det_dirichlet(mode):
    """``Det' K_1 = -1 / (eta'_b eta'_a)`` for a normalised Dirichlet zero mode.

    Raises
    ------
    ZeroModeError
        If the mode misses the Dirichlet condition or an endpoint slope
        vanishes.
    """
    classify_residual(mode.boundary_residual(BoundaryCondition.DIRICHLET), "Dirichlet zero mode")
    slope = max(abs(mode.etadot_a), abs(mode.etadot_b), np.max(np.abs(mode.eta.derivatives)))
    if min(abs(mode.etadot_a), abs(mode.etadot_b)) < 1e-300 + 1e-14 * slope:
        raise ZeroModeError("vanishing endpoint derivative of the Dirichlet zero mode")
    return -1.0 / (mode.etadot_b * mode.etadot_a)


def primed_det_pa(mode, xi, W, bc):
    """Primed periodic or antiperiodic determinant.

    Both quotient forms are evaluated; the consistency relation
    ``eta_b (xi'_b -+ xi'_a) = eta'_b (xi_b -+ xi_a)`` must hold to 1e-6
    relative for an accepted mode. A form whose denominator is negligible
    is skipped.

    Parameters
    ----------
    mode : NormalizedMode
    xi : Trajectory
        Any solution independent of ``mode.eta``.
    W : float
        Wronskian ``eta xi' - eta' xi`` of the normalised mode and `xi`.
    bc : BoundaryCondition or str
    """
    bc = BoundaryCondition.parse(bc)
    if bc is BoundaryCondition.DIRICHLET:
        raise ValueError("use primed_det_dirichlet for Dirichlet conditions")
    if W == 0.0:
        raise ZeroModeError("xi is not independent of the zero mode (W = 0)")
    status = classify_residual(mode.boundary_residual(bc), f"{bc.value} zero mode")
    s = bc.sign
    T = mode.eta.window.length
    (xa, xda), (xb, xdb) = xi.start, xi.end
    d_val, d_der = xb - s * xa, xdb - s * xda
    den_val, den_der = abs(mode.eta_b), T * abs(mode.etadot_b)
    if max(den_val, den_der) == 0.0:
        raise ZeroModeError("both denominators vanish")
    forms = []
    if den_val > AGREEMENT * den_der:
        forms.append((den_val, -d_val / (mode.eta_b * W)))
    if den_der > AGREEMENT * den_val:
        forms.append((den_der, -d_der / (mode.etadot_b * W)))
    value = max(forms)[1]
    if len(forms) == 2 and status == "accept":
        v1, v2 = forms[0][1], forms[1][1]
        if abs(v1 - v2) > AGREEMENT * max(abs(v1), abs(v2)):
            raise ZeroModeError(
                f"consistency check failed: value form {v1:.12g} vs derivative form {v2:.12g}"
            )
    return value


def primed_det_spectral(pair, bc):
    """``Det' = -d/dlambda Det(K - lambda)`` at ``lambda = 0``.

    Valid when ``K`` has a zero mode; computed from the boundary functional
    of the pair rather than from the mode, so it is an independent check on
    :func:`primed_det_dirichlet` and :func:`primed_det_pa`.
    """
    bc = BoundaryCondition.parse(bc)
    return -boundary_functional(pair, bc)[1]


@dataclass(frozen=True, eq=False)
class PrimedDetResult:
    """Primed determinant with both evaluation routes.

    ``value`` is the closed form when the zero mode is accepted and the
    spectral derivative in the marginal band, where the mode only
    approximately meets the boundary condition and the closed form, which
    assumes it does exactly, is no longer reliable.
    """

    value: float
    closed_form: float
    spectral: float
    residual: float
    status: str
    fit: ZeroModeFit


def primed_det(profile, window, bc, tol=DEFAULT_TOL):
    """Integrate ``K_1``, locate its zero mode and evaluate ``Det' K_1``.

    `profile` may also be a ready :class:`~gydet.ode.SolutionPair`.
    """
    bc = BoundaryCondition.parse(bc)
    pair = profile if isinstance(profile, SolutionPair) else gy_basis(profile, 1.0, window, tol)
    fit = find_zero_mode(pair, bc)
    with warnings.catch_warnings():
        # already reported by find_zero_mode
        warnings.simplefilter("ignore", MarginalZeroModeWarning)
        if bc is BoundaryCondition.DIRICHLET:
            closed = primed_det_dirichlet(fit.mode)
        else:
            closed = primed_det_pa(fit.mode, fit.xi, fit.W, bc)
    spectral = primed_det_spectral(pair, bc)
    value = closed if fit.status == "accept" else spectral
    return PrimedDetResult(value, closed, spectral, fit.residual, fit.status, fit)
