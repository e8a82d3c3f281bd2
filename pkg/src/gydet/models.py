"""Closed-form and semi-analytic reference models.

* the harmonic oscillator action and the Van Vleck route from an action
  to the Dirichlet ratio and the periodic/antiperiodic combinations;
* the amplitude-phase (Ermakov-Pinney) parametrisation of the solutions;
* the finite-period double-well instanton: geometry, normalised zero mode
  and primed determinant;
* shooting of classical trajectories, whose endpoint derivatives with
  respect to the initial data are the initial-value solutions.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from .errors import IntegrationError
from .ode import DEFAULT_TOL, TimeWindow, Trajectory, solve_system
from .special import ellip_ke, jacobi_sncndn
from .wronski import BoundaryCondition

__all__ = [
    "harmonic_action",
    "free_action",
    "action_derivatives",
    "vanvleck_ratio_dirichlet",
    "pa_combination_from_action",
    "ErmakovData",
    "ermakov_flow",
    "ermakov_constant",
    "ermakov_residuals",
    "ermakov_det_dirichlet",
    "ermakov_det_pa",
    "InstantonGeometry",
    "instanton_geometry",
    "instanton_zero_mode",
    "instanton_primed_det",
    "instanton_large_t",
    "instanton_reference_det",
    "instanton_ratio",
    "m_for_period",
    "shoot_classical",
    "shooting_gy",
]


# -- actions and the Van Vleck route ---------------------------------------


def harmonic_action(x_a, x_b, T, omega, M=1.0):
    """Classical action of the harmonic oscillator between fixed endpoints.

    ``(M omega / 2 sin(omega T)) [(x_b^2 + x_a^2) cos(omega T) - 2 x_b x_a]``

    Raises
    ------
    ValueError
        At a focal point ``omega T = n pi``.
    """
    s = math.sin(omega * T)
    if abs(s) < 1e-14 * max(1.0, abs(omega * T)):
        raise ValueError(f"focal point: sin(omega T) = 0 at omega T = {omega * T:g}")
    return M * omega / (2.0 * s) * ((x_b**2 + x_a**2) * math.cos(omega * T) - 2.0 * x_b * x_a)


def free_action(x_a, x_b, T, M=1.0):
    """``M (x_b - x_a)^2 / 2T``."""
    return M * (x_b - x_a) ** 2 / (2.0 * T)


def action_derivatives(action, x_a, x_b, T, rel_step=1e-5):
    """Second derivatives ``(A_aa, A_bb, A_ab)`` by central differences.

    Pure derivatives use the three-point stencil, the mixed one the
    four-point stencil, all with step ``rel_step * max(1, |x_a|, |x_b|)``.
    Rounding limits the result to about ``1e-16 |A| / h^2``.
    """
    h = rel_step * max(1.0, abs(x_a), abs(x_b))

    def A(a, b):
        return action(a, b, T)

    a0 = A(x_a, x_b)
    aa = (A(x_a + h, x_b) - 2.0 * a0 + A(x_a - h, x_b)) / h**2
    bb = (A(x_a, x_b + h) - 2.0 * a0 + A(x_a, x_b - h)) / h**2
    ab = (
        A(x_a + h, x_b + h) - A(x_a + h, x_b - h) - A(x_a - h, x_b + h) + A(x_a - h, x_b - h)
    ) / (4.0 * h**2)
    return aa, bb, ab


def _mixed(action, x_a, x_b, T):
    derivs = action_derivatives(action, x_a, x_b, T)
    if derivs[2] == 0.0:
        raise ValueError("mixed second derivative of the action vanishes")
    return derivs


def vanvleck_ratio_dirichlet(action, x_a, x_b, T, M=1.0):
    """Dirichlet ratio ``-M / (T d^2A / dx_a dx_b)`` from a classical action.

    ``action(x_a, x_b, T)`` must be twice differentiable in the endpoints.
    """
    return -M / _mixed(action, x_a, x_b, T)[2] / T


def pa_combination_from_action(action, x_a, x_b, T, M=1.0):
    """``(2 + (A_aa + A_bb)/A_ab, 2 - (A_aa + A_bb)/A_ab)``.

    These equal ``2 -+ [D'(t_b) + Dbar(t_b)]``, the periodic and
    antiperiodic numerators; for the oscillator ``4 sin^2(wT/2)`` and
    ``4 cos^2(wT/2)``.
    """
    aa, bb, ab = _mixed(action, x_a, x_b, T)
    r = (aa + bb) / ab
    return 2.0 + r, 2.0 - r


# -- amplitude and phase ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class ErmakovData:
    """Amplitude ``q`` and phase ``phi`` with ``eta = q cos phi``, ``xi = q sin phi``.

    The Wronskian of that pair is ``W = q^2 phi'``.
    """

    q: Trajectory
    phi: Trajectory
    W: float

    @property
    def window(self):
        return self.q.window


def ermakov_flow(profile, window, q0=1.0, qdot0=0.0, W=1.0, tol=DEFAULT_TOL):
    """Integrate ``q'' + omega2 q - W^2 / q^3 = 0`` together with ``phi' = W / q^2``.

    Starts from ``q(t_a) = q0``, ``q'(t_a) = qdot0``, ``phi(t_a) = 0``.
    """
    if not q0 > 0:
        raise ValueError("q0 must be positive")
    W2 = W * W

    def rhs(t, y):
        q, qd, _ = y
        return np.array([qd, -profile(t) * q + W2 / q**3, W / q**2])

    times, states, slopes = solve_system(rhs, window.t_a, [q0, qdot0, 0.0], window.t_b, tol)
    q, qd, phi = states.T
    q_traj = Trajectory(window, times, q, qd, slopes[:, 1], len(times) - 1)
    phi_traj = Trajectory(window, times, phi, W / q**2, -2.0 * W * qd / q**3, len(times) - 1)
    return ErmakovData(q_traj, phi_traj, W)


def ermakov_constant(omega, window, W=1.0):
    """Exact amplitude-phase data for constant ``omega2 = omega^2 > 0``.

    ``q = sqrt(W / omega)`` and ``phi = omega (t - t_a)``.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    nodes = np.linspace(window.t_a, window.t_b, 65)
    one = np.ones_like(nodes)
    q = Trajectory.from_samples(window, nodes, math.sqrt(W / omega) * one, 0 * one, 0 * one)
    phi = Trajectory.from_samples(window, nodes, omega * (nodes - window.t_a), omega * one, 0 * one)
    return ErmakovData(q, phi, W)


def ermakov_residuals(e, profile=None):
    """Largest relative violations of ``phi' q^2 = W`` and of the amplitude equation.

    The amplitude residual ``q'' + omega2 q - W^2/q^3`` is checked at step
    midpoints through the dense output (it holds at nodes by
    construction); it needs `profile` and is ``nan`` without one.
    """
    q, phi = e.q, e.phi
    constraint = float(np.max(np.abs(phi.derivatives * q.values**2 - e.W)) / abs(e.W))
    if profile is None:
        return constraint, math.nan
    mid = 0.5 * (q.nodes[1:] + q.nodes[:-1])
    qm = q.evaluate(mid)
    force = e.W**2 / qm**3
    res = q.evaluate(mid, 2) + profile(mid) * qm - force
    return constraint, float(np.max(np.abs(res) / (np.abs(force) + np.abs(profile(mid) * qm))))


def _ermakov_endpoints(e, max_violation=1e-6):
    constraint, _ = ermakov_residuals(e)
    if constraint > max_violation:
        raise ValueError(f"phase constraint violated by {constraint:.3e}")
    (qa, qda), (qb, qdb) = e.q.start, e.q.end
    dphi = e.phi.end[0] - e.phi.start[0]
    return qa, qda, qb, qdb, dphi


def ermakov_det_dirichlet(e, window):
    """Dirichlet ratio ``q_a q_b sin(phi_b - phi_a) / (W (t_b - t_a))``."""
    qa, _, qb, _, dphi = _ermakov_endpoints(e)
    return qa * qb * math.sin(dphi) / (e.W * window.length)


def ermakov_det_pa(e, window, omega_ref, bc):
    """Periodic or antiperiodic ratio from amplitude and phase.

    With ``d = phi_b - phi_a`` the periodic numerator is::

        4 sin^2(d/2) - (q_b - q_a)^2/(q_a q_b) cos d - (q'_b q_a - q'_a q_b)/W sin d

    divided by ``4 sin^2(omega_ref T / 2)``; the antiperiodic one flips
    the sign of the last two terms, replaces ``sin^2`` by ``cos^2`` and is
    divided by ``4 cos^2(omega_ref T / 2)``.
    """
    from .gelfand import reference_factor

    bc = BoundaryCondition.parse(bc)
    qa, qda, qb, qdb, d = _ermakov_endpoints(e)
    denom = reference_factor(bc, omega_ref, window.length)
    amp = (qb - qa) ** 2 / (qa * qb) * math.cos(d) + (qdb * qa - qda * qb) / e.W * math.sin(d)
    if bc is BoundaryCondition.PERIODIC:
        return (4.0 * math.sin(0.5 * d) ** 2 - amp) / denom
    return (4.0 * math.cos(0.5 * d) ** 2 + amp) / denom


# -- the instanton -------------------------------------------------------------


@dataclass(frozen=True)
class InstantonGeometry:
    """Turning point, auxiliary amplitude and period of the finite-period instanton.

    The solution is ``x_cl(tau) = x_b sn(z; m)`` with
    ``z = omega b tau / (2a)`` on ``[-T/2, T/2]``, so that ``z`` runs over
    ``[-kappa, kappa]``.
    """

    omega: float
    a: float
    m: float
    x_b: float
    b: float
    kappa: float
    eps: float
    T: float

    @property
    def energy(self):
        """``-(omega^2 / 8a^2) (x_b^2 - a^2)^2``."""
        return -(self.omega**2) / (8.0 * self.a**2) * (self.x_b**2 - self.a**2) ** 2

    @property
    def rate(self):
        """``dz/dtau = omega b / 2a``."""
        return self.omega * self.b / (2.0 * self.a)

    def window(self):
        return TimeWindow(-0.5 * self.T, 0.5 * self.T)

    def z(self, tau):
        return self.rate * np.asarray(tau, dtype=float)

    def x_cl(self, tau):
        return self.x_b * jacobi_sncndn(self.z(tau), self.m)[0]


def instanton_geometry(omega, a, m):
    """Build :class:`InstantonGeometry` for ``0 < m < 1``."""
    if not (omega > 0 and a > 0):
        raise ValueError("omega and a must be positive")
    if not 0.0 < m < 1.0:
        raise ValueError(f"m={m!r} outside (0, 1)")
    x_b = a * math.sqrt(2.0 * m / (1.0 + m))
    b = a * math.sqrt(2.0 / (1.0 + m))
    ke = ellip_ke(m)
    T = 4.0 * a * ke.kappa / (omega * b)
    return InstantonGeometry(omega, a, m, x_b, b, ke.kappa, ke.eps, T)


def _mode_norm(geo):
    """``N`` with ``N^-2 = (omega b / 2a) 4 a^2 [(1+m)E - (1-m)K] / (3 (1+m))``."""
    m = geo.m
    inv = geo.rate * 4.0 * geo.a**2 * ((1 + m) * geo.eps - (1 - m) * geo.kappa) / (3.0 * (1 + m))
    return 1.0 / math.sqrt(inv)


def instanton_zero_mode(geo, tau):
    """Normalised translation mode ``eta`` and ``eta'`` at `tau`.

    ``eta = -N r x_b cn(z) dn(z)`` with ``r = omega b / 2a``; it vanishes at
    both ends ``z = -+kappa``.
    """
    sn, cn, dn = jacobi_sncndn(geo.z(tau), geo.m)
    n, r = _mode_norm(geo), geo.rate
    eta = -n * r * geo.x_b * cn * dn
    etadot = n * r * r * geo.x_b * sn * (dn * dn + geo.m * cn * cn)
    return eta, etadot


def instanton_primed_det(geo):
    """Closed-form ``Det' K_1`` for the instanton on one period.

    ``(4a^2 / 3x_b^2) [(m+1)E - (1-m)K] / [(m+1)(1-m)^2] / (omega b / 2a)^3``
    """
    m = geo.m
    num = 4.0 * geo.a**2 / (3.0 * geo.x_b**2) * ((m + 1) * geo.eps - (1 - m) * geo.kappa)
    return num / ((m + 1) * (1 - m) ** 2) / geo.rate**3


def instanton_large_t(omega, T):
    """Large-period form ``exp(omega T) / (24 omega^3)`` of the primed determinant."""
    return math.exp(omega * T) / (24.0 * omega**3)


def instanton_reference_det(omega, T):
    """``Det(-d^2 + omega^2) = sinh(omega T) / omega`` (Dirichlet)."""
    return math.sinh(omega * T) / omega


def instanton_ratio(geo):
    """``Det' K_1 / Det(-d^2 + omega^2)``; tends to ``1 / (12 omega^2)``."""
    return instanton_primed_det(geo) / instanton_reference_det(geo.omega, geo.T)


def m_for_period(omega, a, T):
    """Parameter ``m`` whose instanton has period `T`.

    The period grows monotonically from ``sqrt(2) pi / omega`` (``m -> 0``)
    to infinity (``m -> 1``). The root is bracketed in
    ``u = -log(1 - m)``.

    Raises
    ------
    ValueError
        If `T` is not above the minimum period or beyond double precision.
    """
    t_min = math.sqrt(2.0) * math.pi / omega
    if not T > t_min:
        raise ValueError(f"period {T:g} unreachable: must exceed sqrt(2) pi / omega = {t_min:.6g}")

    def f(u):
        return instanton_geometry(omega, a, -math.expm1(-u)).T - T

    lo, hi = 1e-12, 36.0
    if f(lo) > 0:
        return -math.expm1(-lo)
    if f(hi) < 0:
        raise ValueError(f"period {T:g} too long: m would round to 1")
    return -math.expm1(-brentq(f, lo, hi, xtol=1e-15, rtol=1e-15))


# -- classical shooting -------------------------------------------------------


def _numerical_slope(potential, x, step=1e-3):
    h = step * max(1.0, abs(x))
    return (
        potential(x - 2 * h) - 8 * potential(x - h) + 8 * potential(x + h) - potential(x + 2 * h)
    ) / (12.0 * h)


def shoot_classical(
    potential,
    x_a,
    xdot_a,
    window,
    tol=DEFAULT_TOL,
    dV=None,
    imaginary_time=False,
    M=1.0,
    blow_up=1e6,
):
    """Integrate ``M x'' = -V'(x)`` (or ``+V'(x)`` in imaginary time).

    Parameters
    ----------
    potential : callable
        ``V(x)``; its slope comes from `dV` or a five-point difference.
    imaginary_time : bool
        Select ``M x'' = +V'(x)``, the motion in the inverted potential
        that makes kinks and instantons solutions.

    Raises
    ------
    IntegrationError
        If ``|x|`` exceeds `blow_up`.
    """
    slope = dV if dV is not None else (lambda x: _numerical_slope(potential, x))
    sign = 1.0 if imaginary_time else -1.0

    def rhs(t, y):
        if abs(y[0]) > blow_up:
            raise IntegrationError(f"trajectory blew up (|x| > {blow_up:g}) near t={t:.6g}")
        return np.array([y[1], sign * slope(y[0]) / M])

    times, states, slopes = solve_system(rhs, window.t_a, [x_a, xdot_a], window.t_b, tol)
    return Trajectory(window, times, states[:, 0], states[:, 1], slopes[:, 1], len(times) - 1)


def shooting_gy(potential, x_a, xdot_a, window, tol=1e-12, step=1e-6, **kwargs):
    """Initial-value solutions from derivatives of shots with respect to initial data.

    ``D(t_b) = dx(t_b)/dxdot_a`` and ``Dbar(t_b) = dx(t_b)/dx_a``, with
    their time derivatives, by central differences over auxiliary shots
    with step ``step * max(1, |x|)``. Extra keywords go to
    :func:`shoot_classical`.

    Returns
    -------
    dict
        Keys ``D_b``, ``Ddot_b``, ``Dbar_b``, ``Dbardot_b``.
    """

    def end(xa, vd):
        return np.array(shoot_classical(potential, xa, vd, window, tol, **kwargs).end)

    hx = step * max(1.0, abs(x_a))
    hv = step * max(1.0, abs(xdot_a))
    d = (end(x_a, xdot_a + hv) - end(x_a, xdot_a - hv)) / (2.0 * hv)
    dbar = (end(x_a + hx, xdot_a) - end(x_a - hx, xdot_a)) / (2.0 * hx)
    return {"D_b": float(d[0]), "Ddot_b": float(d[1]), "Dbar_b": float(dbar[0]), "Dbardot_b": float(dbar[1])}
