"""Jacobi commutators, fundamental matrices and Green functions.

Everything is built from a :class:`~gydet.ode.SolutionPair` ``(eta, xi)``
with Wronskian ``W``. The basic object is the commutator

    delta(t, t') = [eta(t) xi(t') - xi(t) eta(t')] / W,

which vanishes on the diagonal and has unit negative slope there. The
Green functions below are invariant under any invertible change of basis
of the pair.
"""

from dataclasses import dataclass
import enum
import weakref

import numpy as np

from .errors import ZeroModeError

__all__ = [
    "BoundaryCondition",
    "FundamentalMatrix",
    "ZERO_MODE_THRESHOLD",
    "delta",
    "delta_dt",
    "delta_bar",
    "fundamental_matrix",
    "proximity",
    "boundary_functional",
    "eigenvalue_estimate",
    "monodromy",
    "spectral_scale",
    "degeneracy",
    "green",
    "green_dt",
]

ZERO_MODE_THRESHOLD = 1e-8


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"

    @property
    def sign(self):
        """``+1`` for periodic, ``-1`` for antiperiodic (``y_b = sign * y_a``)."""
        if self is BoundaryCondition.PERIODIC:
            return 1.0
        if self is BoundaryCondition.ANTIPERIODIC:
            return -1.0
        raise ValueError("Dirichlet conditions have no periodicity sign")

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown boundary condition {value!r}; expected one of {names}")


@dataclass(frozen=True)
class FundamentalMatrix:
    """Constant 2x2 matrix whose determinant signals zero modes."""

    entries: np.ndarray
    det: float
    bc: BoundaryCondition


def _values(traj, t, nu):
    return traj.evaluate(t, nu)


def _comm(pair, e1, x1, e2, x2):
    return (e1 * x2 - x1 * e2) / pair.W


def delta(pair, t, tp):
    """Jacobi commutator ``delta(t, tp)``; antisymmetric in its arguments."""
    return _comm(pair, pair.eta(t), pair.xi(t), pair.eta(tp), pair.xi(tp))


def delta_dt(pair, t, tp):
    """Derivative of ``delta(t, tp)`` with respect to its first argument."""
    return _comm(pair, pair.eta.derivative(t), pair.xi.derivative(t), pair.eta(tp), pair.xi(tp))


def _endpoint_data(pair):
    ea, eda = pair.eta.start
    eb, edb = pair.eta.end
    xa, xda = pair.xi.start
    xb, xdb = pair.xi.end
    return ea, eda, eb, edb, xa, xda, xb, xdb


def fundamental_matrix(pair, bc):
    """Fundamental matrix for the given boundary condition.

    Dirichlet rows are ``(eta_a, xi_a)`` and ``(eta_b, xi_b)``; periodic
    (antiperiodic) rows are ``(eta_b -+ eta_a, xi_b -+ xi_a)`` and the same
    for the derivatives.
    """
    bc = BoundaryCondition.parse(bc)
    ea, eda, eb, edb, xa, xda, xb, xdb = _endpoint_data(pair)
    if bc is BoundaryCondition.DIRICHLET:
        m = np.array([[ea, xa], [eb, xb]])
    else:
        s = bc.sign
        m = np.array([[eb - s * ea, xb - s * xa], [edb - s * eda, xdb - s * xda]])
    return FundamentalMatrix(m, float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]), bc)


def delta_bar(pair, bc):
    """``2 +- d_t delta(t_a, t_b) +- d_t delta(t_b, t_a)``, equal to ``det / W``."""
    bc = BoundaryCondition.parse(bc)
    s = bc.sign
    ta, tb = pair.window.t_a, pair.window.t_b
    return 2.0 + s * delta_dt(pair, ta, tb) + s * delta_dt(pair, tb, ta)


def boundary_functional(pair, bc):
    """``f`` and ``df/dlambda`` at ``lambda = 0`` for the shifted operator ``K - lambda``.

    ``f`` is ``delta(t_a, t_b)`` (Dirichlet) or ``delta_bar`` (periodic,
    antiperiodic); it vanishes exactly when ``K - lambda`` has a zero mode.
    The derivative follows from Duhamel's formula and reduces to bilinear
    forms in the Gram matrix of the pair.
    """
    ea, eda, eb, edb, xa, xda, xb, xdb = _endpoint_data(pair)
    W = pair.W
    G = pair.gram()
    c_sb = np.array([xb, -eb]) / W  # delta(s, t_b)
    c_as = np.array([-xa, ea]) / W  # delta(t_a, s) = D(s)
    if bc is BoundaryCondition.DIRICHLET:
        return (ea * xb - xa * eb) / W, -float(c_sb @ G @ c_as)
    c_dsb = np.array([xdb, -edb]) / W  # d/dt_b delta(s, t_b)
    c_dbar = np.array([xda, -eda]) / W  # Dbar(s)
    df = bc.sign * float(c_dsb @ G @ c_as + c_sb @ G @ c_dbar)
    return delta_bar(pair, bc), df


def eigenvalue_estimate(pair, bc):
    """Newton estimate ``-f / f'`` of the eigenvalue of ``K_g`` nearest zero.

    Uses the boundary functional of :func:`boundary_functional`; the value
    does not depend on the basis of the pair.
    """
    bc = BoundaryCondition.parse(bc)
    f, df = boundary_functional(pair, bc)
    if df == 0.0:
        return 0.0 if f == 0.0 else np.inf
    return -f / df


def monodromy(pair):
    """Map ``(h(t_a), h'(t_a)) -> (h(t_b), h'(t_b))`` as a 2x2 matrix."""
    ea, eda, eb, edb, xa, xda, xb, xdb = _endpoint_data(pair)
    phi_a = np.array([[ea, xa], [eda, xda]])
    phi_b = np.array([[eb, xb], [edb, xdb]])
    return phi_b @ np.linalg.inv(phi_a)


def degeneracy(pair, bc):
    """Distance of the monodromy from ``sign * I`` in dimensionless units.

    Zero means every solution obeys the periodic (antiperiodic) condition,
    i.e. a two-dimensional zero space. Dirichlet problems are never doubly
    degenerate and return ``inf``.
    """
    bc = BoundaryCondition.parse(bc)
    if bc is BoundaryCondition.DIRICHLET:
        return np.inf
    T = pair.window.length
    m = monodromy(pair) - bc.sign * np.eye(2)
    return float(max(abs(m[0, 0]), abs(m[1, 1]), abs(m[0, 1]) / T, abs(m[1, 0]) * T))


def spectral_scale(pair):
    """``max |g omega2| + pi^2 / T^2``, recovered from the pair itself.

    Both solutions obey ``h'' = -g omega2 h``, hence
    ``g omega2 = -(eta eta'' + xi xi'') / (eta^2 + xi^2)`` at every node.
    """
    e, x = pair.eta, pair.xi
    w2 = -(e.values * e.accelerations + x.values * x.accelerations) / (
        e.values**2 + x.values**2
    )
    return float(np.max(np.abs(w2))) + (np.pi / pair.window.length) ** 2


_PROXIMITY = weakref.WeakKeyDictionary()


def proximity(pair, bc):
    """Scale-free zero-mode proximity of ``K_g`` under `bc`.

    Returns ``|lambda_0| / spectral_scale(pair)`` with ``lambda_0`` from
    :func:`eigenvalue_estimate`, so exponentially small eigenvalues on long
    windows are seen as such while exponentially growing solutions are not
    mistaken for zero modes. The estimate relies on the pair resolving
    every solution; once solutions grow by more than about ``1e8`` across
    the window (``|omega2| T^2`` of several hundred with ``omega2 < 0``)
    rounding in the decaying direction makes it unreliable. For a doubly
    degenerate zero space, where the Newton estimate is 0/0, the square of
    :func:`degeneracy` is returned.
    """
    bc = BoundaryCondition.parse(bc)
    cache = _PROXIMITY.setdefault(pair, {})
    if bc not in cache:
        deg = degeneracy(pair, bc)
        if deg < np.sqrt(ZERO_MODE_THRESHOLD):
            value = deg**2
        else:
            value = abs(eigenvalue_estimate(pair, bc)) / spectral_scale(pair)
        cache[bc] = float(value)
    return cache[bc]


def _check_invertible(pair, bc):
    residual = proximity(pair, bc)
    if bc is not BoundaryCondition.DIRICHLET:
        # the periodic formula also divides by the Dirichlet commutator
        residual = min(residual, proximity(pair, BoundaryCondition.DIRICHLET))
    if residual < ZERO_MODE_THRESHOLD:
        raise ZeroModeError(
            f"{bc.value} fundamental matrix is numerically singular "
            f"(proximity {residual:.3e}); use a primed determinant instead"
        )


def _green_parts(pair, bc, t, tp, nu, side):
    bc = BoundaryCondition.parse(bc)
    _check_invertible(pair, bc)
    win = pair.window
    if not (win.contains(t) and win.contains(tp)):
        raise ValueError(f"arguments outside window [{win.t_a}, {win.t_b}]")
    t = np.asarray(t, dtype=float)
    tp = np.asarray(tp, dtype=float)
    ea, _, eb, _, xa, _, xb, _ = _endpoint_data(pair)

    e_t, x_t = _values(pair.eta, t, nu), _values(pair.xi, t, nu)
    e_p, x_p = pair.eta(tp), pair.xi(tp)
    d_ab = _comm(pair, ea, xa, eb, xb)

    d_b_t = _comm(pair, eb, xb, e_t, x_t)  # delta(t_b, t) (or its t-derivative)
    d_t_a = _comm(pair, e_t, x_t, ea, xa)  # delta(t, t_a)
    d_b_p = _comm(pair, eb, xb, e_p, x_p)
    d_p_a = _comm(pair, e_p, x_p, ea, xa)

    if side is None:
        upper = t > tp
    else:
        upper = np.broadcast_to(side > 0, np.broadcast(t, tp).shape)
    g = np.where(upper, d_b_t * d_p_a, d_b_p * d_t_a) / d_ab
    if bc is not BoundaryCondition.DIRICHLET:
        s = bc.sign
        g = g - s * (d_t_a + s * d_b_t) * (d_p_a + s * d_b_p) / (delta_bar(pair, bc) * d_ab)
    return float(g) if np.ndim(g) == 0 else g


def green(pair, bc, t, tp):
    """Green function ``G(t, tp)`` of ``K_g`` for the boundary condition.

    Dirichlet uses the two-commutator Wronski formula; periodic and
    antiperiodic add a rank-one correction built from ``delta_bar``.
    Broadcasts over array arguments.

    Raises
    ------
    ZeroModeError
        If the relevant fundamental matrix is numerically singular.
    """
    return _green_parts(pair, bc, t, tp, 0, None)


def green_dt(pair, bc, t, tp, side):
    """One-sided derivative ``d G(t, tp) / dt``.

    ``side=+1`` selects the branch ``t > tp`` and ``side=-1`` the branch
    ``t < tp``; at ``t == tp`` the two differ by the unit jump.
    """
    return _green_parts(pair, bc, t, tp, 1, side)
