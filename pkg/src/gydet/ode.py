"""Adaptive Dormand-Prince 5(4) integration of ``h'' = -g omega2(t) h``.

Solutions are returned as :class:`Trajectory` objects: the accepted step
endpoints together with ``h``, ``h'`` and ``h''`` there, interpolated by
piecewise quintic Hermite polynomials. The second derivative comes from
the differential equation itself, so the interpolant is exact at nodes
and C^2 across them.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import IntegrationError

__all__ = [
    "TimeWindow",
    "Trajectory",
    "SolutionPair",
    "solve_system",
    "integrate_ivp",
    "gy_basis",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

_SAFETY = 0.9
_ALPHA = 0.7 / 5.0
_BETA = 0.4 / 5.0
_FAC_MIN, _FAC_MAX = 0.2, 10.0
_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class TimeWindow:
    """Closed interval ``[t_a, t_b]`` with ``t_b > t_a``."""

    t_a: float
    t_b: float

    def __post_init__(self):
        if not (math.isfinite(self.t_a) and math.isfinite(self.t_b)):
            raise ValueError("time window bounds must be finite")
        if not self.t_b > self.t_a:
            raise ValueError(f"time window needs t_b > t_a, got [{self.t_a}, {self.t_b}]")

    @property
    def length(self):
        return self.t_b - self.t_a

    def contains(self, t):
        slack = 1e-12 * self.length
        t = np.asarray(t, dtype=float)
        return bool(np.all((t >= self.t_a - slack) & (t <= self.t_b + slack)))


def _hermite_basis(s, nu):
    """Quintic Hermite basis (value, slope, curvature at both ends) in ``s``."""
    s2 = s * s
    s3 = s2 * s
    s4 = s3 * s
    s5 = s4 * s
    if nu == 0:
        return (
            1 - 10 * s3 + 15 * s4 - 6 * s5,
            s - 6 * s3 + 8 * s4 - 3 * s5,
            0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
            0.5 * s3 - s4 + 0.5 * s5,
            -4 * s3 + 7 * s4 - 3 * s5,
            10 * s3 - 15 * s4 + 6 * s5,
        )
    if nu == 1:
        return (
            -30 * s2 + 60 * s3 - 30 * s4,
            1 - 18 * s2 + 32 * s3 - 15 * s4,
            s - 4.5 * s2 + 6 * s3 - 2.5 * s4,
            1.5 * s2 - 4 * s3 + 2.5 * s4,
            -12 * s2 + 28 * s3 - 15 * s4,
            30 * s2 - 60 * s3 + 30 * s4,
        )
    if nu == 2:
        return (
            -60 * s + 180 * s2 - 120 * s3,
            -36 * s + 96 * s2 - 60 * s3,
            1 - 9 * s + 18 * s2 - 10 * s3,
            3 * s - 12 * s2 + 10 * s3,
            -24 * s + 84 * s2 - 60 * s3,
            60 * s - 180 * s2 + 120 * s3,
        )
    raise ValueError("only derivatives up to order 2 are available")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Solution of a second-order ODE with quintic Hermite dense output.

    Attributes
    ----------
    window : TimeWindow
    nodes : ndarray
        Ascending node times, ``nodes[0] == t_a`` and ``nodes[-1] == t_b``.
    values, derivatives, accelerations : ndarray
        ``h``, ``h'`` and ``h''`` at the nodes.
    steps : int
        Accepted integrator steps that produced the nodes.
    """

    window: TimeWindow
    nodes: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    accelerations: np.ndarray
    steps: int = 0

    @classmethod
    def from_samples(cls, window, nodes, values, derivatives, accelerations):
        """Wrap tabulated ``(h, h', h'')`` as a trajectory."""
        arrays = [np.array(x, dtype=float) for x in (nodes, values, derivatives, accelerations)]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1 or len(arrays[0]) < 2:
            raise ValueError("samples must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(arrays[0]) <= 0):
            raise ValueError("sample nodes must be strictly ascending")
        return cls(window, *arrays, steps=len(arrays[0]) - 1)

    def evaluate(self, t, nu=0):
        """Interpolant (``nu=0``) or its ``nu``-th time derivative at `t`."""
        t_arr = np.asarray(t, dtype=float)
        if not self.window.contains(t_arr):
            raise ValueError(f"t outside trajectory window [{self.window.t_a}, {self.window.t_b}]")
        nodes = self.nodes
        i = np.clip(np.searchsorted(nodes, t_arr, side="right") - 1, 0, len(nodes) - 2)
        dt = nodes[i + 1] - nodes[i]
        s = np.clip((t_arr - nodes[i]) / dt, 0.0, 1.0)
        b0, b1, b2, b3, b4, b5 = _hermite_basis(s, nu)
        y0, y1 = self.values[i], self.values[i + 1]
        d0, d1 = self.derivatives[i], self.derivatives[i + 1]
        a0, a1 = self.accelerations[i], self.accelerations[i + 1]
        out = (
            b0 * y0
            + dt * b1 * d0
            + dt * dt * b2 * a0
            + dt * dt * b3 * a1
            + dt * b4 * d1
            + b5 * y1
        ) / dt**nu
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self.evaluate(t, 0)

    def derivative(self, t):
        return self.evaluate(t, 1)

    @property
    def start(self):
        """``(h(t_a), h'(t_a))``."""
        return float(self.values[0]), float(self.derivatives[0])

    @property
    def end(self):
        """``(h(t_b), h'(t_b))``."""
        return float(self.values[-1]), float(self.derivatives[-1])

    def inner(self, other=None):
        """``int h * other dt`` over the window (``other`` defaults to ``self``).

        Exact for the interpolants: products of quintics are degree-10
        polynomials on each step, integrated by 6-point Gauss-Legendre.
        """
        other = self if other is None else other
        if other.nodes is not self.nodes and not np.array_equal(other.nodes, self.nodes):
            raise ValueError("trajectories must share nodes")
        x, w = np.polynomial.legendre.leggauss(6)
        lo, dt = self.nodes[:-1], np.diff(self.nodes)
        t = np.clip((lo[:, None] + 0.5 * dt[:, None] * (x + 1.0)).ravel(), lo[0], self.nodes[-1])
        weights = (0.5 * dt[:, None] * w).ravel()
        return float(np.sum(weights * self.evaluate(t) * other.evaluate(t)))

    def scaled(self, factor):
        return Trajectory(
            self.window,
            self.nodes,
            factor * self.values,
            factor * self.derivatives,
            factor * self.accelerations,
            self.steps,
        )

    def combine(self, alpha, other, beta):
        """Return ``alpha * self + beta * other`` (nodes must coincide)."""
        if other.nodes is not self.nodes and not np.array_equal(other.nodes, self.nodes):
            raise ValueError("trajectories must share nodes to be combined")
        return Trajectory(
            self.window,
            self.nodes,
            alpha * self.values + beta * other.values,
            alpha * self.derivatives + beta * other.derivatives,
            alpha * self.accelerations + beta * other.accelerations,
            max(self.steps, other.steps),
        )


def _initial_step(rhs, t0, y0, f0, direction, tol, span):
    scale = tol + tol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = rhs(t0 + direction * h0, y0 + direction * h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5.0)
    return min(100 * h0, h1, span)


def solve_system(rhs, t0, y0, t1, tol=DEFAULT_TOL):
    """Integrate ``y' = rhs(t, y)`` from `t0` to `t1` with Dormand-Prince 5(4).

    The local error of every accepted step satisfies
    ``|err_i| <= tol * (1 + max(|y_i|, |y_new_i|))`` componentwise; the step
    size follows a PI controller.

    Returns
    -------
    times : ndarray
        Accepted step endpoints in integration order (descending when
        ``t1 < t0``).
    states, slopes : ndarray
        ``y`` and ``rhs(t, y)`` at those times, shape ``(n, dim)``.

    Raises
    ------
    IntegrationError
        On step-size underflow or a non-finite right-hand side.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    y = np.array(y0, dtype=float)
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    f = rhs(t0, y)
    if not np.all(np.isfinite(f)):
        raise IntegrationError(f"non-finite right-hand side at t={t0}")
    times, states, slopes = [t0], [y.copy()], [f.copy()]
    if span == 0:
        return np.array(times), np.array(states), np.array(slopes)

    h = _initial_step(rhs, t0, y, f, direction, tol, span)
    t = t0
    err_prev = 1.0
    k = [None] * 7
    for _ in range(_MAX_STEPS):
        remaining = abs(t1 - t)
        last = h >= remaining
        if last:
            h = remaining
        if h <= 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t}")
        k[0] = f
        for s in range(1, 7):
            ys = y + (direction * h) * sum(a * k[j] for j, a in enumerate(_A[s]) if a)
            k[s] = rhs(t + direction * _C[s] * h, ys)
        y_new = ys
        f_new = k[6]
        if not np.all(np.isfinite(f_new)) or not np.all(np.isfinite(y_new)):
            h *= 0.25
            continue
        err_vec = h * sum(e * kk for e, kk in zip(_E, k) if e)
        scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            t = t1 if last else t + direction * h
            y, f = y_new, f_new
            times.append(t)
            states.append(y.copy())
            slopes.append(f.copy())
            if last:
                return np.array(times), np.array(states), np.array(slopes)
            err = max(err, 1e-10)
            fac = _SAFETY * err**-_ALPHA * err_prev**_BETA
            err_prev = err
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
        else:
            h *= max(_FAC_MIN, _SAFETY * err**-(1.0 / 5.0))
    raise IntegrationError("maximum number of steps exceeded")


def _linear_rhs(profile, g, ncols):
    def rhs(t, y):
        w = g * float(profile(t))
        if not math.isfinite(w):
            raise IntegrationError(f"non-finite profile value at t={t}")
        out = np.empty_like(y)
        out[0::2] = y[1::2]
        out[1::2] = -w * y[0::2]
        return out

    return rhs


def _integrate_linear(profile, g, window, initial, tol, from_end):
    """Jointly integrate several solutions; `initial` is a list of (h, h')."""
    y0 = np.array([v for pair in initial for v in pair], dtype=float)
    rhs = _linear_rhs(profile, g, len(initial))
    t0, t1 = (window.t_b, window.t_a) if from_end else (window.t_a, window.t_b)
    times, states, slopes = solve_system(rhs, t0, y0, t1, tol)
    if from_end:
        times, states, slopes = times[::-1], states[::-1], slopes[::-1]
    steps = len(times) - 1
    out = []
    for j in range(len(initial)):
        out.append(
            Trajectory(
                window,
                times,
                states[:, 2 * j].copy(),
                states[:, 2 * j + 1].copy(),
                slopes[:, 2 * j + 1].copy(),
                steps,
            )
        )
    return out


def integrate_ivp(profile, g, window, h0, hdot0, tol=DEFAULT_TOL, from_end=False):
    """Solve ``h'' = -g omega2(t) h`` with ``h = h0``, ``h' = hdot0`` at ``t_a``.

    With ``from_end=True`` the data are imposed at ``t_b`` and the solution
    is integrated backwards.
    """
    return _integrate_linear(profile, g, window, [(h0, hdot0)], tol, from_end)[0]


@dataclass(frozen=True, eq=False)
class SolutionPair:
    """Two independent solutions ``eta``, ``xi`` and their Wronskian.

    Attributes
    ----------
    eta, xi : Trajectory
    W : float
        ``eta xi' - eta' xi`` at ``t_a``.
    g : float
        Homotopy parameter the pair solves for.
    drift : float
        Largest relative deviation of the Wronskian from `W` over nodes.
    """

    eta: Trajectory
    xi: Trajectory
    W: float
    g: float
    drift: float

    @classmethod
    def from_trajectories(cls, eta, xi, g):
        wr = eta.values * xi.derivatives - eta.derivatives * xi.values
        W = float(wr[0])
        if W == 0.0:
            raise ValueError("solutions are linearly dependent (zero Wronskian)")
        drift = float(np.max(np.abs(wr - W)) / abs(W))
        return cls(eta, xi, W, g, drift)

    @property
    def window(self):
        return self.eta.window

    @property
    def steps(self):
        return self.eta.steps

    def wronskian(self, t):
        e, ed = self.eta(t), self.eta.derivative(t)
        x, xd = self.xi(t), self.xi.derivative(t)
        return e * xd - ed * x

    def gram(self):
        """``[[<eta,eta>, <eta,xi>], [<xi,eta>, <xi,xi>]]`` with ``<f,h> = int f h dt``."""
        exx = self.eta.inner(self.xi)
        return np.array([[self.eta.inner(), exx], [exx, self.xi.inner()]])

    def transformed(self, matrix):
        """Basis change ``(eta, xi) -> (A00 eta + A01 xi, A10 eta + A11 xi)``."""
        (a, b), (c, d) = np.asarray(matrix, dtype=float)
        return SolutionPair.from_trajectories(
            self.eta.combine(a, self.xi, b), self.eta.combine(c, self.xi, d), self.g
        )


def gy_basis(profile, g, window, tol=DEFAULT_TOL):
    """Return the pair ``(eta, xi) = (Dbar_g, D_g)``.

    ``Dbar`` starts with ``(1, 0)`` and ``D`` with ``(0, 1)`` at ``t_a``, so
    the Wronskian is exactly 1 there.
    """
    dbar, d = _integrate_linear(profile, g, window, [(1.0, 0.0), (0.0, 1.0)], tol, False)
    return SolutionPair.from_trajectories(dbar, d, g)
