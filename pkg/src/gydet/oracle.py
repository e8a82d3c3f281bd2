"""Finite-difference cross-check of determinant ratios and lowest eigenvalues.

``K = -d^2/dt^2 - omega2(t)`` is replaced by the three-point matrix with
diagonal ``2/h^2 - omega2(t_i)`` and off-diagonal ``-1/h^2``. Dirichlet
problems keep the ``N - 1`` interior nodes; periodic and antiperiodic ones
keep ``N`` nodes of one period and couple the first and last unknown by a
corner entry, ``-1/h^2`` (periodic) or ``+1/h^2`` (antiperiodic).

Determinants of such matrices overflow double precision for a few thousand
nodes, so they are carried as ``(mantissa, exponent)`` pairs with
``value = mantissa * 2**exponent``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateReferenceError, ZeroModeError
from .profiles import Constant
from .wronski import BoundaryCondition

__all__ = [
    "DiscretizedOperator",
    "discretize",
    "ScaledValue",
    "continuant",
    "determinant",
    "det_ratio_fd",
    "sturm_count",
    "minor_sign_changes",
    "lowest_eigenvalues",
    "primed_det_fd",
]


@dataclass(frozen=True)
class ScaledValue:
    """``mantissa * 2**exponent`` with ``0.5 <= |mantissa| < 1`` (or zero)."""

    mantissa: float
    exponent: int

    @classmethod
    def of(cls, x, exponent=0):
        m, e = math.frexp(x)
        return cls(m, e + exponent)

    def __float__(self):
        return math.ldexp(self.mantissa, self.exponent)

    def __mul__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue.of(float(other))
        return ScaledValue.of(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue.of(float(other))
        if other.mantissa == 0.0:
            raise ZeroDivisionError("division by a vanishing determinant")
        return ScaledValue.of(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __neg__(self):
        return ScaledValue(-self.mantissa, self.exponent)

    def __add__(self, other):
        if self.mantissa == 0.0:
            return other
        if other.mantissa == 0.0:
            return self
        e = max(self.exponent, other.exponent)
        total = math.ldexp(self.mantissa, self.exponent - e) + math.ldexp(
            other.mantissa, other.exponent - e
        )
        return ScaledValue.of(total, e)

    def __sub__(self, other):
        return self + (-other)

    def power(self, n):
        """``self ** n`` for integer ``n >= 0`` by repeated squaring."""
        result, base = ScaledValue.of(1.0), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


@dataclass(frozen=True)
class DiscretizedOperator:
    """Three-point discretisation of ``-d^2/dt^2 - omega2(t)``.

    Attributes
    ----------
    N : int
        Number of grid intervals.
    h : float
    diag : ndarray
        ``2/h^2 - omega2(t_i)`` at the unknowns.
    off : float
        ``-1/h^2``.
    bc : BoundaryCondition
    corner : float
        Coupling between first and last unknown (0 for Dirichlet).
    omega2 : ndarray
        The profile samples; recurrences work with ``h^2 omega2`` directly
        instead of the rounded ``diag``.
    """

    N: int
    h: float
    diag: np.ndarray
    off: float
    bc: BoundaryCondition
    corner: float
    omega2: np.ndarray

    @property
    def size(self):
        return len(self.diag)

    def to_dense(self):
        """Dense matrix, for small-grid checks."""
        n = self.size
        a = np.diag(self.diag) + np.diag(np.full(n - 1, self.off), 1)
        a += np.diag(np.full(n - 1, self.off), -1)
        if self.bc is not BoundaryCondition.DIRICHLET:
            a[0, -1] += self.corner
            a[-1, 0] += self.corner
        return a


def discretize(profile, window, bc, N):
    """Sample `profile` on a uniform grid and build the operator matrix."""
    bc = BoundaryCondition.parse(bc)
    if N < 4:
        raise ValueError("N must be at least 4")
    h = window.length / N
    off = -1.0 / h**2
    if bc is BoundaryCondition.DIRICHLET:
        t = window.t_a + h * np.arange(1, N)
        corner = 0.0
    else:
        t = window.t_a + h * np.arange(N)
        corner = off if bc is BoundaryCondition.PERIODIC else -off
    omega2 = np.broadcast_to(np.asarray(profile(t), dtype=float), t.shape)
    omega2 = np.array(omega2, dtype=float)
    return DiscretizedOperator(N, h, 2.0 / h**2 - omega2, off, bc, corner, omega2)


_BIG = 2.0**400


def continuant(diag, off, shift=0.0):
    """Determinant of the symmetric tridiagonal matrix ``tridiag(off, diag - shift, off)``.

    Three-term recursion ``p_k = (a_k - shift) p_{k-1} - off^2 p_{k-2}``
    with common rescaling of the last two terms.

    Returns
    -------
    ScaledValue
    """
    b2 = off * off
    p_prev, p = 1.0, 1.0
    exponent = 0
    first = True
    for a in diag:
        if first:
            p_prev, p = 1.0, float(a) - shift
            first = False
            continue
        p_prev, p = p, (float(a) - shift) * p - b2 * p_prev
        big = max(abs(p), abs(p_prev))
        if big > _BIG or (0.0 < big < 1.0 / _BIG):
            _, e = math.frexp(big)
            p, p_prev = math.ldexp(p, -e), math.ldexp(p_prev, -e)
            exponent += e
    if first:
        return ScaledValue.of(1.0)
    return ScaledValue.of(p, exponent)


def _scaled_continuant(hw):
    """Continuant of ``tridiag(-1, 2 - hw_k, -1)`` in difference form.

    With ``q_k`` the leading minors and ``d_k = q_k - q_{k-1}``,
    ``d_k = d_{k-1} - hw_k q_{k-1}`` and ``q_k = q_{k-1} + d_k``. This never
    forms ``2 - hw_k``, whose rounding would swamp ``hw_k ~ h^2``.

    Returns
    -------
    ScaledValue
    """
    q, d, exponent = 1.0, 1.0, 0
    for x in hw:
        d -= x * q
        q += d
        big = max(abs(q), abs(d))
        if big > _BIG or (0.0 < big < 1.0 / _BIG):
            _, e = math.frexp(big)
            q, d = math.ldexp(q, -e), math.ldexp(d, -e)
            exponent += e
    return ScaledValue.of(q, exponent)


def _scaled_determinant(op, shift):
    """``h^(2n) det(A - shift)`` for the operator's size ``n``."""
    hw = (op.h * op.h) * (op.omega2 + shift)
    if op.bc is BoundaryCondition.DIRICHLET:
        return _scaled_continuant(hw.tolist())
    # cyclic expansion det = D(0..n-1) - c^2 D(1..n-2) + 2 (-1)^(n+1) c b^(n-1)
    # with b = -1/h^2 and c = +-b collapses to q_full - q_inner - 2 c/b
    full = _scaled_continuant(hw.tolist())
    inner = _scaled_continuant(hw[1:-1].tolist())
    return full - inner - ScaledValue.of(2.0 * op.corner / op.off)


def determinant(op, shift=0.0):
    """``det(A - shift)`` as a :class:`ScaledValue`.

    Tridiagonal matrices use the continuant recursion; cyclic ones the
    corner expansion ``D(0..n-1) - c^2 D(1..n-2) + 2 (-1)^(n+1) c b^(n-1)``
    (``c`` the corner, ``b`` the off-diagonal, ``D`` continuants), both
    evaluated in the rounding-safe difference form.
    """
    n = op.size
    return _scaled_determinant(op, shift) / ScaledValue.of(op.h).power(2 * n)


def _reference(bc, omega_ref, reference, profile, window):
    if reference is not None:
        return reference
    if bc is BoundaryCondition.DIRICHLET:
        return Constant(0.0)
    if omega_ref is None:
        from .gelfand import default_omega_ref

        omega_ref = default_omega_ref(profile, window)
    return Constant(omega_ref**2)


def det_ratio_fd(profile, window, bc, omega_ref=None, N=2000, reference=None):
    """``det(A_1) / det(A_ref)`` on an ``N``-interval grid.

    The reference discretises ``-d^2/dt^2`` (Dirichlet) or
    ``-d^2/dt^2 - omega_ref^2`` (periodic, antiperiodic) unless a
    `reference` profile is given. Converges to the continuum ratio as
    ``O(h^2)``.

    Raises
    ------
    DegenerateReferenceError
        If the reference matrix is singular.
    """
    bc = BoundaryCondition.parse(bc)
    ref = _reference(bc, omega_ref, reference, profile, window)
    num = determinant(discretize(profile, window, bc, N))
    den = determinant(discretize(ref, window, bc, N))
    if den.mantissa == 0.0:
        raise DegenerateReferenceError("reference matrix is singular on this grid")
    return float(num / den)


def _negative_pivots(hw):
    """Negative LDL^T pivots of ``tridiag(-1, 2 - hw_k, -1)``.

    The scaled pivots ``s_k = 1 + e_k`` obey
    ``e_k = e_{k-1} / (1 + e_{k-1}) - hw_k`` (with the first ratio taken as
    1), the difference form of ``s_k = 2 - hw_k - 1 / s_{k-1}``.
    """
    count = 0
    ratio = 1.0
    for x in hw:
        e = ratio - x
        s = 1.0 + e
        if s == 0.0:
            s, e = -1e-300, -1.0 - 1e-300
        if s < 0.0:
            count += 1
        ratio = e / s
    return count


def sturm_count(op, x):
    """Number of eigenvalues of the operator matrix strictly below `x`.

    Tridiagonal matrices count negative pivots of ``A - x``. Cyclic ones
    split off the last row and column: by Haynsworth inertia additivity the
    count is that of the leading tridiagonal block plus one if the Schur
    complement ``det(A - x) / det(T - x)`` is negative.
    """
    hw = ((op.h * op.h) * (op.omega2 + x)).tolist()
    if op.bc is BoundaryCondition.DIRICHLET:
        return _negative_pivots(hw)
    count = _negative_pivots(hw[:-1])
    det_sign = math.copysign(1.0, _scaled_determinant(op, x).mantissa)
    lead_sign = -1.0 if count % 2 else 1.0
    return count + (1 if det_sign != lead_sign else 0)


def minor_sign_changes(op, x):
    """Sign changes along the leading principal minors of ``A - x`` (tridiagonal only).

    Uses the difference-form continuant rather than the pivot ratios, so it
    is an independent count; equal to :func:`sturm_count` by Sturm's theorem.
    """
    if op.bc is not BoundaryCondition.DIRICHLET:
        raise ValueError("leading-minor count applies to tridiagonal matrices")
    hw = ((op.h * op.h) * (op.omega2 + x)).tolist()
    changes, prev_sign = 0, 1.0
    q, d = 1.0, 1.0
    for v in hw:
        d -= v * q
        q += d
        big = max(abs(q), abs(d))
        if big > _BIG:
            q, d = q / big, d / big
        sign = math.copysign(1.0, q) if q != 0.0 else -prev_sign
        if sign != prev_sign:
            changes += 1
        prev_sign = sign
    return changes


def lowest_eigenvalues(op, k):
    """The `k` algebraically smallest eigenvalues by Sturm bisection.

    Each is bracketed by Gershgorin bounds and bisected until the bracket
    is below ``1e-12`` relative, or below the absolute rounding floor of the
    counts, which is set by ``omega2`` rather than by ``1/h^2``.
    """
    if not 1 <= k <= op.size:
        raise ValueError(f"k must lie in [1, {op.size}]")
    radius = 2.0 * abs(op.off) + abs(op.corner)
    lo0 = float(np.min(op.diag)) - radius
    hi0 = float(np.max(op.diag)) + radius
    # counts work with h^2 (omega2 + x), so x resolves to rounding in omega2
    span = op.N * op.h
    floor = 16.0 * np.finfo(float).eps * (float(np.max(np.abs(op.omega2))) + (math.pi / span) ** 2)
    out = []
    for j in range(k):
        lo = out[-1] - floor if out else lo0
        hi = hi0
        while hi - lo > max(1e-12 * max(abs(lo), abs(hi)), floor):
            mid = 0.5 * (lo + hi)
            if sturm_count(op, mid) > j:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return out


def primed_det_fd(profile, window, bc, omega_ref=None, N=2000, reference=None):
    """``det(A_1) / (lambda_1 det(A_ref))`` with the near-zero eigenvalue removed.

    Raises
    ------
    ZeroModeError
        Unless exactly one eigenvalue is near zero, ``|lambda_1| < 1e-3 |lambda_2|``.
    """
    bc = BoundaryCondition.parse(bc)
    op = discretize(profile, window, bc, N)
    lam1, lam2 = lowest_eigenvalues(op, 2)
    small = sorted((lam1, lam2), key=abs)
    if not abs(small[0]) < 1e-3 * abs(small[1]):
        raise ZeroModeError(
            f"expected exactly one near-zero eigenvalue, found {lam1:.6g} and {lam2:.6g}"
        )
    ref = _reference(bc, omega_ref, reference, profile, window)
    den = determinant(discretize(ref, window, bc, N))
    if den.mantissa == 0.0:
        raise DegenerateReferenceError("reference matrix is singular on this grid")
    return float(determinant(op) / (den * small[0]))
