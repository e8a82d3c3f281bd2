"""Complete elliptic integrals and Jacobi elliptic functions.

Everything here uses the *parameter* convention ``m = k**2``:

    K(m) = int_0^1 dt / sqrt((1 - t^2) (1 - m t^2))
    E(m) = int_0^1 dt sqrt((1 - m t^2) / (1 - t^2))

Both are computed with the arithmetic-geometric mean, and ``sn, cn, dn``
with the descending Landen (AGM) recurrence of DLMF 22.20(ii).
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = ["EllipticParams", "ellip_ke", "jacobi_sncndn"]

_MAX_AGM_ITER = 40


@dataclass(frozen=True)
class EllipticParams:
    """Complete elliptic integrals at a given parameter.

    Attributes
    ----------
    m : float
        Parameter in ``[0, 1)``.
    kappa : float
        ``K(m)``, complete integral of the first kind.
    eps : float
        ``E(m)``, complete integral of the second kind.
    """

    m: float
    kappa: float
    eps: float


def _check_parameter(m, allow_one):
    m = float(m)
    if not math.isfinite(m) or m < 0.0 or m > 1.0 or (m == 1.0 and not allow_one):
        bound = "]" if allow_one else ")"
        raise ValueError(f"elliptic parameter m={m!r} outside [0, 1{bound}")
    return m


def _agm_sequence(m):
    """Return the AGM sequences ``a_n``, ``c_n`` started from ``(1, sqrt(1-m))``."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_AGM_ITER):
        if abs(c) <= 2.0 * np.finfo(float).eps * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise RuntimeError(f"AGM failed to converge for m={m!r}")
    return a_seq, c_seq


def ellip_ke(m):
    """Complete elliptic integrals ``K(m)`` and ``E(m)`` by the AGM.

    Parameters
    ----------
    m : float
        Parameter, ``0 <= m < 1``.

    Returns
    -------
    EllipticParams

    Examples
    --------
    >>> p = ellip_ke(0.0)
    >>> round(p.kappa, 12) == round(p.eps, 12) == round(math.pi / 2, 12)
    True
    """
    m = _check_parameter(m, allow_one=False)
    a_seq, c_seq = _agm_sequence(m)
    kappa = math.pi / (2.0 * a_seq[-1])
    # E = K (1 - sum_n 2^(n-1) c_n^2)
    s = 0.0
    for n, c in enumerate(c_seq):
        s += math.ldexp(c * c, n - 1)
    return EllipticParams(m=m, kappa=kappa, eps=kappa * (1.0 - s))


def jacobi_sncndn(z, m):
    """Jacobi elliptic functions ``sn(z|m)``, ``cn(z|m)``, ``dn(z|m)``.

    Parameters
    ----------
    z : float or array_like
        Real argument.
    m : float
        Parameter, ``0 <= m <= 1``. ``m = 1`` uses the hyperbolic limits.

    Returns
    -------
    sn, cn, dn : float or ndarray
        Same shape as `z`.
    """
    m = _check_parameter(m, allow_one=True)
    z = np.asarray(z, dtype=float)
    if m == 0.0:
        sn, cn, dn = np.sin(z), np.cos(z), np.ones_like(z)
    elif m == 1.0:
        sn = np.tanh(z)
        cn = 1.0 / np.cosh(z)
        dn = cn.copy()
    else:
        a_seq, c_seq = _agm_sequence(m)
        n_last = len(a_seq) - 1
        phi = math.ldexp(a_seq[n_last], n_last) * z
        for n in range(n_last, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c_seq[n] / a_seq[n] * np.sin(phi)))
        sn = np.sin(phi)
        cn = np.cos(phi)
        # both terms non-negative: no cancellation as m -> 1 or near cn = 0
        dn = np.sqrt(cn * cn + (1.0 - m) * sn * sn)
    if sn.ndim == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn
