"""Squared-frequency profiles and the quartic double well.

A profile is a callable ``omega2(t)`` entering the fluctuation operator

    K_g = -d^2/dt^2 - g * omega2(t).

The kink and instanton profiles describe fluctuations about the
imaginary-time tunnelling solution of the double well, whose operator is
``-d^2/dtau^2 + V''(x_cl(tau))``; their ``omega2`` is therefore
``-V''(x_cl)``. :meth:`DoubleWell.curvature` gives ``V''`` itself.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import expr
from .errors import ProfileDomainError, ProfileSyntaxError
from .special import ellip_ke, jacobi_sncndn

__all__ = [
    "FrequencyProfile",
    "Constant",
    "Expression",
    "Sampled",
    "Kink",
    "Instanton",
    "DoubleWell",
    "parse_profile",
    "eval_omega2",
    "potential",
]


class FrequencyProfile:
    """Base class; subclasses implement :meth:`__call__` and :meth:`to_json`."""

    def __call__(self, t):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(FrequencyProfile):
    """Time-independent ``omega2``; may be negative (inverted oscillator)."""

    omega2: float

    def __call__(self, t):
        return self.omega2 + 0.0 * np.asarray(t, dtype=float)

    def to_json(self):
        return {"type": "constant", "omega2": self.omega2}


@dataclass(frozen=True)
class Expression(FrequencyProfile):
    """Profile given by an infix expression in ``t``."""

    source: str
    tree: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.tree is None:
            object.__setattr__(self, "tree", expr.parse_expression(self.source))

    def __call__(self, t):
        return expr.evaluate(self.tree, np.asarray(t, dtype=float))

    def to_json(self):
        return {"type": "expr", "omega2": self.source}


@dataclass(frozen=True)
class Sampled(FrequencyProfile):
    """Tabulated profile with natural cubic-spline interpolation."""

    times: tuple
    values: tuple

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("sampled profile needs equal-length 1-D times and values")
        if len(times) < 2:
            raise ValueError("sampled profile needs at least two samples")
        if np.any(np.diff(times) <= 0):
            raise ValueError("sampled times must be strictly ascending")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("sampled profile contains non-finite entries")
        object.__setattr__(self, "times", tuple(times.tolist()))
        object.__setattr__(self, "values", tuple(values.tolist()))
        object.__setattr__(self, "_spline", CubicSpline(times, values, bc_type="natural"))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        slack = 1e-12 * (hi - lo)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise ProfileDomainError(f"t outside sampled range [{lo}, {hi}]")
        out = self._spline(np.clip(t, lo, hi))
        return float(out) if out.ndim == 0 else out

    def to_json(self):
        return {"type": "sampled", "t": list(self.times), "omega2": list(self.values)}


@dataclass(frozen=True)
class DoubleWell:
    """Quartic double well ``V(x) = omega^2 (x^2 - a^2)^2 / (8 a^2)``, unit mass."""

    omega: float
    a: float

    def __post_init__(self):
        if not (self.omega > 0 and self.a > 0):
            raise ValueError("double well needs omega > 0 and a > 0")

    def potential(self, x):
        return self.omega**2 / (8.0 * self.a**2) * (np.square(x) - self.a**2) ** 2

    def derivative(self, x):
        return self.omega**2 / (2.0 * self.a**2) * x * (np.square(x) - self.a**2)

    def curvature(self, x):
        """Second derivative ``V''(x)``."""
        return self.omega**2 / (2.0 * self.a**2) * (3.0 * np.square(x) - self.a**2)

    def __call__(self, x):
        return self.potential(x)


def potential(well, x):
    """Evaluate the double-well potential ``V(x)``."""
    return well.potential(x)


@dataclass(frozen=True)
class Kink(FrequencyProfile):
    """Fluctuations about the infinite-period kink ``a tanh(omega (t - tau0) / 2)``."""

    omega: float
    a: float
    tau0: float = 0.0

    def __post_init__(self):
        DoubleWell(self.omega, self.a)

    def x_cl(self, t):
        return self.a * np.tanh(0.5 * self.omega * (np.asarray(t, dtype=float) - self.tau0))

    def __call__(self, t):
        return -DoubleWell(self.omega, self.a).curvature(self.x_cl(t))

    def to_json(self):
        return {"type": "kink", "omega": self.omega, "a": self.a, "tau0": self.tau0}


@dataclass(frozen=True)
class Instanton(FrequencyProfile):
    """Fluctuations about the finite-period instanton ``x_b sn(z; m)``.

    The sweep runs from ``-x_b`` at ``-T/2`` to ``x_b`` at ``T/2`` with
    ``z = omega b t / (2 a)``; see :meth:`window`.
    """

    omega: float
    a: float
    m: float

    def __post_init__(self):
        DoubleWell(self.omega, self.a)
        if not 0.0 < self.m < 1.0:
            raise ValueError(f"instanton parameter m={self.m!r} outside (0, 1)")
        x_b = self.a * math.sqrt(2.0 * self.m / (1.0 + self.m))
        b = self.a * math.sqrt(2.0 / (1.0 + self.m))
        kappa = ellip_ke(self.m).kappa
        object.__setattr__(self, "x_b", x_b)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "period", 4.0 * self.a * kappa / (self.omega * b))

    def window(self):
        """Return ``(t_a, t_b) = (-T/2, T/2)``."""
        return -0.5 * self.period, 0.5 * self.period

    def z(self, t):
        return self.omega * self.b * np.asarray(t, dtype=float) / (2.0 * self.a)

    def x_cl(self, t):
        sn, _, _ = jacobi_sncndn(self.z(t), self.m)
        return self.x_b * sn

    def __call__(self, t):
        return -DoubleWell(self.omega, self.a).curvature(self.x_cl(t))

    def to_json(self):
        return {"type": "instanton", "omega": self.omega, "a": self.a, "m": self.m}


def eval_omega2(profile, t):
    """Evaluate ``omega2(t)`` for any profile (scalar or array `t`)."""
    return profile(t)


def _number(doc, key):
    if key not in doc:
        raise ProfileSyntaxError(f"missing key {key!r}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileSyntaxError(f"key {key!r} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ProfileSyntaxError(f"key {key!r} is not finite")
    return value


def _from_document(doc):
    if not isinstance(doc, dict) or "type" not in doc:
        raise ProfileSyntaxError("profile document must be an object with a 'type' key")
    kind = doc["type"]
    if kind == "constant":
        return Constant(_number(doc, "omega2"))
    if kind == "expr":
        return Expression(doc.get("omega2"))
    if kind == "sampled":
        try:
            return Sampled(tuple(doc["t"]), tuple(doc["omega2"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProfileSyntaxError(f"bad sampled profile: {exc}") from exc
    try:
        if kind == "kink":
            return Kink(_number(doc, "omega"), _number(doc, "a"), _number(doc, "tau0"))
        if kind == "instanton":
            return Instanton(_number(doc, "omega"), _number(doc, "a"), _number(doc, "m"))
    except ValueError as exc:
        if isinstance(exc, ProfileSyntaxError):
            raise
        raise ProfileSyntaxError(str(exc)) from exc
    raise ProfileSyntaxError(f"unknown profile type {kind!r}")


def parse_profile(spec, format="json"):
    """Build a profile from a JSON document or an expression string.

    Parameters
    ----------
    spec : str or dict
        JSON text (or an already-decoded dict) for ``format="json"``;
        infix text for ``format="expression"``. A JSON string literal is
        accepted as an expression.
    format : {"json", "expression"}

    Returns
    -------
    FrequencyProfile

    Examples
    --------
    >>> parse_profile('{"type":"constant","omega2":1.0}')
    Constant(omega2=1.0)
    >>> float(parse_profile("1 + 0.5*cos(2*t)", format="expression")(0.0))
    1.5
    """
    if format == "expression":
        return Expression(spec)
    if format != "json":
        raise ValueError(f"unknown profile format {format!r}")
    if isinstance(spec, dict):
        return _from_document(spec)
    try:
        doc = json.loads(spec)
    except json.JSONDecodeError as exc:
        raise ProfileSyntaxError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    if isinstance(doc, str):
        return Expression(doc)
    return _from_document(doc)
