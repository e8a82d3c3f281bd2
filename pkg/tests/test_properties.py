"""Property-based checks over randomly drawn profiles and parameters."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gydet.gelfand import det_ratio_dirichlet
from gydet.ode import TimeWindow, gy_basis
from gydet.oracle import ScaledValue
from gydet.profiles import Constant, Expression
from gydet.special import jacobi_sncndn
from gydet.wronski import BoundaryCondition, delta, green

FAST = settings(max_examples=25, deadline=None)

amplitude = st.floats(-2.0, 2.0, allow_nan=False)
frequency = st.floats(0.0, 3.0, allow_nan=False)


@st.composite
def smooth_pairs(draw):
    c0, c1, k = draw(st.floats(-1.0, 3.0)), draw(amplitude), draw(frequency)
    T = draw(st.floats(0.3, 2.5))
    prof = Expression(f"{c0!r} + {c1!r}*cos({k!r}*t)")
    return gy_basis(prof, 1.0, TimeWindow(0.0, T))


@FAST
@given(smooth_pairs(), st.floats(0, 1), st.floats(0, 1))
def test_delta_antisymmetric(pair, u, v):
    w = pair.window
    t, tp = w.t_a + u * w.length, w.t_a + v * w.length
    assert delta(pair, t, tp) == pytest.approx(-delta(pair, tp, t), abs=1e-12)


@FAST
@given(smooth_pairs(), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_delta_basis_invariant(pair, a, b, c, d):
    A = np.array([[a, b], [c, d]])
    if abs(np.linalg.det(A)) < 0.1:
        return
    other = pair.transformed(A)
    w = pair.window
    t, tp = w.t_a + 0.3 * w.length, w.t_a + 0.8 * w.length
    scale = max(1.0, abs(delta(pair, t, tp)))
    assert abs(delta(other, t, tp) - delta(pair, t, tp)) < 1e-9 * scale


@FAST
@given(smooth_pairs(), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_dirichlet_green_symmetric(pair, u, v):
    from gydet.wronski import proximity

    if proximity(pair, "dirichlet") < 1e-4:
        return
    w = pair.window
    t, tp = w.t_a + u * w.length, w.t_a + v * w.length
    g1, g2 = green(pair, "dirichlet", t, tp), green(pair, "dirichlet", tp, t)
    assert g1 == pytest.approx(g2, rel=1e-8, abs=1e-10)


@FAST
@given(st.floats(0.05, 4.0), st.floats(0.1, 3.0))
def test_constant_dirichlet_ratio(omega, T):
    got = det_ratio_dirichlet(Constant(omega**2), TimeWindow(0.0, T)).value
    assert got == pytest.approx(math.sin(omega * T) / (omega * T), rel=1e-7, abs=1e-10)


@FAST
@given(st.floats(0.05, 2.0), st.floats(0.1, 3.0))
def test_constant_dirichlet_ratio_negative(k, T):
    # omega2 = -k^2 gives sinh
    got = det_ratio_dirichlet(Constant(-(k**2)), TimeWindow(0.0, T)).value
    assert got == pytest.approx(math.sinh(k * T) / (k * T), rel=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(0, 1))
def test_jacobi_identities(z, m):
    sn, cn, dn = jacobi_sncndn(z, m)
    assert abs(sn**2 + cn**2 - 1) < 1e-12
    assert abs(dn**2 + m * sn**2 - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e6, 1e6).filter(lambda x: abs(x) > 1e-6), st.integers(-3000, 3000),
       st.floats(-1e6, 1e6).filter(lambda x: abs(x) > 1e-6), st.integers(-3000, 3000))
def test_scaled_value_quotients(x, ex, y, ey):
    a, b = ScaledValue.of(x, ex), ScaledValue.of(y, ey)
    q = a * b / b / a
    assert float(q) == pytest.approx(1.0, rel=1e-14)
    assert float((a + a) / a) == pytest.approx(2.0, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-5, 5))
def test_expression_is_deterministic(c0, c1, t):
    src = f"{c0!r} + {c1!r}*sin(t)^2 - exp(-t^2)"
    a, b = Expression(src), Expression(src)
    want = c0 + c1 * math.sin(t) ** 2 - math.exp(-t * t)
    assert a(t) == b(t)
    assert a(t) == pytest.approx(want, rel=1e-13, abs=1e-13)


@FAST
@given(st.sampled_from(list(BoundaryCondition)), st.floats(0.2, 1.5))
def test_reference_ratio_is_one(bc, omega):
    from gydet.gelfand import det_ratio

    T = 1.0
    if bc is not BoundaryCondition.DIRICHLET:
        # stay clear of the reference's own zero modes
        if min(abs(math.sin(omega * T / 2)), abs(math.cos(omega * T / 2))) < 0.05:
            return
        assert det_ratio(Constant(omega**2), TimeWindow(0, T), bc, omega).value == pytest.approx(1.0, abs=1e-9)
