import math

import numpy as np
import pytest

from gydet.errors import ZeroModeError
from gydet.ode import TimeWindow, gy_basis
from gydet.profiles import Constant, Expression, Kink
from gydet.wronski import (
    BoundaryCondition,
    delta,
    delta_bar,
    delta_dt,
    fundamental_matrix,
    green,
    green_dt,
    proximity,
)

BCS = list(BoundaryCondition)


@pytest.fixture(scope="module")
def pair():
    return gy_basis(Expression("1 + 0.5*cos(2*t)"), 1.0, TimeWindow(0.0, 2.5))


def test_bc_parse_and_sign():
    assert BoundaryCondition.parse("Periodic") is BoundaryCondition.PERIODIC
    assert BoundaryCondition.ANTIPERIODIC.sign == -1.0
    with pytest.raises(ValueError):
        BoundaryCondition.parse("robin")
    with pytest.raises(ValueError):
        BoundaryCondition.DIRICHLET.sign


def test_delta_closed_forms():
    free = gy_basis(Constant(0.0), 1.0, TimeWindow(0, 2))
    osc = gy_basis(Constant(1.0), 1.0, TimeWindow(0, 2))
    for t, tp in [(0.1, 1.3), (1.9, 0.4)]:
        assert delta(free, t, tp) == pytest.approx(tp - t, abs=1e-14)
        assert delta(osc, t, tp) == pytest.approx(math.sin(tp - t), abs=1e-9)
        assert delta(osc, t, t) == 0.0


def test_antisymmetry_and_slope(pair):
    rng = np.random.default_rng(3)
    for t, tp in rng.uniform(0, 2.5, (100, 2)):
        assert abs(delta(pair, t, tp) + delta(pair, tp, t)) < 1e-12
        assert abs(delta_dt(pair, t, t) + 1.0) < 1e-8


def test_fundamental_matrix_closed_forms():
    T = 1.7
    p = gy_basis(Constant(1.0), 1.0, TimeWindow(0, T))
    dets = {bc: fundamental_matrix(p, bc).det for bc in BCS}
    assert dets[BoundaryCondition.DIRICHLET] == pytest.approx(math.sin(T), abs=1e-9)
    assert dets[BoundaryCondition.PERIODIC] == pytest.approx(4 * math.sin(T / 2) ** 2, abs=1e-9)
    assert dets[BoundaryCondition.ANTIPERIODIC] == pytest.approx(4 * math.cos(T / 2) ** 2, abs=1e-9)
    for bc in BCS:
        fm = fundamental_matrix(p, bc)
        assert fm.det == pytest.approx(np.linalg.det(fm.entries), rel=1e-14)


def test_delta_bar_consistency(pair):
    for bc in (BoundaryCondition.PERIODIC, BoundaryCondition.ANTIPERIODIC):
        # equal up to the Wronskian drift between t_a and t_b
        assert fundamental_matrix(pair, bc).det == pytest.approx(pair.W * delta_bar(pair, bc), rel=1e-10)


def test_free_green_function():
    p = gy_basis(Constant(0.0), 1.0, TimeWindow(0, 1))
    # t_< (T - t_>) / T
    assert green(p, "dirichlet", 0.25, 0.75) == pytest.approx(0.0625, abs=1e-14)
    assert green(p, "dirichlet", 0.5, 0.5) == pytest.approx(0.25, abs=1e-14)


def test_green_symmetry_and_boundaries(pair):
    rng = np.random.default_rng(5)
    ta, tb = 0.0, 2.5
    for bc in BCS:
        for t, tp in rng.uniform(ta, tb, (20, 2)):
            assert abs(green(pair, bc, t, tp) - green(pair, bc, tp, t)) < 1e-8
            ga, gb = green(pair, bc, ta, tp), green(pair, bc, tb, tp)
            if bc is BoundaryCondition.DIRICHLET:
                assert abs(ga) < 1e-8 and abs(gb) < 1e-8
            else:
                s = bc.sign
                assert abs(gb - s * ga) < 1e-8
                da, db = green_dt(pair, bc, ta, tp, -1), green_dt(pair, bc, tb, tp, +1)
                assert abs(db - s * da) < 1e-8


def test_jump(pair):
    for bc in BCS:
        for tp in (0.3, 1.1, 2.2):
            jump = green_dt(pair, bc, tp, tp, +1) - green_dt(pair, bc, tp, tp, -1)
            assert abs(jump + 1.0) < 1e-7


def test_periodic_constant_diagonal_is_flat():
    p = gy_basis(Constant(1.0), 1.0, TimeWindow(0, 1))
    diag = [green(p, "periodic", t, t) for t in np.linspace(0, 1, 10)]
    assert np.ptp(diag) < 1e-9


def test_basis_invariance(pair):
    A = np.array([[0.3, -1.2], [2.0, 0.7]])
    other = pair.transformed(A)
    for bc in BCS:
        for t, tp in [(0.2, 1.9), (2.1, 0.5), (1.0, 1.0)]:
            assert abs(green(pair, bc, t, tp) - green(other, bc, t, tp)) < 1e-9


def test_green_broadcasts(pair):
    t = np.linspace(0.1, 2.4, 5)
    vals = green(pair, "periodic", t, 1.0)
    assert vals.shape == (5,)
    assert vals[2] == pytest.approx(green(pair, "periodic", t[2], 1.0), rel=1e-15)


def test_green_refuses_zero_mode():
    p = gy_basis(Constant(1.0), 1.0, TimeWindow(0, math.pi))
    with pytest.raises(ZeroModeError):
        green(p, "dirichlet", 0.5, 1.0)


def test_green_domain(pair):
    with pytest.raises(ValueError):
        green(pair, "dirichlet", 3.0, 1.0)


def test_proximity_examples():
    assert proximity(gy_basis(Kink(1.0, 1.0), 1.0, TimeWindow(-12, 12)), "dirichlet") < 1e-8
    assert proximity(gy_basis(Constant(1.0), 1.0, TimeWindow(0, 1)), "dirichlet") > 0.1
    T = 3.0
    p = gy_basis(Constant((2 * math.pi / T) ** 2), 1.0, TimeWindow(0, T))
    assert proximity(p, "periodic") < 1e-16


def _identities(pair, t):
    ta, tb = pair.window.t_a, pair.window.t_b

    def D(x, y):
        return delta(pair, x, y)

    def d1(x, y):  # derivative in the first slot
        return delta_dt(pair, x, y)

    def d2(x, y):  # derivative in the second slot
        return -delta_dt(pair, y, x)

    r9 = D(tb, t) * d1(tb, ta) - D(t, ta) - D(tb, ta) * d1(tb, t)
    r10 = D(t, ta) * d2(tb, ta) + D(tb, t) - D(tb, ta) * d2(t, ta)
    return r9, r10


def test_commutator_identities(pair):
    rng = np.random.default_rng(11)
    ta, tb = 0.0, 2.5
    for t, tp in rng.uniform(ta, tb, (100, 2)):
        lhs = delta(pair, t, tp) * delta(pair, ta, tb)
        rhs = delta(pair, tb, t) * delta(pair, tp, ta) - delta(pair, tb, tp) * delta(pair, t, ta)
        assert abs(lhs - rhs) < 1e-9
        r9, r10 = _identities(pair, t)
        assert abs(r9) < 1e-8 and abs(r10) < 1e-8
