import json
import math

import numpy as np
import pytest

from gydet.errors import ProfileDomainError, ProfileSyntaxError
from gydet.expr import evaluate, parse_expression
from gydet.profiles import (
    Constant,
    DoubleWell,
    Expression,
    Instanton,
    Kink,
    Sampled,
    eval_omega2,
    parse_profile,
    potential,
)


def test_parse_constant_document():
    p = parse_profile('{"type":"constant","omega2":1.0}')
    assert p == Constant(1.0)


def test_parse_expression_string():
    p = parse_profile("1 + 0.5*cos(2*t)", format="expression")
    assert isinstance(p, Expression)
    assert p(0.0) == 1.5


def test_parse_kink_document():
    assert parse_profile('{"type":"kink","omega":1,"a":1,"tau0":0}') == Kink(1.0, 1.0, 0.0)


def test_parse_accepts_dict_and_json_string_literal():
    assert parse_profile({"type": "instanton", "omega": 1, "a": 1, "m": 0.5}) == Instanton(1.0, 1.0, 0.5)
    assert parse_profile('"t^2"')(3.0) == 9.0


def test_json_round_trip():
    for p in [Constant(2.0), Expression("sin(t)"), Kink(1.0, 2.0, 0.5), Instanton(1.0, 1.0, 0.3),
              Sampled((0.0, 1.0, 2.0), (1.0, 2.0, 0.0))]:
        assert parse_profile(json.dumps(p.to_json())) == p


@pytest.mark.parametrize(
    "text",
    ['{"type":"constant"}', '{"type":"nope"}', '{"omega2":1}', "{bad json", '{"type":"kink","omega":1,"a":1}',
     '{"type":"constant","omega2":"x"}', '{"type":"instanton","omega":1,"a":1,"m":1.0}'],
)
def test_bad_documents(text):
    with pytest.raises(ProfileSyntaxError):
        parse_profile(text)


@pytest.mark.parametrize("text", ["1 +", "foo(t)", "x", "(1", "2 $ 3", "sin t", "1e999"])
def test_bad_expressions(text):
    with pytest.raises(ProfileSyntaxError):
        parse_profile(text, format="expression")


def test_syntax_error_reports_position():
    with pytest.raises(ProfileSyntaxError) as info:
        parse_expression("1 + $")
    assert info.value.position == 4


def test_expression_grammar():
    cases = {
        "-t^2": -9.0,
        "2^3^2": 2.0**9,
        "(1+t)*2/4": 2.0,
        "sech(0) + tanh(0) + exp(0) + log(e) + sqrt(4) + abs(-1)": 6.0,
        "pi": math.pi,
        "cosh(0)-sinh(0)+tan(0)": 1.0,
    }
    for text, want in cases.items():
        assert evaluate(parse_expression(text), 3.0) == pytest.approx(want, rel=1e-15)


def test_expression_is_vectorised_and_deterministic():
    p = Expression("1 + 0.5*cos(2*t)")
    t = np.linspace(0, 3, 7)
    assert np.array_equal(p(t), 1 + 0.5 * np.cos(2 * t))
    assert p(0.3) == p(0.3)


def test_constant_everywhere():
    assert eval_omega2(Constant(2.5), 17.0) == 2.5
    assert np.all(Constant(2.5)(np.zeros(4)) == 2.5)


def test_kink_values():
    # imaginary-time sign: omega2 = -V''(x_cl), so the core is positive
    k = Kink(1.0, 1.0, 0.0)
    assert k(0.0) == pytest.approx(0.5, abs=1e-15)
    assert k(40.0) == pytest.approx(-1.0, abs=1e-12)
    assert k(-40.0) == pytest.approx(-1.0, abs=1e-12)


def test_kink_symmetric_about_centre():
    k = Kink(1.3, 0.7, 2.0)
    s = np.linspace(0, 5, 11)
    assert np.allclose(k(2.0 + s), k(2.0 - s), rtol=0, atol=1e-14)


def test_instanton_turning_point_values():
    for m in (0.2, 0.5, 0.9):
        p = Instanton(1.5, 0.8, m)
        x_b2 = 2 * 0.8**2 * m / (1 + m)
        want = -(1.5**2 / (2 * 0.8**2)) * (3 * x_b2 - 0.8**2)
        ta, tb = p.window()
        assert p(ta) == pytest.approx(want, rel=1e-10)
        assert p(tb) == pytest.approx(want, rel=1e-10)


def test_instanton_tends_to_kink():
    k = Kink(1.0, 1.0, 0.0)
    p = Instanton(1.0, 1.0, 1 - 1e-12)
    t = np.linspace(-3, 3, 13)
    assert np.allclose(p(t), k(t), atol=1e-5)


def test_double_well():
    assert potential(DoubleWell(1, 1), 1.0) == 0.0
    assert potential(DoubleWell(1, 1), 0.0) == 0.125
    assert potential(DoubleWell(2, 1), 0.0) == 0.5
    w = DoubleWell(1.3, 0.6)
    x, h = 0.37, 1e-5
    assert w.derivative(x) == pytest.approx((w(x + h) - w(x - h)) / (2 * h), rel=1e-8)
    assert w.curvature(x) == pytest.approx((w.derivative(x + h) - w.derivative(x - h)) / (2 * h), rel=1e-8)


def test_sampled_profile_interpolates_and_checks_domain():
    t = np.linspace(0, 2, 41)
    p = Sampled(tuple(t), tuple(np.sin(t)))
    assert p(1.0) == pytest.approx(math.sin(1.0), abs=1e-5)
    with pytest.raises(ProfileDomainError):
        p(2.5)


@pytest.mark.parametrize("times,values", [((0.0,), (1.0,)), ((0.0, 0.0), (1.0, 2.0)), ((0.0, 1.0), (1.0,))])
def test_sampled_invariants(times, values):
    with pytest.raises(ValueError):
        Sampled(times, values)


def test_parameter_ranges():
    with pytest.raises(ValueError):
        Kink(-1.0, 1.0)
    with pytest.raises(ValueError):
        Instanton(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        DoubleWell(1.0, 0.0)
