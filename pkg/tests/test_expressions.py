import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from koenigs import expressions as ex
from koenigs.expressions import EvaluationError
from koenigs.grid import GridSpec
from koenigs.inverse import numeric_inverse, univalence_spot_check
from koenigs.models import strip_transfer
from koenigs.parser import ArityError, ParseError, UnknownIdentifierError, parse

from conftest import CAYLEY_H, PLANE_H, STRIP_H, disc_points

MAPS = [
    STRIP_H,
    CAYLEY_H,
    PLANE_H,
    "z",
    "exp(z)*(2-z)^1.5",
    "mobius(1, 0.5, -0.3*i, 2, z^2) + log(2+z)",
    "3*z^3 - z/(4+z) + i",
    "(1+z)^(1/3) - 2^z",
]


def richardson(h, z, eps=1e-3):
    """Independent oracle: four-point central difference along the real axis."""
    d = lambda k: (h(z + k) - h(z - k)) / (2 * k)  # noqa: E731
    return (4 * d(eps / 2) - d(eps)) / 3


def test_parse_identity_and_cayley():
    assert parse("z")(0.3 + 0.1j) == 0.3 + 0.1j
    assert parse(CAYLEY_H)(0.5) == pytest.approx(3)


def test_strip_koenigs_value_at_origin(strip_h):
    assert strip_h(0) == pytest.approx(0.5, abs=1e-15)


def test_golden_derivatives(cayley_h):
    assert cayley_h.derivative()(0) == pytest.approx(2)
    assert parse("2+3*i").derivative()(0.4) == 0
    for lam in (0.5, 1.0, 2.0, math.pi):
        h = strip_transfer(lam).compose(ex.cayley_map(1))
        assert h.derivative()(0) == pytest.approx(2j / lam, rel=1e-14)


@pytest.mark.parametrize("text", MAPS)
def test_symbolic_derivative_matches_finite_differences(text):
    h = parse(text)
    dh = h.derivative()
    rng = np.random.default_rng(7)
    r = 0.9 * np.sqrt(rng.random(200))
    zs = r * np.exp(2j * np.pi * rng.random(200))
    for z in zs:
        exact = dh(z)
        approx = richardson(h, complex(z))
        assert abs(exact - approx) <= 1e-7 * max(1.0, abs(exact))


@given(z=disc_points(0.9), a=st.complex_numbers(max_magnitude=5), b=st.complex_numbers(max_magnitude=5))
def test_derivative_is_linear(z, a, b):
    h, g = parse(STRIP_H), parse("exp(z) - z^3")
    combo = (a * h + b * g).derivative()(z)
    split = a * h.derivative()(z) + b * g.derivative()(z)
    assert abs(combo - split) <= 1e-12 * max(1.0, abs(split))


def test_array_and_mp_evaluation_agree_with_scalar():
    h = parse(MAPS[5])
    zs = np.array([0, 0.3j, -0.7 + 0.2j, 0.9])
    arr = h.evaluate_array(zs)
    for z, v in zip(zs, arr):
        assert v == pytest.approx(h(z), rel=1e-14)
        assert complex(h.evaluate_mp(z)) == pytest.approx(h(z), rel=1e-13)


def test_evaluation_errors():
    with pytest.raises(EvaluationError):
        parse(CAYLEY_H)(1)
    with pytest.raises(EvaluationError):
        parse("log(z)")(-0.5)
    with pytest.raises(EvaluationError):
        parse("log(z)")(0)


def test_principal_branch():
    assert parse("log(z)")(-0.5 + 1e-300j).imag == pytest.approx(math.pi)
    assert parse("z^0.5")(0.25j) == pytest.approx(cmath.sqrt(0.25j))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse("1 +\n  * z")
    assert (info.value.line, info.value.column) == (2, 3)
    with pytest.raises(UnknownIdentifierError):
        parse("sin(z)")
    with pytest.raises(ArityError):
        parse("exp(z, z)")
    with pytest.raises(ParseError) as info:
        parse("(z + 1")
    assert "')'" in info.value.expected


def builtin_expressions():
    yield ex.cayley_map(1)
    yield ex.cayley_map(cmath.exp(0.3j))
    yield ex.cayley_inverse_map(1j)
    for lam in (0.5, 1.0, math.pi):
        yield strip_transfer(lam).compose(ex.cayley_map(1))
    for text in MAPS:
        yield parse(text)


@pytest.mark.parametrize("h", list(builtin_expressions()), ids=str)
def test_print_parse_round_trip(h):
    assert parse(str(h)) == h


INVERSE_FAMILIES = [STRIP_H, CAYLEY_H, PLANE_H, "2*(1+z)/(1-z) + 3*i",
                    "(i/2)*log((1+z)/(1-z))"]


@pytest.mark.parametrize("text", INVERSE_FAMILIES)
@given(z=disc_points(0.95))
def test_inverse_after_evaluate_is_identity(text, z):
    h = parse(text)
    # a continuation seed: the origin works for these starlike images
    back = numeric_inverse(h, h(z), 0.1 * z)
    assert abs(back - z) < 1e-10


def test_inverse_examples(cayley_h, strip_h):
    assert numeric_inverse(ex.Z, 0.3 + 0.1j, 0) == pytest.approx(0.3 + 0.1j, abs=1e-14)
    # i is a boundary point of the image, so the preimage is approached from inside
    z = numeric_inverse(cayley_h, 1j, 0)
    assert abs(z) < 1 and abs(z - 1j) < 1e-10
    w = strip_h(0) + 0.7j
    z = numeric_inverse(strip_h, w, 0)
    assert abs(z) < 1
    assert abs(strip_h(z) - w) < 1e-11 * (1 + abs(w))


def test_inverse_outside_image_fails(cayley_h):
    from koenigs.inverse import InversionError
    with pytest.raises(InversionError):
        numeric_inverse(cayley_h, -1.0 + 0.0j, 0)


def test_univalence_spot_check():
    grid = GridSpec(16, 32, 0.95)
    assert univalence_spot_check(parse("z^2"), grid).flagged
    assert not univalence_spot_check(parse(CAYLEY_H), grid).flagged
    for text in ("3*(1+z)/(1-z) + 2*i", "-0.5*(1+z)/(1-z)", "(i+z)/(i-z) - i"):
        assert not univalence_spot_check(parse(text), grid).flagged


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(0, 10)
    with pytest.raises(ValueError):
        GridSpec(4, 10, 1.0)
    g = GridSpec(4, 8, 0.99)
    assert g.ring_radii()[-1] == pytest.approx(0.99)
    assert len(g.points()) == 33
