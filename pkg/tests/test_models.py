import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from koenigs import expressions as ex
from koenigs import parse
from koenigs.dynamics import classify
from koenigs.grid import GridSpec
from koenigs.hyperbolic import FULL_PLANE, RIGHT_HALF_PLANE, ModelDomain
from koenigs.inverse import numeric_inverse
from koenigs.models import (
    KoenigsFunction,
    NonConstantOffsetError,
    NotKoenigsError,
    RealOffsetError,
    canonical_normalize,
    dw_from_koenigs,
    koenigs_offset,
    range_bounds,
    starlike_check,
    strip_transfer,
)
from koenigs.semigroups import ModelSemigroup

from conftest import CAYLEY_H, KOENIGS_EXAMPLES, PLANE_H, STRIP_H

KINDS = {"strip": "strip", "right": "right", "left": "left", "plane": "plane"}


@pytest.fixture(scope="module")
def built():
    return {text: KoenigsFunction.build(parse(text)) for text, *_ in KOENIGS_EXAMPLES}


# strip transfer ---------------------------------------------------------------


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, math.pi])
def test_strip_transfer_values(lam):
    f = strip_transfer(lam)
    assert f(1) == pytest.approx(math.pi / (2 * lam), rel=1e-15)
    assert f(math.exp(lam)) - f(1) == pytest.approx(1j, abs=1e-14)


def test_strip_transfer_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        strip_transfer(0)


@given(lam=st.floats(0.1, 5), t=st.floats(0, 5), r=st.floats(1e-3, 1e3),
       a=st.floats(-1.5, 1.5))
def test_strip_transfer_conjugates_dilation_to_translation(lam, t, r, a):
    f = strip_transfer(lam)
    w = r * cmath.exp(1j * a)
    assert abs(f(math.exp(lam * t) * w) - f(w) - 1j * t) < 1e-11 * (1 + t)


def test_strip_transfer_maps_into_the_strip():
    rng = np.random.default_rng(0)
    w = np.exp(rng.uniform(-8, 8, 1000)) * np.exp(1j * rng.uniform(-1.5707, 1.5707, 1000))
    for lam in (0.5, math.pi):
        re = strip_transfer(lam).evaluate_array(w).real
        assert np.all((re > 0) & (re < math.pi / lam))


# range bounds and normalization -------------------------------------------------


def test_range_bounds_examples():
    b = range_bounds(parse(STRIP_H))
    assert abs(b.a) < 1e-6 and abs(b.b - 1) < 1e-6
    assert not (b.a_infinite or b.b_infinite)
    b = range_bounds(parse(CAYLEY_H))
    assert abs(b.a) < 1e-6 and b.b_infinite and not b.a_infinite
    b = range_bounds(parse(PLANE_H))
    assert b.a_infinite and b.b_infinite


def test_canonical_normalize_examples():
    h = parse(CAYLEY_H)
    m = canonical_normalize(h, range_bounds(h))
    assert m.domain == RIGHT_HALF_PLANE and abs(m.offset) < 1e-6

    h = parse("(i/pi)*log((1+z)/(1-z)) + 0.8")
    m = canonical_normalize(h, range_bounds(h))
    assert m.domain.kind == "strip" and m.domain.rho == pytest.approx(1, abs=1e-6)
    assert m.offset == pytest.approx(0.3, abs=1e-6)
    assert m.spectral_value == pytest.approx(math.pi, rel=1e-6)
    assert m.h(0) == pytest.approx(0.5, abs=1e-6)

    h = parse(PLANE_H)
    m = canonical_normalize(h, range_bounds(h))
    assert m.domain == FULL_PLANE and m.h == h


def test_canonical_normalize_rejects_inconsistent_bounds():
    b = range_bounds(parse(STRIP_H))
    with pytest.raises(ValueError):
        type(b)(**{**b.__dict__, "a": 2.0, "b": 1.0})


@pytest.mark.parametrize("text, kind, tau, equality", KOENIGS_EXAMPLES)
def test_build_recovers_model_and_denjoy_wolff_point(built, text, kind, tau, equality):
    K = built[text]
    assert K.model.kind == KINDS[kind]
    assert abs(K.dw_point - tau) < 1e-9
    assert K.starlike.passes and K.starlike.equality == equality
    assert not K.univalence.flagged


@pytest.mark.parametrize("text", [t for t, kind, *_ in KOENIGS_EXAMPLES if kind != "strip"][:4])
def test_normalized_model_matches_classification(built, text):
    K = built[text]
    assert classify(K.semigroup()).model.kind == K.model.kind


def test_normalized_strip_model_matches_classification(built):
    K = built[STRIP_H]
    rep = classify(K.semigroup())
    assert rep.model.matches(K.model)


# starlike criterion -------------------------------------------------------------


def test_starlike_examples():
    rep = starlike_check(parse("3*(1+z)/(1-z) + 2*i"), 1)
    assert rep.equality
    assert rep.fit_a == pytest.approx(3, abs=1e-10) and rep.fit_c == pytest.approx(2j, abs=1e-10)
    assert rep.fit_residual < 1e-10

    rep = starlike_check(parse(STRIP_H), 1)
    assert rep.passes and not rep.equality
    assert rep.max_q >= 2 / math.pi - 1e-12  # q(0) = 2 / pi

    assert starlike_check(parse("z^2"), 1).min_q < -0.1


def test_starlike_depends_on_the_boundary_point():
    assert not starlike_check(parse(CAYLEY_H), -1).passes
    assert starlike_check(parse("(i+z)/(i-z)"), 1j).equality


@pytest.mark.parametrize("text, kind, tau, equality", KOENIGS_EXAMPLES)
def test_equality_case_iff_flow_is_parabolic_mobius(built, text, kind, tau, equality):
    # Mobius maps preserve cross ratios. Strip models are hyperbolic groups, so
    # their flows are Mobius too although q > 0 there.
    S = built[text].semigroup()
    z = [0, 0.5, 0.3j, -0.4 - 0.2j]
    w = [S.evaluate(1.0, p) for p in z]

    def cross(a, b, c, d):
        return (a - c) * (b - d) / ((a - d) * (b - c))

    gap = abs(cross(*w) - cross(*z))
    if equality or kind == "strip":
        assert gap < 1e-9
    else:
        assert gap > 1e-6


@pytest.mark.parametrize("text, kind, tau, equality", KOENIGS_EXAMPLES)
def test_image_is_invariant_under_upward_translation(built, text, kind, tau, equality):
    h = built[text].source
    for z in GridSpec(4, 8, 0.9).points():
        for t in (0.5, 1.0, 2.0):
            w = h(z) + 1j * t
            back = numeric_inverse(h, w, z)
            assert abs(h(back) - w) < 1e-9 * (1 + abs(w))


# Denjoy-Wolff point from h ------------------------------------------------------


def test_dw_from_koenigs_examples():
    for text in (CAYLEY_H, STRIP_H, PLANE_H):
        assert abs(dw_from_koenigs(parse(text)).point - 1) < 1e-9
    sel = dw_from_koenigs(parse(PLANE_H))
    assert sel.radial_score > 1e4


def test_dw_from_koenigs_with_candidates():
    h = parse("(i+z)/(i-z)")
    sel = dw_from_koenigs(h, candidates=[1, 1j, -1, -1j])
    assert abs(sel.point - 1j) < 1e-9


def test_dw_from_koenigs_rejects_non_koenigs_maps():
    with pytest.raises(NotKoenigsError):
        dw_from_koenigs(parse("z/2"))


def test_build_rejects_non_univalent_map():
    with pytest.raises(NotKoenigsError):
        KoenigsFunction.build(parse("z^2"))


# uniqueness ------------------------------------------------------------------------


def test_offsets_in_rigid_models():
    h = parse(STRIP_H)
    strip = ModelDomain.strip(1)
    assert koenigs_offset(h, h + 5j, strip) == pytest.approx(5j, abs=1e-12)
    with pytest.raises(RealOffsetError):
        koenigs_offset(h, h + 3, strip)
    c = parse(CAYLEY_H)
    with pytest.raises(RealOffsetError):
        koenigs_offset(c, c + (1 + 1j), RIGHT_HALF_PLANE)


def test_offsets_in_the_plane():
    h = parse(PLANE_H)
    assert koenigs_offset(h, h + (2 + 3j), FULL_PLANE) == pytest.approx(2 + 3j, abs=1e-12)


def test_non_constant_offset_is_rejected():
    h = parse(STRIP_H)
    with pytest.raises(NonConstantOffsetError):
        koenigs_offset(h, h + ex.Z, FULL_PLANE)


@given(a=st.floats(-100, 100), b=st.floats(-100, 100))
def test_imaginary_offsets_define_the_same_semigroup(a, b):
    h = parse(STRIP_H)
    S1 = ModelSemigroup(h, check=False)
    S2 = ModelSemigroup(h + 1j * a, check=False)
    assert abs(S1.evaluate(1.0, 0.3j) - S2.evaluate(1.0, 0.3j)) < 1e-9
    if abs(b) > 1e-6:
        with pytest.raises(RealOffsetError):
            koenigs_offset(h, h + complex(b, a), ModelDomain.strip(1))
