import cmath
import math

import numpy as np
import pytest

from koenigs import parse
from koenigs.generators import (
    GeneratorData,
    GeneratorError,
    berkson_porta_residual,
    generator_from_koenigs,
    ode_residual,
)
from koenigs.grid import GridSpec
from koenigs.models import KoenigsFunction, strip_transfer
from koenigs import expressions as ex
from koenigs.semigroups import GeneratorSemigroup, HyperbolicGroup, ModelSemigroup, ParabolicGroup

from conftest import CAYLEY_H, KOENIGS_EXAMPLES, STRIP_H

BP_GRID = GridSpec(64, 128, 0.995)


@pytest.fixture(scope="module")
def koenigs():
    return {text: KoenigsFunction.build(parse(text)) for text, *_ in KOENIGS_EXAMPLES}


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, math.pi])
def test_strip_family_generator_closed_form(lam):
    h = strip_transfer(lam).compose(ex.cayley_map(1))
    D = generator_from_koenigs(h, 1)
    assert D.G(0) == pytest.approx(lam / 2, rel=1e-14)
    assert D.p(0) == pytest.approx(lam / 2, rel=1e-14)
    for z in (0.3, -0.5j, 0.7 + 0.1j):
        assert D.G(z) == pytest.approx(lam / 2 * (1 - z * z), rel=1e-12)
        assert D.p(z) == pytest.approx(lam / 2 * (1 + z) / (1 - z), rel=1e-12)


@pytest.mark.parametrize("sigma", [1, 1j, cmath.exp(2j)])
def test_cayley_generator_closed_form(sigma):
    D = generator_from_koenigs(ex.cayley_map(sigma), sigma)
    for z in (0, 0.3, -0.5j, 0.7 + 0.1j):
        assert D.G(z) == pytest.approx(0.5j * sigma.conjugate() * (sigma - z) ** 2, abs=1e-13)
        assert D.p(z) == pytest.approx(0.5j, abs=1e-13)
    rep = berkson_porta_residual(D, GridSpec(16, 32, 0.99))
    assert rep.pure_imaginary and rep.passes


@pytest.mark.parametrize("text, kind, tau, equality", KOENIGS_EXAMPLES)
def test_berkson_porta_on_examples(koenigs, text, kind, tau, equality):
    D = generator_from_koenigs(koenigs[text])
    rep = berkson_porta_residual(D, BP_GRID)
    assert rep.residual < 1e-11
    assert rep.min_re_p >= -1e-9
    assert rep.pure_imaginary == equality


def test_builtin_berkson_porta():
    D = GeneratorData.from_generator(HyperbolicGroup(2.0).generator(), 1)
    rep = berkson_porta_residual(D, BP_GRID)
    assert rep.residual < 1e-11 and rep.min_re_p > 0
    D = GeneratorData.from_generator(ParabolicGroup(1).generator(), 1)
    rep = berkson_porta_residual(D, BP_GRID)
    assert rep.residual < 1e-11 and abs(rep.min_re_p) < 1e-10


def test_wrong_denjoy_wolff_point_is_flagged():
    G = HyperbolicGroup(2.0).generator()
    rep = berkson_porta_residual(GeneratorData.from_generator(G, -1), BP_GRID)
    assert rep.min_re_p < 0 and not rep.passes
    with pytest.raises(GeneratorError):
        generator_from_koenigs(parse(STRIP_H), -1)
    with pytest.raises(GeneratorError):
        generator_from_koenigs(parse(CAYLEY_H), -1)


def test_critical_point_is_flagged():
    with pytest.raises(GeneratorError):
        generator_from_koenigs(parse("z^2"), 1)


def test_bare_map_needs_tau():
    with pytest.raises(ValueError):
        generator_from_koenigs(parse(STRIP_H))


def test_ode_residual_at_time_zero():
    S = ModelSemigroup(parse(STRIP_H))
    D = generator_from_koenigs(parse(STRIP_H), 1)
    for z in (0, 0.4j, -0.3 + 0.5j):
        assert abs((S.evaluate(1e-4, z) - z) / 1e-4 - D.G(z)) < 1e-3 * abs(D.G(z)) + 1e-6


def test_ode_residual_strip_model():
    h = parse(STRIP_H)
    S, D = ModelSemigroup(h), generator_from_koenigs(h, 1)
    rng = np.random.default_rng(9)
    z = 0.9 * np.sqrt(rng.random(50)) * np.exp(2j * np.pi * rng.random(50))
    samples = list(zip(rng.random(50) * 3, z))
    assert ode_residual(S, D, samples) < 1e-6


def test_ode_residual_of_generator_flow():
    D = generator_from_koenigs(parse(STRIP_H), 1)
    S = GeneratorSemigroup(D.G, 1)
    samples = [(t, z) for t in (0.0, 0.5, 2.0) for z in (0, 0.5j, -0.3 + 0.2j)]
    assert ode_residual(S, D, samples) < 1e-7


@pytest.mark.parametrize("text", [STRIP_H, CAYLEY_H, "(1+z)/(1-z) + i*log((1+z)/(1-z))"])
def test_model_and_generator_flows_agree(koenigs, text):
    K = koenigs[text]
    model = K.semigroup()
    flow = GeneratorSemigroup(generator_from_koenigs(K).G, K.dw_point)
    t = np.linspace(0, 3, 25)
    gap = 0.0
    for z in GridSpec(3, 6, 0.8).points():
        gap = max(gap, np.max(np.abs(model.orbit(z, t).z - flow.orbit(z, t).z)))
    assert gap < 1e-6


def test_constant_offsets_leave_the_generator_unchanged():
    h = parse(STRIP_H)
    G1 = generator_from_koenigs(h, 1).G
    G2 = generator_from_koenigs(h + 5j, 1).G
    z = GridSpec(8, 16, 0.99).points()
    assert np.max(np.abs(G1.evaluate_array(z) - G2.evaluate_array(z))) < 1e-12
