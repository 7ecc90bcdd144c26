import cmath
import math

import mpmath
import pytest
from hypothesis import given
from scipy.optimize import minimize_scalar
from hypothesis import strategies as st

from koenigs.hyperbolic import (
    DISC,
    FULL_PLANE,
    RIGHT_HALF_PLANE,
    DomainError,
    Horocycle,
    ModelDomain,
    cayley,
    cayley_inv,
    cayley_unchecked,
    disc_automorphism,
    horocycle_contains,
    horocycle_min_dist,
    hyp_dist,
    hyp_dist_disc,
    hyp_dist_disc_mp,
    hyp_dist_halfplane,
    strip_uniformizer,
)

from conftest import boundary_points, disc_points


def mp_disc_distance(z, w, dps=60):
    """Independent oracle: artanh of the pseudo-hyperbolic distance at high precision."""
    with mpmath.workdps(dps):
        z, w = mpmath.mpc(z), mpmath.mpc(w)
        return float(mpmath.atanh(abs(z - w) / abs(1 - mpmath.conj(z) * w)))


def test_golden_values():
    assert hyp_dist_disc(0, 0) == 0
    assert hyp_dist_disc(0, 0.5) == pytest.approx(0.5 * math.log(3), abs=1e-15)
    assert hyp_dist(FULL_PLANE, 0, 10 + 7j) == 0
    assert hyp_dist(RIGHT_HALF_PLANE, 1, 1) == 0


def test_strip_distance_on_centre_line():
    # 0.5 and 0.5+i map to 1 and e^pi on the positive axis of H
    assert hyp_dist(ModelDomain.strip(1), 0.5, 0.5 + 1j) == pytest.approx(math.pi / 2, rel=1e-13)


def test_near_boundary_matches_high_precision():
    z, w = 1 - 1e-12, -0.3 + 0.2j
    assert hyp_dist_disc(z, w) == pytest.approx(mp_disc_distance(z, w), rel=1e-11)


def test_mp_distance_resolves_points_beyond_double_precision():
    with mpmath.workdps(80):
        z = 1 - mpmath.mpf(10) ** -40
        assert hyp_dist_disc_mp(z, mpmath.mpc(0)) == pytest.approx(0.5 * math.log(2e40), rel=1e-14)


def test_rejects_points_outside():
    with pytest.raises(DomainError):
        hyp_dist_disc(1.0, 0)
    with pytest.raises(DomainError):
        hyp_dist_disc(1 - 1e-14, 0)
    with pytest.raises(DomainError, match="2j"):
        hyp_dist(ModelDomain.strip(1), 0.5, 2j)
    with pytest.raises(ValueError):
        ModelDomain.strip(0)


@given(disc_points(), disc_points())
def test_disc_distance_matches_oracle(z, w):
    assert hyp_dist_disc(z, w) == pytest.approx(mp_disc_distance(z, w), rel=1e-10, abs=1e-12)


@given(disc_points(0.9), disc_points(0.9), disc_points(0.9), boundary_points())
def test_conformal_invariance(a, z, w, rot):
    m = disc_automorphism(a, rot)
    assert hyp_dist_disc(m(z), m(w)) == pytest.approx(hyp_dist_disc(z, w), abs=1e-10, rel=1e-10)


DOMAINS = [DISC, RIGHT_HALF_PLANE, ModelDomain("left"), ModelDomain.strip(1.3), FULL_PLANE]


def domain_point(domain, z):
    """Transport a disc sample into ``domain``."""
    if domain.kind == "disc":
        return z
    w = (1 + z) / (1 - z)
    if domain.kind == "right":
        return w
    if domain.kind == "left":
        return -w
    if domain.kind == "plane":
        return 3 * w - 2j * z
    return strip_uniformizer(domain.rho).from_disc(z)


@pytest.mark.parametrize("domain", DOMAINS, ids=str)
@given(disc_points(0.9), disc_points(0.9), disc_points(0.9))
def test_symmetry_and_triangle(domain, a, b, c):
    a, b, c = (domain_point(domain, p) for p in (a, b, c))
    dab = hyp_dist(domain, a, b)
    assert dab == pytest.approx(hyp_dist(domain, b, a), abs=1e-10)
    assert dab <= hyp_dist(domain, a, c) + hyp_dist(domain, c, b) + 1e-10
    if domain.kind == "plane":
        assert dab == 0


@given(disc_points(0.9), disc_points(0.9))
def test_strip_uniformizer_is_isometry(z, w):
    U = strip_uniformizer(0.7)
    a, b = U.from_disc(z), U.from_disc(w)
    assert 0 < a.real < 0.7
    assert abs(U.to_disc(a) - z) < 1e-12
    assert hyp_dist(ModelDomain.strip(0.7), a, b) == pytest.approx(hyp_dist_disc(z, w), abs=1e-10)


def test_strip_uniformizer_centre_and_derivative():
    U = strip_uniformizer(2.0)
    assert abs(U.to_disc(1.0)) < 1e-15
    zeta, h = 0.6 + 0.3j, 1e-6
    numeric = (U.to_disc(zeta + h) - U.to_disc(zeta - h)) / (2 * h)
    assert abs(U.derivative(zeta) - numeric) < 1e-8


def test_halfplane_distance_huge_coordinates():
    # e^200 apart on the positive axis: exactly 100
    assert hyp_dist_halfplane(1.0, math.exp(200)) == pytest.approx(100.0, rel=1e-14)
    assert hyp_dist_halfplane(1e300 + 1e300j, 1e300 + 2e300j) == pytest.approx(
        math.asinh(0.5), rel=1e-12)


def test_cayley_values():
    assert cayley(1, 0) == 1
    # z = i sits on the circle, so only the raw formula accepts it
    assert abs(cayley_unchecked(1, 1j) - 1j) < 1e-15
    with pytest.raises(DomainError):
        cayley(1, 1j)
    with pytest.raises(ValueError):
        cayley_inv(1, -0.5)


@given(disc_points(0.99), boundary_points())
def test_cayley_round_trip(z, sigma):
    w = cayley(sigma, z)
    assert w.real > 0
    assert abs(cayley_inv(sigma, w) - z) < 1e-12


@pytest.mark.parametrize("R, z, expected", [(1, 0, False), (4, 0, True), (0.5, 0, False)])
def test_horocycle_membership(R, z, expected):
    assert horocycle_contains(Horocycle(1, R), z) is expected


@pytest.mark.parametrize("R, expected", [(1, 0.0), (0.25, math.log(2)), (math.exp(-2), 1.0), (3, 0.0)])
def test_horocycle_min_dist(R, expected):
    assert horocycle_min_dist(Horocycle(1, R)) == pytest.approx(expected, abs=1e-15)


@given(boundary_points(), st.floats(0.01, 0.99))
def test_horocycle_min_dist_brute_force(tau, R):
    E = Horocycle(tau, R)
    centre, radius = E.euclidean_disc()
    # the closest point to 0 lies on the boundary circle of the horocycle
    def dist(phi):
        p = centre + radius * cmath.exp(1j * phi)
        return hyp_dist_disc(0, p) if abs(p) < 1 - 1e-9 else math.inf

    grid = [2 * math.pi * k / 720 for k in range(720)]
    phi0 = min(grid, key=dist)
    step = 2 * math.pi / 720
    best = minimize_scalar(dist, bounds=(phi0 - step, phi0 + step), method="bounded",
                           options={"xatol": 1e-12}).fun
    assert best == pytest.approx(horocycle_min_dist(E), abs=1e-6)
