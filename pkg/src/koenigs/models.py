"""Koenigs functions: canonical models, starlikeness at infinity, normalization."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import expressions as ex
from .dynamics import denjoy_wolff
from .expressions import HolomorphicMap
from .grid import DEFAULT_GRID, GridSpec
from .hyperbolic import (
    FULL_PLANE,
    LEFT_HALF_PLANE,
    RIGHT_HALF_PLANE,
    ModelDomain,
    check_boundary_point,
)
from .inverse import UnivalenceReport, univalence_spot_check
from .semigroups import ModelSemigroup


class NotKoenigsError(ValueError):
    """The map fails one of the checks a Koenigs function must pass."""


class NonConstantOffsetError(ValueError):
    pass


class RealOffsetError(ValueError):
    pass


def strip_transfer(lam: float) -> HolomorphicMap:
    """``f(w) = (i / lam) log w + pi / (2 lam)``, mapping ``Re w > 0`` onto ``Strip(pi / lam)``.

    Intertwines dilations with vertical translations:
    ``f(exp(lam t) w) = f(w) + it``.
    """
    lam = float(lam)
    if not lam > 0:
        raise ValueError(f"spectral value must be positive, got {lam!r}")
    return ex.add(ex.mul(ex.Const(1j / lam), ex.log(ex.Z)), ex.Const(math.pi / (2 * lam)))


# --------------------------------------------------------------------------
# range of Re h


RANGE_GRID = DEFAULT_GRID.with_refine(6)
#: the univalence check compares all pairs, so it runs on a coarser grid
UNIVALENCE_GRID = GridSpec(32, 64, DEFAULT_GRID.r_max)


@dataclass(frozen=True)
class RangeBounds:
    """Grid estimates of ``a = inf Re h`` and ``b = sup Re h``.

    ``a`` over-estimates and ``b`` under-estimates the true values. A side
    is flagged infinite (and reported as +-inf) once the sampled extreme
    passes ``threshold`` in modulus.
    """

    a: float
    b: float
    a_infinite: bool
    b_infinite: bool
    grid: GridSpec
    threshold: float
    argmin: complex
    argmax: complex

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError(f"inconsistent range bounds a = {self.a!r} > b = {self.b!r}")


def _cone_probes(sigma: complex, depth: int, spokes: int = 31) -> np.ndarray:
    """Points ``sigma (1 - eps e^{i alpha})`` in a Stolz cone at ``sigma``."""
    eps = 10.0 ** -np.arange(1, depth + 1)
    alpha = np.linspace(-1.5, 1.5, spokes)
    pts = sigma * (1 - eps[:, None] * np.exp(1j * alpha)[None, :])
    pts = pts.ravel()
    return pts[np.abs(pts) < 1 - 1e-13]


def _finite_real(h: HolomorphicMap, z: np.ndarray):
    with np.errstate(all="ignore"):
        v = h.evaluate_array(z)
    ok = np.isfinite(v)
    return z[ok], v[ok]


def range_bounds(h: HolomorphicMap, grid: GridSpec = RANGE_GRID, *,
                 threshold: float = 1e6, cone_depth: int = 10) -> RangeBounds:
    """Extremes of ``Re h`` over the grid, its refinement rings and cone probes.

    The cone probes sit at the boundary points nearest to the sampled
    extremes of ``Re h`` and ``|h|``, where the growth of ``h`` is fastest.
    """
    rings = grid.refined_radii()
    pts = np.concatenate([grid.points(),
                          (rings[:, None] * np.exp(1j * grid.thetas())[None, :]).ravel()])
    pts, vals = _finite_real(h, pts)
    seeds = [pts[np.argmin(vals.real)], pts[np.argmax(vals.real)], pts[np.argmax(np.abs(vals))]]
    probes = [_cone_probes(p / abs(p), cone_depth) for p in seeds if abs(p) > 0]
    if probes:
        extra, extra_vals = _finite_real(h, np.concatenate(probes))
        pts = np.concatenate([pts, extra])
        vals = np.concatenate([vals, extra_vals])
    re = vals.real
    i_min, i_max = int(np.argmin(re)), int(np.argmax(re))
    a, b = float(re[i_min]), float(re[i_max])
    a_inf, b_inf = a < -threshold, b > threshold
    return RangeBounds(-math.inf if a_inf else a, math.inf if b_inf else b, a_inf, b_inf,
                       grid, threshold, complex(pts[i_min]), complex(pts[i_max]))


@dataclass(frozen=True)
class CanonicalModel:
    domain: ModelDomain
    h: HolomorphicMap
    spectral_value: float
    offset: float


def canonical_normalize(h: HolomorphicMap, bounds: RangeBounds) -> CanonicalModel:
    """Pick the canonical model from the range of ``Re h`` and shift ``h`` into it.

    (-oo, +oo) gives the plane, (-oo, b) the left half-plane with ``h - b``,
    (a, +oo) the right half-plane with ``h - a``, and a finite range the
    strip of width ``b - a`` with ``h - a`` and spectral value
    ``pi / (b - a)``.
    """
    if bounds.a > bounds.b:
        raise ValueError("inconsistent range bounds")
    if bounds.a_infinite and bounds.b_infinite:
        return CanonicalModel(FULL_PLANE, h, 0.0, 0.0)
    if bounds.a_infinite:
        return CanonicalModel(LEFT_HALF_PLANE, ex.sub(h, ex.Const(bounds.b)), 0.0, bounds.b)
    if bounds.b_infinite:
        return CanonicalModel(RIGHT_HALF_PLANE, ex.sub(h, ex.Const(bounds.a)), 0.0, bounds.a)
    width = bounds.b - bounds.a
    if not width > 0:
        raise ValueError("Re h is constant on the grid: h is not univalent")
    return CanonicalModel(ModelDomain.strip(width), ex.sub(h, ex.Const(bounds.a)),
                          math.pi / width, bounds.a)


# --------------------------------------------------------------------------
# starlike at infinity


@dataclass(frozen=True)
class StarlikeReport:
    sigma: complex
    min_q: float
    max_q: float
    argmin: complex
    passes: bool
    grazing: bool
    equality: bool
    fit_a: complex | None = None
    fit_c: complex | None = None
    fit_residual: float | None = None


def starlike_check(h: HolomorphicMap, sigma: complex = 1.0, grid: GridSpec = DEFAULT_GRID,
                   *, tol: float = 1e-9) -> StarlikeReport:
    """Evaluate ``q(z) = Im[conj(sigma) (sigma - z)^2 h'(z)]`` on the grid.

    ``h`` passes when ``min q >= -tol``. When also ``max q <= tol`` the map
    is in the equality case ``a (sigma + z)/(sigma - z) + c``; the two
    coefficients are fitted from two points and the fit residual over the
    grid is reported.
    """
    sigma = check_boundary_point(sigma)
    z = grid.points()
    with np.errstate(all="ignore"):
        q = (sigma.conjugate() * (sigma - z) ** 2 * h.derivative().evaluate_array(z)).imag
    q = np.where(np.isfinite(q), q, -np.inf)
    i = int(np.argmin(q))
    qmin, qmax = float(q[i]), float(np.max(q))
    passes = qmin >= -tol
    equality = passes and qmax <= tol
    report = dict(sigma=sigma, min_q=qmin, max_q=qmax, argmin=complex(z[i]), passes=passes,
                  grazing=-tol <= qmin < 0, equality=equality)
    if equality:
        report.update(_fit_cayley_family(h, sigma, z))
    return StarlikeReport(**report)


def _fit_cayley_family(h, sigma, z):
    c_map = ex.cayley_map(sigma)
    z1, z2 = 0j, 0.5 * sigma.conjugate() * 1j
    a = (h(z2) - h(z1)) / (c_map(z2) - c_map(z1))
    c = h(z1) - a * c_map(z1)
    hz = h.evaluate_array(z)
    fitted = a * c_map.evaluate_array(z) + c
    residual = float(np.max(np.abs(hz - fitted) / (1 + np.abs(hz))))
    return dict(fit_a=complex(a), fit_c=complex(c), fit_residual=residual)


# --------------------------------------------------------------------------
# Denjoy-Wolff point from h


@dataclass(frozen=True)
class DWSelection:
    point: complex
    method: str
    radial_point: complex | None
    radial_score: float
    orbit_point: complex | None
    orbit_confidence: float
    agreement: float | None


def _radial_scores(h, angles, r):
    with np.errstate(all="ignore"):
        v = h.evaluate_array(r * np.exp(1j * angles)).imag
    return np.where(np.isfinite(v), v, -np.inf)


def _angle_gap(p: complex, q: complex) -> float:
    return abs(cmath.phase(p / q))


def dw_from_koenigs(h: HolomorphicMap, candidates=None, *, refinements: int = 2,
                    radius: float = 1 - 1e-12, divergence: float = 1e4,
                    horizon: float = 1e6, agree: float = 0.05,
                    snap: float = 1e-5) -> DWSelection:
    """Find the boundary point where ``Im h`` blows up.

    Two signals are combined. The radial score is ``Im h(r sigma)`` near
    ``r = 1`` over the candidates (360 equispaced points by default, with
    ``refinements`` rounds of local refinement); it counts only above
    ``divergence``. The orbit signal is the limit of ``phi_t(0)`` for the
    semigroup induced by ``h``. A converged orbit wins (snapped to a
    candidate within ``snap`` radians); otherwise a divergent radial
    maximum is used and cross-checked against the orbit direction.
    """
    if candidates is None:
        angles = 2 * np.pi * np.arange(360) / 360
    else:
        angles = np.array([cmath.phase(check_boundary_point(c)) for c in candidates])
    scores = _radial_scores(h, angles, radius)
    best = int(np.argmax(scores))
    theta, score = float(angles[best]), float(scores[best])
    width = np.pi / len(angles) if len(angles) > 1 else 0.0
    for _ in range(refinements):
        if width == 0:
            break
        local = theta + np.linspace(-width, width, 21)
        s = _radial_scores(h, local, radius)
        k = int(np.argmax(s))
        if s[k] > score:
            theta, score = float(local[k]), float(s[k])
        width /= 10
    radial = cmath.exp(1j * theta) if score > divergence else None

    try:
        dw = denjoy_wolff(ModelSemigroup(h, check=False), horizon)
        orbit_point = None if dw.elliptic else dw.point
        confidence = dw.confidence
    except Exception:  # the orbit signal is optional
        orbit_point, confidence = None, 0.0
    converged = orbit_point is not None and 1 - confidence < 1e-3

    agreement = None
    if radial is not None and orbit_point is not None:
        agreement = _angle_gap(radial, orbit_point)
    if converged:
        point, method = orbit_point, "orbit"
        nearest = int(np.argmin(np.abs(np.angle(np.exp(1j * angles) / point))))
        if _angle_gap(np.exp(1j * angles[nearest]), point) < snap:
            point = complex(np.exp(1j * angles[nearest]))
        if radial is not None and agreement < agree:
            method = "orbit+radial"
    elif radial is not None:
        point, method = radial, "radial"
        if agreement is not None and agreement < agree:
            method = "radial+orbit"
    else:
        raise NotKoenigsError(
            "no boundary point where Im h diverges radially and the induced orbit "
            "does not converge to the circle: h is not a Koenigs function")
    return DWSelection(complex(point), method, radial, score, orbit_point, confidence, agreement)


# --------------------------------------------------------------------------
# uniqueness


def koenigs_offset(h1: HolomorphicMap, h2: HolomorphicMap, model: ModelDomain,
                   grid: GridSpec = GridSpec(16, 32, 0.95), *, tol: float = 1e-9) -> complex:
    """The constant ``h2 - h1`` for two Koenigs functions of one semigroup.

    The difference must be constant on the grid. In strip and half-plane
    models it must also be purely imaginary; in the plane any constant is
    allowed.
    """
    z = grid.points()
    diff = h2.evaluate_array(z) - h1.evaluate_array(z)
    c = complex(diff[0])
    spread = float(np.max(np.abs(diff - c)))
    if spread > tol * (1 + abs(c)):
        raise NonConstantOffsetError(
            f"h2 - h1 varies by {spread:.3e} on the grid: not Koenigs functions "
            f"of the same semigroup")
    if model.kind != "plane" and abs(c.real) > tol:
        raise RealOffsetError(
            f"offset {c!r} has a real part; in the {model.label()} model Koenigs "
            f"functions may only differ by an imaginary constant")
    return c


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KoenigsFunction:
    """A checked Koenigs function in canonical normalization.

    ``h`` is normalized (shifted into the canonical domain); ``source`` is
    the map it was built from.
    """

    h: HolomorphicMap
    source: HolomorphicMap
    dw_point: complex
    model: ModelDomain
    bounds: RangeBounds
    spectral_value: float
    starlike: StarlikeReport
    univalence: UnivalenceReport
    dw: DWSelection

    @classmethod
    def build(cls, h: HolomorphicMap, grid: GridSpec = DEFAULT_GRID, *,
              univalence_grid: GridSpec = UNIVALENCE_GRID,
              strict: bool = True) -> "KoenigsFunction":
        univalence = univalence_spot_check(h, univalence_grid)
        if strict and univalence.flagged:
            raise NotKoenigsError(f"{h} fails the univalence spot check")
        dw = dw_from_koenigs(h)
        starlike = starlike_check(h, dw.point, grid)
        if strict and not starlike.passes:
            raise NotKoenigsError(
                f"{h} is not starlike at infinity with respect to {dw.point}: "
                f"min q = {starlike.min_q:.3e} at {starlike.argmin}")
        bounds = range_bounds(h, grid.with_refine(max(grid.refine, 6)))
        model = canonical_normalize(h, bounds)
        return cls(model.h, h, dw.point, model.domain, bounds, model.spectral_value,
                   starlike, univalence, dw)

    def semigroup(self) -> ModelSemigroup:
        return ModelSemigroup(self.h, self.model, check=False)
