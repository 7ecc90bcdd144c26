"""Divergence rate, hyperbolic steps, Denjoy-Wolff point and type of a semigroup.

All asymptotic quantities are limits as ``t -> oo`` and are estimated on a
finite horizon. Two monotonicity facts turn truncation into one-sided
bounds:

* ``t -> omega(z, phi_t z)`` is subadditive, so the divergence rate is the
  infimum of ``omega(z, phi_s z) / s`` and every sampled quotient is an
  upper bound;
* ``r -> k(phi_r z, phi_{r+u} z)`` is nonincreasing, so every sampled
  value is an upper bound for the hyperbolic step ``s_u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hyperbolic import (
    DISC,
    FULL_PLANE,
    LEFT_HALF_PLANE,
    RIGHT_HALF_PLANE,
    ModelDomain,
    hyp_dist,
)
from .inverse import InversionError
from .semigroups import (
    ModelSemigroup,
    OrbitSample,
    ParabolicGroup,
    Semigroup,
    SemigroupError,
    sample_distance,
    semi_conjugation_residual,
)

HYPERBOLIC = "hyperbolic"
ELLIPTIC = "elliptic"
PARABOLIC_POSITIVE = "parabolic-positive-step"
PARABOLIC_ZERO = "parabolic-zero-step"
_PARABOLIC = "parabolic"

_EVAL_ERRORS = (SemigroupError, InversionError, ArithmeticError, ValueError)


def _geometric_times(horizon: float, levels: int) -> np.ndarray:
    return horizon * 2.0 ** -np.arange(levels, -1, -1)


def _orbit_upto(S: Semigroup, z, times, min_fraction=2.0 ** -6):
    """Orbit on ``times``; on evaluation failure drop the failing tail.

    Returns the orbit, possibly on fewer times, and whether it was cut.
    """
    times = np.asarray(times, dtype=float)
    full, limit = len(times), times[-1] * min_fraction
    while True:
        try:
            orbit = S.orbit(z, times)
            return orbit, len(orbit) < full
        except _EVAL_ERRORS:
            times = times[:-1]
            if len(times) < 2 or times[-1] < limit:
                raise


# --------------------------------------------------------------------------
# divergence rate


@dataclass(frozen=True)
class RateEstimate:
    """Divergence rate ``c`` of a semigroup from one base point.

    ``value`` is the inf-form estimate (an upper bound on ``c``),
    ``limit_value`` the quotient ``omega(z, phi_T z) / T`` at ``T = horizon``
    and ``increment`` the late-time slope ``(omega(T) - omega(T/2)) / (T/2)``.
    """

    value: float
    limit_value: float
    increment: float
    horizon: float
    spread: float
    method: str = "inf-form"
    truncated: bool = False

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("rate estimates are non-negative")


def divergence_rate(S: Semigroup, z: complex = 0j, horizon: float = 50.0,
                    levels: int = 10) -> RateEstimate:
    """Estimate ``c = lim omega(z, phi_t z) / t = inf_s omega(z, phi_s z) / s``.

    The orbit is sampled at ``s = horizon * 2**-k`` for ``k = 0..levels``.
    If the orbit cannot be evaluated up to ``horizon`` the largest
    reachable sample is used and ``truncated`` is set.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    times = np.concatenate([[0.0], _geometric_times(horizon, levels)])
    orbit, truncated = _orbit_upto(S, z, times)
    d = np.array([orbit.distance(0, i) for i in range(1, len(orbit))])
    s = orbit.t[1:]
    quotients = d / s
    value = float(max(0.0, quotients.min()))
    limit = float(quotients[-1])
    if len(d) >= 2:
        increment = float((d[-1] - d[-2]) / (s[-1] - s[-2]))
    else:
        increment = limit
    return RateEstimate(value=value, limit_value=limit, increment=max(0.0, increment),
                        horizon=float(s[-1]), spread=abs(limit - value),
                        truncated=truncated)


# --------------------------------------------------------------------------
# hyperbolic steps


@dataclass(frozen=True)
class StepEstimate:
    """Upper bound on the hyperbolic step ``s_u`` from a sampled tail."""

    u: float
    value: float
    horizon: float
    r: tuple[float, ...] = ()
    tail: tuple[float, ...] = ()
    monotone: bool = True
    truncated: bool = False

    @property
    def decay_per_doubling(self) -> float:
        """Relative drop of the tail over its last doubling of ``r``."""
        if len(self.tail) < 2 or self.tail[-2] == 0:
            return 0.0
        return (self.tail[-2] - self.tail[-1]) / self.tail[-2]


def hyperbolic_step(S: Semigroup, z: complex = 0j, u: float = 1.0,
                    horizon: float = 50.0, levels: int = 10,
                    slack: float = 1e-9) -> StepEstimate:
    """Sample ``k(phi_r z, phi_{r+u} z)`` for ``r = horizon * 2**-k``.

    The tail must be nonincreasing in ``r`` (up to ``slack``); the last
    value is returned as the estimate.
    """
    if u < 0:
        raise ValueError("step order must be non-negative")
    if u == 0:
        return StepEstimate(0.0, 0.0, float(horizon))
    if not horizon > u:
        raise ValueError("horizon must exceed the step order")
    r = _geometric_times(horizon - u, levels)
    times = np.unique(np.concatenate([r, r + u]))
    orbit, truncated = _orbit_upto(S, z, times)
    reached = orbit.t[-1]
    index = {t: i for i, t in enumerate(orbit.t)}
    rs, tail = [], []
    for rk in r:
        if rk + u > reached:
            break
        rs.append(float(rk))
        tail.append(orbit.distance(index[rk], index[rk + u]))
    if not tail:
        raise SemigroupError("orbit could not be evaluated far enough for a step estimate")
    monotone = all(b <= a + slack * (1 + abs(a)) for a, b in zip(tail, tail[1:]))
    return StepEstimate(u=float(u), value=tail[-1], horizon=rs[-1] + u, r=tuple(rs),
                        tail=tuple(tail), monotone=monotone, truncated=truncated)


@dataclass(frozen=True)
class StepRateReport:
    rate: float
    orders: tuple[float, ...]
    quotients: tuple[float, ...]
    deviations: tuple[float, ...]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    @property
    def final_deviation(self) -> float:
        return self.deviations[-1]


def step_rate_consistency(S: Semigroup, z: complex = 0j, orders=(5, 10, 20, 40),
                          horizon: float = 200.0) -> StepRateReport:
    """Compare ``s_u / u`` with the divergence rate for increasing ``u``."""
    rate = divergence_rate(S, z, horizon).value
    quotients, deviations = [], []
    for u in orders:
        s = hyperbolic_step(S, z, u, horizon + u).value
        quotients.append(s / u)
        deviations.append(abs(s / u - rate))
    return StepRateReport(rate, tuple(float(u) for u in orders), tuple(quotients),
                          tuple(deviations))


# --------------------------------------------------------------------------
# Denjoy-Wolff point


@dataclass(frozen=True)
class DenjoyWolffEstimate:
    point: complex
    elliptic: bool
    confidence: float
    horizon: float
    fixed_point_residual: float | None = None
    converged: bool = True


def denjoy_wolff(S: Semigroup, horizon: float = 1000.0, *,
                 interior_gap: float = 1e-3, fixed_tol: float = 1e-9) -> DenjoyWolffEstimate:
    """Locate the Denjoy-Wolff point from the orbit of 0.

    An interior limit ``x`` with ``|phi_1(x) - x| < fixed_tol`` is reported
    as an elliptic fixed point. Otherwise the orbit point at the horizon is
    projected to the circle and its modulus is the confidence. The orbit
    is advanced in doubling steps using the semigroup law and stops early
    once it is within 1e-12 of the circle.
    """
    x, reached, stopped = 0j, 0.0, False
    while reached < horizon and not stopped:
        step = min(horizon - reached, max(1.0, reached))
        try:
            x = S.evaluate(step, x)
        except _EVAL_ERRORS:
            stopped = True
            break
        reached += step
        if 1 - abs(x) < 1e-12:
            break
    if 1 - abs(x) > interior_gap:
        try:
            residual = abs(S.evaluate(1.0, x) - x)
        except _EVAL_ERRORS:
            residual = math.inf
        if residual < fixed_tol:
            return DenjoyWolffEstimate(x, True, 1.0, reached, residual)
        point = x / abs(x) if x != 0 else x
        return DenjoyWolffEstimate(point, False, abs(x), reached, residual, converged=False)
    return DenjoyWolffEstimate(x / abs(x), False, abs(x), reached)


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassifySettings:
    horizon: float = 50.0
    max_horizon: float = 5e6
    rate_threshold: float = 1e-4
    step_threshold: float = 1e-4
    band: float = 10.0
    dw_horizon: float = 1000.0
    base_point: complex = 0j
    #: relative agreement required between the inf-form and the late slope
    consistency: float = 0.1

    def __post_init__(self):
        if not (self.horizon > 1 and self.max_horizon >= self.horizon):
            raise ValueError("horizons must satisfy 1 < horizon <= max_horizon")
        if not (self.rate_threshold > 0 and self.step_threshold > 0 and self.band > 1):
            raise ValueError("thresholds must be positive and the band above 1")


@dataclass(frozen=True)
class ClassificationReport:
    type: str
    spectral_value: float | None
    rate: RateEstimate | None
    step: StepEstimate | None
    denjoy_wolff: DenjoyWolffEstimate
    model: ModelDomain
    inconclusive: bool = False
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def divergence_rate(self) -> float | None:
        return None if self.rate is None else self.rate.value


def _rate_verdict(rate: RateEstimate, st: ClassifySettings):
    thr, band = st.rate_threshold, st.band
    if rate.value < thr / band:
        return _PARABOLIC
    if rate.increment > band * thr and (
            abs(rate.value - rate.increment) <= st.consistency * rate.value):
        return HYPERBOLIC
    return None


def _step_verdict(step: StepEstimate, st: ClassifySettings):
    thr, band = st.step_threshold, st.band
    if step.value < thr / band:
        return PARABOLIC_ZERO
    if step.value > band * thr and step.decay_per_doubling < st.consistency:
        return PARABOLIC_POSITIVE
    return None


def _escalate(estimate, verdict, st: ClassifySettings):
    """Run ``estimate(H)`` on horizons ``H, 10H, ...`` until ``verdict`` decides."""
    H = st.horizon
    while True:
        result = estimate(H)
        decision = verdict(result)
        if decision is not None:
            return result, decision, False
        if result.truncated or H * 10 > st.max_horizon:
            return result, None, True
        H *= 10


def _parabolic_half_plane(S: Semigroup):
    if isinstance(S, ParabolicGroup):
        return (RIGHT_HALF_PLANE if S.orientation == 1 else LEFT_HALF_PLANE), None
    model = getattr(S, "model", None)
    if isinstance(model, ModelDomain) and model.kind in ("right", "left"):
        return model, None
    if isinstance(S, ModelSemigroup):
        from .models import range_bounds
        bounds = range_bounds(S.h)
        if bounds.a_infinite and not bounds.b_infinite:
            return LEFT_HALF_PLANE, None
        if bounds.b_infinite and not bounds.a_infinite:
            return RIGHT_HALF_PLANE, None
    return RIGHT_HALF_PLANE, "half-plane orientation unknown; right half-plane assumed"


def classify(S: Semigroup, settings: ClassifySettings | None = None) -> ClassificationReport:
    """Decide the type of ``S`` and its canonical model domain.

    Elliptic iff the orbit of 0 converges to an interior fixed point.
    Otherwise hyperbolic iff the divergence rate exceeds the rate
    threshold, with ``lambda = 2c`` and model ``Strip(pi / lambda)``;
    parabolic semigroups are split by the step ``s_1``. Estimates inside
    the band ``[thr / band, thr * band]`` are escalated to longer horizons
    and flagged inconclusive if they never leave it.
    """
    st = settings or ClassifySettings()
    z = st.base_point
    notes: list[str] = []
    dw = denjoy_wolff(S, st.dw_horizon)
    if dw.elliptic:
        lam = getattr(S, "spectral_value", None)
        return ClassificationReport(ELLIPTIC, lam, None, None, dw, DISC, False,
                                    ("interior fixed point found",))
    if not dw.converged:
        notes.append("orbit of 0 did not converge within the Denjoy-Wolff horizon")

    rate, decision, inconclusive = _escalate(
        lambda H: divergence_rate(S, z, H), lambda r: _rate_verdict(r, st), st)
    if rate.truncated:
        notes.append(f"orbit evaluation failed beyond t = {rate.horizon:g}")
    if decision is None:
        decision = HYPERBOLIC if rate.value > st.rate_threshold else _PARABOLIC
        notes.append(f"rate {rate.value:.3e} within the inconclusive band "
                     f"at horizon {rate.horizon:g}")

    if decision == HYPERBOLIC:
        lam = 2 * rate.value
        return ClassificationReport(HYPERBOLIC, lam, rate, None, dw,
                                    ModelDomain.strip(math.pi / lam), inconclusive,
                                    tuple(notes))

    step, kind, step_inconclusive = _escalate(
        lambda H: hyperbolic_step(S, z, 1.0, H), lambda s: _step_verdict(s, st), st)
    if kind is None:
        kind = PARABOLIC_POSITIVE if step.value > st.step_threshold else PARABOLIC_ZERO
        notes.append(f"step s_1 = {step.value:.3e} within the inconclusive band "
                     f"at horizon {step.horizon:g}")
    if not step.monotone:
        notes.append("step tail not monotone: evaluation noise")
    if kind == PARABOLIC_POSITIVE:
        model, note = _parabolic_half_plane(S)
        if note:
            notes.append(note)
    else:
        model = FULL_PLANE
    return ClassificationReport(kind, 0.0, rate, step, dw, model,
                                inconclusive or step_inconclusive, tuple(notes))


# --------------------------------------------------------------------------
# model and semi-conjugation checks


@dataclass(frozen=True)
class DistanceLimitReport:
    times: tuple[float, ...]
    domain_side: tuple[float, ...]
    time_side: tuple[tuple[float, ...], ...]
    gaps: tuple[float, ...]
    monotone: bool
    above_domain_side: bool

    @property
    def max_gap(self) -> float:
        return max(self.gaps) if self.gaps else 0.0


def distance_limit_check(S: ModelSemigroup, pairs, horizon: float = 50.0,
                         times=None, slack: float = 1e-9) -> DistanceLimitReport:
    """Compare ``k_Omega(h z, h w)`` with ``omega(phi_T z, phi_T w)``.

    The time side is sampled on ``times`` (ending at ``horizon``); it must
    be nonincreasing in ``T`` and bounded below by the domain side.
    """
    if S.model is None:
        raise ValueError("distance_limit_check needs a model semigroup with its domain")
    if times is None:
        times = np.unique(np.concatenate([[0.0], _geometric_times(horizon, 6)]))
    times = np.asarray(times, dtype=float)
    dom, series, gaps = [], [], []
    monotone = above = True
    for z, w in pairs:
        k = hyp_dist(S.model, S.h(z), S.h(w))
        oz, ow = S.orbit(z, times), S.orbit(w, times)
        d = [sample_distance(oz, i, ow, i) for i in range(len(times))]
        monotone &= all(b <= a + slack * (1 + a) for a, b in zip(d, d[1:]))
        above &= all(x >= k - slack * (1 + k) for x in d)
        dom.append(k)
        series.append(tuple(d))
        gaps.append(abs(d[-1] - k))
    return DistanceLimitReport(tuple(float(t) for t in times), tuple(dom), tuple(series),
                               tuple(gaps), monotone, above)


@dataclass(frozen=True)
class SemiConjugationRateReport:
    residual: float
    rate_source: float
    rate_target: float
    holds: bool


class SemiConjugationError(ValueError):
    pass


def rate_semiconjugation_check(g, S: Semigroup, T: Semigroup, samples, *,
                               base_point: complex = 0j, horizon: float = 50.0,
                               residual_tol: float = 1e-8,
                               tol: float = 1e-6) -> SemiConjugationRateReport:
    """Check ``c(S) >= c(T)`` for a semi-conjugation ``g o phi_t = psi_t o g``.

    The semi-conjugation residual on ``samples`` is verified first.
    """
    residual = semi_conjugation_residual(g, S, T, samples)
    if residual > residual_tol:
        raise SemiConjugationError(
            f"semi-conjugation residual {residual:.3e} exceeds {residual_tol:g}")
    c_s = divergence_rate(S, base_point, horizon).value
    c_t = divergence_rate(T, g(base_point), horizon).value
    return SemiConjugationRateReport(residual, c_s, c_t, c_s >= c_t - tol)
