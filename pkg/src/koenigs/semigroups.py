"""Continuous one-parameter semigroups of holomorphic self-maps of the disc.

Three kinds of semigroup are supported:

* closed-form built-in families (:class:`RotationGroup`,
  :class:`EllipticContraction`, :class:`HyperbolicGroup`,
  :class:`ParabolicGroup`),
* :class:`ModelSemigroup`, defined by a Koenigs function through
  ``phi_t(z) = h^{-1}(h(z) + it)``,
* :class:`GeneratorSemigroup`, obtained by integrating ``dz/dt = G(z)``.

Orbits of non-elliptic semigroups run into the unit circle exponentially
(hyperbolic) or polynomially (parabolic) fast, and double precision cannot
resolve ``1 - |z|`` below about 1e-16. When the Denjoy-Wolff point ``tau``
is known, orbits are therefore also reported in the half-plane chart
``w = (tau + z) / (tau - z)``, where the same points have large but
perfectly representable coordinates and hyperbolic distances stay exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from . import expressions as ex
from .expressions import EvaluationError, HolomorphicMap
from .grid import GridSpec
from .hyperbolic import (
    DISC,
    LEFT_HALF_PLANE,
    RIGHT_HALF_PLANE,
    ModelDomain,
    cayley_inv_unchecked,
    cayley_unchecked,
    check_boundary_point,
    check_disc_point,
    boundary_gap,
    carried_digits,
    hyp_dist,
    hyp_dist_disc_mp,
    hyp_dist_halfplane,
)
from .inverse import InversionError, _newton, univalence_spot_check


class SemigroupError(RuntimeError):
    """Evaluation of a semigroup failed."""


class GeneratorEscapeError(SemigroupError):
    """An integrated trajectory left the disc, so G is not a generator."""


class StepLimitError(SemigroupError):
    pass


@dataclass(frozen=True)
class OrbitSample:
    """Points ``phi_t(z0)`` on an increasing time grid.

    ``z`` holds the points in phase-space coordinates (the disc, or the
    model domain for translation groups), rounded to doubles. ``chart``
    holds the half-plane chart coordinates at the Denjoy-Wolff point
    ``sigma`` when available, and ``exact`` the mpmath points of model
    semigroups that came too close to the circle for doubles.
    """

    t: np.ndarray
    z: np.ndarray
    chart: np.ndarray | None = None
    sigma: complex | None = None
    domain: ModelDomain = DISC
    exact: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("orbit times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    def exact_point(self, i: int):
        """Sample ``i`` at full available precision (complex or mpc)."""
        if self.exact is not None and isinstance(self.exact[i], mpmath.mpc):
            return self.exact[i]
        if self.chart is not None and 1e6 < abs(self.chart[i]) < math.inf:
            w = self.chart[i]
            with mpmath.workdps(20 + int(math.log10(abs(w)))):
                sigma = mpmath.mpc(self.sigma)
                w = mpmath.mpc(w)
                return sigma * (w - 1) / (w + 1)
        return complex(self.z[i])

    def distance(self, i: int, j: int) -> float:
        """Hyperbolic distance between samples ``i`` and ``j``."""
        return sample_distance(self, i, self, j)


def sample_distance(a: OrbitSample, i: int, b: OrbitSample, j: int) -> float:
    """Hyperbolic distance between sample ``i`` of ``a`` and ``j`` of ``b``."""
    if a.domain != DISC or b.domain != DISC:
        if a.domain != b.domain:
            raise ValueError("orbits live in different phase spaces")
        return hyp_dist(a.domain, a.z[i], b.z[j])
    if a.chart is not None and b.chart is not None and a.sigma == b.sigma:
        return hyp_dist_halfplane(a.chart[i], b.chart[j])
    p, q = a.exact_point(i), b.exact_point(j)
    if isinstance(p, mpmath.mpc) or isinstance(q, mpmath.mpc):
        return hyp_dist_disc_mp(p, q)
    return hyp_dist(DISC, p, q)


class Semigroup:
    """Common interface. Subclasses implement :meth:`_track`."""

    #: Denjoy-Wolff point on the circle, if known; enables the chart
    tau: complex | None = None
    domain: ModelDomain = DISC

    def evaluate(self, t: float, z: complex) -> complex:
        """``phi_t(z)``."""
        t = _check_time(t)
        return complex(self.orbit(z, [t]).z[0])

    def evaluate_chart(self, t: float, z: complex) -> complex:
        """``C_tau(phi_t(z))`` in the half-plane chart at ``tau``."""
        t = _check_time(t)
        if self.tau is None:
            raise SemigroupError("no Denjoy-Wolff chart: tau is unknown")
        return complex(self.orbit(z, [t]).chart[0])

    def orbit(self, z: complex, t_grid) -> OrbitSample:
        t_grid = np.asarray(t_grid, dtype=float)
        if t_grid.ndim != 1 or len(t_grid) == 0:
            raise ValueError("t_grid must be a non-empty 1-d sequence")
        if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
            raise ValueError("t_grid must be non-negative and strictly increasing")
        z = self._check_point(z)
        zs, ws = self._track(z, t_grid)
        exact = None
        if any(isinstance(p, mpmath.mpc) for p in zs):
            exact = tuple(zs)
        return OrbitSample(t_grid, np.array([complex(p) for p in zs], dtype=complex),
                           None if ws is None else np.asarray(ws, dtype=complex),
                           self.tau, self.domain, exact)

    def generator(self) -> HolomorphicMap | None:
        return None

    def _check_point(self, z):
        return check_disc_point(z)

    def _track(self, z, times):
        raise NotImplementedError


def _check_time(t):
    t = float(t)
    if not t >= 0:
        raise ValueError(f"semigroup time must be non-negative, got {t!r}")
    return t


# --------------------------------------------------------------------------
# built-in families


@dataclass(frozen=True)
class RotationGroup(Semigroup):
    """``phi_t(z) = exp(i theta t) z``: elliptic group fixing 0."""

    theta: float

    fixed_point = 0j

    def _track(self, z, times):
        return np.exp(1j * self.theta * times) * z, None

    def generator(self):
        return ex.Const(1j * self.theta) * ex.Z

    spectral_value = None


@dataclass(frozen=True)
class EllipticContraction(Semigroup):
    """``phi_t = M^{-1}(exp(-lam t) M(z))`` with ``M(z) = (z - x)/(1 - conj(x) z)``."""

    lam: float
    x: complex = 0j

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("spectral value must be positive")
        object.__setattr__(self, "x", check_disc_point(self.x))

    @property
    def fixed_point(self):
        return self.x

    @property
    def spectral_value(self):
        return self.lam

    def _track(self, z, times):
        x = self.x
        u = (z - x) / (1 - np.conj(x) * z) * np.exp(-self.lam * times)
        return (u + x) / (1 + np.conj(x) * u), None

    def generator(self):
        x = self.x
        scale = -self.lam / (1 - abs(x) ** 2)
        return ex.Const(scale) * (ex.Z - x) * (1 - ex.Const(x.conjugate()) * ex.Z)


class _ChartGroup(Semigroup):
    """Group acting on the half-plane chart at ``tau`` by a closed form."""

    def _chart_map(self, w, times):
        raise NotImplementedError

    def _track(self, z, times):
        w0 = cayley_unchecked(self.tau, z)
        with np.errstate(invalid="ignore", over="ignore"):
            ws = self._chart_map(w0, times)
        if not np.all(np.isfinite(ws)):
            bad = times[np.argmin(np.isfinite(ws))]
            raise SemigroupError(f"chart coordinate overflows at t = {bad:g}")
        # far out on the orbit the disc point rounds to tau; the chart keeps the digits
        zs = cayley_inv_unchecked(self.tau, ws)
        return zs, ws


@dataclass(frozen=True)
class HyperbolicGroup(_ChartGroup):
    """Cayley conjugate of ``w -> exp(lam t) w``; spectral value ``lam``."""

    lam: float
    tau: complex = 1 + 0j

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("spectral value must be positive")
        object.__setattr__(self, "tau", check_boundary_point(self.tau))

    @property
    def spectral_value(self):
        return self.lam

    def _chart_map(self, w, times):
        return w * np.exp(self.lam * times)

    def generator(self):
        tau = self.tau
        return ex.Const(self.lam / 2 * tau.conjugate()) * (ex.Const(tau * tau) - ex.ipow(ex.Z, 2))

    def koenigs(self):
        from .models import strip_transfer
        return strip_transfer(self.lam).compose(ex.cayley_map(self.tau)), ModelDomain.strip(
            math.pi / self.lam)


@dataclass(frozen=True)
class ParabolicGroup(_ChartGroup):
    """Cayley conjugate of ``w -> w + orientation * i t``."""

    orientation: int = 1
    tau: complex = 1 + 0j

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "tau", check_boundary_point(self.tau))

    spectral_value = 0.0

    def _chart_map(self, w, times):
        return w + self.orientation * 1j * times

    def generator(self):
        tau = self.tau
        return ex.Const(self.orientation * 0.5j * tau.conjugate()) * ex.ipow(ex.Const(tau) - ex.Z, 2)

    def koenigs(self):
        c = ex.cayley_map(self.tau)
        if self.orientation == 1:
            return c, RIGHT_HALF_PLANE
        return -c, LEFT_HALF_PLANE


def builtin(kind: str, **params) -> Semigroup:
    """Construct a built-in family by its configuration name."""
    if kind == "elliptic-rotation":
        return RotationGroup(float(params["theta"]))
    if kind == "elliptic-contraction":
        return EllipticContraction(float(params["lam"]), complex(params.get("x", 0)))
    if kind == "hyperbolic-group":
        return HyperbolicGroup(float(params["lam"]), complex(params.get("tau", 1)))
    if kind == "parabolic-group":
        return ParabolicGroup(int(params.get("orientation", 1)), complex(params.get("tau", 1)))
    raise ValueError(f"unknown built-in semigroup {kind!r}")


# --------------------------------------------------------------------------
# model semigroups


def _mp_digits(z) -> int | None:
    """Working precision needed to resolve ``1 - |z|``, or None for doubles."""
    gap = boundary_gap(z) if isinstance(z, mpmath.mpc) else 1 - abs(z)
    if gap > 1e-4:
        return None
    if not gap > 0:
        raise SemigroupError("orbit point is not resolvable inside the disc")
    return 25 + int(math.ceil(-float(mpmath.log10(gap))))


@dataclass
class ModelSemigroup(Semigroup):
    """``phi_t(z) = h^{-1}(h(z) + it)`` for a Koenigs function ``h``.

    Evaluation continues the solution along ``t`` starting from ``z``
    itself, so the inverse never jumps to another preimage. Near the unit
    circle Newton's method switches to mpmath.
    """

    h: HolomorphicMap
    model: ModelDomain | None = None
    tau: complex | None = None
    tol: float = 1e-11
    check: bool = True
    dh: HolomorphicMap = field(init=False, repr=False)

    def __post_init__(self):
        self.dh = self.h.derivative()
        if self.tau is not None:
            self.tau = check_boundary_point(self.tau)
        if self.check:
            report = univalence_spot_check(self.h, GridSpec(8, 16, 0.95))
            if report.flagged:
                raise ValueError(f"{self.h} fails the univalence spot check: {report}")

    def generator(self):
        return ex.Const(1j) / self.dh

    def _solve(self, target, seed, dps):
        return _newton(self.h, self.dh, target, seed, tol=self.tol, max_iter=40, dps=dps)

    def _track(self, z0, times):
        h0 = self.h(z0)
        z, t, dt = z0, 0.0, 0.1
        zs, ws = [], []
        for T in times:
            while t < T:
                t_next = min(T, t + dt)
                target = h0 + 1j * t_next
                dps = _mp_digits(z)
                try:
                    z_new = self._solve(target, z, dps)
                except InversionError:
                    z_new = None
                    if dps is None and 1 - abs(z) < 1e-2:
                        try:
                            z_new = self._solve(target, z, 30)
                        except InversionError:
                            pass
                if z_new is None:
                    dt /= 4
                    if dt < 1e-10 * max(1.0, t):
                        raise SemigroupError(
                            f"cannot continue the orbit of {z0!r} past t = {t!r}: "
                            f"h(z) + it left the image of h?")
                    continue
                z, t = z_new, t_next
                dt *= 1.5
            zs.append(z)
            if self.tau is not None:
                ws.append(self._chart(z))
        return zs, (ws if self.tau is not None else None)

    def _chart(self, z):
        if isinstance(z, mpmath.mpc):
            with mpmath.workdps(carried_digits(z)):
                tau = mpmath.mpc(self.tau)
                return complex((tau + z) / (tau - z))
        return cayley_unchecked(self.tau, z)


# --------------------------------------------------------------------------
# generator semigroups


@dataclass(frozen=True)
class ODESettings:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    max_steps: int = 100_000
    method: str = "DOP853"

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("ODE tolerances must be positive")


@dataclass
class GeneratorSemigroup(Semigroup):
    """Flow of ``dz/dt = G(z)``, integrated with an adaptive Runge-Kutta pair."""

    G: HolomorphicMap
    tau: complex | None = None
    settings: ODESettings = field(default_factory=ODESettings)

    escape_margin = 1e-12

    def __post_init__(self):
        if self.tau is not None:
            self.tau = check_boundary_point(self.tau)

    def generator(self):
        return self.G

    def _track(self, z0, times):
        if times[-1] == 0:
            zs = [z0] * len(times)
        else:
            zs = self._integrate(z0, times)
        ws = None
        if self.tau is not None:
            ws = [cayley_unchecked(self.tau, z) for z in zs]
        return zs, ws

    def _integrate(self, z0, times):
        G = self.G
        budget = {"n": 0}
        # DOP853 uses 12 evaluations per step
        max_evals = 12 * self.settings.max_steps

        def rhs(_t, y):
            budget["n"] += 1
            if budget["n"] > max_evals:
                raise StepLimitError(f"more than {self.settings.max_steps} steps")
            try:
                g = G(complex(y[0], y[1]))
            except EvaluationError as exc:
                raise GeneratorEscapeError(str(exc)) from exc
            return [g.real, g.imag]

        def escape(_t, y):
            return 1 - self.escape_margin - math.hypot(y[0], y[1])

        escape.terminal = True
        sol = solve_ivp(rhs, (0.0, float(times[-1])), [z0.real, z0.imag],
                        method=self.settings.method, t_eval=times,
                        rtol=self.settings.rtol, atol=self.settings.atol,
                        max_step=self.settings.max_step, events=escape)
        if sol.status == 1:
            raise GeneratorEscapeError(
                f"trajectory of {z0!r} reached |z| >= 1 - {self.escape_margin} "
                f"at t = {sol.t_events[0][0]!r}; G is not a generator")
        if sol.status != 0:
            raise SemigroupError(f"integration failed: {sol.message}")
        return list(sol.y[0] + 1j * sol.y[1])


# --------------------------------------------------------------------------
# translation groups on model domains


@dataclass(frozen=True)
class TranslationGroup(Semigroup):
    """``psi_t(zeta) = zeta + it`` acting on a canonical model domain."""

    domain: ModelDomain = RIGHT_HALF_PLANE

    def _check_point(self, z):
        z = complex(z)
        if not self.domain.contains(z):
            raise ValueError(f"point {z!r} is not in {self.domain}")
        return z

    def _track(self, z, times):
        return z + 1j * times, None


# --------------------------------------------------------------------------
# algebraic checks


def semigroup_law_residual(S: Semigroup, samples) -> float:
    """Max of ``|phi_{t+s}(z) - phi_t(phi_s(z))|`` over ``(t, s, z)`` samples."""
    worst = 0.0
    for t, s, z in samples:
        direct = S.evaluate(t + s, z)
        composed = S.evaluate(t, S.evaluate(s, z))
        worst = max(worst, abs(direct - composed))
    return worst


def model_identity_residual(S: ModelSemigroup, samples) -> float:
    """Max of ``|h(phi_t(z)) - h(z) - i t| / max(1, |h(z)|)`` over ``(t, z)``.

    ``h`` is evaluated at the carried point, not at its double rounding:
    near the circle ``h'`` is large enough that rounding alone costs digits.
    """
    worst = 0.0
    with mpmath.workdps(30):
        for t, z in samples:
            hz = S.h(z)
            end = S.orbit(z, [0.0, t]).exact_point(-1) if t > 0 else z
            if isinstance(end, mpmath.mpc):
                gap = abs(complex(S.h.evaluate_mp(end) - mpmath.mpc(hz) - 1j * t))
            else:
                gap = abs(S.h(end) - hz - 1j * t)
            worst = max(worst, gap / max(1.0, abs(hz)))
    return worst


def semi_conjugation_residual(g, S: Semigroup, T: Semigroup, samples) -> float:
    """Max of ``|g(phi_t(z)) - psi_t(g(z))|`` over ``(t, z)`` samples."""
    worst = 0.0
    for t, z in samples:
        gz = g(z)
        if not T.domain.contains(gz):
            raise ValueError(f"g({z!r}) = {gz!r} is outside the phase space of T")
        worst = max(worst, abs(g(S.evaluate(t, z)) - T.evaluate(t, gz)))
    return worst
