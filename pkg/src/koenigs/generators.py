"""Infinitesimal generators and their Berkson-Porta decomposition.

A non-elliptic semigroup with Koenigs function ``h`` and Denjoy-Wolff
point ``tau`` has generator ``G = i / h'`` and

    G(z) = (z - tau) (conj(tau) z - 1) p(z),   Re p >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expressions as ex
from .expressions import HolomorphicMap
from .grid import DEFAULT_GRID, GridSpec
from .hyperbolic import check_boundary_point
from .semigroups import Semigroup

#: Re p below RE_P_FAIL is a hard failure; between it and -RE_P_TOL it is grazing
RE_P_FAIL = -1e-6
RE_P_TOL = 1e-9


class GeneratorError(ValueError):
    pass


def _bp_factor(tau: complex) -> HolomorphicMap:
    """``(z - tau)(conj(tau) z - 1)``."""
    return ex.mul(ex.sub(ex.Z, ex.Const(tau)),
                  ex.sub(ex.mul(ex.Const(tau.conjugate()), ex.Z), ex.ONE))


@dataclass(frozen=True)
class GeneratorData:
    G: HolomorphicMap
    tau: complex
    p: HolomorphicMap

    @classmethod
    def from_generator(cls, G: HolomorphicMap, tau: complex) -> "GeneratorData":
        """Decompose a given generator at a given Denjoy-Wolff point."""
        tau = check_boundary_point(tau)
        return cls(G, tau, ex.div(G, _bp_factor(tau)))


def _sample_points(grid: GridSpec) -> np.ndarray:
    pts = grid.points()
    rings = grid.refined_radii()
    if len(rings):
        pts = np.concatenate([pts, (rings[:, None] * np.exp(1j * grid.thetas())).ravel()])
    return pts


def generator_from_koenigs(K, tau: complex | None = None,
                           grid: GridSpec = DEFAULT_GRID) -> GeneratorData:
    """``G = i / h'`` and ``p = i / (h' (z - tau)(conj(tau) z - 1))``.

    ``K`` is a :class:`~koenigs.models.KoenigsFunction` or a bare map, in
    which case ``tau`` is required. ``h'`` must not vanish on the grid and
    ``Re p`` must stay above -1e-6 there (a wrong ``tau`` shows up here).
    """
    if isinstance(K, HolomorphicMap):
        if tau is None:
            raise ValueError("a bare map needs its Denjoy-Wolff point")
        h = K
    else:
        h = K.h
        tau = K.dw_point if tau is None else tau
    tau = check_boundary_point(tau)
    dh = h.derivative()
    z = _sample_points(grid)
    with np.errstate(all="ignore"):
        d = np.abs(dh.evaluate_array(z))
    if np.any(~np.isfinite(d)) or d.min() < 1e-12:
        bad = z[np.argmin(np.where(np.isfinite(d), d, 0))]
        raise GeneratorError(f"h' vanishes or is singular near {complex(bad)!r}")
    G = ex.div(ex.Const(1j), dh)
    p = ex.div(ex.Const(1j), ex.mul(dh, _bp_factor(tau)))
    data = GeneratorData(G, tau, p)
    report = berkson_porta_residual(data, grid)
    if report.min_re_p < RE_P_FAIL:
        raise GeneratorError(
            f"Re p = {report.min_re_p:.3e} < 0 at {report.argmin!r}: wrong "
            f"Denjoy-Wolff point or h is not a Koenigs function")
    return data


@dataclass(frozen=True)
class BerksonPortaReport:
    residual: float
    min_re_p: float
    max_abs_re_p: float
    argmin: complex
    grazing: bool

    @property
    def passes(self) -> bool:
        return self.min_re_p >= -RE_P_TOL

    @property
    def pure_imaginary(self) -> bool:
        """``Re p`` vanishes on the grid: the semigroup is a group."""
        return self.max_abs_re_p <= RE_P_TOL


def berkson_porta_residual(D: GeneratorData, grid: GridSpec = DEFAULT_GRID) -> BerksonPortaReport:
    """Max of ``|G - (z - tau)(conj(tau) z - 1) p|`` and min of ``Re p`` on the grid."""
    z = _sample_points(grid)
    with np.errstate(all="ignore"):
        g = D.G.evaluate_array(z)
        p = D.p.evaluate_array(z)
    factor = (z - D.tau) * (np.conj(D.tau) * z - 1)
    residual = float(np.max(np.abs(g - factor * p)))
    re_p = np.where(np.isfinite(p.real), p.real, -np.inf)
    i = int(np.argmin(re_p))
    min_re_p = float(re_p[i])
    return BerksonPortaReport(residual, min_re_p, float(np.max(np.abs(re_p))),
                              complex(z[i]), RE_P_FAIL <= min_re_p < -RE_P_TOL)


def ode_residual(S: Semigroup, D: GeneratorData, samples, step: float = 1e-5) -> float:
    """Max of ``|d phi_t(z) / dt - G(phi_t(z))|`` over ``(t, z)`` samples.

    The time derivative is a Richardson-extrapolated central difference
    with step ``step``; one-sided differences are used when ``t < 2 step``.
    """
    worst = 0.0
    for t, z in samples:
        t = float(t)
        phi = lambda s: S.evaluate(s, z)  # noqa: E731
        if t >= 2 * step:
            def diff(k):
                return (phi(t + k) - phi(t - k)) / (2 * k)
            deriv = (4 * diff(step / 2) - diff(step)) / 3
        else:
            base = phi(t)

            def diff(k):
                return (phi(t + k) - base) / k
            deriv = 2 * diff(step / 2) - diff(step)
        worst = max(worst, abs(deriv - D.G(phi(t))))
    return worst
