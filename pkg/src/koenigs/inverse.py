"""Numerical inversion of holomorphic maps and univalence spot checks."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .expressions import EvaluationError, HolomorphicMap
from .grid import DEFAULT_GRID, GridSpec
from .hyperbolic import BOUNDARY_MARGIN, check_disc_point


class InversionError(ArithmeticError):
    """Newton inversion of a map failed."""


class NoConvergenceError(InversionError):
    pass


class OutsideImageError(InversionError):
    """Iterates kept leaving the disc: the target is likely not in ``h(D)``."""


NEWTON_TOL = 1e-11
MAX_ITER = 200
MAX_HALVINGS = 40


def _newton(h, dh, w, z, *, tol, max_iter, dps):
    if dps is None:
        return _newton_loop(h, dh, w, z, tol=tol, max_iter=max_iter, dps=None)
    with mpmath.workdps(dps):
        return _newton_loop(h, dh, w, z, tol=tol, max_iter=max_iter, dps=dps)


def _newton_loop(h, dh, w, z, *, tol, max_iter, dps):
    if dps is None:
        ev, dev, margin = h, dh, BOUNDARY_MARGIN
    else:
        ev, dev = h.evaluate_mp, dh.evaluate_mp
        margin = mpmath.mpf(10) ** (-(dps - 8))
        z = mpmath.mpc(z)
    scale = 1 + abs(w)
    f = ev(z) - w
    r = abs(f)
    escapes = 0
    for it in range(max_iter):
        if r <= tol * scale:
            # a few undamped polishing steps take the residual to roundoff
            for _ in range(3):
                d = dev(z)
                if d == 0:
                    break
                zn = z - f / d
                if not 1 - abs(zn) > margin:
                    break
                try:
                    fn = ev(zn) - w
                except EvaluationError:
                    break
                if not abs(fn) < r:
                    break
                z, f, r = zn, fn, abs(fn)
            return z
        d = dev(z)
        if d == 0:
            raise NoConvergenceError(f"derivative vanishes at {complex(z)!r}")
        step = f / d
        alpha = 1.0
        for k in range(MAX_HALVINGS + 1):
            zn = z - alpha * step
            if 1 - abs(zn) > margin:
                try:
                    fn = ev(zn) - w
                except EvaluationError:
                    fn = None
                if fn is not None and abs(fn) < r:
                    break
            elif k == 0:
                escapes += 1
            alpha *= 0.5
        else:
            if escapes > it // 2:
                raise OutsideImageError(
                    f"Newton iterates for target {complex(w)!r} keep leaving the disc")
            raise NoConvergenceError(
                f"no residual decrease for target {complex(w)!r} "
                f"(residual {float(r):.3e})")
        z, f, r = zn, fn, abs(fn)
    raise NoConvergenceError(f"no convergence for target {complex(w)!r} "
                             f"after {max_iter} iterations")


def numeric_inverse(h: HolomorphicMap, w: complex, seed: complex, *,
                    dh: HolomorphicMap | None = None, tol: float = NEWTON_TOL,
                    max_iter: int = MAX_ITER, dps: int | None = None):
    """Solve ``h(z) = w`` for ``z`` in the disc, starting from ``seed``.

    Damped Newton iteration; a step is halved (up to 40 times) until it stays
    inside the disc and reduces the residual. If the direct solve fails, the
    target is approached along the segment from ``h(seed)`` to ``w``, each
    solution seeding the next.

    With ``dps`` set, the iteration runs in mpmath at that many digits and
    an ``mpc`` is returned; this is needed for points within about 1e-8 of
    the unit circle.
    """
    dh = h.derivative() if dh is None else dh
    w = complex(w)
    if dps is None:
        seed = check_disc_point(seed)
    kw = dict(tol=tol, max_iter=max_iter, dps=dps)
    try:
        return _newton(h, dh, w, seed, **kw)
    except InversionError as direct_failure:
        failure = direct_failure
    # homotopy in the target
    if dps is None:
        w0 = h(seed)
    else:
        with mpmath.workdps(dps):
            w0 = complex(h.evaluate_mp(seed))
    z, s, ds = seed, 0.0, 0.25
    while s < 1:
        s_next = min(1.0, s + ds)
        try:
            z = _newton(h, dh, w0 + s_next * (w - w0), z, **kw)
            s = s_next
            ds = min(2 * ds, 0.5)
        except InversionError as exc:
            ds /= 4
            if ds < 1e-7:
                raise type(exc)(f"{exc}; path continuation from the seed also "
                                f"failed") from failure
    return z


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UnivalenceReport:
    min_ratio: float
    collisions: int
    collision_example: tuple[complex, complex] | None
    critical_points: int
    min_abs_derivative: float

    @property
    def flagged(self) -> bool:
        return self.collisions > 0 or self.critical_points > 0


def univalence_spot_check(h: HolomorphicMap, grid: GridSpec = DEFAULT_GRID,
                          *, collision_tol: float = 1e-9,
                          chunk: int = 256) -> UnivalenceReport:
    """Look for pairs of grid points with (nearly) equal images.

    Reports the minimum of ``|h(z1) - h(z2)| / |z1 - z2|`` over distinct
    grid pairs, the number of pairs whose images are closer than
    ``collision_tol``, and the grid points where ``|h'|`` is below the same
    tolerance. This is evidence, not a proof, of univalence.
    """
    z = grid.points()
    hz = h.evaluate_array(z)
    dz = h.derivative().evaluate_array(z)
    n = len(z)
    min_ratio = np.inf
    collisions = 0
    example = None
    for start in range(0, n - 1, chunk):
        stop = min(n, start + chunk)
        dzz = np.abs(z[start:stop, None] - z[None, :])
        dhh = np.abs(hz[start:stop, None] - hz[None, :])
        rows = np.arange(start, stop)[:, None]
        upper = np.arange(n)[None, :] > rows
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(upper, dhh / dzz, np.inf)
        ratio = np.where(np.isnan(ratio), np.inf, ratio)
        min_ratio = min(min_ratio, float(ratio.min()))
        hits = upper & (dhh < collision_tol)
        count = int(hits.sum())
        if count and example is None:
            i, j = np.argwhere(hits)[0]
            example = (complex(z[start + i]), complex(z[j]))
        collisions += count
    absd = np.abs(dz)
    return UnivalenceReport(
        min_ratio=min_ratio,
        collisions=collisions,
        collision_example=example,
        critical_points=int(np.sum(absd < collision_tol)),
        min_abs_derivative=float(absd.min()),
    )
