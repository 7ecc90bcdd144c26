"""Polar sampling grids on the unit disc."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Polar grid with radii spaced geometrically towards the unit circle.

    Ring ``k`` (of ``radii``) sits at ``1 - (1 - r_max) ** ((k + 1) / radii)``,
    so the outermost ring is exactly ``r_max`` and the spacing shrinks near
    the boundary. ``refine`` adds rings beyond ``r_max`` at
    ``1 - (1 - r_max) * 10 ** -j`` for ``j = 1..refine``; only boundary
    probes (range bounds) use them.
    """

    radii: int = 64
    angles: int = 128
    r_max: float = 0.995
    refine: int = 0

    def __post_init__(self):
        if self.radii < 1 or self.angles < 1:
            raise ValueError("grid counts must be at least 1")
        if not 0 < self.r_max < 1:
            raise ValueError(f"r_max must lie in (0, 1), got {self.r_max!r}")
        if self.refine < 0:
            raise ValueError("refinement depth must be non-negative")

    def ring_radii(self) -> np.ndarray:
        k = np.arange(1, self.radii + 1)
        return 1 - (1 - self.r_max) ** (k / self.radii)

    def refined_radii(self) -> np.ndarray:
        j = np.arange(1, self.refine + 1)
        return 1 - (1 - self.r_max) * 10.0 ** (-j)

    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angles) / self.angles

    def points(self, include_center: bool = True) -> np.ndarray:
        """All grid points as a flat complex array (no refinement rings)."""
        r = self.ring_radii()[:, None]
        pts = (r * np.exp(1j * self.thetas())[None, :]).ravel()
        if include_center:
            pts = np.concatenate([[0j], pts])
        return pts

    def with_refine(self, refine: int) -> "GridSpec":
        return GridSpec(self.radii, self.angles, self.r_max, refine)


DEFAULT_GRID = GridSpec()
