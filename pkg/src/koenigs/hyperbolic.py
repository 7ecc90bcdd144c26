"""Hyperbolic distances on the disc and its model domains.

Distances use the curvature -4 normalisation, so that

    omega(0, r) = 1/2 * log((1 + r) / (1 - r))

on the disc. Every other domain is handled by pulling back to the disc or
to the right half-plane through an explicit uniformiser.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np

# Points closer than this to the unit circle are not representable with
# enough accuracy in double precision and are rejected.
BOUNDARY_MARGIN = 1e-13


class DomainError(ValueError):
    """A point does not lie in the domain it was claimed to lie in."""


# --------------------------------------------------------------------------
# model domains


@dataclass(frozen=True)
class ModelDomain:
    """One of the base spaces of a canonical model.

    ``kind`` is ``"strip"``, ``"right"``, ``"left"``, ``"plane"`` or
    ``"disc"``. ``rho`` is the strip width and is only used for strips.
    """

    kind: str
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in ("strip", "right", "left", "plane", "disc"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "strip":
            if self.rho is None or not self.rho > 0 or not math.isfinite(self.rho):
                raise ValueError(f"strip width must be positive, got {self.rho!r}")
        elif self.rho is not None:
            raise ValueError(f"{self.kind} domain takes no width")

    @classmethod
    def strip(cls, rho: float) -> "ModelDomain":
        return cls("strip", float(rho))

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return False
        if self.kind == "plane":
            return True
        if self.kind == "right":
            return z.real > 0
        if self.kind == "left":
            return z.real < 0
        if self.kind == "strip":
            return 0 < z.real < self.rho
        return abs(z) < 1 - BOUNDARY_MARGIN

    def spectral_value(self) -> float:
        """Spectral value of the translation group on this domain."""
        if self.kind == "strip":
            return math.pi / self.rho
        if self.kind == "disc":
            raise ValueError("the disc is not a canonical base space")
        return 0.0

    def matches(self, other: "ModelDomain", rtol: float = 1e-2) -> bool:
        """Same kind, and strip widths equal up to ``rtol``."""
        if self.kind != other.kind:
            return False
        return self.kind != "strip" or abs(self.rho - other.rho) <= rtol * self.rho

    def label(self) -> str:
        return {"strip": "strip", "right": "right-half-plane",
                "left": "left-half-plane", "plane": "plane",
                "disc": "disc"}[self.kind]

    def __str__(self):
        if self.kind == "strip":
            return f"Strip({self.rho!r})"
        return self.label()


STRIP = ModelDomain.strip
RIGHT_HALF_PLANE = ModelDomain("right")
LEFT_HALF_PLANE = ModelDomain("left")
FULL_PLANE = ModelDomain("plane")
DISC = ModelDomain("disc")


def check_disc_point(z: complex) -> complex:
    z = complex(z)
    if not abs(z) < 1 - BOUNDARY_MARGIN:
        raise DomainError(f"point {z!r} is not in the unit disc "
                          f"(|z| = {abs(z)!r})")
    return z


def check_boundary_point(sigma: complex) -> complex:
    sigma = complex(sigma)
    if abs(abs(sigma) - 1) > 1e-12:
        raise DomainError(f"point {sigma!r} is not on the unit circle")
    return sigma / abs(sigma)


# --------------------------------------------------------------------------
# distances


def hyp_dist_disc(z: complex, w: complex) -> float:
    """Hyperbolic distance between two points of the unit disc.

    Uses ``artanh`` of the pseudo-hyperbolic distance when the points are
    close and an explicit log form otherwise, which stays accurate as the
    pseudo-hyperbolic distance approaches 1.
    """
    z = check_disc_point(z)
    w = check_disc_point(w)
    num = abs(z - w)
    den = abs(1 - z.conjugate() * w)
    delta = num / den
    if delta < 0.5:
        return math.atanh(delta)
    # (1+d)/(1-d) = (den + num)^2 / ((1-|z|^2)(1-|w|^2))
    gz = (1 - abs(z)) * (1 + abs(z))
    gw = (1 - abs(w)) * (1 + abs(w))
    return math.log(den + num) - 0.5 * (math.log(gz) + math.log(gw))


def carried_digits(z) -> int:
    """Decimal digits carried by an mpmath number (15 for plain floats)."""
    if isinstance(z, mpmath.mpc):
        bits = max(z.real._mpf_[3], z.imag._mpf_[3], 53)
        return int(bits * 0.30103) + 10
    if isinstance(z, mpmath.mpf):
        return int(max(z._mpf_[3], 53) * 0.30103) + 10
    return 15


def boundary_gap(z):
    """``1 - |z|`` evaluated at the precision ``z`` carries."""
    with mpmath.workdps(carried_digits(z)):
        return 1 - abs(mpmath.mpc(z))


def hyp_dist_disc_mp(z, w) -> float:
    """Disc distance for points given in mpmath precision.

    Orbits of non-elliptic semigroups come closer to the unit circle than
    doubles can resolve; this evaluates the log form of the distance with
    enough digits to see ``1 - |z|``.
    """
    gz, gw = boundary_gap(z), boundary_gap(w)
    if not (gz > 0 and gw > 0):
        raise DomainError("point is not inside the unit disc")
    dps = 20 + max(0, int(-mpmath.log10(min(gz, gw))))
    with mpmath.workdps(dps):
        z, w = mpmath.mpc(z), mpmath.mpc(w)
        num = abs(z - w)
        den = abs(1 - mpmath.conj(z) * w)
        cz = (1 - abs(z)) * (1 + abs(z))
        cw = (1 - abs(w)) * (1 + abs(w))
        if num < den / 2:
            return float(mpmath.atanh(num / den))
        return float(mpmath.log(den + num) - (mpmath.log(cz) + mpmath.log(cw)) / 2)


def hyp_dist_halfplane(z: complex, w: complex) -> float:
    """Hyperbolic distance in the right half-plane ``Re > 0``.

    This is the disc distance pulled back through the Cayley transform.
    Both points are first moved by the same vertical translation and the
    same dilation (isometries), so that points with huge coordinates keep
    full relative accuracy.
    """
    z = complex(z)
    w = complex(w)
    if not z.real > 0:
        raise DomainError(f"point {z!r} is not in the right half-plane")
    if not w.real > 0:
        raise DomainError(f"point {w!r} is not in the right half-plane")
    shift = 0.5 * (z.imag + w.imag)
    scale = math.sqrt(z.real) * math.sqrt(w.real)
    z = complex(z.real, z.imag - shift) / scale
    w = complex(w.real, w.imag - shift) / scale
    num = abs(z - w)
    den = abs(z + w.conjugate())
    delta = num / den
    if delta < 0.5:
        return math.atanh(delta)
    # after rescaling Re z * Re w == 1
    return math.log(den + num) - math.log(2.0)


def hyp_dist_halfplane_array(z, w) -> np.ndarray:
    """Vectorised :func:`hyp_dist_halfplane` without domain checks."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    shift = 0.5 * (z.imag + w.imag)
    scale = np.sqrt(z.real) * np.sqrt(w.real)
    z = (z - 1j * shift) / scale
    w = (w - 1j * shift) / scale
    num = np.abs(z - w)
    den = np.abs(z + np.conj(w))
    delta = num / den
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.arctanh(np.minimum(delta, 0.5))
        far = np.log(den + num) - math.log(2.0)
    return np.where(delta < 0.5, near, far)


def hyp_dist_disc_array(z, w) -> np.ndarray:
    """Vectorised :func:`hyp_dist_disc` without domain checks."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.abs(1 - np.conj(z) * w)
    delta = num / den
    az, aw = np.abs(z), np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.arctanh(np.minimum(delta, 0.5))
        far = np.log(den + num) - 0.5 * (np.log((1 - az) * (1 + az))
                                         + np.log((1 - aw) * (1 + aw)))
    return np.where(delta < 0.5, near, far)


def strip_to_halfplane(rho: float, zeta):
    """Uniformiser ``S_rho -> H``, ``zeta -> i exp(-i pi zeta / rho)``.

    Conjugates the translation ``zeta + it`` to the dilation
    ``w * exp(pi t / rho)`` and sends the centre line to the positive axis.
    """
    if not rho > 0:
        raise ValueError(f"strip width must be positive, got {rho!r}")
    if isinstance(zeta, np.ndarray):
        return 1j * np.exp(-1j * np.pi * zeta / rho)
    return 1j * cmath.exp(-1j * math.pi * complex(zeta) / rho)


def halfplane_to_strip(rho: float, w):
    """Inverse of :func:`strip_to_halfplane` (principal logarithm)."""
    if not rho > 0:
        raise ValueError(f"strip width must be positive, got {rho!r}")
    if isinstance(w, np.ndarray):
        return 1j * rho / np.pi * np.log(-1j * w)
    return 1j * rho / math.pi * cmath.log(-1j * complex(w))


@dataclass(frozen=True)
class StripUniformizer:
    """Biholomorphism between ``S_rho`` and the disc, centred at ``rho/2``."""

    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"strip width must be positive, got {self.rho!r}")

    def to_disc(self, zeta):
        return cayley_inv_unchecked(1.0, strip_to_halfplane(self.rho, zeta))

    def from_disc(self, z):
        return halfplane_to_strip(self.rho, cayley_unchecked(1.0, z))

    def derivative(self, zeta):
        # d/dzeta of C^{-1}(E(zeta)), E = i exp(-i pi zeta / rho)
        e = strip_to_halfplane(self.rho, zeta)
        de = -1j * math.pi / self.rho * e
        return 2 * de / (e + 1) ** 2


def strip_uniformizer(rho: float) -> StripUniformizer:
    return StripUniformizer(float(rho))


def hyp_dist(domain: ModelDomain, z: complex, w: complex) -> float:
    """Hyperbolic distance ``k_Omega(z, w)`` on a model domain."""
    for p in (z, w):
        if not domain.contains(p):
            raise DomainError(f"point {complex(p)!r} is not in {domain}")
    z, w = complex(z), complex(w)
    if domain.kind == "plane":
        return 0.0
    if domain.kind == "disc":
        return hyp_dist_disc(z, w)
    if domain.kind == "right":
        return hyp_dist_halfplane(z, w)
    if domain.kind == "left":
        return hyp_dist_halfplane(-z, -w)
    # strip: translations are isometries, so centre the pair vertically
    # before exponentiating
    shift = 0.5 * (z.imag + w.imag)
    z = complex(z.real, z.imag - shift)
    w = complex(w.real, w.imag - shift)
    return hyp_dist_halfplane(strip_to_halfplane(domain.rho, z),
                              strip_to_halfplane(domain.rho, w))


# --------------------------------------------------------------------------
# Cayley transforms


def cayley_unchecked(sigma, z):
    return (sigma + z) / (sigma - z)


def cayley_inv_unchecked(sigma, w):
    return sigma * (w - 1) / (w + 1)


def cayley(sigma: complex, z: complex) -> complex:
    """Cayley transform ``(sigma + z) / (sigma - z)`` of the disc onto ``Re > 0``."""
    sigma = check_boundary_point(sigma)
    z = check_disc_point(z)
    return cayley_unchecked(sigma, z)


def cayley_inv(sigma: complex, w: complex) -> complex:
    sigma = check_boundary_point(sigma)
    w = complex(w)
    if not w.real > 0:
        raise DomainError(f"point {w!r} is not in the right half-plane")
    return cayley_inv_unchecked(sigma, w)


def disc_automorphism(a: complex, rotation: complex = 1.0):
    """Return ``z -> rotation * (z - a) / (1 - conj(a) z)`` as a callable."""
    a = check_disc_point(a)

    def m(z):
        return rotation * (z - a) / (1 - np.conj(a) * z)

    return m


# --------------------------------------------------------------------------
# horocycles


@dataclass(frozen=True)
class Horocycle:
    """``E(center, radius) = {z : |center - z|^2 / (1 - |z|^2) < radius}``."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", check_boundary_point(self.center))
        if not self.radius > 0:
            raise ValueError(f"horocycle radius must be positive, got {self.radius!r}")

    def euclidean_disc(self) -> tuple[complex, float]:
        r = self.radius
        return self.center / (1 + r), r / (1 + r)


def horocycle_contains(E: Horocycle, z: complex) -> bool:
    z = check_disc_point(z)
    return abs(E.center - z) ** 2 / (1 - abs(z) ** 2) < E.radius


def horocycle_min_dist(E: Horocycle) -> float:
    """Smallest hyperbolic distance from the origin to ``E``.

    The closest point is ``(1 - R) / (1 + R) * center``. Horocycles with
    ``R >= 1`` contain the origin in their closure, so the value is 0.
    """
    if E.radius >= 1:
        return 0.0
    return -0.5 * math.log(E.radius)
