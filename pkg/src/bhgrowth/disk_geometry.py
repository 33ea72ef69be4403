"""Pseudo-hyperbolic geometry on the unit disk, in boundary-distance coordinates.

A point ``z = r e^{i theta}`` is stored as ``(delta, theta)`` with
``delta = 1 - r`` kept exactly.  Every quantity below is rewritten in terms of
``delta`` so that nothing of the form ``1 - r`` is ever formed by subtraction.
This keeps full relative accuracy for points at distance ``2**-45`` (and far
less) from the unit circle.

The scalar functions take :class:`BoundaryPoint` values; the ``*_arrays``
variants are the vectorised kernels used by the summation code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "BoundaryPoint",
    "StolzDomain",
    "AnnulusIndex",
    "rho",
    "one_minus_prod",
    "one_minus_sq",
    "dist_sq",
    "dist_sq_arrays",
    "diff_sq_arrays",
    "pseudo_factor",
    "pseudo_factor_arrays",
    "pseudo_distance",
    "pseudo_distance_arrays",
    "abs_one_minus",
    "stolz_contains",
    "annulus_quotient",
    "band_from_quotient",
    "annulus_index",
    "annulus",
]


@dataclass(frozen=True)
class BoundaryPoint:
    """Disk point ``(1 - delta) e^{i theta}`` with ``0 < delta <= 1``."""

    delta: float
    theta: float = 0.0

    def __post_init__(self):
        d, t = float(self.delta), float(self.theta)
        if not (0.0 < d <= 1.0):
            raise DomainError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not (-math.pi < t <= math.pi):
            raise DomainError(f"theta must lie in (-pi, pi], got {self.theta!r}")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "theta", t)

    @classmethod
    def origin(cls) -> "BoundaryPoint":
        return cls(1.0, 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "BoundaryPoint":
        # lossy for |z| close to 1; prefer building from delta directly
        return cls(1.0 - abs(z), math.atan2(z.imag, z.real) if z != 0 else 0.0)

    @property
    def modulus(self) -> float:
        return 1.0 - self.delta

    @property
    def one_minus_sq(self) -> float:
        """``1 - |z|^2``."""
        return one_minus_sq(self.delta)

    def to_complex(self) -> complex:
        r = 1.0 - self.delta
        return complex(r * math.cos(self.theta), r * math.sin(self.theta))


@dataclass(frozen=True)
class StolzDomain:
    """Non-tangential approach region ``{|z - zeta| < opening (1 - |z|)}``."""

    opening: float
    vertex_theta: float = 0.0

    def __post_init__(self):
        if not self.opening > 1.0:
            raise DomainError(f"Stolz opening must exceed 1, got {self.opening!r}")


@dataclass(frozen=True)
class AnnulusIndex:
    level_N: int
    band_n: int

    def __post_init__(self):
        if self.level_N < 1:
            raise DomainError("level_N must be >= 1")
        if self.band_n < -self.level_N:
            raise DomainError("bands below -level_N are empty")


def rho(N: int) -> BoundaryPoint:
    """The radial sample point ``1 - 2**-N``."""
    if N < 1:
        raise DomainError(f"level must be >= 1, got {N}")
    return BoundaryPoint(math.ldexp(1.0, -N), 0.0)


def one_minus_prod(da, db):
    """``1 - r_a r_b`` from the two boundary distances."""
    return da + db - da * db


def one_minus_sq(d):
    """``1 - r^2``; same expression as ``one_minus_prod(d, d)`` so that the
    diagonal of the pseudo-hyperbolic factor is exactly 1."""
    return d + d - d * d


def _half_sin_sq(ta, tb):
    s = np.sin(np.abs(ta - tb) * 0.5)
    return s * s


def dist_sq_arrays(da, ta, db, tb):
    """Vectorised ``|1 - conj(a) b|^2``."""
    p = one_minus_prod(da, db)
    return p * p + 4.0 * (1.0 - da) * (1.0 - db) * _half_sin_sq(ta, tb)


def diff_sq_arrays(da, ta, db, tb):
    """Vectorised ``|a - b|^2``."""
    q = db - da
    return q * q + 4.0 * (1.0 - da) * (1.0 - db) * _half_sin_sq(ta, tb)


def _scaled_arrays(da, ta, db, tb):
    # dist_sq = p^2 (1 + t^2): scaling by p keeps both factors representable when
    # the deltas are so small that p^2 underflows
    p = one_minus_prod(da, db)
    t = 2.0 * np.sqrt((1.0 - da) * (1.0 - db)) * np.sin(np.abs(ta - tb) * 0.5) / p
    return p, np.hypot(1.0, t), t


def pseudo_factor_arrays(da, ta, db, tb):
    """Vectorised ``1 - |b_a(b)|^2``."""
    p, h, _ = _scaled_arrays(da, ta, db, tb)
    return np.minimum((one_minus_sq(da) / p / h) * (one_minus_sq(db) / p / h), 1.0)


def pseudo_distance_arrays(da, ta, db, tb):
    """Vectorised ``|b_a(b)| = |a - b| / |1 - conj(a) b|``."""
    p, h, t = _scaled_arrays(da, ta, db, tb)
    return np.minimum(np.hypot((db - da) / p, t) / h, 1.0)


def dist_sq(a: BoundaryPoint, b: BoundaryPoint) -> float:
    """``|1 - conj(a) b|^2`` as ``(1 - r_a r_b)^2 + 4 r_a r_b sin^2((theta_a - theta_b)/2)``."""
    p = one_minus_prod(a.delta, b.delta)
    s = math.sin(abs(a.theta - b.theta) * 0.5)
    return p * p + 4.0 * (1.0 - a.delta) * (1.0 - b.delta) * s * s


def pseudo_factor(a: BoundaryPoint, b: BoundaryPoint) -> float:
    """``1 - |b_a(b)|^2 = (1 - |a|^2)(1 - |b|^2) / |1 - conj(a) b|^2``.

    Equals 1 exactly when ``a == b``.
    """
    return float(pseudo_factor_arrays(a.delta, a.theta, b.delta, b.theta))


def pseudo_distance(a: BoundaryPoint, b: BoundaryPoint) -> float:
    """``|b_a(b)| = |a - b| / |1 - conj(a) b|``.

    Computed from ``|a - b|`` rather than ``sqrt(1 - pseudo_factor)``, which
    would cancel catastrophically for nearby points.
    """
    return float(pseudo_distance_arrays(a.delta, a.theta, b.delta, b.theta))


def abs_one_minus(d, t):
    """``|1 - z|`` for ``z = (1 - d) e^{i t}``; scalars or arrays.

    ``hypot`` keeps ``d`` meaningful where ``d * d`` would underflow.
    """
    return np.hypot(d, 2.0 * np.sqrt(1.0 - d) * np.sin(np.abs(t) * 0.5))


def stolz_contains(dom: StolzDomain, z: BoundaryPoint) -> bool:
    """Membership in the Stolz angle ``|z - zeta| < opening (1 - |z|)``."""
    return bool(abs_one_minus(z.delta, z.theta - dom.vertex_theta) < dom.opening * z.delta)


def annulus_quotient(z: BoundaryPoint, level_N: int) -> float:
    """``(1 - |z|^2) / |1 - rho_N z|^2``, the quantity that defines the bands."""
    return z.one_minus_sq / dist_sq(rho(level_N), z)


def band_from_quotient(v):
    """Band index ``n`` with ``v`` in ``[2^-(n+1), 2^-n)``; scalar or array.

    ``v = m 2^e`` with ``m`` in ``[1/2, 1)`` gives ``n = -e`` exactly, which is
    ``ceil(-log2 v) - 1`` without the rounding of a logarithm.
    """
    _, e = np.frexp(v)
    return -e


def annulus_index(z: BoundaryPoint, level_N: int) -> int:
    return int(band_from_quotient(annulus_quotient(z, level_N)))


def annulus(z: BoundaryPoint, level_N: int) -> AnnulusIndex:
    return AnnulusIndex(level_N, annulus_index(z, level_N))
