"""Blaschke zero sequences, boundary condition sums, and reproducing kernels.

All evaluations of ``B`` go through the log domain: ``log|b_lambda(z)|^2`` is
``log1p(-(1 - |b|^2))`` when the pseudo-hyperbolic factor is small and
``log(|z - lambda|^2 / |1 - conj(lambda) z|^2)`` when it is close to 1.  The
kernel norm ``(1 - |B(z)|^2) / (1 - |z|^2)`` is then ``-expm1(2 log|B|)``
divided by ``1 - |z|^2``, which stays accurate when ``|B(z)|`` is within
``2**-40`` of 1.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .disk_geometry import (
    BoundaryPoint,
    StolzDomain,
    abs_one_minus,
    dist_sq_arrays,
    one_minus_prod,
    one_minus_sq,
    pseudo_distance,
    pseudo_distance_arrays,
    pseudo_factor_arrays,
    rho,
    stolz_contains,
)
from .errors import DegenerateError, DomainError
from .summation import cumsum, fsum

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """Finite truncation of a Blaschke zero sequence.

    ``deltas[i], thetas[i]`` describe the zero with index
    ``index_start + i``.  ``tail_delta_sum`` bounds ``sum(1 - |lambda_n|)`` over
    the zeros that were cut off; it is 0 for explicit lists.
    """

    deltas: np.ndarray
    thetas: np.ndarray
    family_tag: str | None = None
    tail_delta_sum: float = 0.0
    index_start: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.array(self.deltas, dtype=float).reshape(-1)
        t = np.array(self.thetas, dtype=float).reshape(-1)
        if d.shape != t.shape:
            raise DomainError("deltas and thetas must have the same length")
        if d.size and not (np.all(d > 0.0) and np.all(d <= 1.0)):
            raise DomainError("every zero needs 0 < delta <= 1")
        if t.size and not (np.all(t > -math.pi) and np.all(t <= math.pi)):
            raise DomainError("every zero needs theta in (-pi, pi]")
        if not self.tail_delta_sum >= 0.0:
            raise DomainError("tail_delta_sum must be >= 0")
        d.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "thetas", t)
        object.__setattr__(self, "tail_delta_sum", float(self.tail_delta_sum))

    @classmethod
    def from_points(cls, points, **kw) -> "ZeroSequence":
        pts = list(points)
        return cls(np.array([p.delta for p in pts]), np.array([p.theta for p in pts]), **kw)

    @classmethod
    def empty(cls) -> "ZeroSequence":
        return cls(np.empty(0), np.empty(0), family_tag="explicit")

    @property
    def zeros(self) -> list[BoundaryPoint]:
        return [BoundaryPoint(d, t) for d, t in zip(self.deltas.tolist(), self.thetas.tolist())]

    @property
    def truncation_len(self) -> int:
        return int(self.deltas.size)

    def __len__(self):
        return self.truncation_len

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["delta", "theta"])
            for d, t in zip(self.deltas.tolist(), self.thetas.tolist()):
                w.writerow([repr(d), repr(t)])

    @classmethod
    def read_csv(cls, path) -> "ZeroSequence":
        with open(Path(path), newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["delta", "theta"]:
            raise DomainError(f"{path}: expected header 'delta,theta'")
        body = [r for r in rows[1:] if r]
        if not body:
            raise DomainError(f"{path}: no zeros listed")
        d = [float(r[0]) for r in body]
        t = [float(r[1]) for r in body]
        return cls(np.array(d), np.array(t), family_tag="explicit")


@dataclass(frozen=True)
class KernelEstimate:
    """Kernel norm squared, with a bound on what the truncated tail could add."""

    value: float
    tail_bound: float
    method: str  # "exact_modulus" | "keylemma_sum"


@dataclass(frozen=True)
class ComplexValue:
    """A complex number in polar log form; ``log_modulus == -inf`` encodes 0."""

    log_modulus: float
    argument: float

    @property
    def is_zero(self) -> bool:
        return self.log_modulus == -math.inf

    @property
    def modulus(self) -> float:
        return math.exp(self.log_modulus)

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        m = math.exp(self.log_modulus)
        return complex(m * math.cos(self.argument), m * math.sin(self.argument))


def _reduce_angle(x: float) -> float:
    y = math.remainder(x, TWO_PI)
    return math.pi if y == -math.pi else y


# -- sums over the zeros ---------------------------------------------------


def blaschke_terms(s: ZeroSequence) -> np.ndarray:
    return np.asarray(s.deltas)


def frostman_terms(s: ZeroSequence) -> np.ndarray:
    return s.deltas / abs_one_minus(s.deltas, s.thetas)


def ahern_clark_terms(s: ZeroSequence) -> np.ndarray:
    return frostman_terms(s) / abs_one_minus(s.deltas, s.thetas)


def blaschke_sum(s: ZeroSequence) -> float:
    """``sum(1 - |lambda_n|)`` over the truncation; the tail is ``s.tail_delta_sum``."""
    return fsum(blaschke_terms(s))


def frostman_sum(s: ZeroSequence) -> float:
    """``sum (1 - |lambda_n|) / |1 - lambda_n|``."""
    return fsum(frostman_terms(s))


def ahern_clark_sum(s: ZeroSequence) -> float:
    """``sum (1 - |lambda_n|) / |1 - lambda_n|^2``."""
    return fsum(ahern_clark_terms(s))


def partial_sums(terms) -> np.ndarray:
    return cumsum(terms)


# -- evaluation of B -------------------------------------------------------


def keylemma_terms(s: ZeroSequence, z: BoundaryPoint) -> np.ndarray:
    """``(1 - |lambda_n|^2) / |1 - conj(lambda_n) z|^2`` for every zero.

    The band partition uses these same floats so that its comparison with the
    kernel sum is made on identical values.
    """
    return one_minus_sq(s.deltas) / dist_sq_arrays(s.deltas, s.thetas, z.delta, z.theta)


def _log_factor_sq(s: ZeroSequence, z: BoundaryPoint) -> np.ndarray:
    """``log |b_{lambda_n}(z)|^2`` per zero (``-inf`` where ``z`` is a zero)."""
    pf = pseudo_factor_arrays(s.deltas, s.thetas, z.delta, z.theta)
    near = pf > 0.5
    with np.errstate(divide="ignore"):
        out = np.log1p(-pf)
        if np.any(near):
            pd = pseudo_distance_arrays(s.deltas[near], s.thetas[near], z.delta, z.theta)
            out[near] = 2.0 * np.log(pd)
    return out


def _factor_args(s: ZeroSequence, z: BoundaryPoint) -> np.ndarray:
    """Principal arguments of ``b_{lambda_n}(z)``.

    With ``D = theta_z - theta_n``: ``z - lambda = e^{i theta_n} A`` and
    ``1 - conj(lambda) z = C`` where ``A`` and ``C`` are assembled from deltas.
    """
    dl, tl = s.deltas, s.thetas
    rz = 1.0 - z.delta
    rl = 1.0 - dl
    D = z.theta - tl
    h = np.sin(0.5 * D)
    h2 = 2.0 * h * h
    sD = np.sin(D)
    a_re = (dl - z.delta) - rz * h2
    a_im = rz * sD
    c_re = one_minus_prod(dl, z.delta) + rl * rz * h2
    c_im = -rl * rz * sD
    return tl + np.arctan2(a_im, a_re) - np.arctan2(c_im, c_re)


def eval_B(s: ZeroSequence, z: BoundaryPoint) -> ComplexValue:
    """``B(z)`` as ``(log|B(z)|, arg B(z))``.

    If ``z`` coincides with a zero the result has ``log_modulus = -inf``.
    """
    if s.truncation_len == 0:
        return ComplexValue(0.0, 0.0)
    logs = _log_factor_sq(s, z)
    if np.any(np.isneginf(logs)):
        return ComplexValue(-math.inf, 0.0)
    log_mod = 0.5 * fsum(logs)
    arg = _reduce_angle(fsum(_factor_args(s, z)))
    return ComplexValue(min(log_mod, 0.0), arg)


def _neg_log_B_sq(s: ZeroSequence, z: BoundaryPoint) -> float:
    if s.truncation_len == 0:
        return 0.0
    return -fsum(_log_factor_sq(s, z))


def _tail_push(s: ZeroSequence, z: BoundaryPoint) -> float:
    # each omitted term (1 - r_n^2)/|1 - conj(lambda_n) z|^2 <= 2 delta_n / (1 - |z|)^2
    return 2.0 * s.tail_delta_sum / (z.delta * z.delta)


def kernel_norm_sq_exact(s: ZeroSequence, z: BoundaryPoint) -> KernelEstimate:
    """``||k_z||^2 = (1 - |B(z)|^2) / (1 - |z|^2)`` from the modulus of ``B``.

    ``tail_bound`` bounds the increase the omitted zeros could cause: they add
    at most ``X = (1 - |z|^2) * tail_sum_bound`` to ``-log|B|^2`` up to the
    factor ``1/(1 - X)``.
    """
    oms = one_minus_sq(z.delta)
    L = _neg_log_B_sq(s, z)
    value = 1.0 / oms if L == math.inf else -math.expm1(-L) / oms
    push = _tail_push(s, z)
    x = push * oms
    tail = push / (1.0 - x) if x < 1.0 else math.inf
    return KernelEstimate(value, tail, "exact_modulus")


def kernel_norm_sq_sum(s: ZeroSequence, z: BoundaryPoint) -> KernelEstimate:
    """Comparison sum ``sum (1 - r_n^2) / |1 - conj(lambda_n) z|^2``."""
    value = fsum(keylemma_terms(s, z)) if s.truncation_len else 0.0
    return KernelEstimate(value, _tail_push(s, z), "keylemma_sum")


def _one_minus_exp(L: float, phi: float) -> complex:
    """``1 - e^{L + i phi}`` without cancellation for small ``L`` and ``phi``."""
    em = math.expm1(L)
    c, sn = math.cos(phi), math.sin(phi)
    h = math.sin(0.5 * phi)
    re = -(em * c - 2.0 * h * h)
    im = -(em * sn + sn)
    return complex(re, im)


def _one_minus_conj_prod(lam: BoundaryPoint, z: BoundaryPoint) -> complex:
    """``1 - conj(lam) z`` assembled from the deltas."""
    D = z.theta - lam.theta
    rr = (1.0 - lam.delta) * (1.0 - z.delta)
    h = math.sin(0.5 * D)
    return complex(one_minus_prod(lam.delta, z.delta) + 2.0 * rr * h * h, -rr * math.sin(D))


def kernel_eval(s: ZeroSequence, lam: BoundaryPoint, z: BoundaryPoint) -> complex:
    """``k_lam(z) = (1 - conj(B(lam)) B(z)) / (1 - conj(lam) z)``."""
    if lam == z:
        return complex(kernel_norm_sq_exact(s, z).value, 0.0)
    if s.truncation_len == 0:
        return 0j
    return kernel_from_values(eval_B(s, lam), eval_B(s, z), lam, z)


def kernel_from_values(bl: ComplexValue, bz: ComplexValue, lam: BoundaryPoint,
                       z: BoundaryPoint) -> complex:
    """Off-diagonal kernel value from precomputed ``B(lam)`` and ``B(z)``."""
    if bl.is_zero or bz.is_zero:
        num = 1 + 0j
    else:
        num = _one_minus_exp(bl.log_modulus + bz.log_modulus, bz.argument - bl.argument)
    return num / _one_minus_conj_prod(lam, z)


# -- separation and transfer -----------------------------------------------


def separation_constant(s: ZeroSequence) -> float:
    """Minimum pseudo-hyperbolic distance between consecutive zeros."""
    if s.truncation_len < 2:
        raise DegenerateError("separation needs at least two zeros")
    d, t = s.deltas, s.thetas
    return float(np.min(pseudo_distance_arrays(d[:-1], t[:-1], d[1:], t[1:])))


@dataclass(frozen=True)
class TransferCheck:
    N: int
    ratio: float
    bound: float
    pseudo_dist: float

    @property
    def holds(self) -> bool:
        return 1.0 / self.bound <= self.ratio <= self.bound


def stolz_transfer_check(
    s: ZeroSequence, z: BoundaryPoint, dom: StolzDomain, n_range: tuple[int, int] = (1, 64)
) -> TransferCheck:
    """Compare the kernel sum at ``z`` with the one at the nearest ``rho_N``.

    If ``|b_z(rho_N)| = eps`` every term of the sum changes by a factor in
    ``[((1-eps)/(1+eps))^2, ((1+eps)/(1-eps))^2]``, so the ratio of sums does too.
    """
    if not stolz_contains(dom, z):
        raise DomainError("point is outside the Stolz domain")
    if not z.delta < 0.5:
        raise DomainError("transfer check needs |z| > 1/2")
    best_N, best_eps = None, math.inf
    for N in range(n_range[0], n_range[1] + 1):
        eps = pseudo_distance(z, rho(N))
        if eps < best_eps:
            best_N, best_eps = N, eps
    if best_N is None or not best_eps < 1.0:
        raise DegenerateError("no rho_N within pseudo-distance < 1 in the scanned range")
    ratio = kernel_norm_sq_sum(s, z).value / kernel_norm_sq_sum(s, rho(best_N)).value
    bound = ((1.0 + best_eps) / (1.0 - best_eps)) ** 2
    return TransferCheck(best_N, ratio, bound, best_eps)
