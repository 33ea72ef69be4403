"""Pseudo-hyperbolic band partition at the levels ``rho_N = 1 - 2^-N``.

Band ``n`` at level ``N`` collects the points where
``v(z) = (1 - |z|^2) / |1 - rho_N z|^2`` lies in ``[2^-(n+1), 2^-n)``.  A zero
in band ``n`` is weighted by ``2^-n``, which lies in ``(v, 2v]``; summing gives
``S < sigma_N^Lambda <= 2 S`` with ``S`` the kernel comparison sum at
``rho_N``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .blaschke import ZeroSequence, keylemma_terms, kernel_norm_sq_exact
from .disk_geometry import band_from_quotient, rho
from .errors import DegenerateError, DomainError
from .summation import fsum


@dataclass(frozen=True)
class BandHistogram:
    level_N: int
    counts: dict
    total_zeros: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total_zeros:
            raise DomainError("band counts do not add up to the number of zeros")
        if self.counts and min(self.counts) < -self.level_N:
            raise DomainError("bands below -level_N must be empty")


@dataclass(frozen=True)
class GrowthParameter:
    level_N: int
    sigma_lambda: float


def band_indices(s: ZeroSequence, level_N: int) -> np.ndarray:
    """Band index of every zero (same quotient floats as the kernel sum)."""
    if level_N < 1:
        raise DomainError("level_N must be >= 1")
    if s.truncation_len == 0:
        return np.empty(0, dtype=int)
    return band_from_quotient(keylemma_terms(s, rho(level_N)))


def band_histogram(s: ZeroSequence, level_N: int) -> BandHistogram:
    bands = band_indices(s, level_N)
    counts = dict(sorted(Counter(bands.tolist()).items()))
    return BandHistogram(level_N, counts, int(bands.size))


def sigma_lambda(h: BandHistogram) -> GrowthParameter:
    """``sum_n alpha_{N,n} 2^-n``; every term is an exact power of two times a count."""
    value = math.fsum(c * math.ldexp(1.0, -n) for n, c in h.counts.items())
    return GrowthParameter(h.level_N, value)


def growth_parameter(s: ZeroSequence, level_N: int) -> GrowthParameter:
    return sigma_lambda(band_histogram(s, level_N))


@dataclass(frozen=True)
class Regularity:
    m: float
    M: float
    passes: bool


def regularity_check(params: list[GrowthParameter], cap: float = 1e6) -> Regularity:
    """Extremes of ``sigma_{N+1} / sigma_N`` over consecutive levels."""
    if len(params) < 2:
        raise DomainError("need at least two consecutive levels")
    levels = [p.level_N for p in params]
    if any(b != a + 1 for a, b in zip(levels, levels[1:])):
        raise DomainError("levels must be consecutive")
    vals = [p.sigma_lambda for p in params]
    if any(v == 0.0 for v in vals):
        raise DegenerateError("sigma^Lambda vanishes in range")
    ratios = [b / a for a, b in zip(vals, vals[1:])]
    m, M = min(ratios), max(ratios)
    return Regularity(m, M, m > 0.0 and M < cap)


@dataclass(frozen=True)
class TwoSidedRow:
    N: int
    kernel_sq: float
    sigma_lambda: float
    keylemma_sum: float
    ratio: float
    tail_bound: float


def sandwich_terms(s: ZeroSequence, level_N: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-zero quotient ``v`` and band weight ``2^-n``; ``v < w <= 2 v`` holds termwise."""
    v = keylemma_terms(s, rho(level_N))
    w = np.ldexp(1.0, -band_from_quotient(v))
    return v, w


def two_sided_verify(s: ZeroSequence, N_range) -> list[TwoSidedRow]:
    """Kernel norm squared against the band growth parameter, level by level."""
    rows = []
    for N in N_range:
        k = kernel_norm_sq_exact(s, rho(N))
        v, w = sandwich_terms(s, N)
        sig = fsum(w)
        rows.append(TwoSidedRow(N, k.value, sig, fsum(v),
                                k.value / sig if sig > 0 else math.nan, k.tail_bound))
    return rows


def ratio_spread(values) -> float:
    """``max / min`` of a positive collection."""
    a = np.asarray(list(values), dtype=float)
    return float(a.max() / a.min())
