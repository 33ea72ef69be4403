"""Gram matrix of normalized kernels at ``rho_N`` and the beta-sequence diagnostic.

The diagnostic only gathers evidence: finitely many ``N`` can never prove that
``sum beta_N^2`` diverges.  Its verdict is therefore phrased as
``inconsistent`` / ``consistent_with`` unconditionality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blaschke import ZeroSequence, eval_B, kernel_eval, kernel_from_values, kernel_norm_sq_exact
from .disk_geometry import rho
from .errors import DegenerateError, DomainError
from .summation import cumsum, tail_fraction
from .witness import WitnessFunction, eval_witness

MAX_GRAM_SIZE = 64
PLATEAU_THRESHOLD = 0.05


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """``entries[i, j] = <x_i, x_j> = k_{rho_i}(rho_j) / (||k_{rho_i}|| ||k_{rho_j}||)``."""

    levels: tuple[int, ...]
    entries: np.ndarray

    @property
    def size(self) -> int:
        return len(self.levels)


def _norms(s: ZeroSequence, levels) -> np.ndarray:
    out = np.array([kernel_norm_sq_exact(s, rho(N)).value for N in levels])
    if np.any(~(out > 0)):
        raise DegenerateError("kernel norm vanishes at some rho_N")
    return np.sqrt(out)


def gram_matrix(s: ZeroSequence, levels) -> GramMatrix:
    levels = tuple(int(N) for N in levels)
    if len(levels) > MAX_GRAM_SIZE:
        raise DomainError(f"Gram matrix size is capped at {MAX_GRAM_SIZE}")
    norms = _norms(s, levels)
    pts = [rho(N) for N in levels]
    bvals = [eval_B(s, p) for p in pts]
    n = len(levels)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i == j:
                k = kernel_eval(s, pts[i], pts[i])
            else:
                k = kernel_from_values(bvals[i], bvals[j], pts[i], pts[j])
            G[i, j] = k / (norms[i] * norms[j])
    return GramMatrix(levels, G)


def kernel_combination(s: ZeroSequence, levels, alpha, N: int) -> complex:
    """``sum_n alpha_n x_n(rho_N)`` with ``x_n`` the normalized kernel at ``rho_n``."""
    norms = _norms(s, levels)
    return sum(a * kernel_eval(s, rho(Nn), rho(N)) / nn
               for a, Nn, nn in zip(alpha, levels, norms))


def beta_sequence(w: WitnessFunction, N_range) -> np.ndarray:
    """``beta_N = |f(rho_N)| / ||k_{rho_N}||`` for the witness ``f``."""
    out = []
    for N in N_range:
        k2 = kernel_norm_sq_exact(w.base, rho(N)).value
        if not k2 > 0:
            raise DegenerateError(f"kernel norm vanishes at rho_{N}")
        out.append(abs(eval_witness(w, rho(N))) / math.sqrt(k2))
    return np.array(out)


@dataclass(frozen=True)
class Diagnostic:
    partial_l2: np.ndarray
    tail_share: float
    threshold: float
    verdict: str  # consistent_with_unconditional | inconsistent

    note = ("finite-N evidence only: a growing partial l2 sum is inconsistent with an "
            "unconditional basis, a plateau does not prove one")


def unconditionality_diagnostic(betas, threshold: float = PLATEAU_THRESHOLD) -> Diagnostic:
    """Plateau test on ``sum beta_N^2``.

    Verdict is ``inconsistent`` when the last quarter of the terms adds more
    than ``threshold`` of the final total.
    """
    b = np.asarray(betas, dtype=float)
    if b.size < 8:
        raise DomainError("need at least 8 beta values")
    partial = cumsum(b * b)
    share = tail_fraction(partial, 0.25)
    verdict = "inconsistent" if share > threshold else "consistent_with_unconditional"
    return Diagnostic(partial, share, threshold, verdict)
