"""Lower-bound witnesses built from normalized Szego kernels at the zeros.

For the tangential family with partial sums ``sigma_n`` of the x-rule the
witness is

    f(z) = sum_n a_n sqrt(1 - r_n^2) / (1 - conj(lambda_n) z),
    a_n  = sqrt(x_n / (sigma_n log(sigma_n)^(1+eps))),

which is square summable and grows like ``sqrt(sigma_N / log(sigma_N)^(1+eps))``
along ``rho_N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blaschke import ZeroSequence
from .designer import sigma_partials, tangential_family
from .disk_geometry import BoundaryPoint, one_minus_prod, one_minus_sq, rho
from .errors import DegenerateError, DomainError, InvalidRuleError
from .rules import Rule
from .summation import cumsum, fsum


@dataclass(frozen=True, eq=False)
class WitnessFunction:
    """``f = sum_i coeffs[i] k_{lambda_j} / ||k_{lambda_j}||`` with ``j = offset + i``.

    ``sigma`` (aligned with ``base``) is kept for rule-generated witnesses so
    that growth targets can be formed without the x-rule.
    """

    base: ZeroSequence
    coeffs: np.ndarray
    epsilon: float
    coeff_rule_tag: str = "explicit"  # thm33_choice | optimality_choice | explicit
    offset: int = 0
    sigma: np.ndarray | None = None
    log: Callable[[float], float] = math.log

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if c.ndim != 1 or self.offset < 0 or self.offset + c.size > self.base.truncation_len:
            raise DomainError("coefficients do not fit the zero sequence")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        if self.coeff_rule_tag == "thm33_choice" and not np.all(c > 0):
            raise DomainError("rule-generated coefficients must be positive")
        object.__setattr__(self, "coeffs", c)

    @property
    def first_index(self) -> int:
        """Index ``n`` of the first coefficient."""
        return self.base.index_start + self.offset

    def l2_sq(self) -> float:
        return fsum(self.coeffs * self.coeffs)

    def sigma_at(self, N: int) -> float:
        if self.sigma is None:
            raise DomainError("witness carries no sigma sequence")
        i = N - self.base.index_start
        if not 0 <= i < self.sigma.size:
            raise DomainError(f"N = {N} outside the stored sigma range")
        return float(self.sigma[i])

    def rows(self):
        j = slice(self.offset, self.offset + self.coeffs.size)
        n = np.arange(self.coeffs.size) + self.first_index
        return zip(n.tolist(), self.coeffs.tolist(), self.base.deltas[j].tolist(),
                   self.base.thetas[j].tolist())


def _start_index(sig: np.ndarray, min_sigma: float) -> int:
    above = np.nonzero(sig > min_sigma)[0]
    if above.size == 0:
        raise DegenerateError(f"sigma_n never exceeds {min_sigma} within the truncation")
    return int(above[0])


def thm33_coeffs(x_rule: Rule, epsilon: float, K: int, min_sigma: float = 1.0,
                 log: Callable[[float], float] = math.log) -> tuple[int, np.ndarray]:
    """Coefficients ``sqrt(x_n / (sigma_n log^(1+eps) sigma_n))`` for ``n = n0 .. K``.

    ``n0`` is the first index with ``sigma_n > min_sigma``; ``min_sigma`` must
    be at least 1 so the logarithm is positive.  Returns ``(n0, coeffs)``.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if min_sigma < 1.0:
        raise DomainError("min_sigma must be >= 1")
    x = x_rule.values(K)
    sig = sigma_partials(x_rule, K)
    i0 = _start_index(sig, min_sigma)
    ls = np.array([log(v) for v in sig[i0:].tolist()])
    a = np.sqrt(x[i0:] / (sig[i0:] * ls ** (1.0 + epsilon)))
    return x_rule.start + i0, a


def l2_tail_bound(x_rule: Rule, epsilon: float, K: int, min_sigma: float = 1.0,
                  log: Callable[[float], float] = math.log) -> float:
    """Upper bound for ``sum_{n >= n0} a_n^2`` (the whole infinite sum).

    ``t -> 1/(t log^(1+eps) t)`` is decreasing, so each term with
    ``sigma_{n-1} > 1`` is at most ``(1/eps)(log^-eps sigma_{n-1} - log^-eps sigma_n)``.
    Telescoping from ``n0`` needs ``sigma_{n0-1} > 1``; otherwise the first term
    is kept apart and the telescope starts at ``sigma_{n0}``.  The smaller valid
    bound is returned.
    """
    n0, a = thm33_coeffs(x_rule, epsilon, K, min_sigma, log)
    sig = sigma_partials(x_rule, K)
    i0 = n0 - x_rule.start
    bound = a[0] ** 2 + log(sig[i0]) ** -epsilon / epsilon
    if i0 >= 1 and sig[i0 - 1] > 1.0:
        bound = min(bound, log(sig[i0 - 1]) ** -epsilon / epsilon)
    return float(bound)


def thm33_witness(x_rule: Rule, epsilon: float, K: int, min_sigma: float = 1.0,
                  log: Callable[[float], float] = math.log) -> WitnessFunction:
    """Witness on the tangential family generated by ``x_rule``."""
    base = tangential_family(x_rule, K)
    K_eff = base.index_start + base.truncation_len - 1
    n0, a = thm33_coeffs(x_rule, epsilon, K_eff, min_sigma, log)
    return WitnessFunction(base, a, epsilon, "thm33_choice", offset=n0 - base.index_start,
                           sigma=sigma_partials(x_rule, K_eff), log=log)


def _terms(w: WitnessFunction, z: BoundaryPoint) -> np.ndarray:
    j = slice(w.offset, w.offset + w.coeffs.size)
    d, t = w.base.deltas[j], w.base.thetas[j]
    D = z.theta - t
    rr = (1.0 - d) * (1.0 - z.delta)
    h = np.sin(0.5 * D)
    den = (one_minus_prod(d, z.delta) + 2.0 * rr * h * h) - 1j * rr * np.sin(D)
    return w.coeffs * np.sqrt(one_minus_sq(d)) / den


def eval_witness(w: WitnessFunction, z: BoundaryPoint) -> complex:
    """``f(z)``; each ``1 - conj(lambda_n) z`` is assembled from the deltas."""
    if w.coeffs.size == 0:
        return 0j
    terms = _terms(w, z)
    return complex(fsum(terms.real), fsum(terms.imag))


def split_at(w: WitnessFunction, N: int) -> tuple[complex, complex]:
    """``f(rho_N)`` split into the parts with index ``<= N`` and ``> N``."""
    terms = _terms(w, rho(N))
    n = np.arange(terms.size) + w.first_index
    head, tail = terms[n <= N], terms[n > N]
    return (complex(fsum(head.real), fsum(head.imag)),
            complex(fsum(tail.real), fsum(tail.imag)))


def truncation_bound(w: WitnessFunction, N: int) -> float:
    """Bound on ``|f(rho_N) - f_K(rho_N)|`` for the omitted zeros of a rule witness.

    Cauchy-Schwarz splits the omitted part into the coefficient tail, at most
    ``(1/eps) log^-eps sigma_K`` by telescoping, and the kernel tail
    ``2 T / (1 - rho_N)^2``.
    """
    T = w.base.tail_delta_sum
    if T == 0.0:
        return 0.0
    if w.coeff_rule_tag != "thm33_choice" or w.sigma is None:
        return math.inf
    z = rho(N)
    coeff_tail = w.log(float(w.sigma[-1])) ** -w.epsilon / w.epsilon
    return math.sqrt(coeff_tail) * math.sqrt(2.0 * T) / z.delta


@dataclass(frozen=True)
class LowerBoundRow:
    N: int
    value: complex
    target: float
    ratio: float


def lower_bound_check(w: WitnessFunction, N_range) -> list[LowerBoundRow]:
    """``|f(rho_N)|`` against ``sqrt(sigma_N / log^(1+eps) sigma_N)``."""
    rows = []
    for N in N_range:
        sig = w.sigma_at(N)
        if not sig > 1.0:
            raise DegenerateError(f"sigma_{N} = {sig} is not above 1")
        target = math.sqrt(sig / w.log(sig) ** (1.0 + w.epsilon))
        val = eval_witness(w, rho(N))
        rows.append(LowerBoundRow(N, val, target, abs(val) / target))
    return rows


def ratios_nonvanishing(rows: list[LowerBoundRow]) -> bool:
    """No decay to zero: ``min`` over the upper half is at least half the ratio
    at the first point of the upper half."""
    r = [row.ratio for row in rows]
    upper = r[len(r) // 2:]
    return min(r) > 0 and min(upper) >= 0.5 * upper[0]


def optimality_coeffs(eps_rule: Callable[[int], float], K: int, start: int = 1) -> np.ndarray:
    """Telescoping coefficients ``e_n sqrt(n) - e_{n-1} sqrt(n-1)`` for ``n = start .. K``.

    The term before ``start`` is taken as 0, so partial sums equal ``e_N sqrt(N)``.
    """
    e = np.array([float(eps_rule(n)) for n in range(start, K + 1)])
    if np.any(~(e > 0)):
        raise InvalidRuleError("epsilon sequence must be positive")
    if np.any(np.diff(e) > 0):
        raise InvalidRuleError("epsilon sequence must be nonincreasing")
    g = e * np.sqrt(np.arange(start, K + 1, dtype=float))
    return np.diff(g, prepend=0.0)


def optimality_l2_proxy(eps_rule: Callable[[int], float], K: int, start: int = 1) -> np.ndarray:
    """Partial sums of ``e_n^2 / n``, which control ``sum a_n^2`` for the telescoping choice."""
    n = np.arange(start, K + 1, dtype=float)
    e = np.array([float(eps_rule(k)) for k in range(start, K + 1)])
    return cumsum(e * e / n)
