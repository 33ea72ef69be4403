"""Integer-indexed sequence rules with certified tail sums.

A rule is a pure function ``k -> value`` plus the first admissible index and,
when known analytically, a bound on a tail sum used for truncation audits:

* x-rules (tangential family) carry ``nonincreasing``; their tail
  ``sum_{k>K} x_k 4^-k`` is then bounded by ``x_K 4^-K / 3``.
* theta-rules (oricyclic family) carry ``tail_sq(K) >= sum_{k>K} theta_k^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import InvalidRuleError


@dataclass(frozen=True)
class Rule:
    name: str
    func: Callable[[int], float]
    start: int = 1
    nonincreasing: bool = True
    tail_sq: Callable[[int], float] | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, k: int) -> float:
        return float(self.func(k))

    def values(self, K: int) -> np.ndarray:
        """Rule values for ``k = start .. K``."""
        return np.array([self.func(k) for k in range(self.start, K + 1)], dtype=float)

    def describe(self) -> dict:
        return {"name": self.name, **self.params}


# -- x-rules ---------------------------------------------------------------


def x_constant(c: float = 1.0) -> Rule:
    return Rule("constant", lambda k: c, params={"c": c})


def x_harmonic() -> Rule:
    return Rule("harmonic", lambda k: 1.0 / k)


def x_n_log_n() -> Rule:
    return Rule("n_log_n", lambda k: 1.0 / (k * math.log(k)), start=2)


def x_power(p: float) -> Rule:
    if p <= 0:
        raise InvalidRuleError("power rule needs p > 0")
    return Rule("power", lambda k: float(k) ** -p, params={"p": p})


def x_geometric(q: float) -> Rule:
    """``x_k = q^k``; nonincreasing only for ``q <= 1``."""
    return Rule("geometric", lambda k: q**k, nonincreasing=q <= 1.0, params={"q": q})


# -- theta-rules -----------------------------------------------------------


def _power_tail(alpha: float):
    # sum_{k>K} k^(-2 alpha) <= int_K^inf t^(-2 alpha) dt
    return lambda K: K ** (1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0)


def theta_power(alpha: float) -> Rule:
    """``theta_k = k^-alpha`` from ``k = 2`` (``theta_1 = 1`` is not admissible)."""
    if alpha <= 1.0:
        raise InvalidRuleError("theta_k = k^-alpha needs alpha > 1 to be summable")
    return Rule("power", lambda k: float(k) ** -alpha, start=2,
                tail_sq=_power_tail(alpha), params={"alpha": alpha})


def theta_geometric() -> Rule:
    """``theta_k = 2^-k``."""
    return Rule("geometric", lambda k: math.ldexp(1.0, -k),
                tail_sq=lambda K: math.ldexp(1.0, -2 * K) / 3.0)


def _pow2_root_tail(alpha: float):
    # sum_{k>K} 4^(-k^(1/a)) <= int_K^inf 4^(-t^(1/a)) dt = a Gamma(a, K^(1/a) ln4) / ln4^a
    ln4 = math.log(4.0)

    def tail(K):
        x = K ** (1.0 / alpha) * ln4
        return alpha * special.gammaincc(alpha, x) * special.gamma(alpha) / ln4**alpha

    return tail


def theta_pow2_root(alpha: float) -> Rule:
    """``theta_k = 2^(-k^(1/alpha))``."""
    if alpha <= 0:
        raise InvalidRuleError("alpha must be positive")
    return Rule("pow2_root", lambda k: 2.0 ** -(k ** (1.0 / alpha)),
                tail_sq=_pow2_root_tail(alpha), params={"alpha": alpha})


def _double_exp_tail(K):
    # ratios theta_{k+1}^2/theta_k^2 decrease for k >= 3, so the tail is
    # dominated by a geometric series started at K+1; earlier terms are added
    head = math.fsum(4.0 ** -(2.0 ** math.sqrt(k)) for k in range(K + 1, 4))
    K = max(K, 3)
    a = 4.0 ** -(2.0 ** math.sqrt(K + 1))
    b = 4.0 ** -(2.0 ** math.sqrt(K + 2))
    if a == 0.0:
        return head
    return head + a / (1.0 - b / a)


def theta_double_exp() -> Rule:
    """``theta_k = 2^(-2^sqrt(k))``."""
    return Rule("double_exp", lambda k: 2.0 ** -(2.0 ** math.sqrt(k)), tail_sq=_double_exp_tail)


X_RULES = {
    "constant": lambda p: x_constant(p.get("c", 1.0)),
    "harmonic": lambda p: x_harmonic(),
    "n_log_n": lambda p: x_n_log_n(),
    "power": lambda p: x_power(p["p"]),
    "geometric": lambda p: x_geometric(p["q"]),
}

THETA_RULES = {
    "power": lambda p: theta_power(p["alpha"]),
    "geometric": lambda p: theta_geometric(),
    "pow2_root": lambda p: theta_pow2_root(p["alpha"]),
    "double_exp": lambda p: theta_double_exp(),
}


def x_rule_from_dict(d: dict) -> Rule:
    try:
        return X_RULES[d["name"]](d)
    except KeyError as exc:
        raise InvalidRuleError(f"unknown or incomplete x-rule {d!r}") from exc


def theta_rule_from_dict(d: dict) -> Rule:
    try:
        return THETA_RULES[d["name"]](d)
    except KeyError as exc:
        raise InvalidRuleError(f"unknown or incomplete theta-rule {d!r}") from exc
