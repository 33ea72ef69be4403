"""Zero-family constructors and the inverse design from a growth sequence.

Two families are built here:

* tangential: ``1 - r_k = x_k 4^-k``, ``theta_k = 2^-k``;
* oricyclic: ``1 - r_k = theta_k^2``, argument ``theta_k``.

``design_from_growth`` solves the inverse problem: given target values
``sigma_N`` it interpolates an increasing ``psi`` with ``psi(N) = sigma_N`` and
places the k-th oricyclic zero at ``theta_k = 2^(-psi^-1(k))``, which makes
``||k_{rho_N}||^2`` comparable to ``sigma_N``.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .blaschke import ZeroSequence
from .errors import DomainError, InvalidRuleError, RejectedSpecError
from .rules import Rule
from .summation import fsum, round_up

# smallest admissible delta; below this 1 - r is no longer a normal double
DELTA_FLOOR = sys.float_info.min
# relative slack when testing sigma_{N+1} <= 2^beta sigma_N at equality
GROWTH_RTOL = 1e-12


@dataclass(frozen=True)
class PiecewiseAffine:
    """Continuous piecewise affine map through strictly increasing knots."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise DomainError("need at least two knots")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise DomainError("knots must be strictly increasing in both coordinates")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_knots(cls, knots) -> "PiecewiseAffine":
        k = np.asarray(knots, dtype=float)
        return cls(k[:, 0], k[:, 1])

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.xs[0]) or np.any(x > self.xs[-1]):
            raise DomainError(f"argument outside [{self.xs[0]}, {self.xs[-1]}]")
        out = np.interp(x, self.xs, self.ys)
        return float(out) if out.ndim == 0 else out

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < self.ys[0]) or np.any(y > self.ys[-1]):
            raise DomainError(f"value outside [{self.ys[0]}, {self.ys[-1]}]")
        out = np.interp(y, self.ys, self.xs)
        return float(out) if out.ndim == 0 else out

    def slopes(self) -> np.ndarray:
        return np.diff(self.ys) / np.diff(self.xs)

    def is_concave(self, rtol: float = 1e-12) -> bool:
        s = self.slopes()
        return bool(np.all(s[1:] <= s[:-1] * (1.0 + rtol)))


# -- closed-form growth laws -----------------------------------------------


@dataclass(frozen=True)
class ClosedForm:
    name: str
    psi: Callable[[float], float]
    psi_inv: Callable[[float], float]
    first_N: int = 1
    alpha: float | None = None


def closed_form(name: str, alpha: float | None = None) -> ClosedForm:
    """Built-in growth laws (logarithms base 2).

    ``pow2_over_alpha``: ``psi(t) = 2^(t/alpha)``;
    ``poly``: ``psi(t) = t^alpha``;
    ``log_sq``: ``psi(t) = (log2 t)^alpha`` (``alpha = 2`` by default), from ``N = 2``.
    """
    if name == "pow2_over_alpha":
        a = float(alpha)
        if a <= 0:
            raise RejectedSpecError("alpha must be positive")
        return ClosedForm(name, lambda t: 2.0 ** (t / a), lambda k: a * math.log2(k), 1, a)
    if name == "poly":
        a = float(alpha)
        if a <= 0:
            raise RejectedSpecError("alpha must be positive")
        return ClosedForm(name, lambda t: t**a, lambda k: k ** (1.0 / a), 1, a)
    if name == "log_sq":
        a = 2.0 if alpha is None else float(alpha)
        return ClosedForm(name, lambda t: math.log2(t) ** a, lambda k: 2.0 ** (k ** (1.0 / a)), 2, a)
    raise RejectedSpecError(f"unknown closed form {name!r}")


@dataclass(frozen=True)
class GrowthSpec:
    """Target growth ``sigma_N``: either explicit nodes or a closed form.

    ``beta`` in ``(0, 2)`` witnesses ``sigma_{N+1} <= 2^beta sigma_N``.
    """

    kind: str
    beta: float
    nodes: tuple[tuple[int, float], ...] | None = None
    form: ClosedForm | None = None
    check_upto: int = 64

    def __post_init__(self):
        if self.kind not in ("nodes", "closed_form"):
            raise RejectedSpecError(f"unknown growth spec kind {self.kind!r}")
        if not (0.0 < self.beta < 2.0):
            raise RejectedSpecError(f"beta must lie in (0, 2), got {self.beta!r}")
        if self.kind == "nodes":
            if not self.nodes or len(self.nodes) < 2:
                raise RejectedSpecError("need at least two nodes")
            nodes = tuple((int(n), float(v)) for n, v in self.nodes)
            object.__setattr__(self, "nodes", nodes)
            for (n0, s0), (n1, s1) in zip(nodes, nodes[1:]):
                if not (n1 > n0 and s1 > s0):
                    raise RejectedSpecError("nodes must be strictly increasing in N and sigma")
        elif self.form is None:
            raise RejectedSpecError("closed_form spec needs a form")
        if self.sigma_first < 1.0:
            raise RejectedSpecError(f"first sigma must be >= 1, got {self.sigma_first!r}")
        bad = self.growth_violations()
        if bad:
            raise RejectedSpecError(f"growth condition sigma_(N+1) <= 2^beta sigma_N fails at N = {bad[:5]}")

    @classmethod
    def from_dict(cls, d: dict) -> "GrowthSpec":
        try:
            kind = d["kind"]
            beta = float(d["beta"])
            if kind == "nodes":
                return cls(kind, beta, nodes=tuple(tuple(n) for n in d["nodes"]))
            f = d["form"]
            return cls(kind, beta, form=closed_form(f["name"], f.get("alpha")),
                       check_upto=int(d.get("check_upto", 64)))
        except (KeyError, TypeError) as exc:
            raise RejectedSpecError(f"malformed growth spec: {exc}") from exc

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "beta": self.beta}
        if self.kind == "nodes":
            out["nodes"] = [list(n) for n in self.nodes]
        else:
            out["form"] = {"name": self.form.name, "alpha": self.form.alpha}
        return out

    @property
    def first_N(self) -> int:
        return self.nodes[0][0] if self.kind == "nodes" else self.form.first_N

    @property
    def sigma_first(self) -> float:
        return self.sigma(self.first_N)

    def sigma(self, N: int) -> float:
        if self.kind == "nodes":
            return float(self.psi()(N))
        return float(self.form.psi(N))

    def node_list(self, upto: int | None = None) -> list[tuple[int, float]]:
        if self.kind == "nodes":
            return list(self.nodes)
        top = self.check_upto if upto is None else upto
        return [(N, self.form.psi(N)) for N in range(self.form.first_N, top + 1)]

    def psi(self) -> PiecewiseAffine:
        """Piecewise affine interpolant through the nodes."""
        return PiecewiseAffine.from_knots(self.node_list())

    def psi_inv(self, k):
        if self.kind == "nodes":
            return self.psi().inverse(k)
        return self.form.psi_inv(k)

    def growth_violations(self) -> list[int]:
        nodes = self.node_list()
        cap = 2.0**self.beta * (1.0 + GROWTH_RTOL)
        return [n0 for (n0, s0), (n1, s1) in zip(nodes, nodes[1:]) if s1 > cap ** (n1 - n0) * s0]


# -- families --------------------------------------------------------------


def _cap_at_floor(deltas: np.ndarray) -> int:
    ok = deltas >= DELTA_FLOOR
    return int(np.argmin(ok)) if not ok.all() else int(deltas.size)


def weak_cond_check(x_rule: Rule, K: int) -> dict:
    """``sup x_{k+1}/x_k`` over ``k <= K``; passes iff below 2."""
    if K < 2:
        raise DomainError("need K >= 2")
    x = x_rule.values(K + 1)
    sup_ratio = float(np.max(x[1:] / x[:-1])) if x.size >= 2 else 0.0
    return {"sup_ratio": sup_ratio, "passes": sup_ratio < 2.0}


def tangential_family(x_rule: Rule, K: int) -> ZeroSequence:
    """Zeros ``(1 - x_k 4^-k) e^{i 2^-k}`` for ``k = start .. K``.

    Indices whose ``delta`` would underflow are dropped and folded into the
    certified tail bound.
    """
    if K < x_rule.start:
        raise DomainError(f"K must be >= {x_rule.start}")
    ks = np.arange(x_rule.start, K + 1)
    x = x_rule.values(K)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise InvalidRuleError("x-rule must be positive")
    q = 1.0
    if not x_rule.nonincreasing:
        q = weak_cond_check(x_rule, K)["sup_ratio"] if x.size >= 2 else 1.0
        if q >= 2.0:
            raise InvalidRuleError(f"x-rule fails sup x_(k+1)/x_k < 2 (sup = {q})")
    deltas = x * np.ldexp(1.0, -2 * ks)
    if np.any(deltas > 1.0):
        raise InvalidRuleError("x_k 4^-k must not exceed 1")
    m = _cap_at_floor(deltas)
    ks, x, deltas = ks[:m], x[:m], deltas[:m]
    thetas = np.ldexp(1.0, -ks)
    r = max(q, 1.0) / 4.0
    tail = round_up(float(x[-1] * math.ldexp(1.0, -2 * int(ks[-1])) * r / (1.0 - r))) if m else 0.0
    return ZeroSequence(deltas, thetas, family_tag=f"tangential({x_rule.name})",
                        tail_delta_sum=tail, index_start=x_rule.start,
                        meta={"x_rule": x_rule.describe()})


def oricyclic_family(theta_rule: Rule, K: int, start: int | None = None) -> ZeroSequence:
    """Zeros ``(1 - theta_k^2) e^{i theta_k}`` for ``k = start .. K``."""
    k0 = theta_rule.start if start is None else start
    if K < k0:
        raise DomainError(f"K must be >= {k0}")
    th = np.array([theta_rule(k) for k in range(k0, K + 1)], dtype=float)
    if np.any(np.isnan(th)) or np.any(th < 0.0) or np.any(th >= 1.0):
        raise InvalidRuleError("theta-rule values must lie in (0, 1)")
    deltas = th * th
    m = _cap_at_floor(deltas)
    if m == 0:
        raise InvalidRuleError("theta-rule values must lie in (0, 1)")
    last = k0 + m - 1
    if theta_rule.tail_sq is not None:
        tail = round_up(float(theta_rule.tail_sq(last)))
    else:
        tail = math.inf
    return ZeroSequence(deltas[:m], th[:m], family_tag=f"oricyclic({theta_rule.name})",
                        tail_delta_sum=tail, index_start=k0,
                        meta={"theta_rule": theta_rule.describe()})


def _designed_tail(g: GrowthSpec, M: int) -> float:
    # zeros with k >= sigma_M: at most sigma_{n+1} + 1 <= 2 sigma_{n+1} indices k in
    # [sigma_n, sigma_{n+1}) for n >= M, each with theta_k^2 <= 4^-n; growth
    # condition then sums the geometric series
    b = g.beta
    return 2.0 ** (1.0 + b) * g.sigma(M) * 4.0**-M / (1.0 - 2.0 ** (b - 2.0))


def design_from_growth(g: GrowthSpec, K: int) -> ZeroSequence:
    """Oricyclic zeros with ``theta_k = 2^(-psi^-1(k))`` for ``k = ceil(sigma_first) .. K``.

    For node specs the output stops at the last node value.
    """
    k0 = math.ceil(g.sigma_first)
    if K < k0:
        raise DomainError(f"K must be >= ceil(sigma_first) = {k0}")
    if g.kind == "nodes":
        K = min(K, math.floor(g.nodes[-1][1]))
    ks = np.arange(k0, K + 1, dtype=float)
    if g.kind == "nodes":
        t = np.asarray(g.psi_inv(ks), dtype=float)
    else:
        t = np.array([g.form.psi_inv(k) for k in ks.tolist()])
    # psi^-1(k) >= first_N >= 1 for k >= sigma_first, hence theta_k <= 1/2
    th = np.exp2(-t)
    m = _cap_at_floor(th * th)
    th = th[:m]
    last_k = int(k0 + m - 1)
    if g.kind == "nodes":
        M = g.nodes[-1][0]
    else:
        M = max(int(math.floor(g.form.psi_inv(last_k + 1))), g.first_N)
    tail = round_up(_designed_tail(g, M))
    return ZeroSequence(th * th, th, family_tag=f"designed({g.kind})", tail_delta_sum=tail,
                        index_start=k0, meta={"growth": g.to_dict()})


# -- bookkeeping -----------------------------------------------------------


def sigma_partial(x_rule: Rule, N: int) -> float:
    """``sum_{n <= N} x_n`` (correctly rounded)."""
    if N < x_rule.start:
        raise DomainError(f"N must be >= {x_rule.start}")
    return fsum(x_rule.values(N))


def sigma_partials(x_rule: Rule, N: int) -> np.ndarray:
    """All partial sums ``sigma_n`` for ``n = start .. N``."""
    x = x_rule.values(N)
    return np.array([math.fsum(x[: i + 1].tolist()) for i in range(x.size)])


def sigma_nodes(x_rule: Rule, N_max: int) -> list[tuple[int, float]]:
    """``(N, sigma_N)`` pairs for a tangential x-rule."""
    sig = sigma_partials(x_rule, N_max)
    return [(x_rule.start + i, float(v)) for i, v in enumerate(sig.tolist())]


@dataclass(frozen=True)
class PhiRecord:
    phi0: PiecewiseAffine

    def phi_delta(self, delta: float) -> float:
        if not (0.0 < delta < 1.0):
            raise DomainError(f"1 - y must lie in (0, 1), got {delta!r}")
        return self.phi0(-math.log2(delta))

    def phi(self, y: float) -> float:
        """``phi(y) = phi0(log2(1 / (1 - y)))``; use :meth:`phi_delta` near 1."""
        if not (0.0 < y < 1.0):
            raise DomainError(f"y must lie in (0, 1), got {y!r}")
        return self.phi_delta(1.0 - y)


def phi_from_sigma(g) -> PhiRecord:
    """Growth function ``phi`` for a :class:`GrowthSpec` or a list of ``(N, sigma_N)``."""
    if isinstance(g, GrowthSpec):
        return PhiRecord(g.psi())
    return PhiRecord(PiecewiseAffine.from_knots(list(g)))
