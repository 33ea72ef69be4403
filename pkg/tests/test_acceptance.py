"""Acceptance suite: one check per criterion, each reporting a PASS/FAIL line.

Run under pytest (lines go to the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from bhgrowth.blaschke import kernel_norm_sq_exact, kernel_norm_sq_sum
from bhgrowth.designer import (GrowthSpec, closed_form, design_from_growth, oricyclic_family,
                               sigma_partial, tangential_family)
from bhgrowth.disk_geometry import dist_sq_arrays, pseudo_factor_arrays, rho
from bhgrowth.gram import beta_sequence, unconditionality_diagnostic
from bhgrowth.partition import ratio_spread, sandwich_terms
from bhgrowth.rules import (theta_geometric, theta_power, x_constant, x_harmonic, x_n_log_n,
                            x_power)
from bhgrowth.summation import fsum
from bhgrowth.witness import l2_tail_bound, lower_bound_check, thm33_witness

K = 10_000
SEED = 20261015
LINES = []


def record(num, title, ok, detail):
    line = f"criterion {num} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    LINES.append(line)
    print(line)
    return ok, detail


def quarter_power_spec():
    return GrowthSpec("closed_form", 0.5, form=closed_form("pow2_over_alpha", 2))


# -- the checks ------------------------------------------------------------


def check_identity():
    """pseudo_factor * dist_sq against the exact (1 - r_a^2)(1 - r_b^2)."""
    rng = np.random.default_rng(SEED)
    n = 10_000
    da = 2.0 ** -rng.uniform(0, 40, n)
    db = 2.0 ** -rng.uniform(0, 40, n)
    ta = rng.uniform(-math.pi, math.pi, n)
    # half the pairs share nearly the same argument
    off = rng.choice([-1.0, 1.0], n) * 2.0 ** -rng.uniform(0, 40, n)
    tb = np.where(np.arange(n) % 2 == 0, np.clip(ta + off, -3.14, 3.14),
                  rng.uniform(-math.pi, math.pi, n))
    t0 = time.perf_counter()
    pf = pseudo_factor_arrays(da, ta, db, tb)
    d2 = dist_sq_arrays(da, ta, db, tb)
    lhs = pf * d2
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for i in range(n):
        a, b = Fraction(da[i]), Fraction(db[i])
        exact = (2 * a - a * a) * (2 * b - b * b)
        worst = max(worst, float(abs(Fraction(lhs[i]) - exact) / exact))
    ok = worst <= 1e-12 and elapsed < 1.0
    return record(1, "exact identity", ok, f"max rel err {worst:.3g} (<= 1e-12), "
                                           f"{elapsed:.3f} s (< 1 s)")


def check_cross_method():
    t0 = time.perf_counter()
    fams = {"x=1/n": tangential_family(x_harmonic(), K),
            "x=1": tangential_family(x_constant(), K),
            "theta=1/k^2": oricyclic_family(theta_power(2.0), K),
            "theta=2^-k": oricyclic_family(theta_geometric(), K)}
    spreads = {}
    for name, s in fams.items():
        r = [kernel_norm_sq_exact(s, rho(N)).value / kernel_norm_sq_sum(s, rho(N)).value
             for N in range(8, 31)]
        spreads[name] = ratio_spread(r)
    elapsed = time.perf_counter() - t0
    ok = all(v <= 8 for v in spreads.values()) and elapsed < 10
    detail = ", ".join(f"{k} {v:.4f}" for k, v in spreads.items())
    return record(2, "two-method kernel norm", ok,
                  f"max/min {detail} (<= 8), {elapsed:.2f} s (< 10 s)")


def check_harmonic_growth():
    s = tangential_family(x_harmonic(), K)
    r = [kernel_norm_sq_exact(s, rho(N)).value / sigma_partial(x_harmonic(), N)
         for N in range(10, 31)]
    sp = ratio_spread(r)
    return record(3, "harmonic growth law", sp <= 4, f"max/min {sp:.4f} (<= 4)")


def check_design_round_trip():
    s = design_from_growth(quarter_power_spec(), 2**17)
    k = np.arange(s.index_start, s.index_start + s.truncation_len, dtype=float)
    err = float(np.max(np.abs(s.thetas * k * k - 1.0)))
    r = [kernel_norm_sq_exact(s, rho(N)).value / 2.0 ** (N / 2) for N in range(10, 29)]
    sp = ratio_spread(r)
    ok = err <= 1e-12 and sp <= 8
    return record(4, "design round trip", ok,
                  f"theta rel err {err:.3g} (<= 1e-12), kernel/sigma max/min {sp:.4f} (<= 8)")


def check_sandwich():
    fams = [tangential_family(x_harmonic(), K), tangential_family(x_constant(), K),
            tangential_family(x_power(2.0), K), tangential_family(x_n_log_n(), K),
            oricyclic_family(theta_power(2.0), K), oricyclic_family(theta_geometric(), K),
            design_from_growth(quarter_power_spec(), 2**17)]
    violations = 0
    checked = 0
    for s in fams:
        for N in range(1, 46):
            v, w = sandwich_terms(s, N)
            violations += int(np.sum(~((v < w) & (w <= 2 * v))))
            S, sig = fsum(v), fsum(w)
            violations += int(not (S < sig <= 2 * S))
            checked += v.size + 1
    return record(5, "band sandwich", violations == 0,
                  f"{violations} violations in {checked} term and sum checks (0 allowed)")


def check_witness():
    eps = 1.0
    w = thm33_witness(x_harmonic(), eps, K)
    K_eff = w.base.index_start + w.base.truncation_len - 1
    l2, bound = w.l2_sq(), l2_tail_bound(x_harmonic(), eps, K_eff)
    rows = {r.N: r.ratio for r in lower_bound_check(w, range(10, 31))}
    lo, mid = min(rows.values()), rows[20]
    ok = l2 <= bound and lo >= 0.5 * mid
    return record(6, "witness lower bound", ok,
                  f"sum alpha^2 {l2:.6f} <= {bound:.6f}; min ratio {lo:.4f} vs "
                  f"half ratio(20) {0.5 * mid:.4f}")


def check_diagnostic():
    t0 = time.perf_counter()
    out = {}
    for name, rule in (("x=1/n", x_harmonic()), ("x=n^-2", x_power(2.0))):
        w = thm33_witness(rule, 1.0, K)
        out[name] = unconditionality_diagnostic(beta_sequence(w, range(1, 46)))
    elapsed = time.perf_counter() - t0
    ok = (out["x=1/n"].verdict == "inconsistent"
          and out["x=n^-2"].verdict == "consistent_with_unconditional" and elapsed < 30)
    detail = "; ".join(f"{k} {d.verdict} (tail share {d.tail_share:.4f})" for k, d in out.items())
    return record(7, "unconditionality diagnostic", ok,
                  f"{detail}; expected inconsistent / consistent_with, {elapsed:.2f} s (< 30 s)")


def check_summable_control():
    s = tangential_family(x_power(2.0), K)
    k = [kernel_norm_sq_exact(s, rho(N)).value for N in range(10, 41)]
    sp = ratio_spread(k)
    return record(8, "summable control bounded", sp <= 2, f"max/min {sp:.4f} (<= 2)")


CHECKS = {1: check_identity, 2: check_cross_method, 3: check_harmonic_growth,
          4: check_design_round_trip, 5: check_sandwich, 6: check_witness,
          7: check_diagnostic, 8: check_summable_control}


# -- pytest glue -----------------------------------------------------------


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    if tr is not None and LINES:
        tr.write_sep("-", "acceptance criteria")
        for line in sorted(LINES):
            tr.write_line(line)


def _run(num):
    ok, detail = CHECKS[num]()
    assert ok, detail


def test_exact_identity_suite():
    _run(1)


def test_two_method_kernel_norm():
    _run(2)


def test_harmonic_growth_law():
    _run(3)


def test_design_round_trip():
    _run(4)


def test_band_sandwich():
    _run(5)


def test_witness_lower_bound():
    _run(6)


def test_unconditionality_diagnostic():
    _run(7)


def test_summable_control_bounded():
    _run(8)


if __name__ == "__main__":
    results = [CHECKS[k]()[0] for k in sorted(CHECKS)]
    print(f"{sum(results)}/{len(results)} criteria pass")
