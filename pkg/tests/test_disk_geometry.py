import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bhgrowth.disk_geometry import (AnnulusIndex, BoundaryPoint, StolzDomain, annulus,
                                    annulus_index, annulus_quotient, band_from_quotient,
                                    dist_sq, dist_sq_arrays, one_minus_sq, pseudo_distance,
                                    pseudo_factor, pseudo_factor_arrays, rho, stolz_contains)
from bhgrowth.errors import DomainError
from conftest import mp_point, rel_err

deltas = st.floats(min_value=2.0**-40, max_value=1.0)
thetas = st.floats(min_value=-math.pi, max_value=math.pi, exclude_min=True)
points = st.builds(BoundaryPoint, deltas, thetas)
near = st.builds(BoundaryPoint, st.floats(min_value=2.0**-40, max_value=2.0**-4),
                 st.floats(min_value=-2.0**-4, max_value=2.0**-4))


def mp_dist_sq(a, b):
    return abs(1 - mpmath.conj(mp_point(a.delta, a.theta)) * mp_point(b.delta, b.theta)) ** 2


def mp_oms(d):
    r = 1 - mpmath.mpf(d)
    return 1 - r * r


# -- points ----------------------------------------------------------------


@pytest.mark.parametrize("d,t", [(0.0, 0.1), (1.5, 0.0), (0.5, 4.0), (0.5, -math.pi),
                                 (math.nan, 0.0)])
def test_invalid_points_rejected(d, t):
    with pytest.raises(DomainError):
        BoundaryPoint(d, t)


def test_from_complex_round_trip():
    p = BoundaryPoint.from_complex(0.3 + 0.4j)
    assert p.delta == pytest.approx(0.5)
    assert p.to_complex() == pytest.approx(0.3 + 0.4j)


def test_stolz_and_annulus_validation():
    with pytest.raises(DomainError):
        StolzDomain(1.0)
    with pytest.raises(DomainError):
        AnnulusIndex(3, -4)
    with pytest.raises(DomainError):
        rho(0)


# -- dist_sq ---------------------------------------------------------------


def test_dist_sq_origin():
    assert dist_sq(BoundaryPoint.origin(), BoundaryPoint(1.0, 2.0)) == 1.0
    assert dist_sq(BoundaryPoint.origin(), BoundaryPoint(0.25, 1.0)) == 1.0


@pytest.mark.parametrize("d", [0.5, 2.0**-10, 2.0**-40])
def test_dist_sq_collinear(d):
    a = BoundaryPoint(d, 0.0)
    expected = (Fraction(2) * Fraction(d) - Fraction(d) ** 2) ** 2
    assert dist_sq(a, a) == pytest.approx(float(expected), rel=1e-15)


def test_dist_sq_against_oracle_tiny_deltas():
    a = BoundaryPoint(2.0**-20 / 5, 2.0**-10)
    b = BoundaryPoint(2.0**-30, 0.0)
    assert rel_err(mpmath.mpf(dist_sq(a, b)), mp_dist_sq(a, b)) < 1e-13


@given(points, points)
def test_dist_sq_symmetric(a, b):
    assert dist_sq(a, b) == dist_sq(b, a)


@given(points, points)
def test_dist_sq_matches_oracle(a, b):
    assert rel_err(mpmath.mpf(dist_sq(a, b)), mp_dist_sq(a, b)) < 1e-12


@given(near, near)
def test_pythagorean_comparability(a, b):
    ref = ((1 - (1 - a.delta) * (1 - b.delta)) + abs(a.theta - b.theta)) ** 2
    assert 0.25 <= dist_sq(a, b) / ref <= 4.0


# -- pseudo-hyperbolic factor and distance ---------------------------------


@given(points)
def test_pseudo_factor_diagonal_is_one(a):
    assert pseudo_factor(a, a) == 1.0
    assert pseudo_distance(a, a) == 0.0


@pytest.mark.parametrize("d", [0.5, 0.1, 2.0**-30])
def test_pseudo_factor_from_origin(d):
    r = Fraction(1) - Fraction(d)
    got = pseudo_factor(BoundaryPoint.origin(), BoundaryPoint(d, 0.0))
    assert got == pytest.approx(float(1 - r * r), rel=1e-15)


@given(points, points)
def test_identity_factor_times_dist(a, b):
    lhs = mpmath.mpf(pseudo_factor(a, b)) * mpmath.mpf(dist_sq(a, b))
    rhs = mp_oms(a.delta) * mp_oms(b.delta)
    if pseudo_factor(a, b) < 1.0:
        assert rel_err(lhs, rhs) < 1e-12


@given(points, points)
def test_pseudo_distance_matches_oracle(a, b):
    za, zb = mp_point(a.delta, a.theta), mp_point(b.delta, b.theta)
    exact = abs(za - zb) / abs(1 - mpmath.conj(za) * zb)
    got = pseudo_distance(a, b)
    assert 0.0 <= got < 1.0 or exact > 1 - 1e-15
    assert abs(mpmath.mpf(got) - exact) <= 1e-12 * max(exact, mpmath.mpf(2.0**-40))


@given(points, points)
def test_pseudo_distance_symmetric(a, b):
    assert pseudo_distance(a, b) == pytest.approx(pseudo_distance(b, a), rel=1e-14, abs=0)


def test_pseudo_distance_origin_half():
    assert pseudo_distance(BoundaryPoint.origin(), BoundaryPoint(0.5, 0.0)) == 0.5


@pytest.mark.parametrize("k", [10, 20, 40])
def test_consecutive_tangential_moduli(k):
    # radial points 1 - x_k 4^-k with x = 1/k
    x = lambda n: 1.0 / n
    a = BoundaryPoint(x(k) * 4.0**-k, 0.0)
    b = BoundaryPoint(x(k + 1) * 4.0 ** -(k + 1), 0.0)
    da, db = Fraction(a.delta), Fraction(b.delta)
    exact = (da - db) / (da + db - da * db)
    assert pseudo_distance(a, b) == pytest.approx(float(exact), rel=1e-14)
    # tends to (1 - q)/(1 + q) with q = x_(k+1) / (4 x_k)
    q = x(k + 1) / (4 * x(k))
    assert float(exact) == pytest.approx((1 - q) / (1 + q), rel=4.0**-k * 4)


def test_vectorised_forms_agree():
    rng = np.random.default_rng(7)
    da, db = 2.0 ** -rng.uniform(0, 40, 200), 2.0 ** -rng.uniform(0, 40, 200)
    ta, tb = rng.uniform(-3, 3, 200), rng.uniform(-3, 3, 200)
    pf = pseudo_factor_arrays(da, ta, db, tb)
    d2 = dist_sq_arrays(da, ta, db, tb)
    for i in range(200):
        a, b = BoundaryPoint(da[i], ta[i]), BoundaryPoint(db[i], tb[i])
        assert d2[i] == pytest.approx(dist_sq(a, b), rel=1e-15)
        assert pf[i] == pytest.approx(pseudo_factor(a, b), rel=1e-15)


def test_factor_survives_deltas_near_underflow():
    a = BoundaryPoint(1e-300, 0.0)
    b = BoundaryPoint(3e-300, 0.0)
    with mpmath.workdps(700):
        exact = mp_oms(a.delta) * mp_oms(b.delta) / mp_dist_sq(a, b)
    assert rel_err(mpmath.mpf(pseudo_factor(a, b)), exact) < 1e-12


# -- Stolz domain ----------------------------------------------------------


@given(st.floats(min_value=2.0**-40, max_value=0.999), st.floats(min_value=1.0001, max_value=50))
def test_stolz_contains_radius(d, opening):
    assert stolz_contains(StolzDomain(opening), BoundaryPoint(d, 0.0))


def test_stolz_examples():
    dom = StolzDomain(2.0)
    z_out = BoundaryPoint(2.0**-10, 0.5)
    assert abs(1 - mp_point(z_out.delta, z_out.theta)) > 2 * z_out.delta
    assert not stolz_contains(dom, z_out)
    z_in = BoundaryPoint(0.5, 0.1)
    assert abs(1 - mp_point(z_in.delta, z_in.theta)) < 2 * z_in.delta
    assert stolz_contains(dom, z_in)


# -- bands -----------------------------------------------------------------


def test_annulus_origin_is_band_minus_one():
    for N in (1, 5, 45):
        assert annulus_index(BoundaryPoint.origin(), N) == -1


def test_band_edges_half_open():
    assert int(band_from_quotient(0.25)) == 1
    assert int(band_from_quotient(0.5)) == 0
    assert int(band_from_quotient(1.0)) == -1
    assert int(band_from_quotient(np.nextafter(0.25, 0))) == 2


@pytest.mark.parametrize("N", [1, 3, 10, 30, 45])
def test_annulus_at_rho_N(N):
    v = annulus_quotient(rho(N), N)
    r = 1 - Fraction(1, 2**N)
    exact = 1 / (1 - r * r)
    assert v == pytest.approx(float(exact), rel=1e-15)
    # n with exact in [2^-(n+1), 2^-n), found by brute force on Fractions
    n = -N - 1
    while not (Fraction(1, 2) ** (n + 1) <= exact < Fraction(1, 2) ** n):
        n += 1
    assert annulus_index(rho(N), N) == n
    assert annulus(rho(N), N).band_n >= -N


@given(st.floats(min_value=1e-300, max_value=1e300))
def test_band_from_quotient_brute_force(v):
    n = int(band_from_quotient(v))
    fv = Fraction(v)
    assert Fraction(2) ** -(n + 1) <= fv < Fraction(2) ** -n


@given(points, st.integers(min_value=1, max_value=45))
def test_every_point_gets_a_band_at_least_minus_N(z, N):
    assert annulus(z, N).band_n >= -N


def test_one_minus_sq_exact_on_dyadics():
    d = 2.0**-20
    assert one_minus_sq(d) == float(2 * Fraction(d) - Fraction(d) ** 2)
