import mpmath
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

mpmath.mp.dps = 50


def mp_point(delta, theta):
    """Exact complex value of the stored point ``(1 - delta) e^{i theta}``."""
    return (1 - mpmath.mpf(delta)) * mpmath.expj(mpmath.mpf(theta))


def mp_blaschke(deltas, thetas, z):
    """Direct product of ``(z - a)/(1 - conj(a) z)``."""
    out = mpmath.mpc(1)
    for d, t in zip(deltas, thetas):
        a = mp_point(d, t)
        out *= (z - a) / (1 - mpmath.conj(a) * z)
    return out


def rel_err(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def mp():
    return mpmath
