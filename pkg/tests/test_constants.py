import numpy as np
import pytest
from hypothesis import given, strategies as st

from blowup2d.constants import bar_profile, d_bar_prime, derive_constants
from blowup2d.errors import DomainError


def test_cubic_case_values():
    c = derive_constants(3.0)
    assert c.alpha == pytest.approx(0.5, abs=0)
    assert c.kappa0 == pytest.approx(1.414213562373095, rel=1e-15)
    assert c.pbar == 2.0
    assert c.gamma == 1.0
    assert c.eta == 0.125
    assert c.C0 == pytest.approx(1.0, rel=1e-15)


def test_pbar_rules():
    assert derive_constants(1.5).pbar == 1.5
    assert derive_constants(2.0).pbar == 1.99
    assert derive_constants(4.0).pbar == 2.0


@pytest.mark.parametrize("p", [0.5, 1.0, 5.0, 7.0, -3.0])
def test_exponent_domain(p):
    with pytest.raises(DomainError):
        derive_constants(p)


def test_rate_domain():
    with pytest.raises(DomainError):
        derive_constants(3.0, cbar=0.0)
    with pytest.raises(DomainError):
        derive_constants(3.0, delta=-1.0)


# below p ~ 1.013 the amplitude constant kappa0 overflows float64, so the
# property test stays inside the representable range
@given(st.floats(min_value=1.05, max_value=4.99))
def test_definitional_identities(p):
    c = derive_constants(p)
    assert c.kappa0 ** (p - 1.0) == pytest.approx(2.0 * (p + 1.0) / (p - 1.0) ** 2,
                                                  rel=1e-12)
    assert 2.0 * c.alpha * (p - 1.0) == pytest.approx(5.0 - p, rel=1e-12)
    assert 0.0 < c.eta <= 0.25


def test_profile_frozen_values():
    zeta, d = bar_profile(100.0, 3.0)
    assert zeta == pytest.approx(2.6491586832740183, rel=1e-14)
    assert 1.0 + d == pytest.approx(0.0099502487562189055, rel=1e-12)


def test_profile_domain():
    with pytest.raises(DomainError):
        bar_profile(0.0, 3.0)
    with pytest.raises(DomainError):
        bar_profile(np.array([1.0, -2.0]), 3.0)


@pytest.mark.parametrize("p,cbar", [(3.0, 1.0), (2.5, 0.7), (1.8, 2.0)])
def test_profile_solves_slow_ode(p, cbar):
    # (1/cbar) zeta' = exp(-4 zeta / (p-1)), checked by 4th-order central
    # differences on a log-spaced s range.
    s = np.logspace(1, 6, 41)
    h = 1e-3 * s
    stencil = sum(w * bar_profile(s + k * h, p, cbar)[0]
                  for k, w in [(-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12)])
    zeta_prime = stencil / h
    zeta, _ = bar_profile(s, p, cbar)
    residual = zeta_prime / cbar - np.exp(-4.0 * zeta / (p - 1.0))
    assert np.max(np.abs(residual)) < 1e-10


@pytest.mark.parametrize("p,cbar", [(3.0, 1.0), (2.2, 0.5)])
def test_profile_concentration_limit(p, cbar):
    # s^gamma (1 + d_bar) equals C0 / (1 + exp(-2 zeta_bar)) exactly, hence
    # approaches C0 with an O(s^-gamma) relative correction.
    c = derive_constants(p, cbar=cbar)
    for s in (1e4, 1e6):
        zeta, d = bar_profile(s, p, cbar)
        # computing 1 + d_bar near d_bar = -1 cancels ~gamma*log10(s) digits
        assert s**c.gamma * (1.0 + d) * (1.0 + np.exp(-2 * zeta)) == pytest.approx(
            c.C0, rel=1e-9)
    _, d = bar_profile(1e6, 3.0)
    assert 1e6 * (1.0 + d) == pytest.approx(derive_constants(3.0).C0, rel=1e-4)


def test_d_bar_prime_matches_difference_quotient():
    s = np.logspace(1, 4, 13)
    h = 1e-4 * s
    fd = (bar_profile(s + h, 3.0)[1] - bar_profile(s - h, 3.0)[1]) / (2 * h)
    assert np.allclose(d_bar_prime(s, 3.0), fd, rtol=1e-6, atol=1e-14)
