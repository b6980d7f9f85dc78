import numpy as np
import pytest

from blowup2d.errors import DomainError
from blowup2d.funcspace import DiskGrid
from blowup2d.solitons import kappa
from blowup2d.spectral import (
    EigenSet, apply_L, linearized_apply, project, stationary_residual,
)

D_SET = [(0.0, 0.0), (-0.3, 0.0), (-0.6, 0.0), (-0.9, 0.0)]


@pytest.fixture(scope="module")
def grid():
    return DiskGrid(128, 256, 3.0)


def full_rhs(grid, pair):
    # nonlinear similarity vector field, for linearisation cross-checks
    p = grid.p
    w1, w2 = pair
    out2 = (apply_L(grid, w1) - 2 * (p + 1) / (p - 1) ** 2 * w1
            + np.abs(w1) ** (p - 1) * w1
            - (p + 3) / (p - 1) * w2 - 2 * grid.rr * grid.dr(w2))
    return w2, out2


def test_constant_soliton_is_exactly_stationary(grid):
    one = np.ones((grid.n_r, grid.n_theta))
    k0 = np.sqrt(2.0) * one
    r1, r2 = full_rhs(grid, (k0, 0 * one))
    assert np.max(np.abs(r1)) == 0.0
    assert np.max(np.abs(r2)) < 1e-10


@pytest.mark.parametrize("d", D_SET)
def test_stationary_residual_small(grid, d):
    assert stationary_residual(grid, d) < 1e-5


def test_stationary_residual_generic_direction(grid):
    assert stationary_residual(grid, (0.4, -0.55)) < 1e-5


@pytest.mark.parametrize("d", D_SET)
def test_eigen_residuals(grid, d):
    es = EigenSet.build(grid, d)
    for lam, pair in zip(es.eigenvalues, es.pairs):
        out = linearized_apply(grid, d, pair)
        res = (out[0] - lam * pair[0], out[1] - lam * pair[1])
        assert grid.h_norm(res) / grid.h_norm(pair) < 1e-5


def test_eigen_residuals_rotated_direction(grid):
    D = 0.5 * np.array([np.cos(0.7), np.sin(0.7)])
    es = EigenSet.build(grid, D)
    for lam, pair in zip(es.eigenvalues, es.pairs):
        out = linearized_apply(grid, D, pair)
        res = (out[0] - lam * pair[0], out[1] - lam * pair[1])
        assert grid.h_norm(res) / grid.h_norm(pair) < 1e-5


def test_linearisation_matches_nonlinear_difference(grid):
    D = (-0.4, 0.0)
    k = kappa(D, grid.y1, grid.y2, grid.p)
    base = (k, np.zeros_like(k))
    q = (np.exp(-grid.rr**2) * np.cos(grid.tt), grid.y2 * 0.5)
    eps = 1e-3  # balances the quadratic term against derivative roundoff
    plus = full_rhs(grid, (base[0] + eps * q[0], base[1] + eps * q[1]))
    minus = full_rhs(grid, (base[0] - eps * q[0], base[1] - eps * q[1]))
    fd = ((plus[0] - minus[0]) / (2 * eps), (plus[1] - minus[1]) / (2 * eps))
    lin = linearized_apply(grid, D, q)
    assert grid.h_norm((fd[0] - lin[0], fd[1] - lin[1])) / grid.h_norm(lin) < 1e-8


def test_calibration_closed_forms_at_origin(grid):
    es = EigenSet.build(grid, (0.0, 0.0))
    assert np.allclose(es.duals[0], (1 - grid.rr**2) / (2 * np.pi), atol=1e-10)
    assert np.allclose(es.duals[1], 3 * grid.y1 / (2 * np.pi), atol=1e-10)
    assert np.allclose(es.duals[2], 3 * grid.y2 / (2 * np.pi), atol=1e-10)


@pytest.mark.parametrize("d", D_SET)
def test_projector_identity(grid, d):
    es = EigenSet.build(grid, d)
    for l in range(3):
        got = es.project(grid, es.pairs[l])
        for m in range(3):
            assert abs(got[m] - (1.0 if l == m else 0.0)) < 1e-8


def test_projection_recovers_coefficients(grid):
    D = (-0.6, 0.0)
    es = EigenSet.build(grid, D)
    a, b, c = 0.37, -1.2, 0.05
    pair = (a * es.pairs[0][0] + b * es.pairs[1][0] + c * es.pairs[2][0],
            a * es.pairs[0][1] + b * es.pairs[1][1] + c * es.pairs[2][1])
    got = project(grid, D, pair)
    assert got == pytest.approx((a, b, c), abs=1e-8)


def test_eigenset_domain(grid):
    with pytest.raises(DomainError):
        EigenSet.build(grid, (0.8, 0.8))
