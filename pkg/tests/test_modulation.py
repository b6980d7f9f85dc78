import numpy as np
import pytest

from blowup2d.errors import DomainError, NumericsError
from blowup2d.funcspace import DiskGrid
from blowup2d.modulation import (
    decompose, four_soliton_pair, symmetrize, symmetry_defect,
)
from blowup2d.spectral import EigenSet


@pytest.fixture(scope="module")
def grid():
    return DiskGrid(96, 192, 3.0)


def test_four_soliton_symmetries(grid):
    s1, s2 = four_soliton_pair(-0.8, 0.02, grid.y1, grid.y2)
    t1, _ = four_soliton_pair(-0.8, 0.02, grid.y2, grid.y1)
    assert np.allclose(t1, -s1, atol=1e-12)
    u1, _ = four_soliton_pair(-0.8, 0.02, -grid.y1, grid.y2)
    assert np.allclose(u1, s1, atol=1e-12)
    assert symmetry_defect(grid, (s1, s2)) < 1e-13


def test_four_soliton_domain():
    with pytest.raises(DomainError):
        four_soliton_pair(-1.0, 0.0, 0.0, 0.0)


def test_symmetrize_projects_into_class(grid):
    rng = np.random.default_rng(5)
    f = rng.normal(size=(grid.n_r, grid.n_theta))
    g = symmetrize(grid, f)
    assert symmetry_defect(grid, (g, np.zeros_like(g))) < 1e-12
    # projection is idempotent
    assert np.allclose(symmetrize(grid, g), g, atol=1e-13)


def test_round_trip_exact_input(grid):
    d_true, nu_true = -0.8, 0.02
    v = four_soliton_pair(d_true, nu_true, grid.y1, grid.y2)
    # the family is steep in h-norm near concentration, so a coarse seed
    # carries a large initial remainder: widen the ceiling to test Newton
    res = decompose(grid, v, -0.78, 0.05, q_ceiling=10.0)
    assert res.d == pytest.approx(d_true, abs=1e-10)
    assert res.nu == pytest.approx(nu_true, abs=1e-10)
    assert res.qnorm < 1e-8
    assert res.d_star == pytest.approx(res.d / (1 + res.nu), rel=0)


def test_round_trip_deep_concentration(grid):
    d_true, nu_true = -0.95, 0.005
    v = four_soliton_pair(d_true, nu_true, grid.y1, grid.y2)
    res = decompose(grid, v, -0.94, 0.02, q_ceiling=10.0)
    assert res.d == pytest.approx(d_true, abs=1e-9)
    assert res.nu == pytest.approx(nu_true, abs=1e-9)
    assert res.qnorm < 1e-8


def test_orthogonality_after_convergence(grid):
    v = four_soliton_pair(-0.85, 0.01, grid.y1, grid.y2)
    res = decompose(grid, v, -0.83, 0.03, q_ceiling=10.0)
    es = EigenSet.build(grid, (res.d / (1 + res.nu), 0.0))
    pr = es.project(grid, res.q)
    assert abs(pr[0]) < 1e-10 and abs(pr[1]) < 1e-10
    assert max(map(abs, res.residuals)) < 1e-12


def symmetric_bump(grid):
    # cos(2t) and cos(6t) are even across both axes and odd across the
    # bisectrices, so they survive the class projection
    f = np.exp(-6 * (grid.rr - 0.9) ** 2) * np.cos(2 * grid.tt)
    return symmetrize(grid, f + 0.3 * np.cos(6 * grid.tt) * grid.rr**2)


def test_perturbation_response_ratio(grid):
    d_true, nu_true = -0.8, 0.02
    s1, s2 = four_soliton_pair(d_true, nu_true, grid.y1, grid.y2)
    bump = symmetric_bump(grid)
    dv = (bump, 0.5 * bump)
    eps = 1e-3 / grid.h_norm(dv)
    v = (s1 + eps * dv[0], s2 + eps * dv[1])
    # tracking seed: previous (unperturbed) parameters, so qhat = eps dv
    res = decompose(grid, v, d_true, nu_true)
    assert res.qhat_norm == pytest.approx(1e-3, rel=1e-10)
    assert res.qnorm <= 10 * res.qhat_norm
    assert abs(res.d - d_true) < 1e-2
    assert abs(res.nu - nu_true) < 1e-2


def test_continuity_under_small_perturbations(grid):
    d_true, nu_true = -0.8, 0.02
    s1, s2 = four_soliton_pair(d_true, nu_true, grid.y1, grid.y2)
    bump = symmetric_bump(grid)
    outs = []
    for eps in (1e-4, 2e-4):
        scale = eps / grid.h_norm((bump, np.zeros_like(bump)))
        v = (s1 + scale * bump, s2)
        res = decompose(grid, v, d_true, nu_true)
        outs.append((res.d, res.nu))
    lip = np.hypot(outs[1][0] - outs[0][0], outs[1][1] - outs[0][1]) / 1e-4
    assert np.isfinite(lip) and lip < 100.0


def test_asymmetric_input_rejected(grid):
    s1, s2 = four_soliton_pair(-0.8, 0.02, grid.y1, grid.y2)
    v = (s1 + 1e-3 * grid.y1, s2)  # odd in y1: breaks the class
    with pytest.raises(DomainError):
        decompose(grid, v, -0.8, 0.02)


def test_inadmissible_seed_rejected(grid):
    v = four_soliton_pair(-0.8, 0.02, grid.y1, grid.y2)
    with pytest.raises(DomainError):
        decompose(grid, v, -0.8, -0.199)  # ratio < -1 + 1/A at A = 10


def test_remainder_ceiling_rejected(grid):
    rng = np.random.default_rng(0)
    noise = symmetrize(grid, rng.normal(size=(grid.n_r, grid.n_theta)))
    s1, s2 = four_soliton_pair(-0.8, 0.02, grid.y1, grid.y2)
    v = (s1 + noise, s2)
    with pytest.raises(DomainError):
        decompose(grid, v, -0.8, 0.02)


def test_nonconvergence_raises(grid):
    s1, s2 = four_soliton_pair(-0.8, 0.02, grid.y1, grid.y2)
    bump = symmetric_bump(grid)
    v = (s1 + 0.05 * bump, s2)
    with pytest.raises(NumericsError):
        decompose(grid, v, -0.8, 0.02, max_iter=1)
