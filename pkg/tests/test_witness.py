import math
from fractions import Fraction

import numpy as np
import pytest

from ellsym.dsl import parse_operator, parse_system
from ellsym.errors import EpsilonTooSmallError, ResidualTooLargeError
from ellsym.operators import SystemSpec
from ellsym.witness import (
    Grid,
    WitnessConfig,
    apply_operator,
    blowup_experiment,
    constrain_field,
    l1_norm,
    mollified_dirac,
    solve_system,
    symbol_on_modes,
)
from genops import divergence_operator, gradient_operator, laplacian_operator

F = Fraction


def coords(grid):
    x = np.arange(grid.npts) * grid.spacing
    return np.meshgrid(*([x] * grid.n), indexing="ij")


def test_grid_budget_enforced():
    with pytest.raises(ValueError):
        Grid(4, 64)
    with pytest.raises(ValueError):
        Grid(3, 512)
    Grid(4, 32)
    Grid(3, 256)


def test_mollifier_unit_mass_direction():
    grid = Grid(2, 64)
    e = (F(3, 5), F(4, 5))
    f, _ = mollified_dirac(grid, 0.5, e)
    mass = f.sum(axis=tuple(range(grid.n))) * grid.cell_volume
    assert np.abs(mass - np.array([0.6, 0.8])).max() < 1e-12


def test_mollifier_annihilated_by_constraint():
    grid = Grid(3, 32)
    c = parse_operator("from 4 to 1\nrows: d1 f1 + d2 f2 + d3 f3", 3)
    e4 = (F(0), F(0), F(0), F(1))
    _, fhat = mollified_dirac(grid, 0.8, e4)
    cf = apply_operator(c, fhat, grid)
    assert np.abs(cf).max() < 1e-12


def test_mollifier_epsilon_too_small():
    grid = Grid(2, 64)
    with pytest.raises(EpsilonTooSmallError):
        mollified_dirac(grid, 0.5 * grid.spacing, (F(1), F(0)))


def test_constrain_field_divergence_free():
    grid = Grid(2, 64)
    rng = np.random.default_rng(3)
    f = rng.standard_normal(grid.shape + (2,))
    fhat = np.fft.fftn(f, axes=(0, 1))
    div = divergence_operator(2)
    projected = constrain_field(fhat, div, grid)
    residual = apply_operator(div, projected, grid)
    residual.reshape(-1, 1)[0] = 0.0  # zero mode is not constrained
    scale = np.abs(projected).max()
    assert np.abs(residual).max() < 1e-10 * max(scale, 1.0)
    # idempotence
    again = constrain_field(projected, div, grid)
    assert np.abs(again - projected).max() < 1e-12 * max(scale, 1.0)


def test_constrain_field_trivial_kernel_zeroes_modes():
    grid = Grid(2, 32)
    c = parse_operator("from 1 to 1\nrows: f1", 2)  # C(ξ) = 1: kernel {0}
    rng = np.random.default_rng(5)
    fhat = np.fft.fftn(rng.standard_normal(grid.shape + (1,)), axes=(0, 1))
    out = constrain_field(fhat, c, grid)
    flat = out.reshape(-1, 1)
    assert np.abs(flat[1:]).max() < 1e-12 * np.abs(fhat).max()
    assert flat[0] == fhat.reshape(-1, 1)[0]


def test_solve_eigenfunction_exact():
    # -Δ written with literal signs: the grid applies true derivatives (ik)^α
    neg_lap = parse_operator(
        "from 2 to 2\nrows: -d1^2 u1 - d2^2 u1; -d1^2 u2 - d2^2 u2", 2
    )
    grid = Grid(2, 64)
    x1, _x2 = coords(grid)
    f = np.zeros(grid.shape + (2,))
    f[..., 0] = np.sin(x1)
    u, info = solve_system(neg_lap, f, grid)
    assert info["residual"] < 1e-12
    assert np.abs(u[..., 0] - np.sin(x1)).max() < 1e-12
    assert np.abs(u[..., 1]).max() < 1e-12


def test_solve_gradient_recovers_potential():
    grid = Grid(2, 64)
    x1, x2 = coords(grid)
    g = np.sin(x1) * np.cos(x2)
    f = np.stack([np.cos(x1) * np.cos(x2), -np.sin(x1) * np.sin(x2)], axis=-1)
    u, info = solve_system(gradient_operator(2), f, grid)
    assert info["residual"] < 1e-10
    target = g - g.mean()
    assert np.abs(u[..., 0] - target).max() < 1e-10


def test_solve_out_of_range_strict_raises():
    grid = Grid(2, 32)
    _x1, x2 = coords(grid)
    f = np.zeros(grid.shape + (2,))
    f[..., 0] = np.cos(x2)  # (cos x2, 0) is not a gradient field
    with pytest.raises(ResidualTooLargeError):
        solve_system(gradient_operator(2), f, grid, strict=True, residual_tol=1e-8)


def test_constraint_preserved_through_pipeline():
    grid = Grid(2, 64)
    div = divergence_operator(2)
    rng = np.random.default_rng(11)
    fhat = np.fft.fftn(rng.standard_normal(grid.shape + (2,)), axes=(0, 1))
    fhat = constrain_field(fhat, div, grid)
    f = np.fft.ifftn(fhat, axes=(0, 1)).real
    before = np.abs(apply_operator(div, np.fft.fftn(f, axes=(0, 1)), grid))[1:].max()
    solve_system(laplacian_operator(2), f, grid)
    after = np.abs(apply_operator(div, np.fft.fftn(f, axes=(0, 1)), grid))[1:].max()
    assert before == after  # the solve never mutates f


def test_translation_invariance_of_ratios():
    grid = Grid(2, 64)
    lap = laplacian_operator(2)
    e = (F(1), F(0))

    def ratio(center):
        f, _ = mollified_dirac(grid, 0.5, e, center=center)
        u, info = solve_system(lap, f, grid)
        return np.abs(u).max() / l1_norm(f, grid)

    r0 = ratio(None)
    r1 = ratio((8 * grid.spacing, 3 * grid.spacing))
    assert abs(r0 - r1) < 1e-10 * max(1.0, r0)


def test_ratio_stability_under_grid_doubling():
    lap_sys = parse_system(
        "dim 2\noperator A { from 2 to 2 rows: d1^2 u1 + d2^2 u1; d1^2 u2 + d2^2 u2 }"
    )
    eps = 8 * (2 * math.pi / 64)
    ratios = []
    for npts in (64, 128):
        cfg = WitnessConfig(
            system=lap_sys,
            epsilons=[eps],
            e=(F(1), F(0)),
            j=None,
            grid_n=npts,
            seed=1,
        )
        res = blowup_experiment(cfg)
        ratios.append(res.rows[0]["ratio"])
    assert abs(ratios[1] - ratios[0]) / ratios[0] < 0.02


def test_blowup_divcurl_bad_direction_records_diagnostics():
    spec = parse_system(open("systems/divcurl_r3.sys").read())
    cfg = WitnessConfig(
        system=spec,
        epsilons=[0.8, 0.6],
        e=(F(0), F(0), F(0), F(1)),  # e4 ∈ K_C but e4 ∉ I_A
        j=1,
        grid_n=32,
        seed=0,
    )
    res = blowup_experiment(cfg)
    assert all(r["ratio"] is None for r in res.rows)
    assert res.classification == "INDETERMINATE"
    assert any("no ratio recorded" in d for d in res.diagnostics)


def test_blowup_constraint_violation_reported():
    spec = parse_system(open("systems/laplacian_div_r2.sys").read())
    cfg = WitnessConfig(
        system=spec,
        epsilons=[0.5],
        e=(F(1), F(0)),  # not in K_C = {0}
        j=None,
        grid_n=32,
        seed=0,
    )
    res = blowup_experiment(cfg)
    assert any("ConstraintViolation" in d for d in res.diagnostics)


def test_parity_hook_odd_dimension_flat_slope():
    # n=3, k=3 elliptic (odd n, M ≡ 0): the inverse kernel has no log part,
    # so the magnitude at the Dirac center is width-flat. The global sup
    # drifts like ε^(2/3) toward its bounded limit at desk scale, so the
    # zero-slope check is made on the center column; the classifier must
    # still not report GROWING.
    a = parse_operator(
        "rows: (d1^2+d2^2+d3^2) d1 u1; (d1^2+d2^2+d3^2) d2 u1; (d1^2+d2^2+d3^2) d3 u1",
        3,
    )
    spec = SystemSpec(a, None, 3)
    cfg = WitnessConfig(
        system=spec,
        epsilons=[0.5, 0.35, 0.25],
        e=(F(1), F(0), F(0)),
        j=None,
        grid_n=64,
        seed=2,
        residual_tol=10.0,  # least-squares family: range deficiency expected
    )
    res = blowup_experiment(cfg)
    ratios = [r["ratio"] for r in res.rows]
    centers = [r["center_ratio"] for r in res.rows]
    assert all(r is not None for r in ratios)
    mean = sum(ratios) / len(ratios)
    x = np.log(1.0 / np.array([r["epsilon"] for r in res.rows]))
    slope = np.polyfit(x, np.array(centers), 1)[0]
    assert abs(slope) < 0.05 * mean
    assert res.classification != "GROWING"
