"""Integrator tests: CFL step control, tendency assembly with sources, the
three-stage update algebra, conservation, free-stream preservation, and the
positivity fallback."""

import numpy as np
import pytest

from tenom import euler as eu
from tenom import stepper as sp
from tenom.grids import BoundarySpec, ConservedField, UniformGrid
from tenom.schemes import SchemeConfig

G14 = 1.4


def scalar_setup(n=64, order_name="teno6m-mp", lo=0.0, hi=1.0):
    cfg = SchemeConfig.from_name(order_name)
    grid = UniformGrid.for_domain(((lo, hi),), (n,), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 1)
    return cfg, grid, fld


# ---------------------------------------------------------------------------
# Step control
# ---------------------------------------------------------------------------


def test_compute_dt_scalar():
    cfg, grid, fld = scalar_setup(n=100)
    tc = sp.TimeConfig(t_end=1.0, cfl=0.4)
    assert sp.compute_dt(fld, grid, tc, None, 1.0) == pytest.approx(0.004)


def test_compute_dt_euler_at_rest():
    cfg = SchemeConfig.from_name("teno6")
    grid = UniformGrid.for_domain(((0.0, 1.0),), (100,), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 3)
    # unit sound speed: p = rho c^2 / gamma
    fld.interior(grid)[...] = eu.prim_to_cons(
        np.array([1.0, 0.0, 1.0 / G14])[:, None].repeat(100, 1), G14
    )
    tc = sp.TimeConfig(t_end=1.0, cfl=0.4)
    assert sp.compute_dt(fld, grid, tc, G14) == pytest.approx(0.004)


def test_dt_override_and_final_clamp():
    cfg, grid, fld = scalar_setup(n=32)
    x = grid.cell_centers(0)
    fld.interior(grid)[0] = np.sin(2 * np.pi * x)
    tc = sp.TimeConfig(t_end=0.01, cfl=0.4, dt_override=0.004)
    res = sp.solve(fld, grid, BoundarySpec.uniform("periodic"), cfg, tc, gamma=None)
    assert res.steps == 3  # 0.004 + 0.004 + clamped 0.002
    assert res.t == pytest.approx(0.01)


def test_zero_wave_speed_rejected():
    cfg, grid, fld = scalar_setup()
    with pytest.raises(ValueError):
        sp.compute_dt(fld, grid, sp.TimeConfig(t_end=1.0), None, 0.0)


def test_mp_cfl_guard():
    cfg, grid, fld = scalar_setup()
    with pytest.raises(ValueError):
        sp.solve(
            fld,
            grid,
            BoundarySpec.uniform("periodic"),
            cfg,
            sp.TimeConfig(t_end=0.1, cfl=0.7),
            gamma=None,
        )


# ---------------------------------------------------------------------------
# Tendencies
# ---------------------------------------------------------------------------


def test_rhs_vanishes_on_uniform_state():
    cfg = SchemeConfig.from_name("teno8am-mp")
    grid = UniformGrid.for_domain(((0.0, 1.0), (0.0, 1.0)), (8, 8), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 4)
    state = eu.prim_to_cons(np.array([0.7, 0.2, -0.1, 1.3]), G14)
    fld.interior(grid)[...] = state.reshape(4, 1, 1)
    tend = sp.rhs(fld, grid, BoundarySpec.uniform("periodic", dims=2), cfg, gamma=G14)
    assert np.abs(tend).max() < 1e-12


def test_gravity_source_on_quiescent_column():
    cfg = SchemeConfig.from_name("teno6m-va")
    grid = UniformGrid.for_domain(((0.0, 1.0), (0.0, 1.0)), (8, 8), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 4)
    state = eu.prim_to_cons(np.array([1.0, 0.0, 0.0, 1.0]), G14)
    fld.interior(grid)[...] = state.reshape(4, 1, 1)
    tend = sp.rhs(
        fld,
        grid,
        BoundarySpec.uniform("periodic", dims=2),
        cfg,
        source=sp.SourceSpec(kind="gravity", g=1.0, axis=1),
        gamma=G14,
    )
    assert np.abs(tend[0]).max() < 1e-13
    assert np.allclose(tend[2], 1.0, atol=1e-12)  # rho g
    assert np.abs(tend[3]).max() < 1e-12  # rho v g = 0 at rest


def test_source_validation():
    with pytest.raises(ValueError):
        sp.SourceSpec(kind="coriolis")


# ---------------------------------------------------------------------------
# Three-stage update
# ---------------------------------------------------------------------------


def test_ssp_rk3_identity_for_zero_rhs():
    u = np.arange(5.0)
    assert np.array_equal(sp.ssp_rk3_step(u, 0.1, lambda v: 0.0 * v), u)


def test_ssp_rk3_amplification_polynomial():
    for z in (0.3, -0.5 + 0.8j, 1.2j, -2.0):
        got = sp.ssp_rk3_step(np.array([1.0 + 0j]), 1.0, lambda v: z * v)[0]
        assert got == pytest.approx(1 + z + z**2 / 2 + z**3 / 6, rel=1e-14)


def test_ssp_rk3_linearity():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4))
    u = rng.normal(size=4)
    f = lambda v: A @ v
    one = sp.ssp_rk3_step(u, 0.03, f)
    scaled = sp.ssp_rk3_step(3.0 * u, 0.03, f)
    assert np.allclose(scaled, 3.0 * one, rtol=1e-13)


# ---------------------------------------------------------------------------
# Conservation and free-stream
# ---------------------------------------------------------------------------


def test_periodic_conservation_per_step():
    cfg, grid, fld = scalar_setup(n=64)
    x = grid.cell_centers(0)
    fld.interior(grid)[0] = np.sin(2 * np.pi * x) + 0.2 * np.sin(14 * np.pi * x)
    total0 = fld.interior(grid).sum()
    res = sp.solve(
        fld, grid, BoundarySpec.uniform("periodic"), cfg, sp.TimeConfig(t_end=0.05), gamma=None
    )
    drift = abs(fld.interior(grid).sum() - total0) / max(abs(total0), 1.0)
    assert res.steps > 0
    assert drift < 1e-13 * res.steps


def test_periodic_conservation_euler():
    cfg = SchemeConfig.from_name("teno6m-tvd5")
    grid = UniformGrid.for_domain(((0.0, 1.0),), (50,), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 3)
    x = grid.cell_centers(0)
    prim = np.stack([1.0 + 0.2 * np.sin(2 * np.pi * x), 0.3 * np.cos(2 * np.pi * x), np.full_like(x, 1.0)])
    fld.interior(grid)[...] = eu.prim_to_cons(prim, G14)
    totals0 = fld.interior(grid).sum(axis=1)
    res = sp.solve(
        fld, grid, BoundarySpec.uniform("periodic"), cfg, sp.TimeConfig(t_end=0.05), gamma=G14
    )
    totals = fld.interior(grid).sum(axis=1)
    assert np.abs(totals - totals0).max() < 1e-12 * res.steps


def test_free_stream_preservation_2d_hundred_steps():
    cfg = SchemeConfig.from_name("teno8am-mp")
    grid = UniformGrid.for_domain(((0.0, 1.0), (0.0, 1.0)), (12, 12), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 4)
    state = eu.prim_to_cons(np.array([0.7, 0.3, -0.4, 1.3]), G14)
    fld.interior(grid)[...] = state.reshape(4, 1, 1)
    dt = sp.compute_dt(fld, grid, sp.TimeConfig(t_end=1.0), G14)
    res = sp.solve(
        fld,
        grid,
        BoundarySpec.uniform("periodic", dims=2),
        cfg,
        sp.TimeConfig(t_end=100 * dt),
        gamma=G14,
    )
    assert res.steps >= 100
    assert np.abs(fld.interior(grid) - state.reshape(4, 1, 1)).max() < 1e-13


# ---------------------------------------------------------------------------
# Positivity fallback and failure reporting
# ---------------------------------------------------------------------------


def test_instability_reported_with_step_and_location():
    cfg = SchemeConfig.from_name("teno6m-mp")
    grid = UniformGrid.for_domain(((0.0, 1.0),), (50,), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 3)
    x = grid.cell_centers(0)
    prim = np.where(x < 0.5, np.array([[1.0], [0.0], [1.0]]), np.array([[0.125], [0.0], [0.1]]))
    fld.interior(grid)[...] = eu.prim_to_cons(prim, G14)
    # absurd fixed step: the update must blow up and be reported
    tc = sp.TimeConfig(t_end=1.0, cfl=0.4, dt_override=0.5)
    with pytest.raises(sp.InstabilityError) as err:
        sp.solve(fld, grid, BoundarySpec.uniform("zero_gradient"), cfg, tc, gamma=G14)
    assert err.value.step >= 0


def test_strong_rarefaction_stays_positive():
    cfg = SchemeConfig.from_name("teno8am-mp")
    grid = UniformGrid.for_domain(((0.0, 1.0),), (100,), cfg.n_ghost)
    fld = ConservedField.allocate(grid, 3)
    x = grid.cell_centers(0)
    prim = np.where(
        x < 0.5, np.array([[1.0], [-2.2], [0.2]]), np.array([[1.0], [2.2], [0.2]])
    )
    fld.interior(grid)[...] = eu.prim_to_cons(prim, G14)
    sp.solve(
        fld,
        grid,
        BoundarySpec.uniform("zero_gradient"),
        cfg,
        sp.TimeConfig(t_end=0.05),
        gamma=G14,
    )
    assert fld.check_finite()
    prim_end = eu.cons_to_prim(fld.interior(grid), G14)
    assert prim_end[0].min() > 0.0 and prim_end[2].min() > 0.0


def test_positivity_fallback_counts_and_repairs():
    # a coarse near-vacuum shock tube drives the high-order update negative;
    # the two-point fallback must repair it, count activations, and keep the
    # final state strictly positive
    from tenom.cases import get_case

    case = get_case("leblanc", resolution=(200,), t_end=1.0)
    cfg = SchemeConfig.from_name("teno8am-mp")
    grid = UniformGrid.for_domain(case.domain, case.resolution, cfg.n_ghost)
    fld = ConservedField.allocate(grid, 3)
    fld.interior(grid)[...] = case.init(grid)
    res = sp.solve(
        fld, grid, case.bc, cfg, sp.TimeConfig(t_end=case.t_end), gamma=case.gamma
    )
    assert res.fallback_activations > 0
    prim_end = eu.cons_to_prim(fld.interior(grid), case.gamma)
    assert prim_end[0].min() > 0.0 and prim_end[2].min() > 0.0


def test_max_steps_guard():
    cfg, grid, fld = scalar_setup(n=32)
    fld.interior(grid)[0] = 1.0
    tc = sp.TimeConfig(t_end=1.0, cfl=0.4, max_steps=3)
    with pytest.raises(sp.InstabilityError):
        sp.solve(fld, grid, BoundarySpec.uniform("periodic"), cfg, tc, gamma=None)
