"""Mesh, field, and boundary tests: ghost filling for every kind, corner
handling, idempotency, and validation errors."""

import numpy as np
import pytest

from tenom.euler import prim_to_cons
from tenom.grids import (
    BCSide,
    BoundaryError,
    BoundarySpec,
    ConservedField,
    UniformGrid,
    dmr_shock_abscissa,
    fill_ghosts,
)


def grid1d(n=8, g=2, lo=0.0, hi=1.0):
    return UniformGrid.for_domain(((lo, hi),), (n,), g)


def test_grid_validation():
    with pytest.raises(ValueError):
        UniformGrid(n=(4,), origin=(0.0,), dx=(-0.1,), n_ghost=2)
    with pytest.raises(ValueError):
        UniformGrid(n=(3,), origin=(0.0,), dx=(0.1,), n_ghost=2)
    with pytest.raises(ValueError):
        UniformGrid(n=(4, 4), origin=(0.0,), dx=(0.1, 0.1), n_ghost=2)


def test_cell_centers_touch_faces():
    g = grid1d(n=10)
    x = g.cell_centers(0)
    assert x[0] == pytest.approx(0.05)
    assert x[-1] == pytest.approx(0.95)
    xg = g.cell_centers(0, ghosts=True)
    assert xg.size == 10 + 2 * g.n_ghost
    assert xg[0] == pytest.approx(-0.15)


def test_periodic_fill_example():
    g = grid1d(n=4, g=2)
    f = ConservedField.allocate(g, 1)
    f.interior(g)[0] = [1.0, 2.0, 3.0, 4.0]  # (a, b, c, d)
    fill_ghosts(f, g, BoundarySpec.uniform("periodic"))
    assert f.values[0, :2].tolist() == [3.0, 4.0]  # (c, d)
    assert f.values[0, -2:].tolist() == [1.0, 2.0]  # (a, b)


def test_reflective_fill_mirrors_and_negates_momentum():
    g = grid1d(n=4, g=2)
    f = ConservedField.allocate(g, 3)
    f.interior(g)[...] = np.array([[1.0, 2, 3, 4], [2.0, 3, 4, 5], [5.0, 6, 7, 8]])
    fill_ghosts(f, g, BoundarySpec.uniform("reflective"), gamma=1.4)
    # nearest ghost to the left wall mirrors the first interior cell
    assert f.values[:, 1].tolist() == [1.0, -2.0, 5.0]
    assert f.values[:, 0].tolist() == [2.0, -3.0, 6.0]
    assert f.values[:, -1].tolist() == [3.0, -4.0, 7.0]


def test_reflective_double_mirror_identity():
    g = grid1d(n=6, g=3)
    f = ConservedField.allocate(g, 3)
    rng = np.random.default_rng(5)
    f.interior(g)[...] = rng.normal(size=(3, 6))
    before = f.interior(g).copy()
    fill_ghosts(f, g, BoundarySpec.uniform("reflective"), gamma=1.4)
    ghost = f.values[:, :3].copy()
    ghost[1] = -ghost[1]
    assert np.array_equal(ghost[:, ::-1], before[:, :3])


def test_zero_gradient_and_fixed():
    g = grid1d(n=4, g=2)
    f = ConservedField.allocate(g, 3)
    f.interior(g)[...] = np.arange(12.0).reshape(3, 4)
    bc = BoundarySpec(left=BCSide("zero_gradient"), right=BCSide("fixed", state=(1.0, 0.0, 1.0)))
    fill_ghosts(f, g, bc, gamma=1.4)
    assert np.array_equal(f.values[:, 0], f.interior(g)[:, 0])
    expect = prim_to_cons(np.array([1.0, 0.0, 1.0]), 1.4)
    assert np.allclose(f.values[:, -1], expect)
    assert np.allclose(f.values[:, -2], expect)


def test_fill_is_idempotent():
    g = grid1d(n=6, g=3)
    f = ConservedField.allocate(g, 3)
    rng = np.random.default_rng(6)
    prim = np.abs(rng.normal(1.0, 0.1, size=(3, 6))) + 0.5
    f.interior(g)[...] = prim_to_cons(prim, 1.4)
    for kind in ("periodic", "reflective", "zero_gradient"):
        fill_ghosts(f, g, BoundarySpec.uniform(kind), gamma=1.4)
        snap = f.values.copy()
        fill_ghosts(f, g, BoundarySpec.uniform(kind), gamma=1.4)
        assert np.array_equal(f.values, snap)


def test_boundary_validation():
    with pytest.raises(BoundaryError):
        BCSide("outflowish")
    with pytest.raises(BoundaryError):
        BCSide("fixed")  # state missing
    with pytest.raises(BoundaryError):
        BoundarySpec(left=BCSide("periodic"), right=BCSide("zero_gradient"))
    with pytest.raises(BoundaryError):
        BCSide("dmr_top", state=(1.0, 0.0, 0.0, 1.0))  # second state missing


def test_dmr_shock_abscissa_at_t0():
    # matches the initial shock line evaluated at the top of the domain
    x0 = dmr_shock_abscissa(0.0)
    assert x0 == pytest.approx(1.0 / 6.0 + 1.0 / np.sqrt(3.0))
    line_at_top = 0.1667 + 1.0 / 1.732
    assert x0 == pytest.approx(line_at_top, abs=2e-4)
    assert x0 == pytest.approx(0.744, abs=5e-4)


def _dmr_bc():
    post = (8.0, 7.145, -4.125, 116.8333)
    pre = (1.4, 0.0, 0.0, 1.0)
    return BoundarySpec(
        left=BCSide("fixed", state=post),
        right=BCSide("zero_gradient"),
        bottom=BCSide("dmr_bottom", state=post, x0=1.0 / 6.0),
        top=BCSide("dmr_top", state=post, state2=pre, x0=1.0 / 6.0),
    )


def test_dmr_top_switches_at_shock_foot():
    g = UniformGrid.for_domain(((0.0, 4.0), (0.0, 1.0)), (40, 10), 3)
    f = ConservedField.allocate(g, 4)
    post = prim_to_cons(np.array([8.0, 7.145, -4.125, 116.8333]), 1.4)
    pre = prim_to_cons(np.array([1.4, 0.0, 0.0, 1.0]), 1.4)
    f.interior(g)[...] = pre.reshape(4, 1, 1)
    fill_ghosts(f, g, _dmr_bc(), t=0.0, gamma=1.4)
    xs = g.cell_centers(0, ghosts=True)
    x_s = dmr_shock_abscissa(0.0)
    top = f.values[:, -1, :]
    for j, x in enumerate(xs):
        expect = post if x < x_s else pre
        assert np.allclose(top[:, j], expect)
    # moving shock: at later time the switch sits further right
    fill_ghosts(f, g, _dmr_bc(), t=0.1, gamma=1.4)
    n_post_later = (f.values[0, -1, :] > 2.0).sum()
    assert n_post_later > (xs < x_s).sum()


def test_dmr_bottom_mixes_inflow_and_wall():
    g = UniformGrid.for_domain(((0.0, 4.0), (0.0, 1.0)), (40, 10), 3)
    f = ConservedField.allocate(g, 4)
    rng = np.random.default_rng(11)
    prim = np.abs(rng.normal(1.0, 0.05, size=(4, 10, 40))) + 0.5
    f.interior(g)[...] = prim_to_cons(prim, 1.4)
    fill_ghosts(f, g, _dmr_bc(), t=0.0, gamma=1.4)
    xs = g.cell_centers(0, ghosts=True)
    post = prim_to_cons(np.array([8.0, 7.145, -4.125, 116.8333]), 1.4)
    bottom = f.values[:, 2, :]  # nearest ghost row below the wall
    wall = xs >= 1.0 / 6.0
    # inflow side carries the post-shock state
    assert np.allclose(bottom[:, ~wall], post[:, None])
    # wall side mirrors the first interior row with negated y-momentum
    first = f.values[:, 3, :]
    assert np.allclose(bottom[0, wall], first[0, wall])
    assert np.allclose(bottom[2, wall], -first[2, wall])


def test_2d_periodic_corners_consistent():
    g = UniformGrid.for_domain(((0.0, 1.0), (0.0, 1.0)), (6, 6), 3)
    f = ConservedField.allocate(g, 4)
    rng = np.random.default_rng(2)
    prim = np.abs(rng.normal(1.0, 0.1, size=(4, 6, 6))) + 0.5
    f.interior(g)[...] = prim_to_cons(prim, 1.4)
    fill_ghosts(f, g, BoundarySpec.uniform("periodic", dims=2), gamma=1.4)
    v = f.values
    # corner ghost equals the periodically wrapped interior cell
    assert np.allclose(v[:, :3, :3], v[:, 6:9, 6:9])


def test_2d_requires_four_sides():
    g = UniformGrid.for_domain(((0.0, 1.0), (0.0, 1.0)), (6, 6), 3)
    f = ConservedField.allocate(g, 4)
    bc = BoundarySpec(left=BCSide("periodic"), right=BCSide("periodic"))
    with pytest.raises(BoundaryError):
        fill_ghosts(f, g, bc, gamma=1.4)


def test_check_finite():
    g = grid1d()
    f = ConservedField.allocate(g, 1)
    assert f.check_finite()
    f.values[0, 3] = np.nan
    assert not f.check_finite()
