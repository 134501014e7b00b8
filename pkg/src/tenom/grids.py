"""Uniform Cartesian grids, ghosted cell-centered fields, and boundaries.

Cell centers sit at ``origin + (i + 1/2) dx`` so domain endpoints are cell
faces and piecewise initial conditions split exactly on faces at every
resolution.  Fields store the conserved components with ghost layers
included; array layout is component-first, x last: ``(m, nx+2g)`` in 1D and
``(m, ny+2g, nx+2g)`` in 2D.

Boundary kinds: periodic, reflective (wall-normal momentum negated),
zero-gradient, fixed (a primitive state written into the ghosts), plus the
two compound kinds of the Mach-10 wedge problem: a top boundary tracking the
oblique shock and a bottom boundary that switches from the post-shock inflow
to a reflecting wall at the wedge tip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

__all__ = [
    "UniformGrid",
    "ConservedField",
    "BCSide",
    "BoundarySpec",
    "fill_ghosts",
    "BoundaryError",
]

BC_KINDS = ("periodic", "reflective", "zero_gradient", "fixed", "dmr_top", "dmr_bottom")


class BoundaryError(ValueError):
    """Raised for unknown or inconsistently paired boundary kinds."""


@dataclass(frozen=True)
class UniformGrid:
    """Uniform Cartesian mesh, 1D or 2D."""

    n: tuple[int, ...]
    origin: tuple[float, ...]
    dx: tuple[float, ...]
    n_ghost: int

    def __post_init__(self):
        if len(self.n) not in (1, 2) or len(self.origin) != len(self.n) or len(self.dx) != len(self.n):
            raise ValueError("n, origin, dx must agree in length (1 or 2 axes)")
        if any(d <= 0 for d in self.dx):
            raise ValueError("cell widths must be positive")
        if any(ni < 2 * self.n_ghost for ni in self.n):
            raise ValueError("interior must hold at least two ghost widths")

    @property
    def dims(self) -> int:
        return len(self.n)

    def cell_centers(self, axis: int = 0, ghosts: bool = False) -> np.ndarray:
        """Cell-center coordinates along an axis."""
        g = self.n_ghost if ghosts else 0
        idx = np.arange(-g, self.n[axis] + g)
        return self.origin[axis] + (idx + 0.5) * self.dx[axis]

    def ext_shape(self, m: int) -> tuple[int, ...]:
        # y axis (axis 1) is the second-to-last array axis, x the last
        per_axis = tuple(ni + 2 * self.n_ghost for ni in self.n)
        return (m,) + per_axis[::-1]

    @property
    def cell_volume(self) -> float:
        vol = 1.0
        for d in self.dx:
            vol *= d
        return vol

    @classmethod
    def for_domain(cls, domain, n, n_ghost: int) -> "UniformGrid":
        """Grid covering ``domain = ((x0, x1)[, (y0, y1)])`` with n cells per axis."""
        origin = tuple(lo for lo, _ in domain)
        dx = tuple((hi - lo) / ni for (lo, hi), ni in zip(domain, n))
        return cls(n=tuple(n), origin=origin, dx=dx, n_ghost=n_ghost)


@dataclass
class ConservedField:
    """Cell-centered conserved components including ghost layers."""

    m: int
    values: np.ndarray

    @classmethod
    def allocate(cls, grid: UniformGrid, m: int) -> "ConservedField":
        return cls(m=m, values=np.zeros(grid.ext_shape(m)))

    def interior(self, grid: UniformGrid) -> np.ndarray:
        """View of the interior cells (no copy)."""
        g = grid.n_ghost
        if grid.dims == 1:
            return self.values[:, g : g + grid.n[0]]
        return self.values[:, g : g + grid.n[1], g : g + grid.n[0]]

    def check_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())


@dataclass(frozen=True)
class BCSide:
    """One side's boundary behavior.

    ``state`` holds the primitive state of fixed kinds; the wedge-problem
    kinds carry both the post-shock (``state``) and pre-shock (``state2``)
    states and the wedge-tip abscissa ``x0``.
    """

    kind: str
    state: tuple | None = None
    state2: tuple | None = None
    x0: float = 1.0 / 6.0

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise BoundaryError(f"unknown boundary kind {self.kind!r}")
        if self.kind in ("fixed", "dmr_top", "dmr_bottom") and self.state is None:
            raise BoundaryError(f"boundary kind {self.kind!r} needs a state")
        if self.kind == "dmr_top" and self.state2 is None:
            raise BoundaryError("shock-tracking top boundary needs both states")


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary kinds per side: (left, right) plus (bottom, top) in 2D."""

    left: BCSide
    right: BCSide
    bottom: BCSide | None = None
    top: BCSide | None = None

    def __post_init__(self):
        for a, b, names in ((self.left, self.right, "left/right"), (self.bottom, self.top, "bottom/top")):
            if a is None and b is None:
                continue
            if (a is None) != (b is None):
                raise BoundaryError(f"{names} sides must both be set or both unset")
            if (a.kind == "periodic") != (b.kind == "periodic"):
                raise BoundaryError(f"periodic boundaries must pair on {names}")

    @classmethod
    def uniform(cls, kind: str, dims: int = 1) -> "BoundarySpec":
        side = BCSide(kind)
        if dims == 1:
            return cls(left=side, right=side)
        return cls(left=side, right=side, bottom=side, top=side)


def _prim_to_cons_tuple(state: tuple, m: int, gamma: float | None) -> np.ndarray:
    if gamma is None:
        return np.asarray(state, dtype=np.float64).reshape(m)
    from .euler import prim_to_cons

    return prim_to_cons(np.asarray(state, dtype=np.float64), gamma)


def dmr_shock_abscissa(t: float, x0: float = 1.0 / 6.0) -> float:
    """Top-boundary shock location of the Mach-10 wedge at time t."""
    return x0 + (1.0 + 20.0 * t) / sqrt(3.0)


def _fill_axis_1d(vals, g, n, side_lo: BCSide, side_hi: BCSide, m, gamma):
    """Fill ghosts along the last axis; vals has shape (m, ..., n+2g)."""
    interior = vals[..., g : g + n]
    for side, is_lo in ((side_lo, True), (side_hi, False)):
        if side.kind == "periodic":
            if is_lo:
                vals[..., :g] = interior[..., n - g :]
            else:
                vals[..., g + n :] = interior[..., :g]
        elif side.kind == "zero_gradient":
            if is_lo:
                vals[..., :g] = interior[..., :1]
            else:
                vals[..., g + n :] = interior[..., -1:]
        elif side.kind == "reflective":
            mirror = interior[..., :g][..., ::-1] if is_lo else interior[..., -g:][..., ::-1]
            mirror = mirror.copy()
            if gamma is not None:
                mirror[1] = -mirror[1]  # wall-normal momentum along this axis
            if is_lo:
                vals[..., :g] = mirror
            else:
                vals[..., g + n :] = mirror
        elif side.kind == "fixed":
            cons = _prim_to_cons_tuple(side.state, m, gamma)
            target = vals[..., :g] if is_lo else vals[..., g + n :]
            target[...] = cons.reshape((m,) + (1,) * (target.ndim - 1))
        else:
            raise BoundaryError(f"kind {side.kind!r} not valid on this axis")


def fill_ghosts(
    field: ConservedField,
    grid: UniformGrid,
    bc: BoundarySpec,
    t: float = 0.0,
    gamma: float | None = None,
) -> ConservedField:
    """Populate all ghost layers in place; returns the field.

    In 2D the x sides are filled first so that the y fill sees consistent
    corner columns.  Filling is idempotent for time-independent kinds.
    """
    g = grid.n_ghost
    vals = field.values
    m = field.m
    if grid.dims == 1:
        _fill_axis_1d(vals, g, grid.n[0], bc.left, bc.right, m, gamma)
        return field

    nx, ny = grid.n
    if bc.bottom is None or bc.top is None:
        raise BoundaryError("2D fields need bottom/top boundaries")
    # x sides: operate on interior rows only; corner columns come from y fill
    _fill_axis_1d(vals[:, g : g + ny, :], g, nx, bc.left, bc.right, m, gamma)

    xs = grid.cell_centers(0, ghosts=True)
    for side, is_lo in ((bc.bottom, True), (bc.top, False)):
        rows = vals[:, :g, :] if is_lo else vals[:, g + ny :, :]
        if side.kind == "periodic":
            src = vals[:, g + ny - g : g + ny, :] if is_lo else vals[:, g : 2 * g, :]
            rows[...] = src
        elif side.kind == "zero_gradient":
            edge = vals[:, g : g + 1, :] if is_lo else vals[:, g + ny - 1 : g + ny, :]
            rows[...] = edge
        elif side.kind == "reflective":
            src = vals[:, g : 2 * g, :][:, ::-1, :] if is_lo else vals[:, g + ny - g : g + ny, :][:, ::-1, :]
            src = src.copy()
            src[2] = -src[2]  # wall-normal (y) momentum
            rows[...] = src
        elif side.kind == "fixed":
            cons = _prim_to_cons_tuple(side.state, m, gamma)
            rows[...] = cons.reshape(m, 1, 1)
        elif side.kind == "dmr_top":
            post = _prim_to_cons_tuple(side.state, m, gamma)
            pre = _prim_to_cons_tuple(side.state2, m, gamma)
            x_s = dmr_shock_abscissa(t, side.x0)
            sel = xs < x_s
            rows[...] = np.where(sel[None, None, :], post.reshape(m, 1, 1), pre.reshape(m, 1, 1))
        elif side.kind == "dmr_bottom":
            post = _prim_to_cons_tuple(side.state, m, gamma)
            mirror = vals[:, g : 2 * g, :][:, ::-1, :].copy()
            mirror[2] = -mirror[2]
            sel = xs < side.x0
            rows[...] = np.where(sel[None, None, :], post.reshape(m, 1, 1), mirror)
        else:
            raise BoundaryError(f"kind {side.kind!r} not valid on this axis")
    return field
