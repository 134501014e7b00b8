"""Time advancement: CFL-controlled three-stage SSP Runge-Kutta with an
optional gravity source and a first-order positivity fallback.

The right-hand side is the conservative flux-difference divergence assembled
from the characteristic interface fluxes (dimension by dimension in 2D).  If
a forward-Euler substep would produce a cell with nonpositive density or
pressure, the faces of the offending cells are recomputed with a two-point
Lax-Friedrichs flux and the substep is rebuilt; activations are counted and
reported.  Boundary mass fluxes can be accumulated with the exact stage
weights so that conservation defects are measurable on open domains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import euler
from .euler import PositivityError
from .grids import BoundarySpec, ConservedField, UniformGrid, fill_ghosts
from .schemes import SchemeConfig

__all__ = [
    "TimeConfig",
    "SourceSpec",
    "InstabilityError",
    "compute_dt",
    "rhs",
    "ssp_rk3_step",
    "solve",
    "SolveResult",
]

_STAGE_WEIGHTS = (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0)
_MAX_PATCH_ROUNDS = 25


@dataclass(frozen=True)
class TimeConfig:
    """Step-size control: fixed CFL, clamped to land exactly on t_end."""

    t_end: float
    cfl: float = 0.4
    max_steps: int = 10_000_000
    dt_override: float | None = None


@dataclass(frozen=True)
class SourceSpec:
    """Volume source: none, or constant gravity along one axis."""

    kind: str = "none"  # "none" | "gravity"
    g: float = 1.0
    axis: int = 1

    def __post_init__(self):
        if self.kind not in ("none", "gravity"):
            raise ValueError(f"unknown source kind {self.kind!r}")


class InstabilityError(RuntimeError):
    """The solve produced a state that could not be repaired."""

    def __init__(self, message: str, step: int, t: float, location=None):
        super().__init__(message)
        self.step = step
        self.t = t
        self.location = location


@dataclass
class SolveResult:
    field: ConservedField
    t: float
    steps: int
    fallback_activations: int = 0
    boundary_outflux: float = 0.0
    initial_mass: float = 0.0
    final_mass: float = 0.0

    @property
    def mass_defect(self) -> float:
        """Conservation defect relative to the initial mass."""
        if self.initial_mass == 0.0:
            return 0.0
        return abs(self.final_mass - self.initial_mass + self.boundary_outflux) / abs(
            self.initial_mass
        )


def compute_dt(
    field: ConservedField,
    grid: UniformGrid,
    cfg: TimeConfig,
    gamma: float | None = None,
    wave_speed: float = 1.0,
) -> float:
    """CFL step from the fastest signal per cell and axis."""
    if cfg.dt_override is not None:
        return cfg.dt_override
    if gamma is None:
        speed = abs(wave_speed)
        if speed == 0.0:
            raise ValueError("zero wave speed has no CFL step")
        return cfg.cfl * min(grid.dx) / speed
    interior = field.interior(grid)
    prim = euler.cons_to_prim(interior, gamma)
    c = euler.sound_speed(prim, gamma)
    rates = [(np.abs(prim[1 + ax]) + c) / grid.dx[ax] for ax in range(grid.dims)]
    rate = np.maximum.reduce(rates) if len(rates) > 1 else rates[0]
    peak = float(rate.max())
    if not np.isfinite(peak) or peak <= 0.0:
        raise InstabilityError("non-finite signal speeds", step=-1, t=float("nan"))
    return cfg.cfl / peak


def _axis_fluxes(
    values: np.ndarray,
    grid: UniformGrid,
    scheme: SchemeConfig,
    flux_kind: str,
    gamma: float | None,
    wave_speed: float,
) -> list[np.ndarray]:
    """Interface fluxes per axis from a fully ghosted state array."""
    g = grid.n_ghost
    if grid.dims == 1:
        if gamma is None:
            fx = euler.scalar_line_fluxes(values[0], wave_speed, scheme, g)[None]
        else:
            fx = euler.interface_fluxes_lines(values[:, None, :], gamma, scheme, flux_kind)[:, 0]
        return [fx]
    if gamma is None:
        raise NotImplementedError("2D scalar advection is not wired up")
    nx, ny = grid.n
    fx = euler.interface_fluxes_lines(values[:, g : g + ny, :], gamma, scheme, flux_kind)
    cols = np.ascontiguousarray(values[:, :, g : g + nx].swapaxes(1, 2))
    cols = cols[[0, 2, 1, 3]]  # y sweep: swap momentum components
    fy = euler.interface_fluxes_lines(cols, gamma, scheme, flux_kind)
    fy = fy[[0, 2, 1, 3]].swapaxes(1, 2)  # back to (m, ny+1, nx)
    return [fx, fy]


def _divergence(fluxes: list[np.ndarray], grid: UniformGrid) -> np.ndarray:
    if grid.dims == 1:
        return -(fluxes[0][:, 1:] - fluxes[0][:, :-1]) / grid.dx[0]
    fx, fy = fluxes
    return (
        -(fx[:, :, 1:] - fx[:, :, :-1]) / grid.dx[0]
        - (fy[:, 1:, :] - fy[:, :-1, :]) / grid.dx[1]
    )


def _source_terms(interior: np.ndarray, source: SourceSpec) -> np.ndarray | None:
    if source.kind == "none":
        return None
    rho = interior[0]
    mom = interior[1 + source.axis]
    out = np.zeros_like(interior)
    out[1 + source.axis] = source.g * rho
    out[-1] = source.g * mom
    return out


def rhs(
    field: ConservedField,
    grid: UniformGrid,
    bc: BoundarySpec,
    scheme: SchemeConfig,
    flux_kind: str = "rusanov",
    source: SourceSpec = SourceSpec(),
    t: float = 0.0,
    gamma: float | None = None,
    wave_speed: float = 1.0,
) -> np.ndarray:
    """Flux-difference tendency (plus source) on the interior cells."""
    fill_ghosts(field, grid, bc, t=t, gamma=gamma)
    fluxes = _axis_fluxes(field.values, grid, scheme, flux_kind, gamma, wave_speed)
    tend = _divergence(fluxes, grid)
    src = _source_terms(field.interior(grid), source)
    if src is not None:
        tend += src
    return tend


def ssp_rk3_step(u: np.ndarray, dt: float, rhs_fn) -> np.ndarray:
    """One three-stage strong-stability-preserving step of u' = rhs(u)."""
    u = np.asarray(u)
    u1 = u + dt * rhs_fn(u)
    u2 = 0.75 * u + 0.25 * (u1 + dt * rhs_fn(u1))
    return (u + 2.0 * (u2 + dt * rhs_fn(u2))) / 3.0


def _boundary_mass_outflux(fluxes: list[np.ndarray], grid: UniformGrid) -> float:
    if grid.dims == 1:
        return float(fluxes[0][0, -1] - fluxes[0][0, 0])
    fx, fy = fluxes
    return float(
        (fx[0, :, -1] - fx[0, :, 0]).sum() * grid.dx[1]
        + (fy[0, -1, :] - fy[0, 0, :]).sum() * grid.dx[0]
    )


class _EulerStage:
    """One forward-Euler substep with positivity repair."""

    def __init__(self, grid, bc, scheme, flux_kind, gamma, source):
        self.grid = grid
        self.bc = bc
        self.scheme = scheme
        self.flux_kind = flux_kind
        self.gamma = gamma
        self.source = source
        self.patched_faces = 0

    def _positivity_mask(self, u: np.ndarray) -> np.ndarray:
        rho = u[0]
        kinetic = 0.5 * (u[1:-1] ** 2).sum(axis=0)
        internal = u[-1] * rho - kinetic  # rho * (rho e); sign-safe for rho > 0
        return (rho <= 0.0) | (internal <= 0.0) | ~np.isfinite(rho) | ~np.isfinite(internal)

    def _patch_faces(self, ext: np.ndarray, fluxes, bad: np.ndarray) -> int:
        g = self.grid.n_ghost
        gamma = self.gamma
        count = 0
        if self.grid.dims == 1:
            (idx,) = np.nonzero(bad)
            faces = np.unique(np.concatenate([idx, idx + 1]))
            for f in faces:
                fluxes[0][:, f] = euler.lax_friedrichs_flux(
                    ext[:, g + f - 1], ext[:, g + f], gamma
                )
            return faces.size
        iy, ix = np.nonzero(bad)
        fx, fy = fluxes
        x_faces = set(zip(iy.tolist(), ix.tolist())) | set(zip(iy.tolist(), (ix + 1).tolist()))
        for (jy, jf) in x_faces:
            fx[:, jy, jf] = euler.lax_friedrichs_flux(
                ext[:, g + jy, g + jf - 1], ext[:, g + jy, g + jf], gamma
            )
        y_faces = set(zip(iy.tolist(), ix.tolist())) | set(zip((iy + 1).tolist(), ix.tolist()))
        for (jf, jx) in y_faces:
            swap = [0, 2, 1, 3]
            uL = ext[swap, g + jf - 1, g + jx]
            uR = ext[swap, g + jf, g + jx]
            fy[:, jf, jx] = euler.lax_friedrichs_flux(uL, uR, gamma)[swap]
        return len(x_faces) + len(y_faces)

    def forward_euler(self, ext_field: ConservedField, t: float, dt: float, step: int):
        """Return (new interior, fluxes) with positivity enforced."""
        grid = self.grid
        fill_ghosts(ext_field, grid, self.bc, t=t, gamma=self.gamma)
        ext = ext_field.values
        fluxes = _axis_fluxes(ext, grid, self.scheme, self.flux_kind, self.gamma, 1.0)
        interior = ext_field.interior(grid)
        for _ in range(_MAX_PATCH_ROUNDS):
            tend = _divergence(fluxes, grid)
            src = _source_terms(interior, self.source)
            if src is not None:
                tend += src
            unew = interior + dt * tend
            bad = self._positivity_mask(unew)
            if not bad.any():
                return unew, fluxes
            self.patched_faces += self._patch_faces(ext, fluxes, bad)
        where = np.argwhere(self._positivity_mask(unew))[:5].tolist()
        raise InstabilityError(
            f"positivity unrecoverable at cells {where}", step=step, t=t, location=where
        )


def solve(
    field: ConservedField,
    grid: UniformGrid,
    bc: BoundarySpec,
    scheme: SchemeConfig,
    time_cfg: TimeConfig,
    flux_kind: str = "rusanov",
    gamma: float | None = None,
    wave_speed: float = 1.0,
    source: SourceSpec = SourceSpec(),
    track_conservation: bool = False,
) -> SolveResult:
    """Advance the field to t_end; the field is updated in place."""
    if scheme.limiter == "mp" and time_cfg.cfl > scheme.mp.max_cfl + 1e-12:
        raise ValueError(
            f"cfl={time_cfg.cfl} exceeds the monotone limit {scheme.mp.max_cfl:.4f} "
            "of the configured clamp"
        )
    t = 0.0
    steps = 0
    outflux = 0.0
    vol = grid.cell_volume
    mass0 = float(field.interior(grid)[0].sum()) * vol if gamma is not None else 0.0

    if gamma is None:
        # Scalar advection: no positivity concept, plain stages.
        def stage(u_int, t_stage):
            field.interior(grid)[...] = u_int
            fill_ghosts(field, grid, bc, t=t_stage, gamma=None)
            fl = _axis_fluxes(field.values, grid, scheme, "rusanov", None, wave_speed)
            return u_int + dt * _divergence(fl, grid)

        while t < time_cfg.t_end - 1e-14:
            dt = compute_dt(field, grid, time_cfg, None, wave_speed)
            dt = min(dt, time_cfg.t_end - t)
            u0 = field.interior(grid).copy()
            u1 = stage(u0, t)
            u2 = 0.75 * u0 + 0.25 * stage(u1, t + dt)
            unew = (u0 + 2.0 * stage(u2, t + 0.5 * dt)) / 3.0
            field.interior(grid)[...] = unew
            t += dt
            steps += 1
            if steps > time_cfg.max_steps:
                raise InstabilityError("max_steps exceeded", step=steps, t=t)
        if not field.check_finite():
            raise InstabilityError("non-finite state", step=steps, t=t)
        return SolveResult(field=field, t=t, steps=steps)

    runner = _EulerStage(grid, bc, scheme, flux_kind, gamma, source)
    while t < time_cfg.t_end - 1e-14:
        dt = compute_dt(field, grid, time_cfg, gamma)
        dt = min(dt, time_cfg.t_end - t)
        u0 = field.interior(grid).copy()
        try:
            u1, fl0 = runner.forward_euler(field, t, dt, steps)
            field.interior(grid)[...] = u1
            ufe, fl1 = runner.forward_euler(field, t + dt, dt, steps)
            u2 = 0.75 * u0 + 0.25 * ufe
            field.interior(grid)[...] = u2
            ufe, fl2 = runner.forward_euler(field, t + 0.5 * dt, dt, steps)
            unew = (u0 + 2.0 * ufe) / 3.0
        except PositivityError as exc:
            raise InstabilityError(str(exc), step=steps, t=t) from exc
        field.interior(grid)[...] = unew
        if track_conservation:
            for w, fl in zip(_STAGE_WEIGHTS, (fl0, fl1, fl2)):
                outflux += w * dt * _boundary_mass_outflux(fl, grid)
        t += dt
        steps += 1
        if steps > time_cfg.max_steps:
            raise InstabilityError("max_steps exceeded", step=steps, t=t)
        if not np.isfinite(unew).all():
            loc = np.argwhere(~np.isfinite(unew))[:5].tolist()
            raise InstabilityError("non-finite state", step=steps, t=t, location=loc)

    return SolveResult(
        field=field,
        t=t,
        steps=steps,
        fallback_activations=runner.patched_faces,
        boundary_outflux=outflux,
        initial_mass=mass0,
        final_mass=float(field.interior(grid)[0].sum()) * vol,
    )
