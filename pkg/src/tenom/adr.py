"""Approximate dispersion relation of the configured schemes.

A single Fourier mode is placed on a periodic advection grid, the full
nonlinear semi-discretization is advanced one short Runge-Kutta step, and
the complex amplification of that mode yields the modified wavenumber: the
real part measures dispersion, the (nonpositive, for upwind-biased schemes)
imaginary part dissipation.  Because the schemes are nonlinear, the probe
amplitude is part of the configuration and is reported alongside results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stencils
from .euler import scalar_line_fluxes
from .schemes import SchemeConfig

__all__ = ["AdrConfig", "modified_wavenumber", "adr_sweep", "linear_symbol"]


@dataclass(frozen=True)
class AdrConfig:
    """Probe setup: grid size, mode amplitude, tiny CFL, unit wave speed."""

    n: int = 64
    amplitude: float = 1.0
    cfl: float = 1e-3
    speed: float = 1.0
    phis: tuple[float, ...] | None = None  # defaults to all resolvable modes

    def __post_init__(self):
        if self.cfl <= 0 or self.cfl > 0.5:
            raise ValueError("probe cfl must be small and positive")
        if self.n % 2 or self.n < 8:
            raise ValueError("probe grid must be even and not tiny")


def _mode_index(phi: float, n: int) -> int:
    k = phi * n / (2.0 * np.pi)
    k_int = int(round(k))
    if not 0 < k_int <= n // 2 or abs(k - k_int) > 1e-9:
        raise ValueError(f"wavenumber {phi} is not a resolvable mode of n={n}")
    return k_int


def modified_wavenumber(
    scheme: SchemeConfig, phi: float, cfg: AdrConfig = AdrConfig()
) -> tuple[float, float]:
    """(Re, Im) of the modified wavenumber at reduced wavenumber phi."""
    n = cfg.n
    k = _mode_index(phi, n)
    a = cfg.speed
    g = scheme.n_ghost
    dt_over_dx = cfg.cfl / a

    j = np.arange(n)
    u = cfg.amplitude * np.cos(phi * j)
    kernel = np.exp(-1j * phi * j)
    c0 = (u * kernel).sum() / n
    if abs(c0) < 1e-13 * max(1.0, cfg.amplitude):
        raise ValueError("probe mode amplitude below round-off")

    def tendency(v: np.ndarray) -> np.ndarray:
        ext = np.concatenate([v[n - g :], v, v[:g]])
        flux = scalar_line_fluxes(ext, a, scheme, g)
        return -(flux[1:] - flux[:-1]) / 1.0  # dx folded into dt_over_dx

    dt = dt_over_dx  # with dx = 1
    u1 = u + dt * tendency(u)
    u2 = 0.75 * u + 0.25 * (u1 + dt * tendency(u1))
    u_next = (u + 2.0 * (u2 + dt * tendency(u2))) / 3.0

    c1 = (u_next * kernel).sum() / n
    if abs(c1) == 0.0:
        raise ValueError("probe mode vanished within one step")
    value = 1j * np.log(c1 / c0) / cfg.cfl
    return float(value.real), float(value.imag)


def adr_sweep(scheme: SchemeConfig, cfg: AdrConfig = AdrConfig()) -> np.ndarray:
    """Rows (phi, Re, Im) over a monotone wavenumber grid up to pi."""
    if cfg.phis is not None:
        phis = sorted(cfg.phis)
    else:
        phis = [2.0 * np.pi * k / cfg.n for k in range(1, cfg.n // 2 + 1)]
    rows = np.empty((len(phis), 3))
    for i, phi in enumerate(phis):
        re, im = modified_wavenumber(scheme, phi, cfg)
        rows[i] = (phi, re, im)
    return rows


def linear_symbol(order: int, phi: np.ndarray) -> np.ndarray:
    """Analytic modified wavenumber of the background linear scheme."""
    phi = np.asarray(phi, dtype=np.float64)
    coeffs = stencils.linear_coefficients(order)
    offsets = np.array(stencils.window_offsets(order))
    s = (coeffs * np.exp(1j * np.outer(phi, offsets))).sum(axis=-1)
    return -1j * (1.0 - np.exp(-1j * phi)) * s
