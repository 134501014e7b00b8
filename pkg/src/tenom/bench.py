"""Benchmark harness: execute registry cases, produce reference profiles,
compute error norms and convergence tables, and write structured outputs.

Profiles are CSV with a header row and 17-significant-digit decimals; 2D
runs additionally emit a plain density matrix for contouring.  Run metadata
(steps, wall time, norms, positivity-fallback activations, conservation
defect) is written as JSON.  Fine-grid reference profiles are cached under
the directory named by the TENOM_CACHE_DIR environment variable (default
~/.cache/tenom) with atomic renames, keyed by case and recipe.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cases import CaseSpec, get_case, scalar_exact
from .euler import cons_to_prim
from .grids import ConservedField, UniformGrid
from .schemes import SchemeConfig
from .stepper import SolveResult, TimeConfig, solve

__all__ = [
    "CACHE_ENV",
    "RunReport",
    "error_norms",
    "make_reference",
    "reference_profile",
    "run_case",
    "convergence_table",
]

CACHE_ENV = "TENOM_CACHE_DIR"
REFERENCE_SCHEME = "weno-js5"


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    path = Path(root) if root else Path.home() / ".cache" / "tenom"
    path.mkdir(parents=True, exist_ok=True)
    return path


@dataclass
class RunReport:
    """Everything a benchmark run produced, JSON-serializable."""

    case: str
    scheme: str
    resolution: tuple[int, ...]
    t_end: float
    cfl: float
    steps: int
    wall_time: float
    norms: dict | None = None
    fallback_activations: int = 0
    mass_defect: float | None = None
    files: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        data = asdict(self)
        data["resolution"] = list(self.resolution)
        return json.dumps(data, indent=2)


def error_norms(numerical: np.ndarray, reference: np.ndarray) -> tuple[float, float, float]:
    """(L1, L2, Linf) of the pointwise error over interior cells."""
    num = np.asarray(numerical, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if num.shape != ref.shape:
        raise ValueError(f"shape mismatch {num.shape} vs {ref.shape}")
    err = np.abs(num - ref)
    n = err.size
    return float(err.sum() / n), float(np.sqrt((err**2).sum() / n)), float(err.max())


def _solve_case(
    case: CaseSpec,
    scheme: SchemeConfig,
    cfl: float = 0.4,
    dt_override: float | None = None,
    max_steps: int = 10_000_000,
) -> tuple[UniformGrid, ConservedField, SolveResult]:
    grid = UniformGrid.for_domain(case.domain, case.resolution, scheme.n_ghost)
    fld = ConservedField.allocate(grid, case.m)
    fld.interior(grid)[...] = case.init(grid)
    cfg = TimeConfig(t_end=case.t_end, cfl=cfl, dt_override=dt_override, max_steps=max_steps)
    result = solve(
        fld,
        grid,
        case.bc,
        scheme,
        cfg,
        flux_kind=case.flux_kind,
        gamma=case.gamma,
        wave_speed=case.wave_speed,
        source=case.source,
        track_conservation=case.gamma is not None,
    )
    return grid, fld, result


def make_reference(case: CaseSpec, force: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Fine-grid reference profile (x, primitive components) of a case.

    Runs the classical fifth-order scheme at the recipe resolution with the
    case's own flux kind, then caches the primitive profile.  Corrupt cache
    entries are recomputed.
    """
    recipe = case.reference
    if recipe is None or recipe.kind != "fine_grid":
        raise ValueError(f"case {case.name!r} has no fine-grid reference recipe")
    key = f"{case.name}-{REFERENCE_SCHEME}-n{recipe.n}-t{case.t_end:g}-{case.flux_kind}"
    path = cache_dir() / f"{key}.npz"
    if path.exists() and not force:
        try:
            data = np.load(path)
            return data["x"], data["prim"]
        except Exception:
            path.unlink(missing_ok=True)
    fine = get_case(case.name, resolution=(recipe.n,), t_end=case.t_end)
    scheme = SchemeConfig.from_name(REFERENCE_SCHEME)
    grid, fld, _ = _solve_case(fine, scheme)
    x = grid.cell_centers(0)
    prim = cons_to_prim(fld.interior(grid), fine.gamma)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, x=x, prim=prim)
    os.replace(tmp, path)
    return x, prim


def reference_profile(case: CaseSpec, grid: UniformGrid) -> np.ndarray | None:
    """Reference primitives restricted onto the run grid (None if no recipe)."""
    if case.reference is None:
        return None
    x = grid.cell_centers(0)
    if case.reference.kind == "exact":
        return scalar_exact(case, grid, case.t_end)
    ref_x, ref_prim = make_reference(case)
    return np.stack([np.interp(x, ref_x, comp) for comp in ref_prim])


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = np.column_stack(columns)
    with path.open("w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _write_outputs(case, grid, fld, out_dir: Path, scheme_name: str) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{case.name}-{scheme_name}"
    files = []
    interior = fld.interior(grid)
    if case.dims == 1:
        x = grid.cell_centers(0)
        path = out_dir / f"{stem}.csv"
        if case.gamma is None:
            _write_csv(path, ["x", "u"], [x, interior[0]])
        else:
            prim = cons_to_prim(interior, case.gamma)
            _write_csv(path, ["x", "rho", "u", "p"], [x, prim[0], prim[1], prim[2]])
        files.append(str(path))
    else:
        prim = cons_to_prim(interior, case.gamma)
        x = grid.cell_centers(0)
        y = grid.cell_centers(1)
        X, Y = np.meshgrid(x, y)
        path = out_dir / f"{stem}.csv"
        _write_csv(
            path,
            ["x", "y", "rho", "u", "v", "p"],
            [X.ravel(), Y.ravel(), prim[0].ravel(), prim[1].ravel(), prim[2].ravel(), prim[3].ravel()],
        )
        files.append(str(path))
        mat = out_dir / f"{stem}-rho.dat"
        np.savetxt(mat, prim[0], fmt="%.17g")
        files.append(str(mat))
    return files


def run_case(
    case_name: str | CaseSpec,
    scheme: str | SchemeConfig,
    resolution=None,
    t_end: float | None = None,
    cfl: float = 0.4,
    dt_override: float | None = None,
    out_dir: str | Path | None = None,
    **scheme_overrides,
) -> RunReport:
    """Execute one benchmark run; write outputs when out_dir is given."""
    if isinstance(case_name, CaseSpec):
        case = case_name
        if resolution is not None or t_end is not None:
            case = get_case(
                case.name,
                resolution=resolution or case.resolution,
                t_end=t_end if t_end is not None else case.t_end,
            )
    else:
        case = get_case(case_name, resolution=resolution, t_end=t_end)
    cfg = scheme if isinstance(scheme, SchemeConfig) else SchemeConfig.from_name(
        scheme, **scheme_overrides
    )
    start = time.perf_counter()
    grid, fld, result = _solve_case(case, cfg, cfl=cfl, dt_override=dt_override)
    wall = time.perf_counter() - start

    norms = None
    ref = reference_profile(case, grid)
    if ref is not None:
        if case.gamma is None:
            l1, l2, linf = error_norms(fld.interior(grid)[0], ref[0])
        else:
            prim = cons_to_prim(fld.interior(grid), case.gamma)
            l1, l2, linf = error_norms(prim[0], ref[0])
        norms = {"l1": l1, "l2": l2, "linf": linf}

    report = RunReport(
        case=case.name,
        scheme=cfg.name,
        resolution=case.resolution,
        t_end=case.t_end,
        cfl=cfl,
        steps=result.steps,
        wall_time=wall,
        norms=norms,
        fallback_activations=result.fallback_activations,
        mass_defect=result.mass_defect if case.gamma is not None else None,
    )
    if out_dir is not None:
        out = Path(out_dir)
        report.files = _write_outputs(case, grid, fld, out, cfg.name)
        rp = out / f"{case.name}-{cfg.name}-report.json"
        rp.write_text(report.to_json())
        report.files.append(str(rp))
    return report


def convergence_table(
    case_name: str,
    scheme: str | SchemeConfig,
    n_list=(32, 64, 128, 256, 512),
    cfl: float = 0.4,
) -> list[dict]:
    """Grid-refinement study against the exact reference.

    The step size follows dt = cfl dx (dx/dx0)^((K-3)/3) so the third-order
    time integration refines as fast as the order-K spatial scheme and the
    observed order reflects the reconstruction.
    """
    cfg = scheme if isinstance(scheme, SchemeConfig) else SchemeConfig.from_name(scheme)
    base = get_case(case_name)
    if base.reference is None or base.reference.kind != "exact":
        raise ValueError("convergence study needs a case with an exact reference")
    n_list = sorted(n_list)
    if len(n_list) < 2:
        raise ValueError("need at least two resolutions")
    lo, hi = base.domain[0]
    dx0 = (hi - lo) / n_list[0]
    rows: list[dict] = []
    prev_err = None
    for n in n_list:
        case = get_case(case_name, resolution=(n,))
        dx = (hi - lo) / n
        dt = cfl * dx * (dx / dx0) ** ((cfg.order - 3) / 3.0)
        start = time.perf_counter()
        grid, fld, _ = _solve_case(case, cfg, cfl=cfl, dt_override=dt)
        secs = time.perf_counter() - start
        exact = scalar_exact(case, grid, case.t_end)
        _, _, linf = error_norms(fld.interior(grid)[0], exact[0])
        order = float(np.log2(prev_err / linf)) if prev_err and linf > 0 else None
        rows.append({"n": n, "linf": linf, "order": order, "seconds": secs})
        prev_err = linf
    return rows
