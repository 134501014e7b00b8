"""Command-line interface: run benchmark cases, sweep the dispersion
relation, and produce convergence tables.

Exit codes: 0 on success; 2 with a machine-readable JSON line on stderr when
a solve goes unstable; 1 for usage errors such as unknown names.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .adr import AdrConfig, adr_sweep
from .cases import case_registry
from .limiters import MPParams
from .schemes import SCHEME_NAMES, SchemeConfig
from .stepper import InstabilityError


def _scheme_from_args(args) -> SchemeConfig:
    name = args.scheme
    limiter = getattr(args, "limiter", None)
    if limiter:
        fam = name.split("-")[0]
        if not fam.endswith("m"):
            raise ValueError(f"scheme {name!r} does not take a limiter")
        name = f"{fam}-{limiter}"
    overrides = {}
    ct = getattr(args, "ct", None)
    if ct:
        if ct == "adaptive":
            overrides["ct_mode"] = "adaptive"
        else:
            overrides["ct_mode"] = "fixed"
            overrides["ct_value"] = float(ct)
    mp_beta = getattr(args, "mp_beta", None)
    mp_curv = getattr(args, "mp_curv", None)
    if mp_beta is not None or mp_curv is not None:
        overrides["mp"] = MPParams(
            beta=mp_beta if mp_beta is not None else 4.0, curvature=mp_curv or "m4"
        )
    return SchemeConfig.from_name(name, **overrides)


def _cmd_run(args) -> int:
    cfg = _scheme_from_args(args)
    resolution = None
    if args.nx is not None:
        resolution = (args.nx,) if args.ny is None else (args.nx, args.ny)
    try:
        report = bench.run_case(
            args.case,
            cfg,
            resolution=resolution,
            t_end=args.t_end,
            cfl=args.cfl,
            dt_override=args.dt_override,
            out_dir=args.out,
        )
    except InstabilityError as exc:
        err = {"error": "instability", "step": exc.step, "t": exc.t, "location": exc.location}
        print(json.dumps(err), file=sys.stderr)
        return 2
    print(report.to_json())
    return 0


def _cmd_adr(args) -> int:
    cfg = _scheme_from_args(args)
    probe = AdrConfig(amplitude=args.amplitude, cfl=args.cfl)
    rows = adr_sweep(cfg, probe)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write(
            f"# scheme={cfg.name} amplitude={probe.amplitude:g} cfl={probe.cfl:g} n={probe.n}\n"
        )
        fh.write("phi,re_phi,im_phi\n")
        for phi, re, im in rows:
            fh.write(f"{phi:.17g},{re:.17g},{im:.17g}\n")
    print(f"wrote {out} ({rows.shape[0]} samples)")
    return 0


def _cmd_converge(args) -> int:
    cfg = _scheme_from_args(args)
    n_list = [32 * 2**j for j in range(args.levels)]
    rows = bench.convergence_table(args.case, cfg, n_list=n_list, cfl=args.cfl)
    print(f"{'N':>6} {'Linf':>14} {'order':>7} {'seconds':>9}")
    for row in rows:
        order = f"{row['order']:7.3f}" if row["order"] is not None else "      -"
        print(f"{row['n']:6d} {row['linf']:14.6e} {order} {row['seconds']:9.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    known_cases = ", ".join(c.name for c in case_registry())
    parser = argparse.ArgumentParser(
        prog="tenom",
        description="Shock-capturing scheme benchmarks, spectral analysis, and convergence studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help=f"run a benchmark case (cases: {known_cases})")
    run.add_argument("--case", required=True)
    run.add_argument("--scheme", required=True, help=f"one of: {', '.join(SCHEME_NAMES)}")
    run.add_argument("--nx", type=int)
    run.add_argument("--ny", type=int)
    run.add_argument("--t-end", dest="t_end", type=float)
    run.add_argument("--cfl", type=float, default=0.4)
    run.add_argument("--dt-override", dest="dt_override", type=float)
    run.add_argument("--limiter", choices=("va", "tvd5", "mp"))
    run.add_argument("--ct", help="fixed cut-off value or 'adaptive'")
    run.add_argument("--mp-beta", dest="mp_beta", type=float)
    run.add_argument("--mp-curv", dest="mp_curv", choices=("m4", "mm"))
    run.add_argument("--out", default="out")
    run.set_defaults(func=_cmd_run)

    adr = sub.add_parser("adr", help="modified-wavenumber sweep of a scheme")
    adr.add_argument("--scheme", required=True)
    adr.add_argument("--amplitude", type=float, default=1.0)
    adr.add_argument("--cfl", type=float, default=1e-3)
    adr.add_argument("--limiter", choices=("va", "tvd5", "mp"))
    adr.add_argument("--ct", help="fixed cut-off value or 'adaptive'")
    adr.add_argument("--out", required=True)
    adr.set_defaults(func=_cmd_adr)

    conv = sub.add_parser("converge", help="grid-refinement study on an exact-reference case")
    conv.add_argument("--case", default="gauss")
    conv.add_argument("--scheme", required=True)
    conv.add_argument("--levels", type=int, default=5)
    conv.add_argument("--cfl", type=float, default=0.4)
    conv.set_defaults(func=_cmd_converge)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
