"""Command line entry point: ``sphqi <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .experiments import (ConfigError, Experiment, ExperimentConfig, run_approx, run_convergence,
                          run_multilevel, run_multilevel_compare, run_noise_compare, run_timing,
                          load_config, write_manifest)
from .geometry import random_points, save_points, spiral_points
from .kernels import Family, make_kernel, profile_for_order, spectrum_quadrature, spectrum_wendland


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    p.add_argument("--seed", type=int, help="base seed (overrides the config)")
    p.add_argument("--out", type=Path, help="output directory (overrides the config)")
    p.add_argument("--paper-scale", action="store_true",
                   help="use J=100 trials, 5e4 MMSE points and 1e5 L-infinity points")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sphqi", description="Spherical quasi-interpolation experiments.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-points", help="write a point set file")
    _common(p)
    p.add_argument("--kind", choices=["random", "spiral"], default="spiral")
    p.add_argument("-n", type=int, required=True)

    p = sub.add_parser("spectrum", help="Fourier-Legendre coefficients of a kernel")
    _common(p)
    p.add_argument("--kernel", choices=[f.value for f in Family if f is not Family.CUSTOM], default="gaussian")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--lmax", type=int, default=50)
    p.add_argument("--closed-form", action="store_true", help="Wendland order-2 closed form (extended precision)")

    for name, help_ in (("approx", "one quasi-interpolant at the last grid size"),
                        ("multilevel", "multilevel run with per-level log; --compare adds single-level rows"),
                        ("convergence", "single-level error versus N"),
                        ("noise-compare", "QMC-QI, MC-QI and filtered hyperinterpolation on noisy data"),
                        ("timing", "wall time of HI, FHI and QMC-QI")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "multilevel":
            p.add_argument("--compare", action="store_true")
    return ap


def _config(args, experiment: Experiment) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(experiment=experiment)
    over = {"experiment": experiment}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.out is not None:
        over["output"] = str(args.out)
    cfg = cfg.with_overrides(**over)
    return cfg.paper_scale() if args.paper_scale else cfg


def _out(args, cfg: ExperimentConfig | None) -> Path:
    out = args.out if args.out is not None else Path(cfg.output if cfg else "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"sphqi: error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "gen-points":
        seed = 0 if args.seed is None else args.seed
        pts = random_points(args.n, 2, seed) if args.kind == "random" else spiral_points(args.n)
        out = _out(args, None)
        path = out / f"{args.kind}_{args.n}.txt"
        save_points(pts, path, comment=f"{args.kind} points, N={args.n}")
        write_manifest(path, None, {"kind": args.kind, "n": args.n, "seed": seed if args.kind == "random" else None})
        print(path)
        return 0
    if args.command == "spectrum":
        out = _out(args, None)
        if args.closed_form:
            if args.kernel != "wendland" or args.order != 2:
                raise ConfigError("--closed-form needs --kernel wendland --order 2")
            spec = spectrum_wendland(args.lmax, args.rho, k=1)
        else:
            kern = make_kernel(profile_for_order(args.kernel, args.order), args.rho)
            spec = spectrum_quadrature(kern, args.lmax)
        path = out / f"spectrum_{args.kernel}_m{args.order}_rho{args.rho:g}.csv"
        spec.to_csv(path)
        write_manifest(path, None, {"kernel": args.kernel, "order": args.order, "rho": args.rho,
                                    "lmax": args.lmax, "method": spec.method.value})
        print(path)
        return 0

    experiment = Experiment.MULTILEVEL if args.command == "multilevel" else Experiment(args.command)
    cfg = _config(args, experiment)
    out = _out(args, cfg)
    if args.command == "approx":
        rep = run_approx(cfg, out)
        print(json.dumps({"N": rep.n, "L2err": rep.l2, "Linferr": rep.linf}))
    elif args.command == "multilevel":
        if args.compare:
            rows = run_multilevel_compare(cfg, out)
            for r in rows:
                print(",".join(map(str, r.row())))
        else:
            for row in run_multilevel(cfg, out):
                print(",".join(map(str, row)))
    elif args.command == "convergence":
        res = run_convergence(cfg, out)
        print(json.dumps({"slope_L2": res.slope_l2, "slope_MMSE": res.slope_mmse}))
    elif args.command == "noise-compare":
        res = run_noise_compare(cfg, out)
        for m, rows in res.items():
            print(m, " ".join(f"{r.n}:{r.l2:.4g}" for r in rows))
    elif args.command == "timing":
        for row in run_timing(cfg, out):
            print(",".join(map(str, row)))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
