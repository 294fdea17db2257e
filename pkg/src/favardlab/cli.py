"""Command line interface.

Exit codes: 0 success, 2 precondition violation, 3 enumeration budget
exhausted.  Output goes to --out when given, stdout otherwise; --format
selects csv or json where both make sense.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import fourier, geometry, multiplicity, salem
from .errors import BudgetError, PreconditionError
from .experiments import (
    ExperimentConfig,
    decay_table_csv,
    run_decay,
    run_general,
)
from .selfsimilar import disc_set, resolve_system, theta_period


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def cmd_generate(args) -> int:
    ds = disc_set(resolve_system(args.system), args.n)
    if args.format == "json":
        _emit(_json_text({
            "level": ds.level,
            "radius": ds.radius,
            "centers": [[z.real, z.imag] for z in ds.centers],
        }), args.out)
    else:
        _emit(_csv_text("re,im", ((z.real, z.imag) for z in ds.centers)), args.out)
    return 0


def cmd_project(args) -> int:
    ds = disc_set(resolve_system(args.system), args.n)
    thetas = (np.arange(args.grid) + 0.5) * (math.pi / args.grid)
    rows = geometry.theta_scan_rows(ds, thetas)
    if args.format == "json":
        _emit(_json_text({"rows": [[t, v] for t, v in rows]}), args.out)
    else:
        _emit(_csv_text("theta,measure", rows), args.out)
    return 0


def cmd_favard(args) -> int:
    system = resolve_system(args.system)
    ds = disc_set(system, args.n)
    value = geometry.favard_quadrature(
        ds, args.nodes, symmetry_period=theta_period(system)
    )
    if args.format == "csv":
        _emit(_csv_text("n,nodes,favard", [(args.n, args.nodes, value)]), args.out)
    else:
        _emit(_json_text({"n": args.n, "nodes": args.nodes, "favard": value}), args.out)
    return 0


def cmd_buffon(args) -> int:
    ds = disc_set(resolve_system(args.system), args.n)
    est = geometry.buffon_mc(
        ds, args.samples, args.seed, offset_halfwidth=args.halfwidth
    )
    if args.format == "json":
        _emit(_json_text({
            "seed": est.seed, "samples": est.samples, "hits": est.hits,
            "estimate": est.favard_estimate, "stderr": est.standard_error,
        }), args.out)
    else:
        _emit(_csv_text(
            "seed,samples,hits,estimate,stderr",
            [(est.seed, est.samples, est.hits, est.favard_estimate, est.standard_error)],
        ), args.out)
    return 0


def cmd_multiplicity(args) -> int:
    system = resolve_system(args.system)
    ds = disc_set(system, args.n)
    report = multiplicity.estimate_chain_report(ds, args.theta, args.K)
    fstar = multiplicity.maximal_function(system, args.n, args.theta)
    astar = multiplicity.level_set(fstar, args.K).measure()
    in_e = astar <= args.K ** -3.0
    if args.format == "json":
        _emit(_json_text({
            "theta": args.theta, "n": args.n, "K": args.K,
            "measure_L": report.measure_L, "measure_AK": report.measure_AK,
            "l2norm": report.l2_norm, "duality_bound": report.duality_bound,
            "mass_split_lhs": report.mass_split_lhs, "naive_rhs": report.naive_rhs,
            "a_star_measure": astar, "in_E": bool(in_e),
        }), args.out)
    else:
        _emit(_csv_text(
            "theta,n,K,measure_L,measure_AK,l2norm,in_E",
            [(args.theta, args.n, args.K, report.measure_L,
              report.measure_AK, report.l2_norm, int(in_e))],
        ), args.out)
    return 0


def cmd_except_scan(args) -> int:
    system = resolve_system(args.system)
    scan = multiplicity.exceptional_set_scan(
        system, args.n, args.eps0, args.grid, K=args.K
    )
    if args.format == "csv":
        rows = zip(scan.theta_grid, scan.a_star_measures, scan.in_E.astype(int))
        _emit(_csv_text("theta,a_star_measure,in_E", rows), args.out)
    else:
        _emit(_json_text(scan.to_json()), args.out)
    return 0


def cmd_fourier_scan(args) -> int:
    if args.mode == "select":
        thetas = (np.arange(args.grid) + 0.5) * (math.pi / args.grid)
        out = fourier.sample_integral_scan(thetas, args.n, args.eps0)
        _emit(_json_text(out), args.out)
        return 0
    if args.mode == "integral":
        value = fourier.sample_integral(args.theta, args.n, args.m)
        _emit(_json_text({
            "theta": args.theta, "n": args.n, "m": args.m,
            "sample_integral": value,
        }), args.out)
        return 0
    spec = fourier.ProductSpec("theta", args.theta, 1, args.n)
    lo, hi = 3.0 ** (args.n - args.m), 3.0 ** args.n
    xs = np.linspace(lo, hi, args.points)
    rows = []
    for x in xs:
        pv = fourier.product_eval(spec, float(x))
        rows.append((float(x), pv.value.real, pv.value.imag, pv.log_magnitude))
    _emit(_csv_text("x,re,im,logmag", rows), args.out)
    return 0


def cmd_ssv(args) -> int:
    ell = args.ell if args.ell is not None else args.alpha * args.m
    if args.t_grid:
        t_lo, t_hi, t_count = args.t_grid
        ts = np.linspace(t_lo, t_hi, int(t_count))
        out = fourier.ssv_double_integral(ts, args.n, args.m, ell, args.depth)
        _emit(_json_text(out), args.out)
        return 0
    if args.weighted:
        report = fourier.ssv_weighted_integral(args.t, args.n, args.m, ell, args.depth)
    else:
        report = fourier.ssv_detect(args.t, args.n, args.m, ell, args.depth)
    if args.format == "csv":
        _emit(_csv_text(
            "cell_lo,cell_hi,status",
            ((a, b, s) for a, b, s in report.cells),
        ), args.out)
    else:
        _emit(_json_text(report.to_json()), args.out)
    return 0


def cmd_omega(args) -> int:
    step = args.step if args.step else 2.0 * math.pi * 3.0 ** (-(args.m + 1)) / 8.0
    scan = fourier.omega_scan(args.m, args.ell, step)
    if args.format == "csv":
        _emit(_csv_text("x,y", ((p[0], p[1]) for p in scan.omega_points)), args.out)
    else:
        _emit(_json_text(scan.to_json()), args.out)
    return 0


def cmd_salem(args) -> int:
    report = salem.ratio_experiment(
        args.instances, args.kmax, args.seed, args.scale,
        distribution=args.distribution,
    )
    _emit(_json_text(report.to_json()), args.out)
    return 0


def cmd_decay(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = ExperimentConfig.from_json(json.load(fh))
    else:
        config = ExperimentConfig(
            system=args.system,
            n_range=list(range(args.n_min, args.n_max + 1)),
            quadrature_nodes=args.nodes,
            seed=args.seed,
        )
    if args.system != "gasket":
        config.system = args.system
    result = run_general(config) if args.general else run_decay(config)
    if args.format == "csv":
        _emit(decay_table_csv(result.table), args.out)
    else:
        _emit(_json_text(result.to_json()), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="favardlab",
        description="Favard length laboratory for self-similar disc fractals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=4):
        p.add_argument("--system", default="gasket",
                       help="system name ('gasket') or JSON definition file")
        p.add_argument("--n", type=int, default=n_default, help="level")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("generate", help="emit disc-set centers")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("project", help="projected length scan over theta")
    common(p)
    p.add_argument("--grid", type=int, default=256, help="theta grid size on [0, pi)")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("favard", help="Favard length by quadrature")
    common(p)
    p.add_argument("--nodes", type=int, default=2000)
    p.set_defaults(func=cmd_favard)

    p = sub.add_parser("buffon", help="Buffon needle Monte Carlo")
    common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--halfwidth", type=float, default=1.0,
                   help="offset half-width R")
    p.set_defaults(func=cmd_buffon)

    p = sub.add_parser("multiplicity", help="multiplicity measures and norms")
    common(p, n_default=3)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--K", type=float, default=1.0, help="level-set threshold")
    p.set_defaults(func=cmd_multiplicity)

    p = sub.add_parser("except-scan", help="exceptional angle scan")
    common(p, n_default=4)
    p.add_argument("--eps0", type=float, default=0.05)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--K", type=float, default=None,
                   help="override K = N**eps0 for diagnostics")
    p.set_defaults(func=cmd_except_scan)

    p = sub.add_parser("fourier-scan", help="product traces and sample integrals")
    common(p, n_default=4)
    p.add_argument("--mode", choices=("trace", "integral", "select"), default="trace")
    p.add_argument("--theta", type=float, default=0.3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--grid", type=int, default=64, help="theta grid for select mode")
    p.add_argument("--eps0", type=float, default=0.05)
    p.set_defaults(func=cmd_fourier_scan)

    p = sub.add_parser("ssv", help="set-of-small-values bracket")
    common(p, n_default=4)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--ell", type=float, default=None,
                   help="threshold exponent; defaults to alpha*m")
    p.add_argument("--alpha", type=float, default=2.0,
                   help="threshold multiplier when --ell is omitted")
    p.add_argument("--depth", type=int, default=4, help="refinement depth")
    p.add_argument("--weighted", action="store_true",
                   help="also bracket the weighted head-product integral")
    p.add_argument("--t-grid", nargs=3, type=float, default=None,
                   metavar=("LO", "HI", "COUNT"),
                   help="accumulate the double integral over a t grid")
    p.set_defaults(func=cmd_ssv)

    p = sub.add_parser("omega", help="planar sublevel-set scan")
    common(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--ell", type=float, default=2.0)
    p.add_argument("--step", type=float, default=None,
                   help="grid step (default: finest allowed / 8 rule)")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("salem", help="exponential-sum energy ratio experiment")
    common(p)
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--kmax", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=100.0)
    p.add_argument("--distribution", choices=salem._DISTRIBUTIONS, default="uniform")
    p.set_defaults(func=cmd_salem)

    p = sub.add_parser("decay", help="Favard decay table and fits")
    common(p)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--general", action="store_true",
                   help="validated general pipeline with both fits")
    p.add_argument("--config", default=None,
                   help="JSON config file mirroring ExperimentConfig")
    p.set_defaults(func=cmd_decay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
