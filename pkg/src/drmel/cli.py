"""Command line front end: estimate, simulate, kde, and study subcommands."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .basis import BasisSpec
from .errors import DrmError, InvalidArgumentError
from .estimators import drm_quantile_estimate
from .fit import SolverOptions, TwoSampleData, fit_mele
from .nonparametric import (
    Ecdf,
    KdeModel,
    empirical_quantile,
    empirical_quantile_avar,
    kde_density,
    silverman_bandwidth,
)
from .parametric import fit_parametric, parametric_quantile
from .pipeline import ColumnSpec, ResampleStudy, ingest_csv, run_resample_study
from .simulate import (
    METHOD_DRM,
    METHOD_EMPIRICAL,
    Exponential,
    Normal,
    Scenario,
    run_scenario,
)


def _parse_levels(text: str):
    return tuple(float(v) for v in text.split(",") if v)


def _load_two_samples(args):
    spec = ColumnSpec(args.value_col, args.group_col, args.transform)
    populations, report = ingest_csv(args.data, spec)
    for label in (args.x0, args.x1):
        if label not in populations:
            raise InvalidArgumentError(f"group {label!r} not found in {args.data}")
    if report.rows_dropped:
        print(f"# dropped {report.rows_dropped} of {report.rows_in} rows", file=sys.stderr)
    return populations[args.x0], populations[args.x1]


def _cmd_estimate(args) -> int:
    x0, x1 = _load_two_samples(args)
    data = TwoSampleData(x0=x0, x1=x1)
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        out.write("level,method,point,std_error,ci_low,ci_high\n")
        if args.method == "drm":
            spec = BasisSpec.from_name(args.basis)
            fit = fit_mele(data, spec, SolverOptions(tol_grad=args.tol_grad, max_iter=args.max_iter))
            for p in _parse_levels(args.levels):
                est = drm_quantile_estimate(fit, data, spec, p, args.ci_level)
                out.write(
                    f"{p:g},drm,{est.point:.10g},{est.std_error:.10g},"
                    f"{est.ci_low:.10g},{est.ci_high:.10g}\n"
                )
        elif args.method == "empirical":
            from scipy.stats import norm as _norm

            ecdf = Ecdf.from_sample(x1)
            kde = KdeModel(sample=x1, bandwidth=silverman_bandwidth(x1))
            z = float(_norm.ppf(0.5 + args.ci_level / 2.0))
            for p in _parse_levels(args.levels):
                point = empirical_quantile(ecdf, p)
                g = kde_density(kde, point)
                se = float(np.sqrt(empirical_quantile_avar(p, g) / x1.size))
                out.write(
                    f"{p:g},empirical,{point:.10g},{se:.10g},"
                    f"{point - z * se:.10g},{point + z * se:.10g}\n"
                )
        else:
            family = fit_parametric(data, args.method)
            for p in _parse_levels(args.levels):
                est = parametric_quantile(family, p, args.ci_level)
                out.write(
                    f"{p:g},{est.method},{est.point:.10g},{est.std_error:.10g},"
                    f"{est.ci_low:.10g},{est.ci_high:.10g}\n"
                )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _generator_from_json(obj):
    dist = obj.get("dist")
    if dist == "normal":
        return Normal(mu=float(obj["mu"]), sigma=float(obj["sigma"]))
    if dist == "exponential":
        return Exponential(mean=float(obj["mean"]))
    raise InvalidArgumentError(f"unknown generator kind {dist!r}")


def scenario_from_json(obj) -> Scenario:
    return Scenario(
        generator0=_generator_from_json(obj["generator0"]),
        generator1=_generator_from_json(obj["generator1"]),
        n1=int(obj["n1"]),
        k=float(obj["k"]),
        basis=BasisSpec.from_name(obj.get("basis", "quadratic")),
        levels=tuple(float(p) for p in obj.get("levels", [0.5])),
        reps=int(obj.get("reps", 1000)),
        seed=int(obj.get("seed", 0)),
        methods=tuple(obj.get("methods", [METHOD_DRM, METHOD_EMPIRICAL])),
        scenario_id=str(obj.get("scenario_id", "scenario")),
    )


def _cmd_simulate(args) -> int:
    with open(args.scenario) as fh:
        scenario = scenario_from_json(json.load(fh))
    table = run_scenario(scenario, workers=args.workers)
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        table.to_csv(out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_kde(args) -> int:
    spec = ColumnSpec(args.value_col, args.group_col, args.transform)
    populations, _ = ingest_csv(args.data, spec)
    if args.group not in populations:
        raise InvalidArgumentError(f"group {args.group!r} not found in {args.data}")
    sample = populations[args.group]
    h = silverman_bandwidth(sample)
    model = KdeModel(sample=sample, bandwidth=h)
    grid = np.linspace(sample.min() - 3 * h, sample.max() + 3 * h, args.grid_points)
    dens = kde_density(model, grid)
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        out.write("x,density\n")
        for x, g in zip(grid, dens):
            out.write(f"{x:.10g},{g:.10g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_study(args) -> int:
    spec = ColumnSpec(args.value_col, args.group_col, args.transform)
    populations, report = ingest_csv(args.data, spec)
    if report.rows_dropped:
        print(f"# dropped {report.rows_dropped} of {report.rows_in} rows", file=sys.stderr)
    if args.methods:
        methods = tuple(args.methods.split(","))
    else:
        methods = (f"drm-{args.basis}", "parametric-normal", "parametric-normal-common", "empirical")
    study = ResampleStudy(
        base=args.base,
        targets=tuple(args.targets.split(",")),
        n0_grid=(args.n0,),
        n_grid=(args.n,),
        levels=_parse_levels(args.levels),
        methods=methods,
        reps=args.reps,
        seed=args.seed,
    )
    table = run_resample_study(study, populations, workers=args.workers)
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        table.to_csv(out, include_abs_bias=True)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _add_csv_args(p, with_groups=True):
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--value-col", required=True)
    p.add_argument("--group-col", required=True)
    p.add_argument("--transform", choices=["none", "log"], default="none")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drmel")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="quantile estimates with SEs and CIs")
    _add_csv_args(p)
    p.add_argument("--x0", required=True, help="group label of the base sample")
    p.add_argument("--x1", required=True, help="group label of the target sample")
    p.add_argument(
        "--method",
        choices=["drm", "normal", "normal-common", "exponential", "empirical"],
        default="drm",
    )
    p.add_argument("--family", dest="method", help=argparse.SUPPRESS)
    p.add_argument("--basis", choices=["linear", "quadratic", "linear-log"], default="quadratic")
    p.add_argument("--levels", default="0.05,0.5,0.95")
    p.add_argument("--ci-level", type=float, default=0.95)
    p.add_argument("--tol-grad", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("simulate", help="run a Monte Carlo scenario from a JSON file")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("kde", help="kernel density estimate on a CSV grid")
    _add_csv_args(p)
    p.add_argument("--group", required=True)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_kde)

    p = sub.add_parser("study", help="with-replacement resampling study")
    _add_csv_args(p)
    p.add_argument("--base", required=True)
    p.add_argument("--targets", required=True, help="comma-separated target labels")
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--levels", default="0.01,0.05,0.5,0.95")
    p.add_argument("--basis", choices=["linear", "quadratic", "linear-log"], default="quadratic")
    p.add_argument("--methods", help="comma-separated method names; overrides --basis default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_study)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DrmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
