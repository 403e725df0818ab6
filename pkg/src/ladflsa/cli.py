"""Command-line interface: ``ladflsa <command> ...``.

Every command writes plain CSV or JSON.  On failure the exit status is
nonzero and a JSON object ``{"error": ..., "message": ...}`` is printed
on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .model import REPORT_JUMP_TOL, LossKind, TrueModel, TuningParams
from .selection import Criterion, GridSpec, grid_select, mc_df
from .solver import solve, SolverOptions
from .theory import check_conditions_B, check_conditions_C, density_at_zero, lambda_n


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _dumps(obj) -> str:
    return json.dumps(harness.json_ready(obj), indent=2)


def _signal(args) -> np.ndarray:
    return harness.load_series_csv(args.input, args.column).values


def _grid(args) -> GridSpec:
    l2 = tuple(args.lambda2_grid) if args.lambda2_grid else None
    return GridSpec(lambda1=tuple(args.lambda1_grid), lambda2=l2)


def _add_input(p):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--column", default=None, help="value column (name or 0-based index); "
                   "defaults to the last column")


def _add_grid(p):
    p.add_argument("--lambda1-grid", nargs=3, type=float, default=(0.01, 0.5, 0.01),
                   metavar=("START", "STOP", "STEP"))
    p.add_argument("--lambda2-grid", nargs=3, type=float, default=None,
                   metavar=("START", "STOP", "STEP"),
                   help="default: sqrt(n/log n) to sqrt(n) in steps of 0.1")
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default="bic")
    p.add_argument("--loss", choices=[k.value for k in LossKind], default="lad")


def cmd_fit(args) -> None:
    y = _signal(args)
    fit = solve(y, TuningParams(args.lambda1, args.lambda2),
                SolverOptions(loss_kind=args.loss))
    if args.out == "csv":
        header, rows = harness.segment_table(y, fit)
        _emit(harness.csv_text(header, rows), args.output)
        return
    part = fit.partition
    _emit(_dumps({
        "n": fit.n, "loss": fit.loss_kind.value,
        "lambda1": fit.params.lambda1, "lambda2": fit.params.lambda2,
        "objective": fit.objective, "df_hat": fit.df_hat(),
        "blocks": [{"start": a + 1, "end": b, "level": v}
                   for a, b, v in zip(part.starts, part.ends, part.levels)],
        "mu_hat": fit.mu_hat,
    }), args.output)


def cmd_select(args) -> None:
    y = _signal(args)
    grid = _grid(args)
    params, fit, cv, sw = grid_select(y, grid, args.criterion, args.loss, return_sweep=True)
    if args.sweep_csv:
        harness.write_csv(args.sweep_csv, ["lambda1", "lambda2", "residual_l1", "df_hat",
                                           "aicr", "bic", "gcv"], sw.rows())
    if args.plot:
        from .plotting import plot_criterion
        plot_criterion(sw, args.criterion, args.plot)
    _emit(_dumps({"lambda1": params.lambda1, "lambda2": params.lambda2,
                  "criterion": {"kind": cv.kind.value, "value": cv.value},
                  "df_hat": cv.df_hat, "residual_l1": cv.residual_l1,
                  "n_blocks": fit.n_blocks}), args.output)


def cmd_segment(args) -> None:
    y = _signal(args)
    report, fit = harness.segment(y, _grid(args), args.criterion, args.loss, args.jump_tol)
    if args.csv:
        header, rows = harness.segment_table(y, fit)
        harness.write_csv(args.csv, header, rows)
    if args.plot:
        from .plotting import plot_fit
        plot_fit(y, fit.mu_hat, args.plot, title=f"{len(report['blocks'])} blocks")
    _emit(_dumps(report), args.output)


def cmd_df_mc(args) -> None:
    y = _signal(args)
    est = mc_df(y, TuningParams(args.lambda1, args.lambda2), tau=args.tau,
                T=args.samples, seed=args.seed, loss_kind=args.loss)
    _emit(_dumps({"lambda1": args.lambda1, "lambda2": args.lambda2,
                  "df": est.df, "std_error": est.std_error, "samples": est.samples,
                  "tau": est.tau, "mean_df_hat": est.mean_df_hat,
                  "df_hat_se": est.df_hat_se}), args.output)


def cmd_bench(args) -> None:
    config = harness.BenchConfig.load(args.config)
    if args.seed is not None:
        config = harness.BenchConfig(**{**config.__dict__, "seed": args.seed})
    if args.replicates is not None:
        config = harness.BenchConfig(**{**config.__dict__, "replicates": args.replicates})
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, reps = harness.run_benchmark(config)
    harness.write_csv(out / "metrics.csv", *harness.metrics_table(rows))
    harness.write_csv(out / "replicates.csv", *harness.replicates_table(reps))
    summary = {"config": harness.config_dict(config),
               "metrics": [r.__dict__ for r in rows]}
    (out / "metrics.json").write_text(_dumps(summary) + "\n")
    if args.plot:
        from .plotting import plot_benchmark
        plot_benchmark(rows, out / "metrics.png")
    _emit(harness.csv_text(*harness.metrics_table(rows)), None)


def _truth(args) -> TrueModel:
    if args.truth:
        d = json.loads(Path(args.truth).read_text())
        if "mu0" in d:
            return TrueModel.from_vector(d["mu0"])
        return TrueModel.from_levels(d["levels"], d["sizes"])
    if args.levels and args.sizes:
        return TrueModel.from_levels(args.levels, args.sizes)
    if args.blocks_n:
        return harness.gen_blocks_signal(args.blocks_n)
    raise CliError("give --truth FILE, --levels/--sizes or --blocks-n")


def cmd_check_conditions(args) -> None:
    truth = _truth(args)
    if args.f0 is not None:
        f0 = args.f0
    elif args.family and args.sigma:
        f0 = density_at_zero(args.family, args.sigma)
    else:
        raise CliError("give --f0 or --family and --sigma")
    params = TuningParams(args.lambda1, args.lambda2)
    b = check_conditions_B(truth, params.lambda2, f0, args.delta)
    c = check_conditions_C(truth, params, f0, args.delta)
    _emit(_dumps({"n": truth.n, "f0": f0, "delta": args.delta,
                  "lambda1": params.lambda1, "lambda2": params.lambda2,
                  "lambda_n": lambda_n(truth.n, params),
                  "B": b.to_dict(), "C": c.to_dict()}), args.output)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ladflsa", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="solve once at given penalties")
    _add_input(f)
    f.add_argument("--lambda1", type=float, required=True)
    f.add_argument("--lambda2", type=float, required=True)
    f.add_argument("--loss", choices=[k.value for k in LossKind], default="lad")
    f.add_argument("--out", choices=["json", "csv"], default="json")
    f.add_argument("--output", default=None, help="file (default stdout)")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("select", help="grid search by an information criterion")
    _add_input(s)
    _add_grid(s)
    s.add_argument("--sweep-csv", default=None, help="write the full criterion table")
    s.add_argument("--plot", default=None, help="PNG heat map of the criterion")
    s.add_argument("--output", default=None)
    s.set_defaults(func=cmd_select)

    g = sub.add_parser("segment", help="segment a series and report its blocks")
    _add_input(g)
    _add_grid(g)
    g.add_argument("--jump-tol", type=float, default=REPORT_JUMP_TOL,
                   help="merge reported steps no larger than this")
    g.add_argument("--csv", default=None, help="plot-ready CSV (index, y, mu_hat)")
    g.add_argument("--plot", default=None, help="PNG of data and fit")
    g.add_argument("--output", default=None, help="JSON report (default stdout)")
    g.set_defaults(func=cmd_segment)

    d = sub.add_parser("df-mc", help="Monte Carlo degrees of freedom")
    _add_input(d)
    d.add_argument("--lambda1", type=float, required=True)
    d.add_argument("--lambda2", type=float, required=True)
    d.add_argument("--loss", choices=[k.value for k in LossKind], default="lad")
    d.add_argument("--tau", type=float, default=None)
    d.add_argument("--samples", type=int, default=500)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--output", default=None)
    d.set_defaults(func=cmd_df_mc)

    b = sub.add_parser("bench", help="run the synthetic blocks benchmark")
    b.add_argument("--config", required=True, help="JSON benchmark configuration")
    b.add_argument("--out-dir", default="bench_out")
    b.add_argument("--seed", type=int, default=None, help="override the config seed")
    b.add_argument("--replicates", type=int, default=None)
    b.add_argument("--plot", action="store_true", help="also write metrics.png")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("check-conditions", help="evaluate sufficient conditions")
    c.add_argument("--truth", default=None, help='JSON {"levels": [...], "sizes": [...]}'
                   ' or {"mu0": [...]}')
    c.add_argument("--levels", type=float, nargs="+")
    c.add_argument("--sizes", type=int, nargs="+")
    c.add_argument("--blocks-n", type=int, default=None,
                   help="use the six-block benchmark signal of this length")
    c.add_argument("--lambda1", type=float, default=0.0)
    c.add_argument("--lambda2", type=float, required=True)
    c.add_argument("--f0", type=float, default=None, help="error density at zero")
    c.add_argument("--family", choices=[f.value for f in harness.NoiseFamily])
    c.add_argument("--sigma", type=float, default=None)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--output", default=None)
    c.set_defaults(func=cmd_check_conditions)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except Exception as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2 if isinstance(exc, CliError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
