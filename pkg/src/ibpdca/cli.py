"""Command-line interface: ``ibpdca synth | solve | bench``.

Exit status is 0 only when every requested run converged. ``bench`` runs
grid rows in ``$IBPDCA_WORKERS`` worker processes (default 1).
"""

import csv
import logging
import math
import os
import sys

import click
import numpy as np

from .datasets import gen_matrix_instance, gen_tensor_instance
from .exceptions import DivergenceError, IBPDCAError
from .experiments import (SOLVERS, BenchConfig, SolverParams, make_problem, rows_to_csv,
                          rows_to_markdown, run_bench, run_solver)
from .io import read_array, write_array
from .metrics import estimate_rank, psnr, rse

EXIT_NOT_CONVERGED = 1
EXIT_DIVERGED = 3


def _alpha(value):
    if value in ("fista", "none"):
        return value
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter("expected 'fista', 'none' or a number") from None


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log verbosity.")
def main(verbose):
    """DC-programming solvers for low-rank matrix and tensor completion."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--matrix", "matrix_dims", nargs=2, type=click.IntRange(min=1), default=None,
              help="Generate an M x N matrix instance.")
@click.option("--tensor", "tensor_dims", nargs=3, type=click.IntRange(min=1), default=None,
              help="Generate an N1 x N2 x N3 tensor instance.")
@click.option("--rank", type=click.IntRange(min=1), required=True)
@click.option("--sr", type=click.FloatRange(0, 1, min_open=True), required=True,
              help="Sampling ratio in (0, 1].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--prefix", default="instance", show_default=True)
def synth(matrix_dims, tensor_dims, rank, sr, seed, out_dir, prefix):
    """Write a synthetic instance: X_true, mask and M_observed files."""
    if (matrix_dims is None) == (tensor_dims is None):
        raise click.UsageError("give exactly one of --matrix or --tensor")
    try:
        if matrix_dims is not None:
            inst = gen_matrix_instance(*matrix_dims, rank, sr, seed)
            ext = ".csv"
        else:
            inst = gen_tensor_instance(*tensor_dims, rank, sr, seed)
            ext = ".t3"
    except IBPDCAError as exc:
        raise click.BadParameter(str(exc)) from None
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for name, arr in (("X_true", inst.X_true), ("mask", inst.mask.observed.astype(float)),
                      ("M_observed", inst.M_observed)):
        paths[name] = os.path.join(out_dir, f"{prefix}_{name}{ext}")
        write_array(paths[name], arr)
    for p in paths.values():
        click.echo(p)
    if inst.seed != seed:
        click.echo(f"note: empty mask, used seed {inst.seed}", err=True)


@main.command()
@click.option("--observed", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Observed data (.csv matrix, .t3 tensor or .pgm image).")
@click.option("--mask", "mask_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="0/1 mask in the same format; 1 = observed.")
@click.option("--truth", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Ground truth for RSE/PSNR.")
@click.option("--solver", type=click.Choice(SOLVERS), default="ibpdca", show_default=True)
@click.option("--lambda", "lam", type=float, default=0.5, show_default=True)
@click.option("--mu", type=float, default=1.1, show_default=True)
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--tau", type=float, default=1.0, show_default=True)
@click.option("--alpha", default="fista", show_default=True,
              help="'fista', 'none' or a constant extrapolation weight.")
@click.option("--rel-tol", type=float, default=1e-5, show_default=True)
@click.option("--max-iter", type=click.IntRange(min=1), default=None,
              help="Default 500 for matrices, 3000 for tensors.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Write the per-iteration trace CSV here.")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write the completed array here (format by extension).")
def solve(observed, mask_path, truth, solver, lam, mu, beta, tau, alpha, rel_tol, max_iter,
          trace_path, output):
    """Complete an observed array and print one metrics row (CSV)."""
    try:
        M = read_array(observed)
        mask = read_array(mask_path)
        if not np.isin(mask, (0.0, 1.0)).all():
            raise click.BadParameter("mask must contain only 0 and 1", param_hint="--mask")
        kind = "matrix" if M.ndim == 2 else "tensor"
        params = SolverParams(lam=lam, mu=mu, beta=beta, tau=tau, alpha=_alpha(alpha),
                              rel_tol=rel_tol, max_iter=max_iter)
        problem = make_problem(kind, M, mask.astype(bool), params)
    except IBPDCAError as exc:
        raise click.ClickException(str(exc)) from None

    status = 0
    try:
        x, trace = run_solver(problem, solver, params, kind)
    except DivergenceError as exc:
        click.echo(f"error: {exc}", err=True)
        if trace_path and exc.trace is not None:
            exc.trace.to_csv(trace_path, inner=solver == "admm-dca")
        sys.exit(EXIT_DIVERGED)
    except IBPDCAError as exc:
        raise click.ClickException(str(exc)) from None

    if trace.status != "converged":
        status = EXIT_NOT_CONVERGED
    row = dict(solver=solver, rse=math.nan, psnr=math.nan, time=trace.wall_seconds,
               iter=trace.n_iter, rank=estimate_rank(x), status=trace.status)
    if truth is not None:
        X_true = read_array(truth)
        row["rse"] = rse(x, X_true)
        if problem.mask.n_missing:
            row["psnr"] = psnr(x, X_true, problem.mask)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(list(row))
    w.writerow([format(v, ".6g") if isinstance(v, float) else v for v in row.values()])
    if trace_path:
        trace.to_csv(trace_path, inner=solver == "admm-dca")
    if output:
        write_array(output, x)
    sys.exit(status)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Write the table as CSV.")
@click.option("--markdown", "md_path", type=click.Path(dir_okay=False), default=None,
              help="Write the table as markdown.")
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Worker processes (overrides $IBPDCA_WORKERS).")
def bench(config, csv_path, md_path, workers):
    """Run a JSON-configured instance x solver grid and print a results table."""
    try:
        cfg = BenchConfig.from_json(config)
    except IBPDCAError as exc:
        raise click.ClickException(str(exc)) from None
    rows, runs = run_bench(cfg, workers=workers)
    md = rows_to_markdown(rows)
    click.echo(md, nl=False)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    if md_path:
        with open(md_path, "w") as fh:
            fh.write(md)
    for r in runs:
        if r["error"]:
            click.echo(f"run failed: {r['solver']} {r['dims']} sr={r['sr']} "
                       f"seed={r['seed']}: {r['error']}", err=True)
    sys.exit(0 if all(r["status"] == "converged" for r in runs) else EXIT_NOT_CONVERGED)


if __name__ == "__main__":
    main()
