"""Benchmark harness: synthetic instance x solver grids and their report tables."""

import csv
import io
import itertools
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

from .admm_dca import AdmmConfig, admm_dca_run
from .datasets import gen_matrix_instance, gen_tensor_instance
from .exceptions import IBPDCAError, ParameterError
from .metrics import estimate_rank, rse
from .problems import MatrixCompletionProblem, TensorCompletionProblem
from .solver import SolverConfig, ibpdca_run

SOLVERS = ("ibpdca", "bpdca", "admm-dca")
REPORT_COLUMNS = ("problem", "sr", "size", "solver", "rse", "time", "iter", "rank",
                  "n_runs", "n_converged", "error")
WORKERS_ENV = "IBPDCA_WORKERS"

DEFAULT_MAX_ITER = {"matrix": 500, "tensor": 3000}


@dataclass
class SolverParams:
    """Model and algorithm settings shared by every run of an experiment."""

    lam: float = 0.5
    mu: float = 1.1
    beta: float = 1.0
    tau: float = 1.0
    alpha: object = "fista"
    rel_tol: float = 1e-5
    max_iter: int = None
    penalty_base: float = 1.1
    inner_tol: float = 1e-3
    inner_max: int = 500


def make_problem(kind, M, mask, params):
    if kind == "matrix":
        return MatrixCompletionProblem(M, mask, lam=params.lam, mu=params.mu)
    if kind == "tensor":
        return TensorCompletionProblem(M, mask, lam=params.lam, mu=params.mu)
    raise ParameterError(f"problem must be 'matrix' or 'tensor', got {kind!r}")


def run_solver(problem, solver, params, kind=None):
    """Run one of the three solvers; returns ``(x, trace)``."""
    kind = kind or ("matrix" if len(problem.shape) == 2 else "tensor")
    max_iter = params.max_iter or DEFAULT_MAX_ITER[kind]
    if solver == "admm-dca":
        cfg = AdmmConfig(penalty_base=params.penalty_base, inner_tol=params.inner_tol,
                         inner_max=params.inner_max, max_iter=max_iter,
                         rel_tol=params.rel_tol)
        return admm_dca_run(problem, cfg)
    if solver not in ("ibpdca", "bpdca"):
        raise ParameterError(f"solver must be one of {SOLVERS}, got {solver!r}")
    cfg = SolverConfig(beta=params.beta, tau=params.tau,
                       alpha="none" if solver == "bpdca" else params.alpha,
                       max_iter=max_iter, rel_tol=params.rel_tol)
    return ibpdca_run(problem, cfg)


def generate(kind, dims, rank, sr, seed):
    if kind == "matrix":
        if len(dims) != 2:
            raise ParameterError(f"matrix dims need 2 entries, got {dims}")
        return gen_matrix_instance(*dims, rank, sr, seed)
    if len(dims) != 3:
        raise ParameterError(f"tensor dims need 3 entries, got {dims}")
    return gen_tensor_instance(*dims, rank, sr, seed)


def run_single(kind, dims, rank, sr, seed, solver, params):
    """Generate one instance, solve it and return a result dict.

    Time covers the solver loop only. Errors are caught and reported in the
    ``error`` field so a grid keeps going.
    """
    row = dict(problem=kind, dims=tuple(dims), sr=sr, seed=seed, solver=solver,
               rse=math.nan, time=math.nan, iter=0, rank=-1, status="error", error="")
    try:
        inst = generate(kind, dims, rank, sr, seed)
        problem = make_problem(kind, inst.M_observed, inst.mask, params)
        x, trace = run_solver(problem, solver, params, kind)
        row.update(rse=rse(x, inst.X_true), time=trace.wall_seconds, iter=trace.n_iter,
                   rank=estimate_rank(x), status=trace.status)
    except IBPDCAError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        trace = getattr(exc, "trace", None)
        if trace is not None:
            row.update(iter=trace.n_iter, status=trace.status)
    return row


@dataclass
class BenchConfig:
    """Instance grid and solver list of a benchmark.

    JSON keys are the field names, except that the model weight is spelled
    ``"lambda"``; unknown keys are rejected.
    """

    problem: str = "matrix"
    dims: list = field(default_factory=lambda: [[100, 100]])
    rank: int = 10
    sr: list = field(default_factory=lambda: [0.5])
    seeds: list = field(default_factory=lambda: [0])
    solvers: list = field(default_factory=lambda: list(SOLVERS))
    lam: float = 0.5
    mu: float = 1.1
    beta: float = 1.0
    tau: float = 1.0
    alpha: object = "fista"
    rel_tol: float = 1e-5
    max_iter: int = None
    penalty_base: float = 1.1
    inner_tol: float = 1e-3
    inner_max: int = 500

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "lam" in d:
            raise ParameterError("unknown config keys: lam (use 'lambda')")
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ParameterError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ParameterError(f"{path}: top level must be a JSON object")
        return cls.from_dict(d)

    def validate(self):
        if self.problem not in ("matrix", "tensor"):
            raise ParameterError(f"problem must be 'matrix' or 'tensor', got {self.problem!r}")
        if not self.solvers:
            raise ParameterError("solvers must not be empty")
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad:
            raise ParameterError(f"unknown solvers {bad}; choose from {SOLVERS}")
        if not self.dims or not self.sr or not self.seeds:
            raise ParameterError("dims, sr and seeds must be non-empty lists")
        nd = 2 if self.problem == "matrix" else 3
        for d in self.dims:
            if len(d) != nd or any((not isinstance(v, int)) or v < 1 for v in d):
                raise ParameterError(f"each dims entry needs {nd} positive integers, got {d}")
            if not 1 <= self.rank <= min(d[:2]):
                raise ParameterError(f"rank {self.rank} out of range for dims {d}")
        for s in self.sr:
            if not 0 < s <= 1:
                raise ParameterError(f"sr values must lie in (0, 1], got {s}")
        # trips the SolverConfig / AdmmConfig checks early
        SolverConfig(beta=self.beta, tau=self.tau,
                     alpha=self.alpha,
                     rel_tol=self.rel_tol, max_iter=self.max_iter or 1)
        AdmmConfig(penalty_base=self.penalty_base, inner_tol=self.inner_tol,
                   inner_max=self.inner_max)

    def params(self):
        return SolverParams(lam=self.lam, mu=self.mu, beta=self.beta, tau=self.tau,
                            alpha=self.alpha, rel_tol=self.rel_tol, max_iter=self.max_iter,
                            penalty_base=self.penalty_base, inner_tol=self.inner_tol,
                            inner_max=self.inner_max)

    def jobs(self):
        """``(sr, dims, solver, seed)`` in table order: sr, then size, then solver."""
        return list(itertools.product(self.sr, [tuple(d) for d in self.dims],
                                      self.solvers, self.seeds))


def _run_job(args):
    return run_single(*args)


def worker_count():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be an integer") from None


def run_bench(config, workers=None):
    """Run every job of ``config`` and aggregate one row per (sr, size, solver).

    Returns
    -------
    rows : list of dict
        Aggregated table rows (means over seeds).
    runs : list of dict
        The individual run results.
    """
    workers = worker_count() if workers is None else workers
    params = config.params()
    args = [(config.problem, dims, config.rank, sr, seed, solver, params)
            for sr, dims, solver, seed in config.jobs()]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_job, args))
    else:
        runs = [_run_job(a) for a in args]
    return aggregate(runs, config), runs


def aggregate(runs, config):
    rows = []
    for sr, dims, solver in itertools.product(config.sr, [tuple(d) for d in config.dims],
                                              config.solvers):
        group = [r for r in runs if r["sr"] == sr and r["dims"] == dims and r["solver"] == solver]
        ok = [r for r in group if not r["error"]]

        def mean(key):
            return statistics.fmean([r[key] for r in ok]) if ok else math.nan

        rows.append(dict(problem=config.problem, sr=sr, size="x".join(map(str, dims)),
                         solver=solver, rse=mean("rse"), time=mean("time"),
                         iter=mean("iter"), rank=mean("rank"), n_runs=len(group),
                         n_converged=sum(r["status"] == "converged" for r in group),
                         error="; ".join(r["error"] for r in group if r["error"])))
    return rows


def _cell(v, key):
    if isinstance(v, float):
        if key == "rse":
            return f"{v:.2e}"
        if key == "time":
            return f"{v:.2f}"
        if key in ("iter", "rank"):
            return f"{v:g}"
        return f"{v:g}"
    return str(v)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c]
                    for c in REPORT_COLUMNS])
    return buf.getvalue()


def rows_to_markdown(rows):
    cols = ("sr", "size", "solver", "rse", "time", "iter", "rank")
    head = ["sr", "size", "solver", "RSE", "Time(s)", "Iter", "rank"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(r[c], c) for c in cols) + " |")
    return "\n".join(lines) + "\n"
