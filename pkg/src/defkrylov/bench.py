"""Desk-scale cost benchmarks: deflation overhead vs iteration savings.

All timings are wall-clock medians over repeated runs with one warm-up run
discarded; small problems are very timer-noise sensitive. The projector cost
is reported in spmv-equivalents (median apply_p1 time over median spmv time)
so it stays meaningful across machines.
"""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .deflation import DeflationBasis, build_context
from .harmonic import rdgmres
from .krylov import Preconditioner, gmres
from .physics import pdgmres
from .sparse import SparseMatrix, spmv


@dataclass
class BenchRow:
    problem: str
    method: str
    m: int
    d: int
    iters: int
    setup_ms: float
    solve_ms: float
    p1_cost_spmv: float


@dataclass
class CostReport:
    """Per-method timing rows plus shared per-problem phase times (ms)."""

    rows: list[BenchRow] = field(default_factory=list)
    assembly_ms: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if min(row.setup_ms, row.solve_ms, row.p1_cost_spmv) < 0:
                raise ValueError("negative phase time")


def _median_time(fn, repeats: int) -> float:
    """Median wall time of fn() in seconds; one warm-up call discarded."""
    fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def apply_p1_cost(ctx, A: SparseMatrix, repeats: int = 5) -> float:
    """Cost of one P1 application in spmv-equivalents."""
    v = np.ones(A.n)
    t_spmv = _median_time(lambda: spmv(A, v), repeats)
    t_p1 = _median_time(lambda: ctx.apply_p1(v), repeats)
    return t_p1 / t_spmv if t_spmv > 0 else float("inf")


def overhead_suite(problems, methods, repeats: int = 3, m: int = 30,
                   d: int = 3, tol: float = 1e-6,
                   max_iters: int = 300) -> CostReport:
    """Time every (problem, method) pair.

    `problems` is a list of (name, A, b, basis) tuples; basis may be None for
    problems that never run pdgmres. `methods` is a subset of
    {gmres, rdgmres, pdgmres}.
    """
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    report = CostReport()
    for name, A, b, basis in problems:
        M = Preconditioner.jacobi(A)
        for method in methods:
            setup_ms = 0.0
            p1_cost = 0.0
            if method == "gmres":
                run = lambda: gmres(A, b, M=M, m=m, tol=tol, max_iters=max_iters)
            elif method == "rdgmres":
                run = lambda: rdgmres(A, b, M=M, m=m, d=d, tol=tol,
                                      max_iters=max_iters)
                d_used = d
            elif method == "pdgmres":
                if basis is None:
                    continue
                t0 = time.perf_counter()
                ctx = build_context(A, M, basis, b)
                setup_ms = (time.perf_counter() - t0) * 1e3
                p1_cost = apply_p1_cost(ctx, A)
                run = lambda: pdgmres(A, b, M=M, m=m, basis=basis, tol=tol,
                                      max_iters=max_iters)
            else:
                raise ValueError(f"unknown method {method!r}")
            d_used = {"gmres": 0, "rdgmres": d,
                      "pdgmres": basis.d if basis is not None else 0}[method]
            rep = run()
            solve_ms = _median_time(run, repeats) * 1e3
            report.rows.append(BenchRow(name, method, m, d_used,
                                        rep.iterations, setup_ms, solve_ms,
                                        p1_cost))
    return report


def d_sweep(A: SparseMatrix, b: np.ndarray, bases, m: int = 30,
            tol: float = 1e-6, max_iters: int = 300):
    """Iteration counts of pdgmres across a list of deflation bases."""
    M = Preconditioner.jacobi(A)
    out = []
    for basis in bases:
        rep = pdgmres(A, b, M=M, m=m, basis=basis, tol=tol, max_iters=max_iters)
        out.append((basis.d, rep.iterations))
    return out


def write_bench_csv(path, report: CostReport) -> None:
    with open(path, "w", newline="") as f:
        f.write("problem,method,m,d,iters,setup_ms,solve_ms,p1_cost_spmv\n")
        for r in report.rows:
            f.write(f"{r.problem},{r.method},{r.m},{r.d},{r.iters},"
                    f"{r.setup_ms!r},{r.solve_ms!r},{r.p1_cost_spmv!r}\n")
