"""Config-driven experiment driver.

Reads flat `key = value` config files, builds the requested pressure problem
(or loads a matrix/RHS pair), runs one of the solvers and writes the CSV
artifacts the plotting frontend consumes. All floating-point output uses the
shortest round-trip decimal representation, so identical configs produce
byte-identical files.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .errors import FormatError
from .harmonic import rdgmres
from .krylov import Preconditioner, SolveReport, gmres
from .physics import (Partition, levelset_partition, manual_layers,
                      partition_to_basis, pdgmres, save_partition,
                      subdomain_levelset_partition, subdomain_partition)
from .sparse import SparseMatrix
from .spectral import spectrum, write_spectrum_csv
from .testbed import (BoundarySpec, Grid, assemble_pressure, diagonal_scale,
                      load_field_file, make_layered_field, make_sagd_like_field)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3


class ConfigError(Exception):
    pass


def parse_config(text: str) -> dict:
    """Flat `key = value` lines with # comments; values keep their line number."""
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in cfg:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        cfg[key] = (value.strip(), lineno)
    return cfg


class Config:
    """Typed accessors over the raw key/value map with line-anchored errors."""

    def __init__(self, raw: dict):
        self.raw = raw
        self.used = set()

    def _get(self, key, default=None):
        self.used.add(key)
        if key in self.raw:
            return self.raw[key]
        return (default, None)

    def has(self, key):
        return key in self.raw

    def str(self, key, default=None, choices=None):
        value, lineno = self._get(key, default)
        if value is None:
            raise ConfigError(f"missing required key {key!r}")
        if choices and value not in choices:
            where = f"line {lineno}: " if lineno else ""
            raise ConfigError(f"{where}{key} must be one of {sorted(choices)}, got {value!r}")
        return value

    def int(self, key, default=None, minimum=None):
        value, lineno = self._get(key, default)
        if value is None:
            raise ConfigError(f"missing required key {key!r}")
        try:
            v = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"line {lineno}: {key} must be an integer, got {value!r}")
        if minimum is not None and v < minimum:
            where = f"line {lineno}: " if lineno else ""
            raise ConfigError(f"{where}{key} must be >= {minimum}, got {v}")
        return v

    def float(self, key, default=None):
        value, lineno = self._get(key, default)
        if value is None:
            raise ConfigError(f"missing required key {key!r}")
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"line {lineno}: {key} must be a number, got {value!r}")

    def bool(self, key, default=None):
        value, lineno = self._get(key, default)
        if isinstance(value, bool):
            return value
        if value is None:
            raise ConfigError(f"missing required key {key!r}")
        if value.lower() in ("true", "yes", "1"):
            return True
        if value.lower() in ("false", "no", "0"):
            return False
        raise ConfigError(f"line {lineno}: {key} must be true/false, got {value!r}")

    def ranges(self, key):
        """Comma list of z0:z1[:value] items."""
        value, lineno = self._get(key)
        if value is None:
            raise ConfigError(f"missing required key {key!r}")
        out = []
        for item in value.split(","):
            parts = item.strip().split(":")
            try:
                if len(parts) == 3:
                    out.append(((int(parts[0]), int(parts[1])), float(parts[2])))
                elif len(parts) == 2:
                    out.append((int(parts[0]), int(parts[1])))
                else:
                    raise ValueError
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: {key} items must be z0:z1[:value], got {item.strip()!r}")
        return out


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


# --- matrix/vector interchange -------------------------------------------

def write_matrix(path, A: SparseMatrix) -> None:
    """Coordinate ASCII: comment header, `n n nnz`, 1-based i j v triples."""
    with open(path, "w", newline="") as f:
        f.write("%%MatrixMarket matrix coordinate real general\n")
        f.write(f"{A.n} {A.n} {A.nnz}\n")
        for i in range(A.n):
            for p in range(A.row_offsets[i], A.row_offsets[i + 1]):
                f.write(f"{i + 1} {A.col_indices[p] + 1} {float(A.values[p])!r}\n")


def read_matrix(path) -> SparseMatrix:
    lines = [l for l in Path(path).read_text().splitlines()
             if l.strip() and not l.startswith("%")]
    try:
        n, n2, nnz = (int(t) for t in lines[0].split())
    except (ValueError, IndexError):
        raise FormatError(f"{path}: bad size line")
    if n != n2:
        raise FormatError(f"{path}: matrix must be square")
    if len(lines) - 1 != nnz:
        raise FormatError(f"{path}: expected {nnz} entries, found {len(lines) - 1}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    for k, line in enumerate(lines[1:]):
        toks = line.split()
        if len(toks) != 3:
            raise FormatError(f"{path}: bad entry line {line!r}")
        rows[k], cols[k], vals[k] = int(toks[0]) - 1, int(toks[1]) - 1, float(toks[2])
    return SparseMatrix.from_coo(n, rows, cols, vals)


def write_vector(path, v: np.ndarray) -> None:
    Path(path).write_text("".join(f"{float(x)!r}\n" for x in v))


def read_vector(path) -> np.ndarray:
    return np.array([float(t) for t in Path(path).read_text().split()])


# --- problem construction -------------------------------------------------

def build_problem(cfg: Config):
    """Returns (A, b, grid_or_None, field_or_None) after optional scaling."""
    if cfg.has("matrix.path"):
        A = read_matrix(cfg.str("matrix.path"))
        b = read_vector(cfg.str("rhs.path"))
        if b.shape != (A.n,):
            raise ConfigError("rhs.path: vector length does not match the matrix")
        return A, b, None, None

    grid = Grid(cfg.int("nx", minimum=1), cfg.int("ny", minimum=1),
                cfg.int("nz", minimum=1),
                cfg.float("dx", 1.0), cfg.float("dy", 1.0), cfg.float("dz", 1.0))
    kind = cfg.str("field.kind", choices={"layered", "sagd", "file"})
    if kind == "layered":
        field = make_layered_field(grid, cfg.ranges("field.layers"))
    elif kind == "sagd":
        field = make_sagd_like_field(grid, cfg.ranges("field.layers"))
    else:
        field = load_field_file(cfg.str("field.path"), grid)

    bc = BoundarySpec(top_dirichlet=cfg.bool("bc.top_dirichlet", True),
                      dirichlet_value=cfg.float("bc.dirichlet_value", 0.0),
                      boundary_perm=cfg.float("bc.boundary_perm", 1.0))

    q = np.zeros(grid.n_cells)
    source = cfg.str("source.kind", "corners", choices={"corners", "cells", "none"})
    if source == "corners":
        q[0] = 1.0
        q[grid.n_cells - 1] = -1.0
    elif source == "cells":
        for (cell, rate) in cfg.ranges("source.cells"):
            if not 0 <= cell < grid.n_cells:
                raise ConfigError(f"source.cells: cell {cell} out of range")
            q[cell] = rate

    problem = assemble_pressure(field, bc, q)
    if cfg.bool("scaling", True):
        problem = diagonal_scale(problem)
    return problem.A, problem.b, grid, field


def build_partition(cfg: Config, grid, field) -> Partition:
    if grid is None:
        raise ConfigError("deflation partitions need a grid-based problem")
    kind = cfg.str("deflation.kind",
                   choices={"subdomain", "levelset", "subdomain_levelset", "manual"})
    if kind == "subdomain":
        return subdomain_partition(grid, cfg.int("deflation.px", 1, minimum=1),
                                   cfg.int("deflation.py", 1, minimum=1),
                                   cfg.int("deflation.pz", 1, minimum=1))
    if kind == "levelset":
        return levelset_partition(field, cfg.float("deflation.threshold", 2.0))
    if kind == "subdomain_levelset":
        return subdomain_levelset_partition(field,
                                            cfg.int("deflation.px", 1, minimum=1),
                                            cfg.int("deflation.py", 1, minimum=1),
                                            cfg.int("deflation.pz", 1, minimum=1),
                                            cfg.float("deflation.threshold", 2.0))
    return manual_layers(grid, cfg.ranges("deflation.zranges"))


def run_method(method: str, cfg: Config, A, b, grid, field):
    """One solve; returns (report, setup_ms, solve_ms, m, d)."""
    m = cfg.int("solver.m", 30, minimum=1)
    tol = cfg.float("solver.tol", 1e-6)
    max_iters = cfg.int("solver.max_iters", 300, minimum=1)
    min_iters = cfg.int("solver.min_iters", 0, minimum=0)
    precond = cfg.str("solver.precond", "jacobi", choices={"jacobi", "identity"})
    ap = cfg.str("solver.ap", "A", choices={"A", "AM"})
    M = Preconditioner.jacobi(A) if precond == "jacobi" else Preconditioner.identity()

    t0 = time.perf_counter()
    if method == "gmres":
        d = 0
        setup_ms = (time.perf_counter() - t0) * 1e3
        t1 = time.perf_counter()
        report = gmres(A, b, M=M, m=m, tol=tol, max_iters=max_iters,
                       min_iters=min_iters, capture_ritz=cfg.has("output.ritz_trace"))
    elif method == "rdgmres":
        d = cfg.int("solver.d", 1, minimum=1)
        if m < d:
            raise ConfigError("rdgmres requires solver.m >= solver.d")
        setup_ms = (time.perf_counter() - t0) * 1e3
        t1 = time.perf_counter()
        report = rdgmres(A, b, M=M, m=m, d=d, tol=tol, max_iters=max_iters,
                         min_iters=min_iters, A_p_choice=ap)
    elif method == "pdgmres":
        if not cfg.has("deflation.kind"):
            raise ConfigError("pdgmres requires a deflation.* spec")
        part = build_partition(cfg, grid, field)
        include_remainder = cfg.bool("deflation.include_remainder", False)
        basis = partition_to_basis(part, frozenset() if include_remainder else None)
        d = basis.d
        if cfg.has("output.partition"):
            save_partition(cfg.str("output.partition"), part)
        setup_ms = (time.perf_counter() - t0) * 1e3
        t1 = time.perf_counter()
        report = pdgmres(A, b, M=M, m=m, basis=basis, tol=tol,
                         max_iters=max_iters, min_iters=min_iters, A_p_choice=ap)
    else:
        raise ConfigError(f"unknown solver.method {method!r}")
    solve_ms = (time.perf_counter() - t1) * 1e3
    return report, setup_ms, solve_ms, m, d


def write_convergence_csv(path, report: SolveReport) -> None:
    with open(path, "w", newline="") as f:
        f.write("iter,resnorm,restart_index,deflated_flag\n")
        for i, (r, c, dfl) in enumerate(zip(report.residual_history,
                                            report.restart_of,
                                            report.deflated_flags)):
            f.write(f"{i},{_fmt(r)},{c},{_fmt(dfl)}\n")


def write_ritz_csv(path, report: SolveReport) -> None:
    """Smallest Ritz value per iteration, grouped by cycle."""
    with open(path, "w", newline="") as f:
        f.write("cycle,k,re,im\n")
        for cyc, trace in enumerate(report.ritz_iter_trace):
            for k, th in enumerate(trace, start=1):
                f.write(f"{cyc},{k},{_fmt(th.real)},{_fmt(th.imag)}\n")


def summary_line(method, m, d, report, setup_ms, solve_ms) -> str:
    return (f"{method},{m},{d},{report.iterations},{_fmt(report.converged)},"
            f"{_fmt(report.final_relres)},{setup_ms:.3f},{solve_ms:.3f}")


# --- subcommands ----------------------------------------------------------

def cmd_solve(cfg: Config) -> int:
    A, b, grid, field = build_problem(cfg)
    method = cfg.str("solver.method", "gmres",
                     choices={"gmres", "rdgmres", "pdgmres"})
    report, setup_ms, solve_ms, m, d = run_method(method, cfg, A, b, grid, field)
    if cfg.has("output.convergence"):
        write_convergence_csv(cfg.str("output.convergence"), report)
    if cfg.has("output.ritz_trace") and report.ritz_iter_trace:
        write_ritz_csv(cfg.str("output.ritz_trace"), report)
    if cfg.has("output.spectrum"):
        rep = spectrum(A, cfg.float("spectrum.cutoff", 0.0))
        write_spectrum_csv(cfg.str("output.spectrum"), rep)
    print(summary_line(method, m, d, report, setup_ms, solve_ms))
    if report.warning:
        print(f"warning: {report.warning}", file=sys.stderr)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_compare(cfg: Config, methods) -> int:
    A, b, grid, field = build_problem(cfg)
    base = cfg.str("output.convergence", None) if cfg.has("output.convergence") else None
    worst = EXIT_OK
    print("method,m,d,iters,converged,final_relres,setup_ms,solve_ms")
    for method in methods:
        report, setup_ms, solve_ms, m, d = run_method(method, cfg, A, b, grid, field)
        if base:
            p = Path(base)
            write_convergence_csv(p.with_suffix(f".{method}{p.suffix}"), report)
        print(summary_line(method, m, d, report, setup_ms, solve_ms))
        if not report.converged:
            worst = EXIT_NOT_CONVERGED
    return worst


def cmd_spectrum(cfg: Config) -> int:
    A, _, _, _ = build_problem(cfg)
    rep = spectrum(A, cfg.float("spectrum.cutoff", 0.0))
    out = cfg.str("output.spectrum")
    write_spectrum_csv(out, rep)
    print(f"n={A.n},n_small={rep.n_small},cutoff={_fmt(rep.cutoff)}")
    return EXIT_OK


def cmd_ritz_trace(cfg: Config) -> int:
    A, b, grid, field = build_problem(cfg)
    m = cfg.int("solver.m", 30, minimum=1)
    M = Preconditioner.jacobi(A) \
        if cfg.str("solver.precond", "jacobi", choices={"jacobi", "identity"}) == "jacobi" \
        else Preconditioner.identity()
    report = gmres(A, b, M=M, m=m, tol=cfg.float("solver.tol", 1e-6),
                   max_iters=cfg.int("solver.max_iters", 300, minimum=1),
                   capture_ritz=True)
    write_ritz_csv(cfg.str("output.ritz_trace"), report)
    print(summary_line("gmres", m, 0, report, 0.0, 0.0))
    return EXIT_OK


def cmd_generate(cfg: Config) -> int:
    A, b, _, _ = build_problem(cfg)
    write_matrix(cfg.str("output.matrix"), A)
    write_vector(cfg.str("output.rhs"), b)
    print(f"wrote n={A.n} nnz={A.nnz}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="defkrylov",
        description="Deflated-GMRES experiment driver for pressure-equation testbeds")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, hlp in (("solve", "run one configured solve"),
                      ("spectrum", "emit the full spectrum CSV"),
                      ("ritz-trace", "run GMRES capturing per-cycle Ritz values"),
                      ("generate", "emit matrix and RHS files")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("config", help="path to a key = value config file")
    p = sub.add_parser("compare", help="run several methods on one problem")
    p.add_argument("config")
    p.add_argument("--methods", default="gmres,rdgmres,pdgmres",
                   help="comma list from {gmres,rdgmres,pdgmres}")
    args = parser.parse_args(argv)

    try:
        cfg = Config(parse_config(Path(args.config).read_text()))
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "compare":
            methods = [m.strip() for m in args.methods.split(",") if m.strip()]
            bad = [m for m in methods if m not in ("gmres", "rdgmres", "pdgmres")]
            if bad:
                raise ConfigError(f"unknown methods: {bad}")
            return cmd_compare(cfg, methods)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "ritz-trace":
            return cmd_ritz_trace(cfg)
        if args.command == "generate":
            return cmd_generate(cfg)
        raise AssertionError(args.command)
    except (ConfigError, FormatError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
