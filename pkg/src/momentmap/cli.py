"""Command-line scenario runner.

    momentmap <subcommand> [--config PATH] [--out DIR] [--delta-theta X] [--parallel] [--full-grid]

Subcommands: roots, det-scan, bisect, bifurcate, continue, tau, reproduce.
Exit status: 0 success, 1 invalid configuration, 2 infeasibility,
3 numerical failure (no sign change, rank mismatch, divergence, failed
golden check).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .basis import LambdaParam, toeplitz_blocks
from .bifurcation import BifurcationReport, analyze_critical_point
from .config import FULL_GRID_DELTA_THETA, ScenarioConfig, load_config, bundled_config_path
from .continuation import INFEASIBLE, ContinuationOptions, ContinuationTrace, continuation_solve
from .critical import (
    CriticalPointRecord,
    DetScan,
    SegmentPath,
    bisect_critical,
    det_scan,
    numerical_rank,
)
from .errors import (
    ConfigError,
    DegenerateFactorError,
    InfeasibleLambdaError,
    MomentMapError,
    NoSignChangeError,
    SingularFactorError,
)
from .maps import h_map, jacobian_matrix, tau_jacobian_fd, tau_map
from .polyroots import determinantal_roots

log = logging.getLogger("momentmap")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 1, 2, 3


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _arr(a):
    return [_arr(v) for v in a] if np.ndim(a) > 0 else _num(a)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


class Runner:
    def __init__(self, config: ScenarioConfig, out: Path, parallel: bool = False):
        self.config = config
        self.out = out
        self.parallel = parallel
        self.problem = config.problem("pairwise" if parallel else "sequential")
        self.basis = self.problem.basis
        self.executor = ThreadPoolExecutor(max_workers=os.cpu_count() or 2) if parallel else None

    def close(self):
        if self.executor:
            self.executor.shutdown()

    # -- serialization ------------------------------------------------
    def provenance(self) -> dict:
        return {
            "tool": "momentmap",
            "version": __version__,
            "config_sha256": self.config.digest,
            "config_name": self.config.name,
            "delta_theta": self.config.delta_theta,
            "grid_size": self.problem.grid.size,
            "summation": self.problem.summation,
            "basis_ordering": list(self.basis.labels),
            "inner_product": "trace(A B)",
        }

    def report(self, subcommand: str, results: dict) -> dict:
        return {"subcommand": subcommand, "provenance": self.provenance(), "results": results}

    def lambda_dict(self, lam: LambdaParam) -> dict:
        blocks = toeplitz_blocks(lam.matrix, self.config.m)
        out = {"coords": _arr(lam.coords)}
        for k, blk in enumerate(blocks):
            out[f"L{k}"] = _arr(blk)
        return out

    def critical_dict(self, rec: CriticalPointRecord) -> dict:
        return {
            "t_c": _num(rec.t_c),
            "bracket": _arr(rec.bracket),
            "iterations": rec.iterations,
            "det": _num(rec.det_at_c),
            "singular_values": _arr(rec.singular_values),
            "numerical_rank": rec.numerical_rank,
            "rank_deficiency": rec.rank_deficiency,
            "lambda": self.lambda_dict(rec.lambda_c),
        }

    def bifurcation_dict(self, rep: BifurcationReport) -> dict:
        dec = rep.decomposition
        return {
            "critical": self.critical_dict(rep.critical),
            "augmented_jacobian_singular_values": _arr(dec.singular_values),
            "augmented_rank": len(dec.sigma),
            "kernel_dimension": rep.kernel_dimension,
            "u_M": _arr(dec.u_M),
            "V2": _arr(dec.V2),
            "hessian_b": _arr(rep.hessian_b),
            "eigenvalues": _arr(rep.eigenvalues),
            "classification": rep.classification,
        }

    def trace_dict(self, trace: ContinuationTrace, target_name: str, start_name: str) -> dict:
        return {
            "start": start_name,
            "target": f"h(Lambda[{target_name}])",
            "status": trace.status,
            "message": trace.message,
            "last_t": _num(trace.last_t),
            "num_steps": len(trace.steps),
            "final_residual": _num(trace.final_residual),
            "solution": self.lambda_dict(trace.solution) if trace.solution is not None else None,
        }

    # -- stages ---------------------------------------------------------
    def path(self) -> SegmentPath:
        a, b = self.config.path
        return SegmentPath(self.config.lambda_for(a, self.basis), self.config.lambda_for(b, self.basis))

    def roots(self) -> dict:
        out = {}
        targets = ([("K", self.config.K)] if self.config.K is not None else [])
        targets += list(self.config.factors.items())
        for name, C in targets:
            out[name] = determinantal_roots(C, self.problem.filt).as_dict()
        return out

    def scan(self) -> DetScan:
        return det_scan(self.path(), self.config.scan_samples, self.problem, self.executor)

    def bisect(self, scan: DetScan) -> list[CriticalPointRecord]:
        if not scan.brackets:
            raise NoSignChangeError(
                f"no sign change of det J_h along {self.config.path[0]} -> {self.config.path[1]} "
                f"({len(scan.ts)} samples)"
            )
        path = self.path()
        tol = self.config.tolerances
        return [bisect_critical(path, b, self.problem, tol.tol_t, tol.rank_threshold)
                for b in scan.brackets]

    def bifurcate(self, records) -> list[BifurcationReport]:
        path = self.path()
        return [analyze_critical_point(r, path, self.problem, self.config.tolerances.rank_threshold,
                                       self.executor) for r in records]

    def continuation(self) -> ContinuationTrace:
        cfg = self.config
        tol = cfg.tolerances
        start = cfg.lambda_for(cfg.continuation_start, self.basis)
        target = h_map(self.problem, cfg.lambda_for(cfg.continuation_target, self.basis))
        options = ContinuationOptions(residual_tol=tol.residual_tol, cond_max=tol.cond_max)
        return continuation_solve(target, start, self.problem, options)

    def tau(self) -> dict:
        out = {}
        for name, C in self.config.factors.items():
            T = tau_map(self.problem, C)
            J = tau_jacobian_fd(self.problem, C)
            s = np.linalg.svd(J, compute_uv=False)
            out[name] = {
                "tau": _arr(T),
                "eigmin": _num(np.linalg.eigvalsh(T)[0]),
                "jacobian_fd_singular_values": _arr(s),
                "jacobian_fd_rank": numerical_rank(s, self.config.tolerances.rank_threshold),
                "jacobian_fd_shape": list(J.shape),
            }
        return out


# -- golden checks ----------------------------------------------------------

def _check(name, value, expected, tolerance, passed) -> dict:
    return {"name": name, "value": value, "expected": expected,
            "tolerance": tolerance, "pass": bool(passed)}


def _sorted_roots(pairs) -> np.ndarray:
    z = np.array([complex(a, b) for a, b in pairs])
    return z[np.lexsort((z.imag, -z.real))]


def golden_checks(runner: Runner, roots: dict, critical, bif) -> list[dict]:
    golden = runner.config.golden
    checks = []
    for name, g in golden.get("roots", {}).items():
        got = _sorted_roots(roots[name]["roots"])
        want = _sorted_roots(g["values"])
        err = float(np.max(np.abs(got - want))) if len(got) == len(want) else math.inf
        checks.append(_check(f"roots[{name}]", roots[name]["roots"], g["values"], g["atol"],
                             err <= g["atol"]))
        if "modulus" in g:
            mod = roots[name]["moduli"]
            checks.append(_check(f"modulus[{name}]", mod, g["modulus"], g["atol"],
                                 all(abs(x - g["modulus"]) <= g["atol"] for x in mod)))
    for name, g in golden.get("lambda_blocks", {}).items():
        lam = runner.config.lambda_for(name, runner.basis)
        blocks = toeplitz_blocks(lam.matrix, runner.config.m)
        for k in ("L0", "L1"):
            got = blocks[int(k[1])]
            ok = np.max(np.abs(got - np.array(g[k]))) <= g["atol"]
            checks.append(_check(f"lambda[{name}].{k}", _arr(got), g[k], g["atol"], ok))
    g = golden.get("jacobian_det")
    if g:
        signs = []
        for name in runner.config.path:
            d = jacobian_matrix(runner.problem, runner.config.lambda_for(name, runner.basis)).det()
            signs.append(np.sign(d))
            ok = abs(d - g[name]) <= g["rtol"] * abs(g[name])
            checks.append(_check(f"det J_h[{name}]", d, g[name], g["rtol"], ok))
        checks.append(_check("det sign change", _arr(signs), [1.0, -1.0], 0, signs[0] * signs[1] < 0))
    g = golden.get("critical")
    if g:
        rec = critical[0] if critical else None
        ok = rec is not None and abs(rec.t_c - g["t_c"]) <= g["t_atol"]
        checks.append(_check("t_c", _num(rec.t_c) if rec else None, g["t_c"], g["t_atol"], ok))
        if rec is not None:
            blocks = toeplitz_blocks(rec.lambda_c.matrix, runner.config.m)
            for k in ("L0", "L1"):
                got = blocks[int(k[1])]
                ok = np.max(np.abs(got - np.array(g[k]))) <= g["block_atol"]
                checks.append(_check(f"lambda_c.{k}", _arr(got), g[k], g["block_atol"], ok))
            s = rec.singular_values
            checks.append(_check("sigma_min / sigma_max", _num(s[-1] / s[0]), 0.0,
                                 runner.config.tolerances.rank_threshold,
                                 s[-1] < runner.config.tolerances.rank_threshold * s[0]))
            want = g["second_smallest_sv"]
            checks.append(_check("second smallest singular value", _num(s[-2]), want, g["sv_rtol"],
                                 abs(s[-2] - want) <= g["sv_rtol"] * want))
            checks.append(_check("rank deficiency", rec.rank_deficiency, g["rank_deficiency"], 0,
                                 rec.rank_deficiency == g["rank_deficiency"]))
    g = golden.get("bifurcation")
    if g:
        rep = bif[0] if bif else None
        if rep is None:
            checks.append(_check("bifurcation", None, g["classification"], 0, False))
        else:
            checks.append(_check("augmented rank", len(rep.decomposition.sigma), g["augmented_rank"],
                                 0, len(rep.decomposition.sigma) == g["augmented_rank"]))
            checks.append(_check("kernel dimension", rep.kernel_dimension, g["kernel_dimension"], 0,
                                 rep.kernel_dimension == g["kernel_dimension"]))
            want = np.sort(g["eigenvalues"])
            ok = any(
                np.all(np.abs(np.sort(sgn * rep.eigenvalues) - want) <= g["rtol"] * np.abs(want))
                for sgn in (1.0, -1.0)
            )
            checks.append(_check("bifurcation Hessian eigenvalues (mod global sign)",
                                 _arr(rep.eigenvalues), g["eigenvalues"], g["rtol"], ok))
            checks.append(_check("classification", rep.classification, g["classification"], 0,
                                 rep.classification == g["classification"]))
    return checks


# -- subcommands ------------------------------------------------------------

def cmd_roots(r: Runner) -> int:
    write_json(r.out / "roots.json", r.report("roots", r.roots()))
    return EXIT_OK


def cmd_det_scan(r: Runner) -> int:
    scan = r.scan()
    write_csv(r.out / "det_scan.csv", ["t", "det"], scan.rows())
    write_json(r.out / "det_scan.json", r.report("det-scan", {
        "path": list(r.config.path),
        "samples": len(scan.ts),
        "brackets": [list(b) for b in scan.brackets],
    }))
    return EXIT_OK


def cmd_bisect(r: Runner) -> int:
    records = r.bisect(r.scan())
    write_json(r.out / "critical.json", r.report("bisect", {
        "path": list(r.config.path),
        "critical_points": [r.critical_dict(rec) for rec in records],
    }))
    return EXIT_OK


def cmd_bifurcate(r: Runner) -> int:
    reports = r.bifurcate(r.bisect(r.scan()))
    write_json(r.out / "bifurcation.json", r.report("bifurcate", {
        "path": list(r.config.path),
        "bifurcation_points": [r.bifurcation_dict(rep) for rep in reports],
    }))
    return EXIT_OK


def cmd_continue(r: Runner) -> int:
    trace = r.continuation()
    write_csv(r.out / "continuation.csv",
              ["t", "residual", "cond"] + [f"x{k}" for k in range(r.basis.size)],
              [[s.t, s.residual, s.cond, *s.coords] for s in trace.steps])
    write_json(r.out / "continuation.json", r.report(
        "continue", r.trace_dict(trace, r.config.continuation_target, r.config.continuation_start)))
    if trace.converged:
        return EXIT_OK
    return EXIT_INFEASIBLE if trace.status == INFEASIBLE else EXIT_NUMERICAL


def cmd_tau(r: Runner) -> int:
    write_json(r.out / "tau.json", r.report("tau", r.tau()))
    return EXIT_OK


def cmd_reproduce(r: Runner) -> int:
    roots = r.roots()
    scan = r.scan()
    critical, bif, failure = [], [], None
    try:
        critical = r.bisect(scan)
        bif = r.bifurcate(critical)
    except MomentMapError as exc:
        failure = str(exc)
    trace = r.continuation()
    checks = golden_checks(r, roots, critical, bif)
    passed = failure is None and all(c["pass"] for c in checks)
    write_csv(r.out / "det_scan.csv", ["t", "det"], scan.rows())
    write_json(r.out / "reproduce.json", r.report("reproduce", {
        "roots": roots,
        "det_scan": {"path": list(r.config.path), "samples": len(scan.ts),
                     "brackets": [list(b) for b in scan.brackets]},
        "critical_points": [r.critical_dict(rec) for rec in critical],
        "bifurcation_points": [r.bifurcation_dict(rep) for rep in bif],
        "continuation": r.trace_dict(trace, r.config.continuation_target,
                                     r.config.continuation_start),
        "failure": failure,
        "checks": checks,
        "all_passed": passed,
    }))
    for c in checks:
        print(f"[{'PASS' if c['pass'] else 'FAIL'}] {c['name']}")
    return EXIT_OK if passed else EXIT_NUMERICAL


COMMANDS = {
    "roots": cmd_roots,
    "det-scan": cmd_det_scan,
    "bisect": cmd_bisect,
    "bifurcate": cmd_bifurcate,
    "continue": cmd_continue,
    "tau": cmd_tau,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momentmap", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None,
                        help="scenario JSON (default: the bundled paper.json)")
    parser.add_argument("--out", default="momentmap-out", help="output directory")
    grid = parser.add_mutually_exclusive_group()
    grid.add_argument("--delta-theta", type=float, default=None, help="override grid step")
    grid.add_argument("--full-grid", action="store_true",
                      help=f"use delta_theta = {FULL_GRID_DELTA_THETA:g}")
    parser.add_argument("--parallel", action="store_true",
                        help="thread-parallel evaluation with pairwise summation")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config or bundled_config_path())
        if args.full_grid:
            config.delta_theta = FULL_GRID_DELTA_THETA
        elif args.delta_theta is not None:
            if not 0 < args.delta_theta <= 2 * math.pi:
                raise ConfigError(f"--delta-theta must lie in (0, 2pi], got {args.delta_theta}")
            config.delta_theta = args.delta_theta
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        runner = Runner(config, out, args.parallel)
    except (ConfigError, ValueError) as exc:
        print(f"momentmap: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.subcommand](runner)
    except (InfeasibleLambdaError, SingularFactorError, DegenerateFactorError) as exc:
        print(f"momentmap: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except MomentMapError as exc:
        print(f"momentmap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        runner.close()


if __name__ == "__main__":
    sys.exit(main())
