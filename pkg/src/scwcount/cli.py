"""Command line entry point: ``scwcount {count,decompose,width,oracle,verify,normalize}``.

Counts go to stdout alone; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

from .checks import run_checks
from .cnf import CnfFormula, DimacsError, EmptyClauseError, emit_dimacs, normalize, parse_dimacs
from .decomp import (DEFAULT_EXACT_BOUND, BudgetExceeded, DecompositionError, annotate,
                     emit_decomposition, exact_min_index_tree, heuristic_tree,
                     parse_decomposition, width_report)
from .incidence import build_incidence
from .oracle import brute_count
from .shapedp import EMPTY, run_dp

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_DECOMP = 3
EXIT_BUDGET = 4


@dataclass
class RunConfig:
    strategy: str = "heuristic"
    decomp_path: Optional[str] = None
    free_vars: str = "multiply"
    exact_bound: int = DEFAULT_EXACT_BOUND
    stats: bool = False
    method: str = "scan"

    def __post_init__(self):
        if self.strategy == "file" and not self.decomp_path:
            raise ValueError("strategy 'file' requires a decomposition path")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _threads() -> int:
    try:
        return max(0, int(os.environ.get("SCW_THREADS", "0") or 0))
    except ValueError:
        return 0


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_PARSE) from None


def _load(path: str):
    """Parse and normalize; an empty clause gives (None, raw_formula)."""
    try:
        raw = parse_dimacs(_read(path))
    except DimacsError as e:
        raise CliError(f"parse error: {e}", EXIT_PARSE) from None
    try:
        return normalize(raw)
    except EmptyClauseError:
        return None, raw


def _tree(F: CnfFormula, G, config: RunConfig):
    if config.strategy == "file":
        try:
            return parse_decomposition(_read(config.decomp_path).decode(), G)
        except DecompositionError as e:
            raise CliError(f"decomposition mismatch: {e}", EXIT_DECOMP) from None
    if config.strategy == "exact":
        try:
            return exact_min_index_tree(G, config.exact_bound)
        except BudgetExceeded as e:
            raise CliError(f"{e} (or raise --exact-bound)", EXIT_BUDGET) from None
    return heuristic_tree(G)


def _free_factor(report, config: RunConfig) -> int:
    return 2 ** len(report.free_variables) if config.free_vars == "multiply" else 1


def cmd_count(path: str, config: RunConfig, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    start = time.perf_counter()
    F, report = _load(path)
    stats = {"m": 0, "l": 0, "vars": 0, "rankwidth": 0, "index": 0, "max_table": 0, "nodes": 0}
    if F is None:
        count = 0
        stats.update(m=report.m, l=report.l, vars=len(report.var_set))
    elif F.m == 0:
        count = _free_factor(report, config)
    else:
        G = build_incidence(F)
        T = _tree(F, G, config)
        try:
            at = annotate(T, F, G)
        except DecompositionError as e:
            raise CliError(f"decomposition mismatch: {e}", EXIT_DECOMP) from None
        tables = run_dp(at, config.method, _threads())
        count = tables[T.root].get(EMPTY, 0) * _free_factor(report, config)
        stats.update(m=F.m, l=F.l, vars=len(F.var_set), rankwidth=at.rankwidth, index=at.k,
                     max_table=max(len(t) for t in tables), nodes=T.size)
    print(count, file=out)
    if config.stats:
        stats["millis"] = int((time.perf_counter() - start) * 1000)
        for key, val in stats.items():
            print(f"{key}={val}", file=err)
    return EXIT_OK


def _nondegenerate(path: str):
    F, report = _load(path)
    if F is None:
        raise CliError("formula has an empty clause; its incidence graph is not decomposed",
                       EXIT_PARSE)
    if F.m == 0:
        raise CliError("formula has no clauses; nothing to decompose", EXIT_PARSE)
    return F, report


def cmd_decompose(path: str, config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    F, _ = _nondegenerate(path)
    G = build_incidence(F)
    T = _tree(F, G, config)
    wr = width_report(T, G)
    out.write(emit_decomposition(T, G, [f"rankwidth {wr.rankwidth}", f"index {wr.index}"]))
    return EXIT_OK


def cmd_width(path: str, decomp_path: str, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    F, _ = _nondegenerate(path)
    G = build_incidence(F)
    T = _tree(F, G, RunConfig(strategy="file", decomp_path=decomp_path))
    wr = width_report(T, G)
    print(f"rankwidth={wr.rankwidth}", file=out)
    print(f"index={wr.index}", file=out)
    if not wr.rankwidth <= wr.index <= 2 ** wr.rankwidth:
        print("width bounds violated: rankwidth <= index <= 2^rankwidth fails", file=err)
        return EXIT_FAIL
    return EXIT_OK


def cmd_oracle(path: str, config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    F, report = _load(path)
    if F is None:
        print(0, file=out)
        return EXIT_OK
    try:
        count = brute_count(F)
    except BudgetExceeded as e:
        raise CliError(str(e), EXIT_BUDGET) from None
    print(count * _free_factor(report, config), file=out)
    return EXIT_OK


def cmd_verify(path: str, config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    F, _ = _nondegenerate(path)
    G = build_incidence(F)
    T = _tree(F, G, config)
    try:
        at = annotate(T, F, G)
        results = run_checks(at)
    except DecompositionError as e:
        raise CliError(f"decomposition mismatch: {e}", EXIT_DECOMP) from None
    except BudgetExceeded as e:
        raise CliError(str(e), EXIT_BUDGET) from None
    for r in results:
        print(r.line(), file=out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_normalize(path: str, out=None) -> int:
    out = out or sys.stdout
    try:
        raw = parse_dimacs(_read(path))
        F, report = normalize(raw)
    except DimacsError as e:
        raise CliError(f"parse error: {e}", EXIT_PARSE) from None
    except EmptyClauseError as e:
        raise CliError(str(e), EXIT_PARSE) from None
    out.write(emit_dimacs(F, report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scwcount",
                                description="Exact #SAT by dynamic programming on decomposition trees")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, strategies=("exact", "heuristic", "file")):
        sp.add_argument("cnf", help="DIMACS CNF file")
        sp.add_argument("--strategy", choices=strategies, default=None)
        sp.add_argument("--decomp", metavar="PATH", help="decomposition file (implies --strategy file)")
        sp.add_argument("--exact-bound", type=int, default=DEFAULT_EXACT_BOUND,
                        help="largest vertex count for the exhaustive tree search")

    sp = sub.add_parser("count", help="print the model count")
    common(sp)
    sp.add_argument("--free-vars", choices=("multiply", "ignore"), default="multiply")
    sp.add_argument("--stats", action="store_true", help="key=value diagnostics on stderr")
    sp.add_argument("--method", choices=("scan", "indexed"), default="scan",
                    help="inner-node combine: full triple scan or out-indexed lookup")

    sp = sub.add_parser("decompose", help="write a decomposition tree")
    common(sp, ("exact", "heuristic"))

    sp = sub.add_parser("width", help="rank-width and index of a given tree")
    sp.add_argument("cnf")
    sp.add_argument("decomp", nargs="?")
    sp.add_argument("--decomp", dest="decomp_opt", metavar="PATH")

    sp = sub.add_parser("oracle", help="brute-force model count")
    sp.add_argument("cnf")
    sp.add_argument("--free-vars", choices=("multiply", "ignore"), default="multiply")

    sp = sub.add_parser("verify", help="cross-check the DP against the oracle")
    common(sp)

    sp = sub.add_parser("normalize", help="write the normalized formula with its clause id map")
    sp.add_argument("cnf")
    return p


def _config(args) -> RunConfig:
    strategy = getattr(args, "strategy", None)
    strategy = strategy or ("file" if getattr(args, "decomp", None) else "heuristic")
    return RunConfig(strategy=strategy, decomp_path=getattr(args, "decomp", None),
                     free_vars=getattr(args, "free_vars", "multiply"),
                     exact_bound=getattr(args, "exact_bound", DEFAULT_EXACT_BOUND),
                     stats=getattr(args, "stats", False), method=getattr(args, "method", "scan"))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "width":
            decomp = args.decomp_opt or args.decomp
            if not decomp:
                raise CliError("width needs a decomposition file", EXIT_PARSE)
            return cmd_width(args.cnf, decomp)
        if args.command == "normalize":
            return cmd_normalize(args.cnf)
        try:
            config = _config(args)
        except ValueError as e:
            raise CliError(str(e), EXIT_PARSE) from None
        if args.command == "count":
            return cmd_count(args.cnf, config)
        if args.command == "decompose":
            return cmd_decompose(args.cnf, config)
        if args.command == "oracle":
            return cmd_oracle(args.cnf, config)
        return cmd_verify(args.cnf, config)
    except CliError as e:
        print(f"scwcount: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
