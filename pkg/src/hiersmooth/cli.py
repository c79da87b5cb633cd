"""Command line front end.

Exit codes are a stable contract: 0 success, 1 input or usage error, 2 shape
mismatch between instance and requested solver, 3 verification mismatch.
Solution output is byte-deterministic for a given (input, flags); stats and
timings go to stderr only.
"""

import argparse
import sys
import time

from .rational import Rat, to_rat, rat_str
from .model import (Instance, ModelError, ParseError, ShapeError, is_feasible,
                    objective, parse_instance, serialize_instance, solution_text)
from .l1tree import solve_l1_abstract, solve_l1_dfs
from .linf import default_linf_tol, solve_linf
from .bilayer import lift_solution, reduce_bilayer, solve_covering_mw
from .oracle import solve_lp_exact
from .gen import SplitMix64, figure1_instance, gen_random_bilayer, gen_random_tree

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SHAPE = 2
EXIT_MISMATCH = 3

# verify and oracle run the dense rational simplex; refuse sizes where that
# would grind for minutes
ORACLE_NODE_LIMIT = 200

_DEFAULT_EPS = Rat(1, 10)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_instance(path):
    if path is None or path == "-":
        return parse_instance(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _write_text(out, text):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _check_flags(args):
    if args.weighted and args.norm != "l1":
        raise _UsageError("--weighted applies to --norm=l1 only")
    if args.weighted and getattr(args, "algorithm", "dfs") == "abstract":
        raise _UsageError("--algorithm=abstract has no weighted mode")


def _solve(inst, args):
    """Dispatch to a solver; returns (x, objective_value, stats dict)."""
    t0 = time.perf_counter()
    if args.norm == "linf":
        tol = to_rat(args.tol) if args.tol is not None else None
        _, x = solve_linf(inst, tol)
        obj = objective(inst, x, "linf")
        stats = {"pushes": 0, "visits": 0}
    elif inst.is_tree:
        if args.algorithm == "abstract":
            rep = solve_l1_abstract(inst)
        else:
            rep = solve_l1_dfs(inst, weighted=args.weighted)
        x, obj = rep.x, rep.objective_value
        stats = {"pushes": rep.stats.pushes, "visits": rep.stats.dfs_visits}
    elif inst.is_bilayer:
        if args.weighted:
            raise ModelError("the bilayer solver has no weighted mode")
        eps = to_rat(args.eps) if args.eps is not None else _DEFAULT_EPS
        d = solve_covering_mw(reduce_bilayer(inst), eps)
        rep = lift_solution(inst, d)
        x, obj = rep.x, rep.objective_value
        stats = {"pushes": 0, "visits": 0}
    else:
        raise ShapeError("l1 solving needs a tree or bilayer instance")
    stats["seconds"] = time.perf_counter() - t0
    return x, obj, stats


def _print_stats(stats):
    sys.stderr.write("pushes=%d visits=%d seconds=%.6f\n"
                     % (stats["pushes"], stats["visits"], stats["seconds"]))


def cmd_solve(args) -> int:
    _check_flags(args)
    inst = _read_instance(args.input)
    x, obj, stats = _solve(inst, args)
    _write_text(args.out, solution_text(x, obj))
    _print_stats(stats)
    return EXIT_OK


def cmd_oracle(args) -> int:
    _check_flags(args)
    inst = _read_instance(args.input)
    if inst.n > ORACLE_NODE_LIMIT:
        raise ModelError("instance too large for the exact oracle (limit %d nodes)"
                         % ORACLE_NODE_LIMIT)
    t0 = time.perf_counter()
    x, _ = solve_lp_exact(inst, norm=args.norm, weighted=args.weighted)
    obj = objective(inst, x, args.norm, args.weighted)
    _write_text(args.out, solution_text(x, obj))
    _print_stats({"pushes": 0, "visits": 0, "seconds": time.perf_counter() - t0})
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_flags(args)
    inst = _read_instance(args.input)
    if inst.n > ORACLE_NODE_LIMIT:
        raise ModelError("instance too large for the exact oracle (limit %d nodes)"
                         % ORACLE_NODE_LIMIT)
    x, solver_obj, _ = _solve(inst, args)
    if args.norm == "linf":
        _, oracle_obj = solve_lp_exact(inst, norm="linf")
        tol = to_rat(args.tol) if args.tol is not None else default_linf_tol(inst)
        ok = abs(solver_obj - oracle_obj) <= tol
    elif inst.is_tree:
        _, oracle_obj = solve_lp_exact(inst, norm="l1", weighted=args.weighted)
        ok = solver_obj == oracle_obj
    else:
        _, oracle_obj = solve_lp_exact(inst, norm="l1")
        eps = to_rat(args.eps) if args.eps is not None else _DEFAULT_EPS
        ok = solver_obj <= (1 + eps) * oracle_obj
    ok = ok and is_feasible(inst, x)
    sys.stdout.write("solver %s\noracle %s\n" % (rat_str(solver_obj), rat_str(oracle_obj)))
    return EXIT_OK if ok else EXIT_MISMATCH


def _path_tree(n, seed) -> Instance:
    rng = SplitMix64(seed)
    edges = [(i, i - 1) for i in range(1, n)]
    a = [rng.next_below(11) for _ in range(n)]
    return Instance(n, edges, a)


def cmd_gen(args) -> int:
    _check_flags(args)
    n = args.nodes if args.nodes is not None else 10
    seed = args.seed if args.seed is not None else 0
    if args.kind == "figure1":
        inst = figure1_instance()
    elif args.kind == "tree":
        inst = gen_random_tree(n, 10, seed, weighted=args.weighted, max_w=4)
    elif args.kind == "bilayer":
        nu = max(1, n // 2)
        inst = gen_random_bilayer(nu, max(1, n - nu), 50, 10, seed)
    else:
        raise _UsageError("unknown kind %r (expected figure1, tree or bilayer)"
                          % args.kind)
    _write_text(args.out, serialize_instance(inst))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise _UsageError("--sizes expects a comma-separated list of integers")
    if not sizes or any(s < 1 for s in sizes):
        raise _UsageError("--sizes expects positive integers")
    seed = args.seed if args.seed is not None else 0
    lines = ["n,seconds,pushes,visits"]
    for n in sizes:
        if args.shape == "path":
            inst = _path_tree(n, seed)
        else:
            inst = gen_random_tree(n, 10, seed)
        t0 = time.perf_counter()
        rep = solve_l1_dfs(inst, backend=args.backend)
        sec = time.perf_counter() - t0
        lines.append("%d,%.6f,%d,%d" % (n, sec, rep.stats.pushes, rep.stats.dfs_visits))
        sys.stderr.write("n=%d backend=%s seconds=%.6f\n" % (n, rep.backend, sec))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="hiersmooth",
                     description="Hierarchy-respecting smoothing of target values")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        p.add_argument("--norm", choices=("l1", "linf"), default="l1")
        p.add_argument("--algorithm", choices=("dfs", "abstract"), default="dfs")
        p.add_argument("--weighted", action="store_true")
        p.add_argument("--tol", default=None, help="rational tolerance, e.g. 1/1000000")
        p.add_argument("--eps", default=None, help="bilayer approximation budget")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--nodes", type=int, default=None)
        p.add_argument("--out", default=None)
        if with_input:
            p.add_argument("input", nargs="?", default="-",
                           help="instance file, or - for stdin")

    p_solve = sub.add_parser("solve", help="solve an instance")
    common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_oracle = sub.add_parser("oracle", help="solve exactly via the rational LP")
    common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_verify = sub.add_parser("verify", help="compare solver against the LP oracle")
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser("gen", help="generate an instance")
    p_gen.add_argument("kind", help="figure1, tree or bilayer")
    common(p_gen, with_input=False)
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="time the dfs solver over a size ladder")
    p_bench.add_argument("--sizes", default="1000,2000,4000,8000")
    p_bench.add_argument("--shape", choices=("random", "path"), default="random")
    p_bench.add_argument("--backend", choices=("auto", "python", "compiled"),
                         default="auto")
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT
    except ParseError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT
    except ShapeError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_SHAPE
    except (ModelError, OSError, ZeroDivisionError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT
    except ValueError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
