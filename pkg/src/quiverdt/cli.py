"""Command-line surface.

Commands: trees, F, dt, oracle rank2, check {perturbation|joints|
multicover|oracle}.  Output is deterministic byte-for-byte for a fixed
command line; exit codes are 0 (pass), 1 (internal failure), 2 (invalid
input), 3 (genericity or sampling failure).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import checks
from .dt import AttractorTable, FCache, assemble_dt, dt_integer_value
from .errors import (
    ConsistencyFailure,
    GenericityError,
    InvalidInput,
    NotPolynomial,
)
from .flow import flow_tree_scalar
from .lattice import build_aux, parse_covector, parse_dimvec, parse_quiver
from .scattering import reconstruct_rank2
from .trees import enumerate_trees, render_tree, tree_count


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quiverdt",
        description="Refined DT invariants of quivers via the flow tree formula.",
    )
    parser.add_argument("--seed", type=int, default=0, help="perturbation seed")
    parser.add_argument("--budget", type=int, default=1000, help="resample budget")
    parser.add_argument("--cache", default=None, help="directory for the on-disk F-cache")
    parser.add_argument(
        "--format", choices=["text", "machine"], default="text", help="output format"
    )
    parser.add_argument("--jobs", type=int, default=1, help="worker threads for tree sums")
    sub = parser.add_subparsers(dest="command", required=True)

    p_trees = sub.add_parser("trees", help="enumerate decorated binary trees")
    p_trees.add_argument("r", type=int)

    p_f = sub.add_parser("F", help="universal flow tree coefficient")
    p_f.add_argument("--quiver", required=True, help="quiver file")
    p_f.add_argument("--gammas", required=True, nargs="+", help="classes, e.g. 1,0 0,1")
    p_f.add_argument("--theta", required=True, help="stability covector, e.g. 1,-1")
    p_f.add_argument("--mode", choices=["omega", "beta"], default="omega")

    p_dt = sub.add_parser("dt", help="rational DT invariant from attractor data")
    p_dt.add_argument("--quiver", required=True)
    p_dt.add_argument("--gamma", required=True)
    p_dt.add_argument("--theta", required=True)
    p_dt.add_argument("--attractor", default=None, help="attractor table file (default: acyclic)")
    p_dt.add_argument("--mode", choices=["omega", "beta"], default="omega")

    p_oracle = sub.add_parser("oracle", help="rank-2 scattering oracle")
    p_oracle.add_argument("kind", choices=["rank2"])
    p_oracle.add_argument("--quiver", default=None, help="rank-2 quiver file")
    p_oracle.add_argument("--m", type=int, default=None, help="Kronecker arrow count")
    p_oracle.add_argument("--degree", type=int, required=True, help="degree bound")
    p_oracle.add_argument("--attractor", default=None, help="attractor table file (default: acyclic)")

    p_check = sub.add_parser("check", help="theorem-backed verification drivers")
    p_check.add_argument("kind", choices=["perturbation", "joints", "multicover", "oracle"])
    p_check.add_argument("--r", type=int, default=3)
    p_check.add_argument("--trials", type=int, default=5)
    p_check.add_argument("--m", type=int, default=2)
    p_check.add_argument("--max-dim", type=int, default=4)
    return parser


def _load_attractor(path) -> AttractorTable:
    if path is None:
        return AttractorTable(acyclic_default=True)
    return AttractorTable.parse(Path(path).read_text())


def _cmd_trees(args, out) -> int:
    if not 1 <= args.r <= 10:
        raise InvalidInput(f"r must be between 1 and 10, got {args.r}")
    machine = args.format == "machine"
    count = tree_count(args.r)
    out.write(f"count={count}\n" if machine else f"count {count}\n")
    for tree in enumerate_trees(range(1, args.r + 1)):
        text = render_tree(tree)
        out.write(f"tree={text}\n" if machine else f"{text}\n")
    return 0


def _cmd_f(args, out) -> int:
    quiver = parse_quiver(Path(args.quiver).read_text())
    gammas = [parse_dimvec(g) for g in args.gammas]
    theta = parse_covector(args.theta)
    aux = build_aux(quiver, gammas, theta)
    poly = flow_tree_scalar(
        aux, mode=args.mode, seed=args.seed, budget=args.budget, workers=args.jobs
    )
    if args.format == "machine":
        out.write(f"F={poly.render()}\n")
    else:
        out.write(poly.render() + "\n")
    return 0


def _cmd_dt(args, out) -> int:
    quiver = parse_quiver(Path(args.quiver).read_text())
    gamma = parse_dimvec(args.gamma)
    theta = parse_covector(args.theta)
    table = _load_attractor(args.attractor)
    cache = FCache(args.cache)
    machine = args.format == "machine"
    rational = assemble_dt(
        quiver,
        gamma,
        theta,
        table,
        mode=args.mode,
        seed=args.seed,
        budget=args.budget,
        cache=cache,
        workers=args.jobs,
    )
    out.write(
        f"omega_bar={rational.render()}\n" if machine else f"Omega_bar = {rational.render()}\n"
    )
    try:
        integral = dt_integer_value(
            quiver,
            gamma,
            theta,
            table,
            mode=args.mode,
            seed=args.seed,
            budget=args.budget,
            cache=cache,
            workers=args.jobs,
        )
    except NotPolynomial as exc:
        print(f"warning: {exc}", file=sys.stderr)
        return 0
    out.write(f"omega={integral.render()}\n" if machine else f"Omega = {integral.render()}\n")
    return 0


def _cmd_oracle(args, out) -> int:
    if (args.quiver is None) == (args.m is None):
        raise InvalidInput("give exactly one of --quiver or --m")
    if args.quiver is not None:
        quiver = parse_quiver(Path(args.quiver).read_text())
        if quiver.vertex_count != 2:
            raise InvalidInput("the rank-2 oracle needs a 2-vertex quiver")
    else:
        from .lattice import Quiver

        quiver = Quiver.kronecker(args.m)
    table = _load_attractor(args.attractor)
    initial = {}
    for a in range(args.degree + 1):
        for b in range(args.degree + 1 - a):
            if a == 0 and b == 0:
                continue
            value = table.rational_value((a, b))
            if not value.is_zero():
                initial[(a, b)] = value
    diagram = reconstruct_rank2(initial, checks.quiver_skew(quiver), args.degree)
    for _, (class_vec, coeff) in diagram.ray_entries():
        out.write(f"ray {class_vec[0]},{class_vec[1]} : {coeff.render()}\n")
    return 0


def _cmd_check(args, out) -> int:
    if args.kind == "perturbation":
        result = checks.check_perturbation(args.r, args.trials, seed=args.seed)
    elif args.kind == "joints":
        result = checks.check_joints(args.r, args.trials, seed=args.seed)
    elif args.kind == "multicover":
        result = checks.check_multicover(args.trials, seed=args.seed)
    else:
        result = checks.check_oracle(args.m, args.max_dim, seed=args.seed)
    machine = args.format == "machine"
    if not machine:
        for line in result.lines:
            out.write(line + "\n")
    if result.passed:
        out.write("result=pass\n" if machine else "PASS\n")
        return 0
    out.write(f"result=fail locus={result.locus}\n" if machine else f"FAIL {result.locus}\n")
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = sys.stdout
    try:
        if args.command == "trees":
            return _cmd_trees(args, out)
        if args.command == "F":
            return _cmd_f(args, out)
        if args.command == "dt":
            return _cmd_dt(args, out)
        if args.command == "oracle":
            return _cmd_oracle(args, out)
        return _cmd_check(args, out)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GenericityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyFailure as exc:
        print(f"error: consistency failure at joint {exc.joint}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failure surface
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def app() -> None:
    sys.exit(main())


if __name__ == "__main__":
    app()
