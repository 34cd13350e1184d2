"""Command-line driver: verify / solve / chain / admissible / fold / diagonalize.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error,
3 solver non-convergence.  Reports are JSON on stdout; solver iteration
records stream to stderr as JSON lines.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
import time

from . import fileio
from .backlund import CombinatorialDatum, chain, check_admissible
from .bethe import SolveOptions, seed_and_continue, solve_newton, verify_bethe, roots_to_solution
from .errors import (
    BadPartition,
    BetheqqError,
    ChainBroken,
    InconsistentSystem,
    NoConvergence,
    ParseError,
    PathCollision,
    SingularJacobian,
)
from .polyalg import roots as poly_roots
from .bethe import BetheRoots
from .opermat import diagonalize_type_a, regularity_residues, verify_mp_twist
from .qqcore import fold, qq_residual, qq_residual_scale, check_nondegenerate
from .rootsys import cartan_matrix
from .scalars import ExactField

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def _write_json(path: str | None, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_instance(args, path=None):
    doc = _load_json(path or args.instance)
    return fileio.instance_from_doc(doc, backend_override=args.backend,
                                    precision_override=args.precision)


def _solve_options(args, inst) -> SolveOptions:
    tol = None
    if args.tol is not None:
        tol = inst.field(args.tol)
    return SolveOptions(tolerance=tol, seed=args.seed, continuation=args.steps)


def _emit_log(records) -> None:
    for rec in records:
        print(json.dumps(rec, sort_keys=True), file=sys.stderr)


def _extract_roots(inst, sol):
    try:
        return BetheRoots(tuple(tuple(poly_roots(p)) for p in sol.q_plus))
    except (ValueError, NotImplementedError):
        return None


def _verify_one(inst, sol, report) -> None:
    field = inst.field
    for i in range(1, inst.rank + 1):
        res = qq_residual(inst, sol, i)
        scale = qq_residual_scale(inst, sol, i)
        ok = res.is_zero or field.is_zero(res.norm(), scale=scale)
        report.check(f"qq_residual_{i}", ok, fileio.residual_repr(field, res.norm()))
    nd = check_nondegenerate(inst, sol.q_plus)
    report.check("nondegenerate", nd.ok)
    for i in range(1, inst.rank + 1):
        res = verify_mp_twist(inst, sol, i)
        report.check(f"mp_twist_{i}", field.is_zero(res, scale=1),
                     fileio.residual_repr(field, res))
    rts = _extract_roots(inst, sol)
    if rts is None:
        report.check("regularity_residues", None, "skipped: roots not extractable")
        return
    try:
        reg = regularity_residues(inst, sol, rts)
    except BetheqqError as exc:
        report.check("regularity_residues", False, str(exc))
        return
    worst = max((field.abs(v) for v in reg.values()), default=field.abs(field.zero))
    report.check("regularity_residues", worst <= _pass_tol(field),
                 fileio.residual_repr(field, worst))
    bet = verify_bethe(inst, rts)
    report.check("bethe_residuals", bet.ok, fileio.residual_repr(field, bet.max_residual))


def _pass_tol(field):
    return field.tau


def cmd_verify(args) -> int:
    if args.solution is None:
        raise ParseError("verify needs a solution file (or --batch over *.instance.json)")
    inst = _load_instance(args)
    sol = fileio.solution_from_doc(inst.field, _load_json(args.solution))
    t0 = time.monotonic()
    report = fileio.Report("verify", inst, seed=args.seed)
    _verify_one(inst, sol, report)
    doc = report.finish(time.monotonic() - t0)
    _write_json(args.out, doc)
    return EXIT_OK if report.all_pass else EXIT_CHECK


def cmd_solve(args) -> int:
    inst = _load_instance(args)
    field = inst.field
    seed_doc = _load_json(args.start)
    opts = _solve_options(args, inst)
    t0 = time.monotonic()
    report = fileio.Report("solve", inst, seed=args.seed)
    log: list = []
    if "partition" in seed_doc:
        part = fileio.partition_from_doc(field, seed_doc)
        roots = seed_and_continue(inst, part, opts, log=log)
    elif "roots" in seed_doc:
        roots = solve_newton(inst, fileio.roots_from_doc(field, seed_doc), opts, log=log)
    else:
        raise ParseError("start file needs a 'partition' or 'roots' key")
    _emit_log(log)
    sol = roots_to_solution(inst, roots)
    bet = verify_bethe(inst, roots)
    report.check("bethe_residuals", bet.ok, fileio.residual_repr(field, bet.max_residual))
    _verify_one(inst, sol, report)
    report.artifact("roots", fileio.roots_to_doc(field, roots)["roots"])
    sol_doc = fileio.solution_to_doc(field, sol)
    report.artifact("solution", sol_doc)
    doc = report.finish(time.monotonic() - t0)
    if args.out:
        _write_json(args.out, sol_doc)
    _write_json(None, doc)
    return EXIT_OK if report.all_pass else EXIT_CHECK


def cmd_chain(args) -> int:
    inst = _load_instance(args)
    sol = fileio.solution_from_doc(inst.field, _load_json(args.solution))
    word = fileio.word_from_arg(args.word, inst.rank)
    t0 = time.monotonic()
    report = fileio.Report("chain", inst, seed=args.seed)
    try:
        trace = chain(inst, sol, word, retry_seed=args.seed)
    except ChainBroken as exc:
        report.check(f"chain_step_{exc.step}", False, str(exc.cause))
        _write_json(args.out, fileio.trace_to_doc(exc.trace))
        _write_json(None, report.finish(time.monotonic() - t0))
        return EXIT_CHECK
    for n, step in enumerate(trace.steps, start=1):
        report.check(f"step_{n}_s{step.index}_composable", step.composable)
        report.check(f"step_{n}_s{step.index}_generic", step.generic)
    doc = fileio.trace_to_doc(trace)
    if args.out:
        _write_json(args.out, doc)
    else:
        report.artifact("trace", doc)
    _write_json(None, report.finish(time.monotonic() - t0))
    return EXIT_OK if report.all_pass else EXIT_CHECK


def cmd_admissible(args) -> int:
    doc = _load_json(args.instance)
    t0 = time.monotonic()
    if "d" in doc and "N" in doc:  # bare combinatorial datum
        from .rootsys import CartanType

        ctype = CartanType(doc["cartan"]["family"], int(doc["cartan"]["rank"]))
        datum = CombinatorialDatum(tuple(doc["d"]), tuple(doc["N"]),
                                   frozenset(doc.get("psi", [])), bool(doc.get("psi_all", False)))
        cmat = cartan_matrix(ctype)
        rank = ctype.rank
        report = fileio.Report("admissible")
    else:
        inst = _load_instance(args)
        if args.degrees is None:
            raise ParseError("an instance file needs --degrees d1,d2,... for admissibility")
        d = [int(x) for x in args.degrees.replace(",", " ").split()]
        datum = CombinatorialDatum.from_instance(inst, d)
        cmat = inst.cartan
        rank = inst.rank
        report = fileio.Report("admissible", inst)
    word = fileio.word_from_arg(args.word, rank)
    adm = check_admissible(datum, word, cmat)
    for pc in adm.prefixes:
        report.check(f"prefix_{pc.prefix}", pc.holds, residual=str(list(pc.degrees)))
    _write_json(None, report.finish(time.monotonic() - t0))
    return EXIT_OK if adm.ok else EXIT_CHECK


def cmd_fold(args) -> int:
    inst = _load_instance(args)
    sol = fileio.solution_from_doc(inst.field, _load_json(args.solution))
    t0 = time.monotonic()
    report = fileio.Report("fold", inst, seed=args.seed)
    new_inst, new_sol = fold(inst, sol)
    field = new_inst.field
    for i in range(1, new_inst.rank + 1):
        res = qq_residual(new_inst, new_sol, i)
        ok = res.is_zero or field.is_zero(res.norm(), scale=qq_residual_scale(new_inst, new_sol, i))
        report.check(f"folded_qq_residual_{i}", ok, fileio.residual_repr(field, res.norm()))
    idoc = fileio.instance_to_doc(new_inst)
    sdoc = fileio.solution_to_doc(field, new_sol)
    if args.out:
        base, ext = os.path.splitext(args.out)
        _write_json(base + ".instance" + (ext or ".json"), idoc)
        _write_json(base + ".solution" + (ext or ".json"), sdoc)
    else:
        report.artifact("instance", idoc)
        report.artifact("solution", sdoc)
    _write_json(None, report.finish(time.monotonic() - t0))
    return EXIT_OK if report.all_pass else EXIT_CHECK


def cmd_diagonalize(args) -> int:
    inst = _load_instance(args)
    sol = fileio.solution_from_doc(inst.field, _load_json(args.solution))
    word = fileio.word_from_arg(args.word, inst.rank)
    t0 = time.monotonic()
    report = fileio.Report("diagonalize", inst, seed=args.seed)
    diag = diagonalize_type_a(inst, sol, word)
    field = inst.field
    report.check("conjugation_identity", field.is_zero(diag.residual, scale=1),
                 fileio.residual_repr(field, diag.residual))
    mdoc = fileio.matrix_to_doc(field, diag.v)
    if args.out:
        _write_json(args.out, mdoc)
    else:
        report.artifact("matrix", mdoc)
    _write_json(None, report.finish(time.monotonic() - t0))
    return EXIT_OK if report.all_pass else EXIT_CHECK


def _run_captured(args) -> tuple:
    """Worker entry: run a command with stdout buffered, for orderly reports."""
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = args.fn(args)
    return code, buf.getvalue()


def _batch(args) -> int:
    paths = sorted(glob.glob(args.instance))
    if not paths:
        raise ParseError(f"batch glob {args.instance!r} matched nothing")
    from concurrent.futures import ProcessPoolExecutor

    codes = []
    with ProcessPoolExecutor() as pool:
        futures = []
        for p in paths:
            sub = argparse.Namespace(**vars(args))
            sub.instance = p
            sub.solution = p.replace(".instance.json", ".solution.json")
            sub.batch = False
            futures.append(pool.submit(_run_captured, sub))
        for f in futures:  # reports print in input order, never interleaved
            code, text = f.result()
            codes.append(code)
            if text:
                sys.stdout.write(text)
    return max(codes)


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["exact", "numeric"], default=None,
                        help="override the instance file's scalar backend")
    common.add_argument("--precision", type=int, default=None,
                        help="binary precision for the numeric backend")
    common.add_argument("--tol", default=None, help="solver convergence tolerance")
    common.add_argument("--seed", type=int, default=0, help="randomness seed")

    parser = argparse.ArgumentParser(
        prog="betheqq",
        description="verify, solve, transform, fold, and diagonalize Wronskian "
                    "qq-systems and their Bethe root configurations",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("verify", parents=[common],
                       help="check a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution", nargs="?")
    p.add_argument("--out", default=None)
    p.add_argument("--batch", action="store_true",
                   help="treat INSTANCE as a glob of *.instance.json with sibling solutions")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("solve", parents=[common], help="solve Bethe equations from a partition or initial roots")
    p.add_argument("instance")
    p.add_argument("start", help="JSON file with a 'partition' or 'roots' key")
    p.add_argument("--steps", type=int, default=64, help="continuation steps")
    p.add_argument("--out", default=None, help="write the solution file here")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("chain", parents=[common], help="iterate Backlund transformations along a word")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--word", required=True, help="comma-separated reflection indices")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_chain)

    p = sub.add_parser("admissible", parents=[common], help="check the degree inequalities along a word")
    p.add_argument("instance", help="instance file (with --degrees) or bare datum file")
    p.add_argument("--word", required=True)
    p.add_argument("--degrees", default=None)
    p.set_defaults(fn=cmd_admissible)

    p = sub.add_parser("fold", parents=[common], help="fold a B-type or G-type system to its simply-laced shadow")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--out", default=None, help="basename for folded instance/solution files")
    p.set_defaults(fn=cmd_fold)

    p = sub.add_parser("diagonalize", parents=[common], help="type-A diagonalizing gauge along a longest word")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--word", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_diagonalize)

    args = parser.parse_args(argv)
    try:
        if getattr(args, "batch", False):
            return _batch(args)
        return args.fn(args)
    except (ParseError, BadPartition) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoConvergence, SingularJacobian, PathCollision) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InconsistentSystem, ChainBroken) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except BetheqqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
