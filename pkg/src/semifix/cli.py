"""Command-line surface: run, ground, analyze, oracle, semiring, gen.

Exit codes: 0 success, 1 input or usage errors, 2 cap or budget exhausted,
3 bound violation detected by analyze.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import functools
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from . import bounds, engine, generators, walks
from .errors import EnumerationBudgetExceeded, NotNaturallyOrdered, SemifixError
from .frontend import (
    GroundedLinearSystem,
    build_edb,
    classify_linearity,
    ground,
    parse_facts_tsv,
    parse_program,
)
from .semirings import (
    check_axioms,
    effective_stability,
    longest_chain,
    semiring_from_id,
    semiring_stability,
)


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--semiring", help="semiring id, e.g. bool, trop, trop_p:2, capped:4")
    p.add_argument("--cap", type=int, help="iteration cap (default derives from bounds)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized work")
    p.add_argument(
        "--budget",
        type=int,
        default=walks.DEFAULT_WALK_BUDGET,
        help="walk enumeration budget",
    )
    p.add_argument(
        "--inflationary",
        action="store_true",
        help="iterate x <- x (+) f(x) instead of x <- f(x)",
    )
    p.add_argument("--no-prune", action="store_true", help="keep unproductive ground atoms")
    p.add_argument("--format", choices=("human", "csv", "json"), default="human")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument(
        "--reproducible",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="omit the timestamp header so reruns are byte-identical",
    )


def _emit(args, text: str):
    if not args.reproducible:
        stamp = datetime.now(timezone.utc).isoformat()
        text = f"# generated {stamp}\n{text}"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _resolve_semiring(args, program):
    sid = args.semiring or program.semiring_id
    if sid is None:
        raise SemifixError("no semiring: pass --semiring or add an @semiring directive")
    return semiring_from_id(sid)


def _load_program_db(args):
    text = Path(args.program).read_text(encoding="utf-8")
    program = parse_program(text)
    semiring = _resolve_semiring(args, program)
    entries = [(f.pred, f.args, f.literal) for f in program.facts]
    if args.facts:
        tsv = parse_facts_tsv(semiring, Path(args.facts).read_text(encoding="utf-8"))
        entries.extend(
            (pred, atom_args, semiring.show(value))
            for (pred, atom_args), value in sorted(tsv.facts.items())
        )
    db = build_edb(semiring, entries)
    return program, db


def cmd_run(args) -> int:
    program, db = _load_program_db(args)
    system = ground(program, db, prune=not args.no_prune)
    if isinstance(system, GroundedLinearSystem):
        trace = engine.naive_eval_linear(system, cap=args.cap, inflationary=args.inflationary)
    else:
        trace = engine.naive_eval_general(system, cap=args.cap, inflationary=args.inflationary)
    s = system.semiring
    if args.format == "csv":
        _emit(args, engine.trace_csv(system, trace))
    elif args.format == "json":
        fix = trace.fixpoint or trace.states[-1]
        payload = {
            "atoms": {
                label: s.show(v) for label, v in zip(system.atom_labels(), fix)
            },
            "stability_index": trace.stability_index,
            "powersum_index": trace.powersum_index,
            "capped": trace.capped,
            "steps": trace.wall_steps,
        }
        _emit(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        lines = []
        fix = trace.fixpoint or trace.states[-1]
        for label, v in zip(system.atom_labels(), fix):
            lines.append(f"{label} = {s.show(v)}")
        if trace.capped:
            lines.append(f"no fixpoint within cap ({trace.wall_steps} steps)")
        else:
            lines.append(
                f"stability index: {trace.stability_index} (states), "
                f"{trace.powersum_index} (power sums)"
            )
        _emit(args, "\n".join(lines) + "\n")
    return 2 if trace.capped else 0


def cmd_ground(args) -> int:
    program, db = _load_program_db(args)
    report = classify_linearity(program)
    if not report.linear:
        ri, pi, count = next(c for c in report.product_idb_counts if c[2] > 1)
        rule = program.rules[ri]
        raise SemifixError(
            f"rule {ri + 1} is not linear: product {pi + 1} of {rule.head.pred} "
            f"uses {count} derived atoms"
        )
    system = ground(program, db, prune=not args.no_prune)
    _emit(args, engine.save_system(system))
    return 0


def _system_from_args(args) -> GroundedLinearSystem:
    if args.matrix:
        return engine.load_system(Path(args.matrix).read_text(encoding="utf-8"))
    if not args.program:
        raise SemifixError("pass a matrix file or --program/--facts")
    program, db = _load_program_db(args)
    system = ground(program, db, prune=not args.no_prune)
    if not isinstance(system, GroundedLinearSystem):
        raise SemifixError("analysis needs a linear program")
    return system


def cmd_analyze(args) -> int:
    paths: List[str] = args.matrix_files
    reports = []
    if paths:
        task = functools.partial(
            _analyze_path, cap=args.cap, claimed_p=args.claimed_p, claimed_L=args.claimed_L
        )
        if args.workers > 1 and len(paths) > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=args.workers) as pool:
                reports = list(pool.map(task, paths))
        else:
            reports = [task(p) for p in paths]
    else:
        if not args.program:
            raise SemifixError("pass matrix files or --program")
        args.matrix = None
        system = _system_from_args(args)
        reports = [
            bounds.analyze(
                system,
                cap=args.cap,
                instance_id=args.program,
                claimed_p=args.claimed_p,
                claimed_L=args.claimed_L,
            )
        ]
    text = bounds.reports_jsonl(reports)
    if args.summary:
        Path(args.summary).write_text(bounds.summary_csv(reports), encoding="utf-8")
    _emit(args, text)
    return 3 if any(r.violations for r in reports) else 0


def _analyze_path(
    path: str,
    cap: Optional[int] = None,
    claimed_p: Optional[int] = None,
    claimed_L: Optional[int] = None,
) -> bounds.BoundReport:
    system = engine.load_system(Path(path).read_text(encoding="utf-8"))
    return bounds.analyze(
        system, cap=cap, instance_id=path, claimed_p=claimed_p, claimed_L=claimed_L
    )


def cmd_oracle(args) -> int:
    system = engine.load_system(Path(args.matrix).read_text(encoding="utf-8"))
    A, s = system.A, system.semiring
    i, j, max_h = args.i, args.j, args.h
    rows = []
    power = engine.matrix_power_sum(A, 0).value  # identity
    psum = power
    all_equal = True
    for h in range(max_h + 1):
        if h > 0:
            power = A.matmul(power) if h > 1 else A
            psum = engine.matrix_power_sum(A, h).value
        exact = walks.walk_sum_exact(A, i, j, h, budget=args.budget)
        upto = walks.walk_sum_upto(A, i, j, h, budget=args.budget)
        ok = exact == power.get(i, j) and upto == psum.get(i, j)
        all_equal = all_equal and ok
        rows.append(
            (
                h,
                s.show(exact),
                s.show(power.get(i, j)),
                s.show(upto),
                s.show(psum.get(i, j)),
                "equal" if ok else "UNEQUAL",
            )
        )
    header = ("h", "walks=h", "A^h", "walks<=h", "S(h)", "verdict")
    if args.format == "csv":
        lines = [",".join(header)] + [",".join(str(c) for c in r) for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    else:
        widths = [max(len(str(r[k])) for r in ([header] + rows)) for k in range(6)]
        lines = [
            "  ".join(str(c).ljust(w) for c, w in zip(r, widths))
            for r in [header] + rows
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0 if all_equal else 3


def cmd_semiring(args) -> int:
    s = semiring_from_id(args.id)
    report = check_axioms(s, sample_budget=args.budget_axioms, seed=args.seed)
    lines = [f"semiring {s.id}"]
    mode = "exhaustive" if report.exhaustive else f"sampled ({report.samples} tuples)"
    lines.append(f"axioms ({mode}):")
    for c in report.checks:
        if c.passed:
            lines.append(f"  {c.name}: pass")
        else:
            witness = ", ".join(s.show(x) for x in c.counterexample)
            lines.append(f"  {c.name}: FAIL at ({witness})")
    carrier = s.elements()
    if carrier is not None:
        stab = semiring_stability(s)
        lines.append(f"carrier size: {len(carrier)}")
        if stab.index is None:
            lines.append("stability: not reached within cap")
        else:
            lines.append(f"stability: {stab.index}-stable (witness {s.show(stab.witness)})")
        try:
            chain = longest_chain(s)
            lines.append(f"naturally ordered, longest chain {chain}")
        except NotNaturallyOrdered:
            lines.append("not naturally ordered")
    else:
        p, src = effective_stability(s)
        if p is not None:
            lines.append(f"stability: {p}-stable ({src})")
        lines.append("carrier not enumerable; order and chain not computed")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if report.all_passed else 1


def cmd_gen(args) -> int:
    family = args.family
    if family == "cycle":
        system = generators.gen_cycle_lowerbound(args.n, args.L)
        spec = generators.cycle_lowerbound_spec(args.n, args.L)
    elif family == "random":
        s = semiring_from_id(args.semiring or "trop")
        wrange = (args.wmin, args.wmax)
        system = generators.gen_random_digraph(
            args.n, args.density, wrange, s, args.seed, prune=not args.no_prune
        )
        spec = generators.random_digraph_spec(args.n, args.density, wrange, s.id, args.seed)
    elif family == "randsys":
        s = semiring_from_id(args.semiring or "capped:4")
        system = generators.gen_random_system(args.n, args.density, s, args.seed)
        spec = generators.random_system_spec(args.n, args.density, s.id, args.seed)
    elif family == "blocked":
        s = semiring_from_id(args.semiring or "bool")
        g = generators.gen_blocked_graph(args.n, s)
        atoms = tuple(("v", (str(k),)) for k in range(args.n))
        system = GroundedLinearSystem(
            s,
            atoms,
            {a: k for k, a in enumerate(atoms)},
            g.matrix,
            tuple([s.zero] * args.n),
            args.n,
            False,
        )
        spec = g.spec
    else:  # pragma: no cover - argparse restricts choices
        raise SemifixError(f"unknown family {family}")
    _emit(args, engine.save_system(system, header=spec.header_lines()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="semifix",
        description="evaluate, measure and verify semiring fixpoint systems",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a program to its fixpoint")
    p.add_argument("program")
    p.add_argument("facts", nargs="?", help="optional TSV facts file")
    _add_common_flags(p)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("ground", help="emit the matrix form of a linear program")
    p.add_argument("program")
    p.add_argument("facts", nargs="?")
    _add_common_flags(p)
    p.set_defaults(handler=cmd_ground)

    p = sub.add_parser("analyze", help="measure stability indices against bounds")
    p.add_argument("matrix_files", nargs="*", help="matrix files to analyze")
    p.add_argument("--program", help="program file instead of a matrix file")
    p.add_argument("--facts", help="TSV facts for --program")
    p.add_argument("--workers", type=int, default=1, help="parallel workers for batches")
    p.add_argument("--summary", help="also write a CSV summary to this path")
    p.add_argument(
        "--claimed-p",
        type=int,
        dest="claimed_p",
        help="stability index to assume for a non-enumerable carrier (reported as claimed)",
    )
    p.add_argument(
        "--claimed-L",
        type=int,
        dest="claimed_L",
        help="carrier size to assume for a non-enumerable carrier (reported as claimed)",
    )
    _add_common_flags(p)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("oracle", help="cross-check matrix powers against walk sums")
    p.add_argument("matrix")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--h", type=int, required=True, help="largest hop count to check")
    _add_common_flags(p)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("semiring", help="axiom, stability and order report")
    p.add_argument("id")
    p.add_argument(
        "--budget-axioms",
        type=int,
        default=10_000,
        dest="budget_axioms",
        help="sample budget for axiom checking",
    )
    _add_common_flags(p)
    p.set_defaults(handler=cmd_semiring)

    p = sub.add_parser("gen", help="write a generated instance as a matrix file")
    p.add_argument("family", choices=("cycle", "random", "randsys", "blocked"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, help="cap for the cycle family")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--wmin", type=int, default=1)
    p.add_argument("--wmax", type=int, default=9)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_gen)

    return top


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.family == "cycle" and args.L is None:
        parser.error("gen cycle needs --L")
    try:
        return args.handler(args)
    except EnumerationBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SemifixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry():  # pragma: no cover - thin wrapper
    sys.exit(main())
