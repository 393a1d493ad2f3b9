"""nilcsat command line.

Exit codes: 0 success, 1 usage or domain error, 2 format or I/O error,
3 resource or budget exhausted, 4 a verification sweep found violations.
`solve --status-exit` instead exits 10 on SAT and 20 on UNSAT or
PROBABLY_UNSAT.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from itertools import product
from pathlib import Path

import numpy as np

from . import config
from .algebra import ProductAlgebra, build_example, coordinate_names, direct_product
from .algfile import format_algebra, load_algebra
from .circuit import format_circuit, load_circuit, parse_circuit, random_circuit
from .density import Density, check_density, preimage_reduction
from .errors import BudgetError, CsatError, FormatError, UsageError
from .gf import PrimeField
from .hitting import hitting_set_size
from .poly import format_poly, interpolate, parse_poly, random_poly
from .report import RunReport, answer_dict
from .rng import Rng
from .solve import (
    D_CHOICES,
    MonteCarloConfig,
    Status,
    choose_d,
    mc_density,
    mc_trials,
    solve,
)
from .translate import circuit_to_system, combine, encode_field_equation, verify_translation

EXIT_VIOLATIONS = 4
EXIT_SAT = 10
EXIT_UNSAT = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _out(text=""):
    print(text)


def _load_instance(files):
    """ALG [ALG ...] CIR, or a lone CIR whose `algebra` line names the algebra."""
    if len(files) == 1:
        path = Path(files[0])
        try:
            head = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise FormatError(f"cannot read {path}: {exc.strerror}") from None
        m = re.search(r"^\s*algebra\s+(\S+)", head, re.M)
        if not m:
            raise UsageError("give the algebra file, or an `algebra` line in the circuit")
        ref = Path(m.group(1))
        if not ref.is_absolute() and not ref.exists():
            ref = path.parent / ref
        alg = load_algebra(ref)
        return alg, parse_circuit(head, alg)
    algs = [load_algebra(f) for f in files[:-1]]
    alg = algs[0] if len(algs) == 1 else direct_product(*algs)
    return alg, load_circuit(files[-1], alg)


# -- solve -----------------------------------------------------------------------


def cmd_solve(args):
    if args.epsilon is not None and args.method != "mc":
        raise UsageError("--epsilon only applies to --method mc")
    if args.max_trials is not None and args.method != "mc":
        raise UsageError("--max-trials only applies to --method mc")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    eps = 0.01 if args.epsilon is None else args.epsilon
    if args.method == "mc" and not 0 < eps < 1:
        raise UsageError(f"--epsilon must lie in (0, 1), got {eps}")
    alg, c = _load_instance(args.files)
    cfg = MonteCarloConfig(eps, args.seed, args.max_trials, args.d) if args.method == "mc" else None
    ans = solve(c, args.method, d_choice=args.d, budget=args.budget, jobs=args.jobs, cfg=cfg)
    report = RunReport(
        command=["solve", *args.files],
        config={
            "method": args.method,
            "d_choice": args.d,
            "epsilon": eps if args.method == "mc" else None,
            "seed": args.seed,
            "max_trials": args.max_trials,
            "budget": args.budget,
            "jobs": args.jobs,
        },
        result=answer_dict(ans, alg),
    )
    _out(report.to_json())
    if args.report:
        _write(args.report, report.to_json() + "\n")
    if args.status_exit:
        return EXIT_SAT if ans.status is Status.SAT else EXIT_UNSAT
    return 0


# -- translate / encode ------------------------------------------------------------


def cmd_translate(args):
    alg, c = _load_instance(args.files)
    if isinstance(alg, ProductAlgebra):
        raise UsageError("translate works on one coordinatized algebra at a time")
    names = coordinate_names(c.n_inputs, alg.h)
    system = circuit_to_system(c)
    f = combine(system)
    rep = verify_translation(c, f)
    for k, p in enumerate(system, start=1):
        _out(f"p{k} = {format_poly(p, names)}")
    _out(f"f = {format_poly(f, names)}")
    _out(rep.degree_line())
    levels = ", ".join(f"{k} {rep.aggregates[k]} (d = {rep.level_degrees[k]})" for k in rep.aggregates)
    _out(f"sum alpha_i d_i: {levels}; bound {rep.sys_pol_bound}")
    _out(f"iff checked on {rep.assignments} assignments: {'ok' if rep.ok else 'FAILED'}")
    for issue in rep.issues:
        _out(f"violation: {issue}")
    return 0 if rep.ok else EXIT_VIOLATIONS


def _parse_equation(text, field, n_vars):
    lhs, eq, rhs = text.partition("=")
    if not eq:
        raise UsageError("equation must look like 'P = Q'")
    if n_vars is None:
        idx = [int(i) for i in re.findall(r"x(\d+)", text)]
        n_vars = max(idx, default=0)
    left = parse_poly(lhs, field, n_vars=n_vars)
    right = parse_poly(rhs, field, n_vars=n_vars)
    if right.is_constant():
        return left, int(right.constant_term)
    return left - right, 0


def cmd_encode(args):
    field = PrimeField(args.q)
    p, y = _parse_equation(args.equation, field, args.n)
    c = encode_field_equation(p, y, args.h, args.m)
    text = format_circuit(c, args.algebra_ref)
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _write(path, text):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc.strerror}") from None


# -- verify -------------------------------------------------------------------------


def _verify_density(q, n, count, seed):
    field = PrimeField(q)
    violations = checked = 0
    if count is None:
        n_funcs = q ** (q**n)
        config.check_exhaustion(n_funcs * q**n, "exhaustive density sweep")
        polys = (
            interpolate(field, n, np.array(t, dtype=np.int64))
            for t in product(range(q), repeat=q**n)
        )
    else:
        rng = Rng(seed)
        polys = (random_poly(field, rng.between(1, n), rng) for _ in range(count))
    for p in polys:
        checked += 1
        for y in range(q):
            if check_density(p, y) is Density.VIOLATION:
                violations += 1
    what = "functions" if count is None else "random polynomials"
    return checked, violations, f"{checked} {what} checked, {violations} violations"


def _verify_degree(alg_path, n, count, seed, gates):
    alg = load_algebra(alg_path)
    rng = Rng(seed)
    worst = 0
    violations = 0
    bound = None
    for _ in range(count):
        k = rng.between(n + 2, n + gates)
        c = random_circuit(alg, n, k, rng.below(2**63))
        rep = verify_translation(c)
        worst = max(worst, rep.degree)
        bound = rep.refined
        violations += len(rep.issues)
        for issue in rep.issues:
            _out(f"violation: {issue}")
    msg = f"{count} circuits, max deg f = {worst} <= {bound}, {violations} violations"
    return count, violations, msg


def _verify_reduction(q, n, count, seed):
    field = PrimeField(q)
    rng = Rng(seed)
    checked = violations = 0
    min_slack = None
    while checked < count:
        nv = rng.between(1, n)
        p = random_poly(field, nv, rng)
        if p.is_constant():
            continue
        counts = np.bincount(p.value_table(), minlength=q)
        ys = [y for y in range(q) if counts[y]]
        y = ys[rng.below(len(ys))]
        trace = preimage_reduction(p, y)
        checked += 1
        bad = trace.violations()
        violations += len(bad)
        for issue in bad:
            _out(f"violation: {issue}")
        slack = p.degree() - (nv - trace.l)
        min_slack = slack if min_slack is None else min(min_slack, slack)
    msg = f"{checked} traces checked, {violations} violations, min (deg f - (n - l)) = {min_slack}"
    return checked, violations, msg


def cmd_verify(args):
    modes = [m for m in (args.density, args.degree, args.reduction) if m is not None]
    if len(modes) != 1:
        raise UsageError("choose exactly one of --density, --degree, --reduction")
    if args.density is not None:
        q, n = _ints(args.density, "--density")
        checked, bad, msg = _verify_density(q, n, args.random, args.seed)
        kind = "density"
    elif args.degree is not None:
        alg_path, n, count = args.degree
        n, count = _ints([n, count], "--degree")
        checked, bad, msg = _verify_degree(alg_path, n, count, args.seed, args.gates)
        kind = "degree"
    else:
        q, n = _ints(args.reduction, "--reduction")
        checked, bad, msg = _verify_reduction(q, n, args.count, args.seed)
        kind = "reduction"
    _out(msg)
    if args.report:
        rep = RunReport(
            ["verify", f"--{kind}"],
            {"seed": args.seed, "random": args.random, "count": args.count, "gates": args.gates},
            {"checked": checked, "violations": bad, "summary": msg},
        )
        _write(args.report, rep.to_json() + "\n")
    return EXIT_VIOLATIONS if bad else 0


def _ints(values, flag):
    try:
        return [int(v) for v in values]
    except ValueError:
        raise UsageError(f"{flag} expects integers, got {values}") from None


# -- gen ----------------------------------------------------------------------------


def cmd_gen(args):
    if (args.example is None) == (args.random_circuits is None):
        raise UsageError("choose exactly one of --example, --random-circuits")
    out = Path(args.output) if args.output else None
    if args.example is not None:
        q, h, m = args.example
        alg = build_example(q, h, m)
        name = f"a{h}{m}.alg" if q == 2 else f"a{h}{m}_q{q}.alg"
        path = out if out and out.suffix == ".alg" else (out or Path(".")) / name
        _write(path, format_algebra(alg))
        _out(str(path))
        return 0
    alg_path, n, k, count, seed = args.random_circuits
    n, k, count, seed = _ints([n, k, count, seed], "--random-circuits")
    alg = load_algebra(alg_path)
    directory = out or Path(".")
    rng = Rng(seed)
    width = max(4, len(str(count - 1)))
    for i in range(count):
        c = random_circuit(alg, n, k, rng.below(2**63))
        _write(directory / f"c{i:0{width}d}.cir", format_circuit(c, alg_path))
    _out(f"{count} circuits written to {directory}")
    return 0


# -- bench --------------------------------------------------------------------------


def cmd_bench(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in ("brute", "hitting", "mc"):
            raise UsageError(f"unknown method {m!r}")
    algs = [load_algebra(a) for a in args.algebra]
    alg = algs[0] if len(algs) == 1 else direct_product(*algs)
    corpus = Path(args.corpus)
    files = sorted(corpus.glob("*.cir")) if corpus.is_dir() else []
    if not files:
        raise FormatError(f"no .cir files in {corpus}")
    cols = ["instance", "method", "status", "agree", "candidates", "hitting_set_size", "trials", "N", "seconds"]
    rows = []
    _out("\t".join(cols))
    for path in files:
        c = load_circuit(path, alg)
        ref = None
        for method in methods:
            row = {"instance": path.name, "method": method}
            cfg = MonteCarloConfig(args.epsilon, args.seed, None, args.d) if method == "mc" else None
            t0 = time.perf_counter()
            try:
                ans = solve(c, method, d_choice=args.d, budget=args.budget, cfg=cfg)
            except BudgetError:
                row.update(status="BUDGET", agree="", candidates="", hitting_set_size="", trials="", N="")
                row["seconds"] = round(time.perf_counter() - t0, 6)
                rows.append(row)
                _out("\t".join(str(row[k]) for k in cols))
                continue
            sat = ans.status is Status.SAT
            if ref is None:
                ref = sat
            row.update(
                status=ans.status.value,
                agree=int(sat == ref),
                candidates=ans.stats.candidates_checked,
                hitting_set_size=ans.info.get("hitting_set_size", ""),
                trials=ans.stats.trials if method == "mc" else "",
                N=ans.info.get("N", ""),
                seconds=round(ans.stats.elapsed, 6),
            )
            rows.append(row)
            _out("\t".join(str(row[k]) for k in cols))
    agg = {"instances": len(files), "methods": {}}
    for method in methods:
        mine = [r for r in rows if r["method"] == method]
        done = [r for r in mine if r["status"] != "BUDGET"]
        agg["methods"][method] = {
            "runs": len(mine),
            "budget_exceeded": len(mine) - len(done),
            "agreement": sum(r["agree"] for r in done) / len(done) if done else None,
            "sat": sum(1 for r in done if r["status"] == "SAT"),
            "max_candidates": max((r["candidates"] for r in done), default=None),
            "seconds": round(sum(r["seconds"] for r in mine), 6),
        }
    rep = RunReport(
        ["bench", *args.algebra, args.corpus],
        {"methods": methods, "d_choice": args.d, "epsilon": args.epsilon, "seed": args.seed, "budget": args.budget},
        agg,
    )
    _out("# " + json.dumps(agg, sort_keys=True))
    if args.json:
        _write(args.json, rep.to_json() + "\n")
    if args.tsv:
        _write(args.tsv, "\t".join(cols) + "\n" + "".join("\t".join(str(r[k]) for k in cols) + "\n" for r in rows))
    return 0


# -- info ---------------------------------------------------------------------------


def cmd_info(args):
    alg = load_algebra(args.algebra)
    b = mc_density(alg, args.d)
    plan = mc_trials(b, args.epsilon)
    _out(f"q {alg.q}, alphas {list(alg.alphas)}, |A| = {alg.size}, max arity {alg.max_arity}")
    _out(f"d ({args.d}) = {choose_d(alg, args.d)}; c = {b}; N(eps={args.epsilon}) = {plan.trials}")
    if args.n is not None:
        _out(f"hitting set for n = {args.n}: {hitting_set_size(args.n * alg.h, b.d, alg.q)} candidates")
    return 0


def build_parser():
    p = _Parser(prog="nilcsat", description="CSAT over finite nilpotent algebras in coordinatized form.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="decide a circuit")
    s.add_argument("files", nargs="+", metavar="FILE", help="algebra file(s), then the circuit file")
    s.add_argument("--method", choices=("brute", "hitting", "mc"), default="hitting")
    s.add_argument("--d", choices=D_CHOICES, default="refined")
    s.add_argument("--epsilon", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-trials", type=int)
    s.add_argument("--budget", type=float, help="wall-clock seconds")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--status-exit", action="store_true")
    s.add_argument("--report", help="also write the report to this file")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("translate", help="circuit -> polynomial system and f")
    t.add_argument("files", nargs="+", metavar="FILE")
    t.set_defaults(func=cmd_translate)

    e = sub.add_parser("encode", help="field equation -> circuit over A[h, m]")
    e.add_argument("equation")
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--h", type=int, required=True)
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--n", type=int, help="number of variables (default: largest xi used)")
    e.add_argument("--algebra-ref", help="path recorded in the circuit's algebra line")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_encode)

    v = sub.add_parser("verify", help="bound-checking sweeps")
    v.add_argument("--density", nargs=2, metavar=("Q", "N"))
    v.add_argument("--degree", nargs=3, metavar=("ALGEBRA", "N", "COUNT"))
    v.add_argument("--reduction", nargs=2, metavar=("Q", "N"))
    v.add_argument("--random", type=int, help="density: check this many random polynomials instead")
    v.add_argument("--count", type=int, default=200, help="reduction: number of traces")
    v.add_argument("--gates", type=int, default=8, help="degree: at most n + GATES gates")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write algebra or circuit files")
    g.add_argument("--example", nargs=3, type=int, metavar=("Q", "H", "M"))
    g.add_argument("--random-circuits", nargs=5, metavar=("ALGEBRA", "N", "K", "COUNT", "SEED"))
    g.add_argument("-o", "--output", help="file (example) or directory")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run methods over a corpus directory")
    b.add_argument("algebra", nargs="+")
    b.add_argument("corpus")
    b.add_argument("--methods", default="brute,hitting")
    b.add_argument("--d", choices=D_CHOICES, default="refined")
    b.add_argument("--epsilon", type=float, default=0.01)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--budget", type=float)
    b.add_argument("--json")
    b.add_argument("--tsv")
    b.set_defaults(func=cmd_bench)

    i = sub.add_parser("info", help="bounds for an algebra")
    i.add_argument("algebra")
    i.add_argument("--d", choices=D_CHOICES, default="refined")
    i.add_argument("--epsilon", type=float, default=0.01)
    i.add_argument("--n", type=int)
    i.set_defaults(func=cmd_info)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CsatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
