"""Command-line front end.

Exit status: 0 for success or a positive answer, 1 for a negative or
inconclusive answer, 2 for usage and input errors.  Model and setting
arguments are file paths; ``fixture:NAME`` reads a bundled fixture.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .abstraction import extend_rho, gtok, parse_setting, serialize_setting, steps_abstraction
from .approximant import approx, uniform_alpha, witness_check
from .errors import ModalMuError
from .explorer import (
    EnumUniverse, compare_gamma, gamma_bounded, kmts_sweep, minmodel_bounded, thorough_bounded,
)
from .formula import parse_formula, print_formula
from .models import Ks, ModelKind, as_gts, parse_model, serialize_model, to_dot
from .mucheck import ThreeValued, eval_sis, verdict
from .refinement import is_mixed_simulation, leq_mix_model, leq_mix_state, maximal_mixed_simulation
from .repro import CHECKS, load_fixture, paper_repro

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2
MINMODEL_CEILING = 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path.startswith("fixture:"):
        from importlib.resources import files
        return (files("modalmu") / "fixtures" / path[len("fixture:"):]).read_text()
    return Path(path).read_text()


def _model(path: str):
    return parse_model(_read(path))


def _model_state(ref: str) -> tuple[object, str]:
    path, sep, state = ref.rpartition(":")
    if not sep or not path:
        raise UsageError(f"expected MODEL:STATE, got {ref!r}")
    return _model(path), state


def _ap(text: Optional[str], fallback) -> tuple[str, ...]:
    if text is None:
        return tuple(sorted(fallback))
    return tuple(sorted(p.strip() for p in text.split(",") if p.strip()))


def _formulas(args) -> list:
    texts = list(args.formula or [])
    if getattr(args, "formula_file", None):
        for line in _read(args.formula_file).splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                texts.append(line)
    if not texts:
        raise UsageError("no formula given")
    return [parse_formula(t) for t in texts]


def _names(g, mask_set) -> str:
    return "{" + ", ".join(s for s in g.states if s in mask_set) + "}"


def cmd_check(args, out) -> int:
    m = _model(args.model)
    g = as_gts(m)
    status = EXIT_OK
    for f in _formulas(args):
        v = verdict(m, args.state, f)
        print(v, file=out)
        if args.sets:
            tt, ff = eval_sis(m, f)
            print(f"tt: {_names(g, tt)}", file=out)
            print(f"ff: {_names(g, ff)}", file=out)
        if v is not ThreeValued.TRUE:
            status = EXIT_NEGATIVE
    return status


def cmd_sets(args, out) -> int:
    m = _model(args.model)
    g = as_gts(m)
    for f in _formulas(args):
        tt, ff = eval_sis(m, f)
        print(f"{print_formula(f)}", file=out)
        print(f"tt: {_names(g, tt)}", file=out)
        print(f"ff: {_names(g, ff)}", file=out)
    return EXIT_OK


def cmd_mixedsim(args, out) -> int:
    k, m = _model(args.concrete), _model(args.abstract)
    if args.pair:
        s, _, t = args.pair.partition(":")
        ok = leq_mix_state(k, s, m, t)
        print(str(ok).lower(), file=out)
        return EXIT_OK if ok else EXIT_NEGATIVE
    if args.maximal:
        rel = maximal_mixed_simulation(k, m)
        gk, gm = as_gts(k), as_gts(m)
        ok_, om = {s: i for i, s in enumerate(gk.states)}, {s: i for i, s in enumerate(gm.states)}
        for a, b in sorted(rel.pairs, key=lambda p: (ok_[p[0]], om[p[1]])):
            print(f"{a} {b}", file=out)
        return EXIT_OK
    if args.relation:
        pairs = set()
        for item in args.relation.split(","):
            a, _, b = item.strip().partition(":")
            pairs.add((a, b))
        ok = is_mixed_simulation(k, m, pairs)
    else:
        ok = leq_mix_model(k, m)
    print(str(ok).lower(), file=out)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_gtok(args, out) -> int:
    g = as_gts(_model(args.model))
    k, smap = gtok(g, "figure-faithful" if args.figure_faithful else "keep-may")
    print(to_dot(k) if args.dot else serialize_model(k), end="", file=out)
    if args.setting:
        setting = parse_setting(_read(args.setting))
        print(serialize_setting(extend_rho(setting, smap, g), name="rho_ext"), end="", file=out)
    return EXIT_OK


def cmd_steps(args, out) -> int:
    k = _model(args.model)
    if not isinstance(k, Ks):
        raise UsageError("steps-abstract needs a Kripke structure (model ks)")
    result = steps_abstraction(k, args.prop)
    print(to_dot(result) if args.dot else serialize_model(result), end="", file=out)
    return EXIT_OK


def _alpha(text: str) -> dict[str, int]:
    alpha = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad budget entry {item!r}; expected NAME=K")
        alpha[name.strip()] = int(value)
    return alpha


def cmd_approx(args, out) -> int:
    for f in _formulas(args):
        alpha = _alpha(args.alpha) if args.alpha else uniform_alpha(f, args.k)
        print(print_formula(approx(f, alpha, simplified=args.simplify)), file=out)
    return EXIT_OK


def cmd_witness(args, out) -> int:
    m = _model(args.model)
    status = EXIT_OK
    for f in _formulas(args):
        report = witness_check(m, f, _alpha(args.alpha) if args.alpha else None)
        print(report, file=out)
        if not report.agree:
            status = EXIT_NEGATIVE
    return status


def _ks_universe(args, m) -> EnumUniverse:
    return EnumUniverse(ModelKind.KS, args.bound, _ap(args.ap, as_gts(m).ap))


def cmd_gamma(args, out) -> int:
    m = _model(args.model)
    u = _ks_universe(args, m)
    gamma = gamma_bounded(m, args.state, u)
    print(f"bound {u.max_states}: {len(gamma)} of {len(u)} pointed structures", file=out)
    if args.list:
        for i in sorted(gamma.members):
            print(f"# index {i}", file=out)
            print(serialize_model(u.model(i)), end="", file=out)
    return EXIT_OK


def cmd_gamma_compare(args, out) -> int:
    (ma, sa), (mb, sb) = _model_state(args.a), _model_state(args.b)
    ap = _ap(args.ap, as_gts(ma).ap | as_gts(mb).ap)
    u = EnumUniverse(ModelKind.KS, args.bound, ap)
    res = compare_gamma(gamma_bounded(ma, sa, u), gamma_bounded(mb, sb, u))
    if res.equal:
        print(f"equal up to bound {args.bound}", file=out)
        return EXIT_OK
    print(f"different at bound {args.bound}; witness index {res.witness}", file=out)
    print(serialize_model(u.model(res.witness)), end="", file=out)
    return EXIT_NEGATIVE


def cmd_thorough(args, out) -> int:
    m = _model(args.model)
    u = _ks_universe(args, m)
    v = ThreeValued.TRUE
    for f in _formulas(args):
        v = thorough_bounded(m, args.state, f, u)
        print(f"{v} (bound {args.bound})", file=out)
    return EXIT_OK if v is ThreeValued.TRUE else EXIT_NEGATIVE


def cmd_minmodel(args, out) -> int:
    if not 1 <= args.max_size <= MINMODEL_CEILING:
        raise UsageError(f"--max-size must be between 1 and {MINMODEL_CEILING}")
    k = _model(args.concrete)
    if not isinstance(k, Ks):
        raise UsageError("minmodel needs a Kripke structure (model ks)")
    (f,) = _formulas(args)[:1]
    n = minmodel_bounded(f, k, args.max_size)
    if n is None:
        print(f"none up to size {args.max_size}", file=out)
        return EXIT_NEGATIVE
    print(n, file=out)
    return EXIT_OK


def cmd_kmts_sweep(args, out) -> int:
    m, s = _model_state(args.against)
    ap = _ap(args.ap, as_gts(m).ap)
    report = kmts_sweep(m, s, args.size, args.bound, ap)
    print(f"candidates: {report.candidates} (pointed KMTSs with at most {args.size} states)", file=out)
    print(f"mismatched: {report.mismatches} (KS bound {args.bound}, ap {{{', '.join(ap)}}})", file=out)
    for n, i in report.matches:
        print(f"match: size {n} index {i}", file=out)
    for w in sorted(report.witnesses):
        print(f"witness {w}: {report.witnesses[w]} candidates", file=out)
    if report.all_mismatch:
        print("no KMTS matches up to the bound", file=out)
        return EXIT_OK
    return EXIT_NEGATIVE


def cmd_repro(args, out) -> int:
    only = [n.strip() for n in args.only.split(",")] if args.only else None
    if only:
        unknown = [n for n in only if n not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s) {unknown}; known: {', '.join(CHECKS)}")
    report = paper_repro(only, args.fixtures)
    for line in report.lines():
        print(line, file=out)
    print(f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed", file=out)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modalmu", description="Three-valued mu-calculus model checking toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_args(sp, required=True):
        sp.add_argument("--formula", action="append", help="formula text (repeatable)")
        sp.add_argument("--formula-file", help="file with one formula per line")

    sp = sub.add_parser("check", help="three-valued verdict at a state")
    sp.add_argument("--model", required=True)
    sp.add_argument("--state", required=True)
    formula_args(sp)
    sp.add_argument("--sets", action="store_true", help="also print the truth and falsity sets")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("sets", help="truth and falsity sets")
    sp.add_argument("--model", required=True)
    formula_args(sp)
    sp.set_defaults(func=cmd_sets)

    sp = sub.add_parser("mixedsim", help="mixed simulation between two models")
    sp.add_argument("--concrete", required=True)
    sp.add_argument("--abstract", required=True)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--maximal", action="store_true", help="print the maximal mixed simulation")
    group.add_argument("--pair", help="decide s:t for one state pair")
    group.add_argument("--relation", help="check a relation given as a:b,c:d")
    sp.set_defaults(func=cmd_mixedsim)

    sp = sub.add_parser("gtok", help="turn a GTS into a KMTS")
    sp.add_argument("--model", required=True)
    sp.add_argument("--figure-faithful", action="store_true")
    sp.add_argument("--setting", help="abstraction setting to extend")
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_gtok)

    sp = sub.add_parser("steps-abstract", help="collapse a KS by distance to a proposition")
    sp.add_argument("--model", required=True)
    sp.add_argument("--prop", required=True)
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_steps)

    sp = sub.add_parser("approx", help="least-fixpoint-free approximant")
    formula_args(sp)
    budget = sp.add_mutually_exclusive_group()
    budget.add_argument("--k", type=int, default=1, help="uniform budget")
    budget.add_argument("--alpha", help="per-variable budget, e.g. X=2,Y=1")
    sp.add_argument("--simplify", action="store_true")
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("witness", help="compare a formula with its approximant on a model")
    sp.add_argument("--model", required=True)
    formula_args(sp)
    sp.add_argument("--alpha")
    sp.set_defaults(func=cmd_witness)

    for name, func in (("gamma", cmd_gamma), ("thorough", cmd_thorough)):
        sp = sub.add_parser(name, help="bounded concretisations" if name == "gamma" else "bounded thorough verdict")
        sp.add_argument("--model", required=True)
        sp.add_argument("--state", required=True)
        sp.add_argument("--bound", type=int, required=True)
        sp.add_argument("--ap", help="comma separated propositions (default: the model's)")
        if name == "gamma":
            sp.add_argument("--list", action="store_true")
        else:
            formula_args(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("gamma-compare", help="compare two bounded concretisation sets")
    sp.add_argument("--a", required=True, metavar="MODEL:STATE")
    sp.add_argument("--b", required=True, metavar="MODEL:STATE")
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--ap")
    sp.set_defaults(func=cmd_gamma_compare)

    sp = sub.add_parser("minmodel", help="least GTS size proving a formula over a KS")
    formula_args(sp)
    sp.add_argument("--concrete", required=True)
    sp.add_argument("--max-size", type=int, default=2)
    sp.set_defaults(func=cmd_minmodel)

    sp = sub.add_parser("kmts-sweep", help="look for a KMTS with the same bounded concretisations")
    sp.add_argument("--against", required=True, metavar="MODEL:STATE")
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--ap")
    sp.set_defaults(func=cmd_kmts_sweep)

    sp = sub.add_parser("paper-repro", help="run the bundled reproduction checks")
    sp.add_argument("--only", help="comma separated check names")
    sp.add_argument("--fixtures", help="directory overriding the bundled fixtures")
    sp.set_defaults(func=cmd_repro)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ModalMuError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=err)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
