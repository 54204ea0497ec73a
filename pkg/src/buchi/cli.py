"""Command-line interface.

Exit codes: 0 success, 2 parse error, 3 state-explosion guard, 4 dimension
mismatch, 5 target infeasible, 6 round-trip mismatch.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .automata import (
    AutomatonFormatError,
    StateExplosionError,
    count_words_upto,
    read_automaton,
    write_automaton,
    zero_closure,
)
from .decide import compile, enumerate_solutions, is_sat
from .formulas import FormulaSyntaxError, format_formula, parse
from .growth import classify, decompose_poly, density_values_upto
from .regex import RegexSyntaxError, parse_block_union, regex_to_dfa

EXIT_PARSE = 2
EXIT_EXPLOSION = 3
EXIT_DIM = 4
EXIT_INFEASIBLE = 5
EXIT_ROUND_TRIP = 6


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _formula_text(args):
    if getattr(args, "file", None):
        return Path(args.file).read_text()
    if not getattr(args, "formula", None):
        raise CliError("no formula given", EXIT_PARSE)
    return args.formula


def _load_formula(args):
    return parse(_formula_text(args), args.base)


def _load_automaton(args):
    """Automaton from --aut, --regex or a formula, in that order of preference."""
    if getattr(args, "aut", None):
        a = read_automaton(Path(args.aut).read_text())
        if a.base != args.base:
            raise CliError(f"automaton has base {a.base} but -p is {args.base}", EXIT_PARSE)
        return a
    if getattr(args, "regex", None):
        return regex_to_dfa(args.regex, args.base)
    return compile(_load_formula(args))


def _fmt_assignment(assignment):
    if len(assignment) == 1:
        return str(next(iter(assignment.values())))
    return " ".join(f"{k}={v}" for k, v in assignment.items())


def cmd_compile(args, out):
    f = _load_formula(args)
    a = compile(f)
    text = write_automaton(a)
    info = [f"states: {a.n_states}", f"vars: {' '.join(f.vars)}"]
    if not a.finals:
        info.append("language: empty (UNSAT)")
    if args.output:
        Path(args.output).write_text(text)
        out.write("\n".join(info) + "\n")
    else:
        out.write(text)
        sys.stderr.write("\n".join(info) + "\n")
    return 0


def cmd_decide(args, out):
    f = _load_formula(args)
    sat, witness = is_sat(f)
    if not sat:
        out.write("UNSAT\n")
    else:
        pairs = ", ".join(f"{k}={v}" for k, v in witness.items())
        out.write(f"SAT {pairs}\n" if pairs else "SAT\n")
    return 0


def cmd_enum(args, out):
    f = _load_formula(args)
    for assignment in enumerate_solutions(f, args.limit):
        out.write(_fmt_assignment(assignment) + "\n")
    return 0


def cmd_density(args, out):
    a = _load_automaton(args)
    if args.mode == "values":
        if a.dim != 1:
            raise CliError(f"values mode needs one variable, got {a.dim}", EXIT_DIM)
        counts = density_values_upto(zero_closure(a), args.upto)
    else:
        counts = count_words_upto(a, args.upto)
    out.write("n,count\n")
    for n in range(1, args.upto + 1):
        out.write(f"{n},{counts[n]}\n")
    return 0


def cmd_classify(args, out):
    a = _load_automaton(args)
    if a.dim != 1:
        raise CliError(f"classification needs one variable, got {a.dim}", EXIT_DIM)
    v = classify(a)
    if v.kind == "polynomial":
        out.write(f"growth: polynomial\ndegree: {v.degree}\n")
    else:
        out.write(f"growth: exponential\nrate: {v.rate}\n")
    out.write(f"sigma1: {v.sigma1}\n")
    if v.kind == "exponential" and v.rate == "below-p":
        e = v.evidence
        word = lambda xs: "".join(map(str, xs)) or "ε"  # noqa: E731
        out.write(f"evidence: cycles {word(e.cycle1)} and {word(e.cycle2)} at state {e.state}, "
                  f"prefix {word(e.prefix)}, suffix {word(e.suffix)}\n")
    elif v.kind == "exponential":
        e = v.evidence
        word = lambda xs: "".join(map(str, xs)) or "ε"  # noqa: E731
        out.write(f"evidence: complete component {' '.join(map(str, e.component))}, "
                  f"prefix {word(e.prefix)}, final state within {e.reach} letters\n")
    else:
        blocks = " | ".join(str(b) for b in v.decomposition) or "∅"
        out.write(f"decomposition: {blocks}\n")
    return 0


def cmd_synth(args, out):
    from .synthesis import RoundTripError, synth_existential, synth_sigma2

    try:
        if args.target == "sigma1":
            blocks = None
            if args.regex:
                try:
                    blocks = parse_block_union(args.regex, args.base)
                except RegexSyntaxError:
                    blocks = None
            if blocks is None:
                a = _load_automaton(args)
                if a.dim != 1:
                    raise CliError("sigma1 synthesis handles one variable", EXIT_DIM)
                v = classify(a)
                if v.kind != "polynomial":
                    raise CliError(f"target infeasible: growth is {v}; no existential formula exists"
                                   if v.sigma1 == "NotInSigma1" else
                                   f"target infeasible: growth is {v}; the existential construction needs polynomial growth",
                                   EXIT_INFEASIBLE)
                blocks = v.decomposition or decompose_poly(zero_closure(a))
            f = synth_existential(blocks)
        else:
            a = zero_closure(_load_automaton(args))
            f = synth_sigma2(a)
    except RoundTripError as e:
        raise CliError(str(e), EXIT_ROUND_TRIP) from e
    out.write(format_formula(f))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="buchi", description="Büchi arithmetic toolkit")
    parser.add_argument("-p", "--base", type=int, default=2, help="base p of the digit encoding (default 2)")
    sub = parser.add_subparsers(dest="command", required=True)

    def formula_args(sp):
        sp.add_argument("formula", nargs="?", help="formula text")
        sp.add_argument("-f", "--file", help="read the formula from a file")

    sp = sub.add_parser("compile", help="compile a formula to an automaton file")
    formula_args(sp)
    sp.add_argument("-o", "--output", help="write the automaton here instead of stdout")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("decide", help="satisfiability with a witness")
    formula_args(sp)
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("enum", help="list the first solutions")
    formula_args(sp)
    sp.add_argument("--limit", type=int, default=10)
    sp.set_defaults(func=cmd_enum)

    for name, func, helptext in (("density", cmd_density, "census as CSV"),
                                 ("classify", cmd_classify, "growth verdict")):
        sp = sub.add_parser(name, help=helptext)
        formula_args(sp)
        sp.add_argument("--aut", help="automaton file")
        sp.add_argument("--regex", help="regular expression over digits")
        if name == "density":
            sp.add_argument("--mode", choices=("words", "values"), default="values")
            sp.add_argument("--upto", type=int, default=16)
        sp.set_defaults(func=func)

    sp = sub.add_parser("synth", help="synthesize a formula from a language")
    sp.add_argument("--regex", help="regular expression (block union for sigma1)")
    sp.add_argument("--aut", help="automaton file")
    sp.add_argument("--target", choices=("sigma1", "sigma2"), required=True)
    sp.set_defaults(func=cmd_synth, formula=None, file=None)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.base < 2:
        parser.error("base must be >= 2")
    try:
        return args.func(args, out)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code
    except (FormulaSyntaxError, RegexSyntaxError, AutomatonFormatError) as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except StateExplosionError as e:
        sys.stderr.write(f"state explosion: {e}\n")
        return EXIT_EXPLOSION


if __name__ == "__main__":
    sys.exit(main())
