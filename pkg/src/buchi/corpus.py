"""Fixed research corpus: formulas, systems, polynomial-growth regexes and small automata."""

from __future__ import annotations

import json
from pathlib import Path

from .automata import universal_dfa, write_automaton, zero_closure
from .decide import compile
from .formulas import LinSystem, format_formula, is_existential, parse
from .growth import classify, density_values_upto
from .lineq import build_system_automaton
from .regex import parse_block_union, regex_to_dfa

# (name, base, formula text)
FORMULAS = [
    ("evens", 2, "E y. x = 2*y"),
    ("powers2", 2, "V(x,x)"),
    ("val2", 2, "V(x,y)"),
    ("not_val3", 3, "~V(x,y)"),
    ("sys_val", 2, "x + 2*y = 3 & V(x,y)"),
    ("one_mod3", 2, "E y. x = 3*y + 1"),
    ("twice_pow3", 3, "E y. V(y,x) & x = 2*y"),
    ("tautology", 2, "A y. (y <= x | y >= x + 1)"),
    ("non_powers", 2, "E z. V(z,x) & z < x"),
    ("sandwich", 2, "x <= 2*y & y <= x"),
    ("pow_plus1", 2, "E y. P(y) & x = y + 1"),
    ("two_powers", 2, "E y z. P(y) & P(z) & x = y + z"),
    ("mixed", 2, "E y. x = 4*y + 2 | x = 5"),
    ("twice_pow3b", 3, "E y. P(y) & x = 2*y"),
    ("val_ge4", 2, "A y. ~V(y,x) | y >= 4"),
    ("three_powers3", 3, "E y z. P(y) & P(z) & x = y + 2*z"),
]

# (name, base, matrix, rhs, valuation pairs)
SYSTEMS = [
    ("x+2y=3", 2, [[1, 2]], [3], []),
    ("x=y", 2, [[1, -1]], [0], []),
    ("x=2y", 2, [[1, -2]], [0], []),
    ("x+y=5", 3, [[1, 1]], [5], []),
    ("2x-3y=1", 2, [[2, -3]], [1], []),
    ("x+2y=z", 2, [[1, 2, -1]], [0], []),
    ("x=y,x+y=4", 3, [[1, -1], [1, 1]], [0, 4], []),
    ("x=2y,V(y,x)", 2, [[1, -2]], [0], [(1, 0)]),
    ("x+y=z,V(x,z)", 3, [[1, 1, -1]], [0], [(0, 2)]),
    ("x-y=1,P(y)", 2, [[1, -1]], [1], [(1, 1)]),
]

# (base, block-regex union); k ≤ 3 and every word of length at most 3
POLY_REGEXES = [
    (2, "101"),
    (2, "(10)*"),
    (2, "1(0)*"),
    (2, "1*0*"),
    (2, "(10)*1"),
    (2, "(01)*"),
    (2, "0(1)*0(10)*1"),
    (2, "(1)*0(01)*(11)*"),
    (2, "11(0)*1"),
    (2, "(110)*"),
    (2, "1(01)*(1)*"),
    (2, "(100)*11(0)*"),
    (2, "10(1)*(0)*(1)*"),
    (2, "(1)+0"),
    (2, "(11)*0(1)*"),
    (2, "001(10)*"),
    (2, "(1)*|(10)*1"),
    (3, "(12)*0(2)*"),
    (3, "2(0)*"),
    (3, "(21)*1"),
    (3, "1(2)*(0)*"),
    (3, "(102)*2"),
    (3, "2(1)*(0)*(2)*"),
    (3, "(20)*1(0)*|22"),
]


def systems():
    return [(name, base, LinSystem(m, c, [f"x{i}" for i in range(len(m[0]))], v)) for name, base, m, c, v in SYSTEMS]


def formulas():
    return [(name, parse(text, base)) for name, base, text in FORMULAS]


def sigma2_automata():
    """Small zero-closed automata for the Σ₂ round trips."""
    return [
        ("multiples_of_3", compile(parse("E y. x = 3*y", 2))),
        ("pairs_closed", zero_closure(regex_to_dfa("(10|01)*", 2))),
        ("all_base2", universal_dfa(2, 1)),
        ("evens_base3", compile(parse("E y. x = 2*y", 3))),
        ("successor", compile(parse("x = y + 1", 2))),
        ("powers2", compile(parse("V(x,x)", 2))),
        ("at_most_5", compile(parse("x <= 5", 2))),
    ]


def one_var_existential():
    return [(name, f) for name, f in formulas() if len(f.vars) == 1 and is_existential(f.node)]


def run_corpus(outdir, census_upto: int = 16) -> dict:
    """Compile, census, classify and synthesize the whole corpus into ``outdir``."""
    from .synthesis import synth_existential, synth_sigma2

    out = Path(outdir)
    for sub in ("formulas", "systems", "sigma1", "sigma2", "census"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    summary = {"formulas": {}, "systems": {}, "sigma1": {}, "sigma2": {}}
    for name, f in formulas():
        a = compile(f)
        (out / "formulas" / f"{name}.aut").write_text(write_automaton(a))
        entry = {"vars": list(f.vars), "states": a.n_states}
        if len(f.vars) == 1:
            census = density_values_upto(a, census_upto)
            rows = "".join(f"{n},{census[n]}\n" for n in range(1, census_upto + 1))
            (out / "census" / f"{name}.csv").write_text("n,count\n" + rows)
            entry["verdict"] = str(classify(a))
        summary["formulas"][name] = entry
    for name, base, s in systems():
        a = build_system_automaton(s, base)
        safe = name.replace(",", "_").replace("(", "").replace(")", "").replace("=", "eq").replace("+", "p")
        (out / "systems" / f"{safe}.aut").write_text(write_automaton(a))
        summary["systems"][name] = a.n_states
    for i, (base, text) in enumerate(POLY_REGEXES):
        f = synth_existential(parse_block_union(text, base))
        (out / "sigma1" / f"{i:02d}.txt").write_text(format_formula(f))
        summary["sigma1"][text] = dict(f.meta)["round_trip"]
    for name, a in sigma2_automata():
        f = synth_sigma2(a)
        (out / "sigma2" / f"{name}.txt").write_text(format_formula(f))
        summary["sigma2"][name] = dict(f.meta)["round_trip"]
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
