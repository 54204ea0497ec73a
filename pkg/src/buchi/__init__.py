"""Base-p Büchi arithmetic: formulas, p-automata, growth classification and formula synthesis."""

from .automata import Dfa, equivalent, read_automaton, write_automaton, zero_closure
from .decide import compile, enumerate_solutions, is_sat, membership
from .formulas import Formula, eval_ground, format_formula, parse
from .growth import classify, fit_eqp

__all__ = [
    "Dfa", "Formula", "classify", "compile", "enumerate_solutions", "equivalent", "eval_ground",
    "fit_eqp", "format_formula", "is_sat", "membership", "parse", "read_automaton",
    "write_automaton", "zero_closure",
]
