"""Automata for linear Diophantine systems and valuation constraints.

States of the equation automaton are integer vectors q; reading a column u
(most significant first) moves q to p·q + A·u.  The initial state is 0 and
the only final state is c, so a word is accepted iff its value x solves
A·x = c.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .automata import Dfa, canonical_numbering, empty_dfa, intersection, minimize, trim, universal_dfa
from .formulas import LinSystem
from .numerics import DigitWord, decode, letter_digits


@dataclass(frozen=True)
class EqAutomaton:
    """Trim automaton of A·x = c with integer-vector state labels."""

    dfa: Dfa
    matrix: tuple
    rhs: tuple
    vars: tuple
    bound: int

    def label(self, state: int) -> tuple:
        return self.dfa.labels[state]


def _norms(matrix, rhs):
    norm_a = max([sum(abs(a) for a in row) for row in matrix] + [0])
    norm_c = max([abs(c) for c in rhs] + [0])
    return norm_a, norm_c


def _column_images(matrix, base, dim):
    """A·u for every letter u of the dim-track alphabet."""
    out = []
    for x in range(base**dim):
        u = letter_digits(x, base, dim)
        out.append(tuple(sum(a * d for a, d in zip(row, u)) for row in matrix))
    return out


def step(q: Sequence[int], u: Sequence[int], matrix, base: int) -> tuple:
    """One transition of the unpruned law: p·q + A·u."""
    return tuple(base * qi + sum(a * d for a, d in zip(row, u)) for qi, row in zip(q, matrix))


def run_labels(q: Sequence[int], w: DigitWord, matrix) -> tuple:
    """State reached from label q by reading w under the unpruned law."""
    q = tuple(q)
    for col in w.columns:
        q = step(q, col, matrix, w.base)
    return q


def build_eq_automaton(matrix, rhs, base: int, vars: Sequence[str] | None = None) -> EqAutomaton:
    """Trim DFA whose words decode exactly to the solutions of A·x = c.

    States with ‖q‖_∞ above max(‖A‖_{1,∞}, ‖c‖_∞) can never return to c (the
    map q ↦ p·q + A·u pushes them further out), so forward exploration stops
    there; the remaining graph is trimmed by backward reachability from c.
    """
    matrix = tuple(tuple(r) for r in matrix)
    rhs = tuple(rhs)
    if len(matrix) != len(rhs):
        raise ValueError("matrix and right-hand side disagree on the number of equations")
    dim = len(matrix[0]) if matrix else (len(vars) if vars is not None else 0)
    if any(len(r) != dim for r in matrix):
        raise ValueError("ragged matrix")
    if vars is None:
        vars = tuple(f"x{i}" for i in range(dim))
    vars = tuple(vars)
    if len(vars) != dim:
        raise ValueError(f"{len(vars)} variable names for {dim} columns")
    bound = max(_norms(matrix, rhs))
    images = _column_images(matrix, base, dim)
    zero = tuple(0 for _ in rhs)
    index = {zero: 0}
    labels = [zero]
    edges = []
    queue = deque([zero])
    while queue:
        q = queue.popleft()
        row = {}
        for x, img in enumerate(images):
            r = tuple(base * qi + ai for qi, ai in zip(q, img))
            if any(abs(ri) > bound for ri in r):
                continue
            if r not in index:
                index[r] = len(labels)
                labels.append(r)
                queue.append(r)
            row[x] = index[r]
        edges.append(row)
    dfa = Dfa(base, dim, edges, 0, [index[rhs]] if rhs in index else [], labels)
    dfa = trim(dfa)
    if not dfa.finals:
        dfa = Dfa(base, dim, [{}], 0, (), [zero])
    return EqAutomaton(canonical_numbering(dfa), matrix, rhs, vars, bound)


def build_leq_automaton(coeffs: Sequence[int], c: int, base: int) -> Dfa:
    """Minimal DFA of Σ a_i·x_i ≤ c.

    The prefix value q evolves as in the equation automaton.  Once
    q > max(c, N) (N the sum of negative coefficient magnitudes) the final
    value stays above c; once q ≤ min(c, −P) (P the sum of positive
    coefficients) it stays at or below c.  Both regions collapse to a sink.
    """
    coeffs = tuple(coeffs)
    dim = len(coeffs)
    pos = sum(a for a in coeffs if a > 0)
    negs = sum(-a for a in coeffs if a < 0)
    hi = max(c, negs)
    lo = min(c, -pos)
    images = _column_images((coeffs,), base, dim)
    acc = "acc"
    index = {0 if 0 > lo else acc: 0}
    states = list(index)
    edges = []
    queue = deque(states)
    while queue:
        q = queue.popleft()
        row = {}
        for x, (img,) in enumerate(images):
            if q == acc:
                r = acc
            else:
                r = base * q + img
                if r > hi:
                    continue
                if r <= lo:
                    r = acc
            if r not in index:
                index[r] = len(states)
                states.append(r)
                queue.append(r)
            row[x] = index[r]
        edges.append(row)
    finals = [i for i, q in enumerate(states) if q == acc or q <= c]
    return minimize(Dfa(base, dim, edges, 0, finals))


def build_vp_automaton(base: int, dim: int, x_index: int, y_index: int) -> Dfa:
    """Two-state DFA of V_p(x, y) over ``dim`` tracks.

    State 0 reads x-digit 0 with any y-digit.  An x-digit 1 together with a
    nonzero y-digit leads to the final state 1, which only reads columns that
    are zero on both tracks.  With x_index == y_index this is P_p(x).
    """
    if not (0 <= x_index < dim and 0 <= y_index < dim):
        raise ValueError("track index out of range")
    row0, row1 = {}, {}
    for letter in range(base**dim):
        u = letter_digits(letter, base, dim)
        xd, yd = u[x_index], u[y_index]
        if xd == 0:
            row0[letter] = 0
        elif xd == 1 and yd > 0:
            row0[letter] = 1
        if xd == 0 and yd == 0:
            row1[letter] = 1
    return Dfa(base, dim, [row0, row1], 0, [1])


def build_system_automaton(s: LinSystem, base: int) -> Dfa:
    """Minimal DFA of a LinSystem: equation automaton times one valuation DFA per pair."""
    parts = [minimize(build_eq_automaton(s.matrix, s.rhs, base, s.vars).dfa)]
    for i, j in s.valuations:
        parts.append(build_vp_automaton(base, s.d, i, j))
    if len(parts) == 1:
        return parts[0]
    return intersection(*parts)


def check_reach_char(q_label: Sequence[int], r_label: Sequence[int], w: DigitWord, matrix, base: int) -> bool:
    """Algebraic reachability: r = y·q + A·x with x = ⟦w⟧_p and y = p^|w|."""
    if w.base != base:
        raise ValueError("word and base disagree")
    x = decode(w)
    y = base ** len(w)
    if len(q_label) != len(matrix) or len(r_label) != len(matrix):
        raise ValueError("label dimension must equal the number of equations")
    if matrix and len(matrix[0]) != w.dim:
        raise ValueError("word dimension must equal the number of columns")
    return all(r == y * q + sum(a * xi for a, xi in zip(row, x))
               for q, r, row in zip(q_label, r_label, matrix))


def constant_automaton(value: bool, base: int, dim: int) -> Dfa:
    return universal_dfa(base, dim) if value else empty_dfa(base, dim)
