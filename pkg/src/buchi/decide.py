"""Compile formulas to automata; satisfiability, membership and enumeration.

Compilation is structural.  Subformulas are first alpha-normalized (free
variables renamed by first occurrence, bound variables by position), so
automata for repeated fragments are built once and re-tracked.
"""

from __future__ import annotations

from collections import deque

from .automata import (
    DEFAULT_STATE_CAP,
    Dfa,
    complement,
    cylindrify,
    determinize_minimize,
    empty_dfa,
    intersection,
    minimize,
    product,
    project,
    shortest_word,
    sccs,
    universal_dfa,
    words_of_length,
)
from .formulas import (
    And,
    Const,
    Exists,
    Forall,
    Formula,
    Lin,
    Not,
    Or,
    Pow,
    Val,
    eliminate_negation,
    free_vars,
    matrix_to_systems,
    ordered_free_vars,
    split_prefix,
    to_prenex,
)
from .lineq import build_eq_automaton, build_leq_automaton, build_system_automaton, build_vp_automaton
from .numerics import decode, encode

_CACHE: dict = {}
_CACHE_LIMIT = 50_000


def clear_cache():
    _CACHE.clear()


def alpha_normalize(node):
    """``(canonical node, free variables in first-occurrence order)``.

    Free variables become ``#0, #1, ...`` and binders ``#b0, #b1, ...`` in
    traversal order, so alpha-equivalent nodes normalize identically.
    """
    order = ordered_free_vars(node)
    counter = [0]

    def walk(n, env):
        if isinstance(n, Const):
            return n
        if isinstance(n, Lin):
            return Lin.make({env[v]: c for v, c in n.coeffs}, n.rel, n.rhs)
        if isinstance(n, Val):
            return Val(env[n.x], env[n.y])
        if isinstance(n, Pow):
            return Pow(env[n.x])
        if isinstance(n, Not):
            return Not(walk(n.child, env))
        if isinstance(n, (And, Or)):
            return type(n)(tuple(walk(c, env) for c in n.children))
        name = f"#b{counter[0]}"
        counter[0] += 1
        return type(n)(name, walk(n.body, {**env, n.var: name}))

    return walk(node, {v: f"#{i}" for i, v in enumerate(order)}), order


class Compiler:
    def __init__(self, base: int, cap: int = DEFAULT_STATE_CAP):
        self.base = base
        self.cap = cap

    def compile(self, node, vars) -> Dfa:
        """Automaton of ``node`` whose track i carries ``vars[i]``."""
        vars = tuple(vars)
        missing = free_vars(node) - set(vars)
        if missing:
            raise ValueError(f"free variables {sorted(missing)} have no track")
        cnode, order = alpha_normalize(node)
        a = self._canonical(cnode, len(order))
        index = {v: i for i, v in enumerate(vars)}
        positions = [index[v] for v in order]
        if positions == list(range(len(vars))):
            return a
        return cylindrify(a, positions, len(vars))

    def _canonical(self, cnode, n):
        key = (self.base, cnode)
        a = _CACHE.get(key)
        if a is None:
            a = self._build(cnode, tuple(f"#{i}" for i in range(n)))
            if len(_CACHE) >= _CACHE_LIMIT:
                _CACHE.clear()
            _CACHE[key] = a
        return a

    def _build(self, node, names):
        p, d = self.base, len(names)
        idx = {v: i for i, v in enumerate(names)}
        if isinstance(node, Const):
            return universal_dfa(p, d) if node.value else empty_dfa(p, d)
        if isinstance(node, Lin):
            coeffs = [0] * d
            for v, c in node.coeffs:
                coeffs[idx[v]] = c
            rel, c = node.rel, node.rhs
            if rel == "=":
                return minimize(build_eq_automaton([coeffs], [c], p, names).dfa)
            if rel in (">=", ">"):
                coeffs = [-a for a in coeffs]
                c = -c
                rel = "<=" if rel == ">=" else "<"
            if rel == "<":
                c -= 1
            return build_leq_automaton(coeffs, c, p)
        if isinstance(node, Val):
            return build_vp_automaton(p, d, idx[node.x], idx[node.y])
        if isinstance(node, Pow):
            return build_vp_automaton(p, d, idx[node.x], idx[node.x])
        if isinstance(node, Not):
            return complement(self.compile(node.child, names))
        if isinstance(node, (And, Or)):
            op = "and" if isinstance(node, And) else "or"
            parts = sorted((self.compile(c, names) for c in node.children), key=lambda a: a.n_states)
            acc = parts[0]
            for b in parts[1:]:
                if op == "and" and not acc.finals:
                    break
                acc = product(acc, b, op, self.cap)
            return acc
        if isinstance(node, (Exists, Forall)):
            body = self.compile(node.body, names + (node.var,))
            if isinstance(node, Forall):
                body = complement(body)
            a = determinize_minimize(project(body, d), self.cap)
            return complement(a) if isinstance(node, Forall) else a
        raise TypeError(f"unsupported node {node!r}")


def _as_formula(f, base=None) -> Formula:
    if isinstance(f, Formula):
        return f
    if base is None:
        raise ValueError("base required for a bare node")
    return Formula.of(base, f)


def compile(f: Formula, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Minimal, zero-closed DFA over the query variables of ``f`` (in order)."""
    return Compiler(f.base, cap).compile(f.node, f.vars)


def compile_node(node, base: int, vars, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    return Compiler(base, cap).compile(node, vars)


def compile_existential(f: Formula, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Existential fast path: DNF of LinSystems, one automaton each, union, project."""
    prefix, matrix = split_prefix(to_prenex(eliminate_negation(f.node)))
    if any(kind != "E" for kind, _ in prefix):
        raise ValueError("the fast path needs an existential formula")
    d = len(f.vars)
    result = empty_dfa(f.base, d)
    for system in matrix_to_systems(matrix, f.vars):
        a = build_system_automaton(system, f.base)
        for k in range(system.d - 1, d - 1, -1):
            a = determinize_minimize(project(a, k), cap)
        result = product(result, a, "or", cap)
    return result


_DEPTH_CACHE: dict = {}


def zero_context_depth(body, base: int, var: str) -> int:
    """Longest BFS distance from the initial state along columns zero off the ``var`` track.

    If ``∃var body`` holds for some context whose values have at most L
    digits, a witness below p^(L + depth) exists: any run prefix that reads
    zero context columns can be shortened to one of at most ``depth`` steps.
    """
    cnode, order = alpha_normalize(Exists(var, body) if var in free_vars(body) else body)
    key = (base, cnode)
    if key in _DEPTH_CACHE:
        return _DEPTH_CACHE[key]
    ctx = tuple(v for v in ordered_free_vars(body) if v != var)
    a = compile_node(body, base, ctx + (var,))
    letters = range(base)  # last track = var, every other track zero
    dist = {a.initial: 0}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        for x in letters:
            t = a.delta[s].get(x)
            if t is not None and t not in dist:
                dist[t] = dist[s] + 1
                queue.append(t)
    depth = max(dist.values())
    _DEPTH_CACHE[key] = depth
    return depth


def _assignment(f: Formula, values) -> dict:
    return dict(zip(f.vars, values))


def is_sat(f: Formula, cap: int = DEFAULT_STATE_CAP):
    """``(True, witness)`` using a shortest (then lexicographically least) word, else ``(False, None)``."""
    a = compile(f, cap)
    w = shortest_word(a)
    if w is None:
        return False, None
    return True, _assignment(f, decode(w))


def membership(f: Formula, assignment, cap: int = DEFAULT_STATE_CAP, automaton: Dfa | None = None) -> bool:
    values = tuple(assignment[v] for v in f.vars) if isinstance(assignment, dict) else tuple(assignment)
    a = automaton if automaton is not None else compile(f, cap)
    return a.accepts(encode(values, f.base))


def canonical_words(a: Dfa) -> Dfa:
    """Restriction to words without a leading all-zero column (ε kept)."""
    size = a.alphabet_size
    gate = Dfa(a.base, a.dim, [{x: 1 for x in range(1, size)}, {x: 1 for x in range(size)}], 0, (0, 1))
    return intersection(a, gate)


def _is_finite(a: Dfa) -> bool:
    for comp in sccs(a):
        if len(comp) > 1 or any(t == comp[0] for t in a.delta[comp[0]].values()):
            return False
    return True


def enumerate_solutions(f: Formula, limit: int, cap: int = DEFAULT_STATE_CAP) -> list[dict]:
    """First ``limit`` solutions ordered by encoding length, then lexicographically."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    a = canonical_words(compile(f, cap))
    out = []
    if not a.finals:
        return out
    max_len = None if not _is_finite(a) else a.n_states
    n = 0
    while len(out) < limit and (max_len is None or n <= max_len):
        for w in words_of_length(a, n):
            out.append(_assignment(f, decode(w)))
            if len(out) == limit:
                break
        n += 1
    return out
