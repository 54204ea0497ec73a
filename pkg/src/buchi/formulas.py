"""Formulas of Büchi arithmetic ⟨ℕ, 0, 1, +, V_p⟩ of a fixed base.

Nodes are immutable and hashable (hashes are cached, so nodes can be used as
memoization keys cheaply).  A :class:`Formula` pairs a node with its base and
the ordered tuple of query variables.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

RELATIONS = ("=", "<=", "<", ">=", ">")
RESERVED = {"E", "A", "V", "P", "true", "false"}

DEFAULT_EVAL_CAP = 2**22
DEFAULT_MAX_DISJUNCTS = 10**5


class FormulaSyntaxError(ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownSymbolError(FormulaSyntaxError):
    pass


class UnboundedQuantifierError(RuntimeError):
    pass


class DnfTooLargeError(RuntimeError):
    pass


def _node(cls):
    names = tuple(cls.__annotations__)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((cls.__name__,) + tuple(getattr(self, f) for f in names)))

    def __hash__(self):
        return self._h

    cls.__post_init__ = __post_init__
    cls.__hash__ = __hash__
    return dataclass(frozen=True)(cls)


@_node
class Const:
    value: bool


@_node
class Lin:
    """``Σ coeff·var  rel  rhs`` with coefficients sorted by variable name."""

    coeffs: tuple
    rel: str
    rhs: int

    @staticmethod
    def make(coeffs: Mapping[str, int], rel: str, rhs: int) -> "Lin":
        if rel not in RELATIONS:
            raise ValueError(f"unknown relation {rel!r}")
        return Lin(tuple(sorted((v, c) for v, c in coeffs.items() if c != 0)), rel, rhs)

    @property
    def coeff_map(self) -> dict:
        return dict(self.coeffs)


@_node
class Val:
    """``V_p(x, y)``: x is the largest power of p dividing y (false when y = 0)."""

    x: str
    y: str


@_node
class Pow:
    """``P_p(x)``, shorthand for ``V_p(x, x)``."""

    x: str


@_node
class Not:
    child: object


@_node
class And:
    children: tuple


@_node
class Or:
    children: tuple


@_node
class Exists:
    var: str
    body: object


@_node
class Forall:
    var: str
    body: object


TRUE = Const(True)
FALSE = Const(False)
ATOMS = (Const, Lin, Val, Pow)


def lin(coeffs: Mapping[str, int], rel: str = "=", rhs: int = 0) -> Lin:
    return Lin.make(coeffs, rel, rhs)


def conj(*children) -> object:
    flat = []
    for c in children:
        if isinstance(c, And):
            flat.extend(c.children)
        elif c == TRUE:
            continue
        elif c == FALSE:
            return FALSE
        else:
            flat.append(c)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*children) -> object:
    flat = []
    for c in children:
        if isinstance(c, Or):
            flat.extend(c.children)
        elif c == FALSE:
            continue
        elif c == TRUE:
            return TRUE
        else:
            flat.append(c)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def neg(child) -> object:
    if isinstance(child, Const):
        return Const(not child.value)
    if isinstance(child, Not):
        return child.child
    return Not(child)


def exists(names: Iterable[str] | str, body) -> object:
    names = [names] if isinstance(names, str) else list(names)
    for v in reversed(names):
        body = Exists(v, body)
    return body


def forall(names: Iterable[str] | str, body) -> object:
    names = [names] if isinstance(names, str) else list(names)
    for v in reversed(names):
        body = Forall(v, body)
    return body


def implies(a, b) -> object:
    return disj(neg(a), b)


@dataclass(frozen=True)
class Formula:
    """A node together with its base and ordered query variables."""

    base: int
    node: object
    vars: tuple = ()
    meta: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        object.__setattr__(self, "vars", tuple(self.vars))
        extra = free_vars(self.node) - set(self.vars)
        if extra:
            raise ValueError(f"free variables {sorted(extra)} not declared as query variables")

    @classmethod
    def of(cls, base, node, vars=None, **meta):
        if vars is None:
            vars = ordered_free_vars(node)
        return cls(base, node, tuple(vars), tuple(meta.items()))

    @property
    def metadata(self) -> dict:
        return dict(self.meta)

    def with_meta(self, **meta) -> "Formula":
        merged = dict(self.meta)
        merged.update(meta)
        return Formula(self.base, self.node, self.vars, tuple(merged.items()))

    def __str__(self):
        return to_text(self.node)


# --------------------------------------------------------------------------
# variables


@functools.lru_cache(maxsize=None)
def free_vars(node) -> frozenset:
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, Lin):
        return frozenset(v for v, _ in node.coeffs)
    if isinstance(node, Val):
        return frozenset((node.x, node.y))
    if isinstance(node, Pow):
        return frozenset((node.x,))
    if isinstance(node, Not):
        return free_vars(node.child)
    if isinstance(node, (And, Or)):
        return frozenset().union(*(free_vars(c) for c in node.children))
    if isinstance(node, (Exists, Forall)):
        return free_vars(node.body) - {node.var}
    raise TypeError(f"not a formula node: {node!r}")


def ordered_free_vars(node) -> tuple:
    """Free variables in order of first occurrence."""
    out = []

    def visit(n, bound):
        if isinstance(n, Lin):
            names = [v for v, _ in n.coeffs]
        elif isinstance(n, Val):
            names = [n.x, n.y]
        elif isinstance(n, Pow):
            names = [n.x]
        elif isinstance(n, Not):
            return visit(n.child, bound)
        elif isinstance(n, (And, Or)):
            for c in n.children:
                visit(c, bound)
            return
        elif isinstance(n, (Exists, Forall)):
            return visit(n.body, bound | {n.var})
        else:
            return
        for v in names:
            if v not in bound and v not in out:
                out.append(v)

    visit(node, frozenset())
    return tuple(out)


def all_vars(node) -> set:
    """Every variable name occurring in the node, free or bound."""
    out = set(free_vars(node))
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (Exists, Forall)):
            out.add(n.var)
            stack.append(n.body)
        elif isinstance(n, Not):
            stack.append(n.child)
        elif isinstance(n, (And, Or)):
            stack.extend(n.children)
        elif isinstance(n, ATOMS):
            out |= free_vars(n)
    return out


class Namer:
    """Fresh variable names that avoid a given set."""

    def __init__(self, avoid: Iterable[str] = (), prefix: str = "_v"):
        self.used = set(avoid)
        self.prefix = prefix
        self.counter = 0

    def fresh(self, hint: str | None = None) -> str:
        if hint is not None and hint not in self.used and hint not in RESERVED:
            self.used.add(hint)
            return hint
        stem = hint or self.prefix
        while True:
            self.counter += 1
            name = f"{stem}_{self.counter}"
            if name not in self.used:
                self.used.add(name)
                return name


def rename_free(node, mapping: Mapping[str, str]) -> object:
    """Rename free variables; targets must not be captured by inner binders."""
    if not mapping:
        return node
    if isinstance(node, Const):
        return node
    if isinstance(node, Lin):
        coeffs = {}
        for v, c in node.coeffs:
            w = mapping.get(v, v)
            coeffs[w] = coeffs.get(w, 0) + c
        return Lin.make(coeffs, node.rel, node.rhs)
    if isinstance(node, Val):
        return Val(mapping.get(node.x, node.x), mapping.get(node.y, node.y))
    if isinstance(node, Pow):
        return Pow(mapping.get(node.x, node.x))
    if isinstance(node, Not):
        return Not(rename_free(node.child, mapping))
    if isinstance(node, (And, Or)):
        return type(node)(tuple(rename_free(c, mapping) for c in node.children))
    if isinstance(node, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != node.var}
        if node.var in inner.values():
            raise ValueError(f"renaming would be captured by binder {node.var!r}")
        return type(node)(node.var, rename_free(node.body, inner))
    raise TypeError(f"not a formula node: {node!r}")


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><=|>=|[=<>()&|~.,*+\-]))"
)


class _Tokens:
    def __init__(self, text: str):
        self.items = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                line, col = _line_col(text, pos + len(text[pos:]) - len(text[pos:].lstrip()))
                bad = text[pos:].strip()[:1]
                raise UnknownSymbolError(f"unknown symbol {bad!r}", line, col)
            kind = m.lastgroup
            start = m.start(kind)
            self.items.append((kind, m.group(kind), _line_col(text, start)))
            pos = m.end()
        self.items.append(("end", "", _line_col(text, len(text))))
        self.i = 0

    def peek(self):
        return self.items[self.i]

    def next(self):
        tok = self.items[self.i]
        self.i += 1
        return tok

    def accept(self, value):
        if self.items[self.i][1] == value and self.items[self.i][0] != "end":
            self.i += 1
            return True
        return False

    def expect(self, value):
        kind, val, (line, col) = self.next()
        if val != value or kind == "end":
            raise FormulaSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", line, col)


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text):
        self.toks = _Tokens(text)

    def error(self, message):
        _, val, (line, col) = self.toks.peek()
        raise FormulaSyntaxError(f"{message}, found {val or 'end of input'!r}", line, col)

    def formula(self):
        kind, val, _ = self.toks.peek()
        if kind == "ident" and val in ("E", "A"):
            self.toks.next()
            names = [self.ident()]
            while True:
                self.toks.accept(",")
                if self.toks.peek()[0] == "ident" and self.toks.peek()[1] not in RESERVED:
                    names.append(self.ident())
                else:
                    break
            self.toks.expect(".")
            body = self.formula()
            return exists(names, body) if val == "E" else forall(names, body)
        return self.disjunction()

    def disjunction(self):
        parts = [self.conjunction()]
        while self.toks.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.literal()]
        while self.toks.accept("&"):
            parts.append(self.literal())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def literal(self):
        kind, val, _ = self.toks.peek()
        if val == "~" and kind == "op":
            self.toks.next()
            return Not(self.literal())
        if kind == "ident" and val in ("E", "A"):
            return self.formula()
        if val == "(" and kind == "op" and not self._paren_starts_linexp():
            self.toks.next()
            inner = self.formula()
            self.toks.expect(")")
            return inner
        return self.atom()

    def _paren_starts_linexp(self):
        # "(" always opens a subformula: linear expressions have no parentheses
        return False

    def ident(self):
        kind, val, (line, col) = self.toks.next()
        if kind != "ident":
            raise FormulaSyntaxError(f"expected identifier, found {val or 'end of input'!r}", line, col)
        if val in RESERVED:
            raise FormulaSyntaxError(f"{val!r} is reserved", line, col)
        return val

    def atom(self):
        kind, val, _ = self.toks.peek()
        if kind == "ident" and val in ("true", "false"):
            self.toks.next()
            return Const(val == "true")
        if kind == "ident" and val == "V":
            self.toks.next()
            self.toks.expect("(")
            x = self.ident()
            self.toks.expect(",")
            y = self.ident()
            self.toks.expect(")")
            return Val(x, y)
        if kind == "ident" and val == "P":
            self.toks.next()
            self.toks.expect("(")
            x = self.ident()
            self.toks.expect(")")
            return Pow(x)
        left, lconst = self.linexp()
        kind, rel, _ = self.toks.peek()
        if rel not in RELATIONS or kind != "op":
            self.error("expected a relation")
        self.toks.next()
        right, rconst = self.linexp()
        coeffs = dict(left)
        for v, c in right.items():
            coeffs[v] = coeffs.get(v, 0) - c
        return Lin.make(coeffs, rel, rconst - lconst)

    def linexp(self):
        coeffs, const = {}, 0
        sign = -1 if self.toks.accept("-") else 1
        while True:
            v, c = self.term()
            if v is None:
                const += sign * c
            else:
                coeffs[v] = coeffs.get(v, 0) + sign * c
            if self.toks.accept("+"):
                sign = 1
            elif self.toks.accept("-"):
                sign = -1
            else:
                return coeffs, const

    def term(self):
        kind, val, _ = self.toks.peek()
        if kind == "num":
            self.toks.next()
            n = int(val)
            if self.toks.accept("*"):
                kind, val, _ = self.toks.peek()
                if kind == "num":
                    self.toks.next()
                    return None, n * int(val)
                return self.ident(), n
            return None, n
        if kind == "ident":
            return self.ident(), 1
        self.error("expected a term")


def parse_node(text: str) -> object:
    text = "\n".join(ln for ln in text.splitlines() if not ln.lstrip().startswith("#"))
    p = _Parser(text)
    node = p.formula()
    if p.toks.peek()[0] != "end":
        p.error("unexpected trailing input")
    return node


def parse(text: str, base: int = 2, variables: Iterable[str] | None = None) -> Formula:
    """Parse a formula; free variables outside ``variables`` are existentially closed."""
    node = parse_node(text)
    if variables is None:
        return Formula(base, node, ordered_free_vars(node))
    variables = tuple(variables)
    extra = [v for v in ordered_free_vars(node) if v not in variables]
    return Formula(base, exists(extra, node), variables)


# --------------------------------------------------------------------------
# printing


def _lin_side(coeffs, const=None):
    parts = []
    for v, c in coeffs:
        mag = abs(c)
        term = v if mag == 1 else f"{mag}*{v}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    if not parts:
        return str(const if const is not None else 0)
    return " ".join(parts)


def to_text(node) -> str:
    return _text(node, 0)


def _text(node, ctx):
    # ctx: 0 = top/quantifier body, 1 = operand of |, 2 = operand of &, 3 = operand of ~
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Lin):
        return f"{_lin_side(node.coeffs)} {node.rel} {node.rhs}"
    if isinstance(node, Val):
        return f"V({node.x},{node.y})"
    if isinstance(node, Pow):
        return f"P({node.x})"
    if isinstance(node, Not):
        inner = _text(node.child, 3)
        return "~" + inner
    if isinstance(node, Or):
        if not node.children:
            return "false"
        s = " | ".join(_text(c, 1) for c in node.children)
        return f"({s})" if ctx >= 2 else s
    if isinstance(node, And):
        if not node.children:
            return "true"
        s = " & ".join(_text(c, 2) for c in node.children)
        return f"({s})" if ctx >= 3 else s
    if isinstance(node, (Exists, Forall)):
        q = "E" if isinstance(node, Exists) else "A"
        s = f"{q} {node.var}. {_text(node.body, 0)}"
        return f"({s})" if ctx >= 1 else s
    raise TypeError(f"not a formula node: {node!r}")


def format_formula(f: Formula) -> str:
    """Formula text preceded by ``# key: value`` metadata lines."""
    lines = [f"# {k}: {v}" for k, v in f.meta]
    lines.append(f"# vars: {' '.join(f.vars)}")
    lines.append(to_text(f.node))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# ground evaluation


def is_power(x: int, base: int) -> bool:
    if x < 1:
        return False
    while x % base == 0:
        x //= base
    return x == 1


def largest_power_dividing(y: int, base: int) -> int:
    if y == 0:
        raise ValueError("every power divides 0")
    a = 1
    while y % (a * base) == 0:
        a *= base
    return a


def val_holds(a: int, b: int, base: int) -> bool:
    """V_p(a, b): a = p^k, a | b and p·a ∤ b; false for b = 0."""
    return b != 0 and is_power(a, base) and b % a == 0 and b % (a * base) != 0


def _compare(lhs, rel, rhs):
    if rel == "=":
        return lhs == rhs
    if rel == "<=":
        return lhs <= rhs
    if rel == "<":
        return lhs < rhs
    if rel == ">=":
        return lhs >= rhs
    return lhs > rhs


_FLIP = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}


def _leq_forms(coeffs: dict, rel: str, rhs: int):
    """Rewrite ``coeffs·x rel rhs`` as a list of ``(coeffs, c)`` meaning ``coeffs·x <= c``."""
    negd = {v: -c for v, c in coeffs.items()}
    if rel == "<=":
        return [(coeffs, rhs)]
    if rel == "<":
        return [(coeffs, rhs - 1)]
    if rel == ">=":
        return [(negd, -rhs)]
    if rel == ">":
        return [(negd, -rhs - 1)]
    return [(coeffs, rhs), (negd, -rhs)]


class _Evaluator:
    def __init__(self, base, cap):
        self.base = base
        self.cap = cap

    def eval(self, node, env):
        if isinstance(node, Lin):
            return _compare(sum(c * env[v] for v, c in node.coeffs), node.rel, node.rhs)
        if isinstance(node, Val):
            return val_holds(env[node.x], env[node.y], self.base)
        if isinstance(node, Pow):
            return is_power(env[node.x], self.base)
        if isinstance(node, And):
            return all(self.eval(c, env) for c in node.children)
        if isinstance(node, Or):
            return any(self.eval(c, env) for c in node.children)
        if isinstance(node, Not):
            return not self.eval(node.child, env)
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Exists):
            return self.exists(node.var, node.body, env)
        if isinstance(node, Forall):
            return not self.exists(node.var, to_nnf(Not(node.body)), env)
        raise TypeError(f"not a formula node: {node!r}")

    def exists(self, y, body, env):
        if y not in free_vars(body):
            return self.eval(body, env)
        if isinstance(body, Or):
            return any(self.exists(y, c, env) for c in body.children)
        if isinstance(body, And):
            fixed = [c for c in body.children if y not in free_vars(c)]
            if fixed:
                if not all(self.eval(c, env) for c in fixed):
                    return False
                body = conj(*(c for c in body.children if y in free_vars(c)))
        candidates = self.candidates(y, body, env)
        if candidates is None:
            candidates = self.certified_range(y, body, env)
        saved = env.get(y, _MISSING)
        try:
            for v in candidates:
                env[y] = v
                if self.eval(body, env):
                    return True
            return False
        finally:
            if saved is _MISSING:
                env.pop(y, None)
            else:
                env[y] = saved

    def candidates(self, y, body, env):
        """Values of y worth trying, or None if no bound is visible syntactically."""
        atoms = []
        _collect_conjuncts(body, y, frozenset(), atoms)
        upper = None
        for atom, hidden in atoms:
            known = lambda v: v in env and v not in hidden and v != y  # noqa: E731
            if isinstance(atom, Val):
                if atom.x == y and atom.y != y and known(atom.y):
                    t = env[atom.y]
                    return [largest_power_dividing(t, self.base)] if t else []
                continue
            if isinstance(atom, Not):
                inner = atom.child
                if not isinstance(inner, Lin) or inner.rel == "=":
                    continue
                atom = Lin(inner.coeffs, _FLIP[inner.rel], inner.rhs)
            if not isinstance(atom, Lin):
                continue
            coeffs = atom.coeff_map
            a = coeffs.get(y, 0)
            if a == 0:
                continue
            others = [v for v in coeffs if v != y]
            if atom.rel == "=" and all(known(v) for v in others):
                rest = atom.rhs - sum(coeffs[v] * env[v] for v in others)
                if rest % a == 0 and rest // a >= 0:
                    return [rest // a]
                return []
            for form, c in _leq_forms(coeffs, atom.rel, atom.rhs):
                ay = form.get(y, 0)
                if ay <= 0:
                    continue
                if any(not known(v) and form[v] < 0 for v in others):
                    continue
                slack = c - sum(form[v] * env[v] for v in others if known(v))
                bound = slack // ay
                upper = bound if upper is None else min(upper, bound)
        if upper is None:
            return None
        return range(0, upper + 1)

    def certified_range(self, y, body, env):
        from .decide import zero_context_depth

        ctx = sorted(free_vars(body) - {y})
        try:
            depth = zero_context_depth(body, self.base, y)
        except Exception as exc:  # compilation failed: no certificate available
            raise UnboundedQuantifierError(f"cannot bound quantified variable {y!r}: {exc}") from exc
        from .numerics import digit_length

        length = max([digit_length(env[v], self.base) for v in ctx] + [0])
        bound = self.base ** (length + depth)
        if bound > self.cap:
            raise UnboundedQuantifierError(
                f"certified bound {self.base}^{length + depth} for {y!r} exceeds cap {self.cap}"
            )
        return range(bound)


_MISSING = object()


def _collect_conjuncts(node, y, hidden, out):
    if isinstance(node, And):
        for c in node.children:
            _collect_conjuncts(c, y, hidden, out)
    elif isinstance(node, Exists):
        if node.var != y:
            _collect_conjuncts(node.body, y, hidden | {node.var}, out)
    elif isinstance(node, ATOMS) or (isinstance(node, Not) and isinstance(node.child, ATOMS)):
        out.append((node, hidden))


def eval_ground(f, assignment: Mapping[str, int], base: int | None = None, cap: int = DEFAULT_EVAL_CAP) -> bool:
    """Truth value under an assignment of all free variables.

    Quantified variables are enumerated over finite ranges: a syntactic bound
    when the body pins the variable down (an equation, an upper bound, or
    ``V(y, t)`` with t known), otherwise a bound certified by the automaton of
    the body.  Exceeding ``cap`` raises :class:`UnboundedQuantifierError`.
    """
    if isinstance(f, Formula):
        node, base = f.node, f.base
    else:
        node = f
        if base is None:
            raise ValueError("base required when evaluating a bare node")
    missing = free_vars(node) - set(assignment)
    if missing:
        raise ValueError(f"assignment misses free variables {sorted(missing)}")
    if any(v < 0 for v in assignment.values()):
        raise ValueError("variables range over the naturals")
    return _Evaluator(base, cap).eval(node, dict(assignment))


# --------------------------------------------------------------------------
# normal forms


def to_nnf(node) -> object:
    """Push negations down to atoms (negated atoms are kept as literals)."""
    if isinstance(node, ATOMS):
        return node
    if isinstance(node, (And, Or)):
        return (conj if isinstance(node, And) else disj)(*(to_nnf(c) for c in node.children))
    if isinstance(node, (Exists, Forall)):
        return type(node)(node.var, to_nnf(node.body))
    child = node.child
    if isinstance(child, Const):
        return Const(not child.value)
    if isinstance(child, ATOMS):
        return node
    if isinstance(child, Not):
        return to_nnf(child.child)
    if isinstance(child, And):
        return disj(*(to_nnf(Not(c)) for c in child.children))
    if isinstance(child, Or):
        return conj(*(to_nnf(Not(c)) for c in child.children))
    if isinstance(child, Exists):
        return Forall(child.var, to_nnf(Not(child.body)))
    if isinstance(child, Forall):
        return Exists(child.var, to_nnf(Not(child.body)))
    raise TypeError(f"not a formula node: {node!r}")


def _not_pow(x, namer):
    y = namer.fresh("y")
    return disj(lin({x: 1}, "=", 0), Exists(y, conj(Val(y, x), lin({x: 1, y: -1}, ">=", 1))))


def _negate_atom(atom, namer):
    if isinstance(atom, Lin):
        coeffs = atom.coeff_map
        c = atom.rhs
        if atom.rel == "=":
            return disj(Lin.make(coeffs, "<=", c - 1), Lin.make(coeffs, ">=", c + 1))
        return {
            "<=": lambda: Lin.make(coeffs, ">=", c + 1),
            "<": lambda: Lin.make(coeffs, ">=", c),
            ">=": lambda: Lin.make(coeffs, "<=", c - 1),
            ">": lambda: Lin.make(coeffs, "<=", c),
        }[atom.rel]()
    if isinstance(atom, Pow) or (isinstance(atom, Val) and atom.x == atom.y):
        return _not_pow(atom.x, namer)
    if isinstance(atom, Val):
        x, y = atom.x, atom.y
        z = namer.fresh("z")
        differs = disj(lin({z: 1, x: -1}, "<=", -1), lin({z: 1, x: -1}, ">=", 1))
        return disj(lin({y: 1}, "=", 0), _not_pow(x, namer), Exists(z, conj(Val(z, y), differs)))
    if isinstance(atom, Const):
        return Const(not atom.value)
    raise TypeError(f"not an atom: {atom!r}")


def eliminate_negation(node) -> object:
    """Equivalent formula without any negation symbol."""
    if isinstance(node, Formula):
        return Formula(node.base, eliminate_negation(node.node), node.vars, node.meta)
    namer = Namer(all_vars(node))

    def walk(n):
        if isinstance(n, Not):
            return walk_neg(n.child)
        if isinstance(n, (And, Or)):
            return (conj if isinstance(n, And) else disj)(*(walk(c) for c in n.children))
        if isinstance(n, (Exists, Forall)):
            return type(n)(n.var, walk(n.body))
        return n

    def walk_neg(n):
        if isinstance(n, ATOMS):
            return _negate_atom(n, namer)
        if isinstance(n, Not):
            return walk(n.child)
        if isinstance(n, And):
            return disj(*(walk_neg(c) for c in n.children))
        if isinstance(n, Or):
            return conj(*(walk_neg(c) for c in n.children))
        if isinstance(n, Exists):
            return Forall(n.var, walk_neg(n.body))
        if isinstance(n, Forall):
            return Exists(n.var, walk_neg(n.body))
        raise TypeError(f"not a formula node: {n!r}")

    return walk(node)


def is_negation_free(node) -> bool:
    if isinstance(node, Not):
        return False
    if isinstance(node, (And, Or)):
        return all(is_negation_free(c) for c in node.children)
    if isinstance(node, (Exists, Forall)):
        return is_negation_free(node.body)
    return True


def to_prenex(node) -> object:
    """Quantifier prefix over a quantifier-free matrix, bound variables renamed apart.

    Negations are first pushed onto atoms.
    """
    if isinstance(node, Formula):
        return Formula(node.base, to_prenex(node.node), node.vars, node.meta)
    node = to_nnf(node)
    namer = Namer(all_vars(node))
    taken = set(free_vars(node))

    def pull(n, mapping):
        if isinstance(n, ATOMS) or isinstance(n, Not):
            return [], rename_free(n, mapping)
        if isinstance(n, (Exists, Forall)):
            name = n.var if n.var not in taken else namer.fresh(n.var)
            taken.add(name)
            prefix, matrix = pull(n.body, {**mapping, n.var: name})
            return [(type(n), name)] + prefix, matrix
        prefix, parts = [], []
        for c in n.children:
            p, m = pull(c, mapping)
            prefix += p
            parts.append(m)
        return prefix, (conj if isinstance(n, And) else disj)(*parts)

    prefix, matrix = pull(node, {})
    for q, name in reversed(prefix):
        matrix = q(name, matrix)
    return matrix


def split_prefix(node):
    """``([(kind, var), ...], matrix)`` for a prenex node."""
    prefix = []
    while isinstance(node, (Exists, Forall)):
        prefix.append(("E" if isinstance(node, Exists) else "A", node.var))
        node = node.body
    return prefix, node


# --------------------------------------------------------------------------
# quantifier shape


def sigma_pi_levels(node) -> tuple[int, int]:
    """Least (n, m) with the node in Σ_n and in Π_m, read off its negation normal form."""
    node = to_nnf(node)
    return _levels(node)


def _levels(node):
    if isinstance(node, ATOMS) or isinstance(node, Not):
        return 0, 0
    if isinstance(node, (And, Or)):
        if not node.children:
            return 0, 0
        levels = [_levels(c) for c in node.children]
        s = max(x for x, _ in levels)
        p = max(y for _, y in levels)
    elif isinstance(node, Exists):
        cs, cp = _levels(node.body)
        s = max(1, min(cs, cp + 1))
        p = s + 1
    else:
        cs, cp = _levels(node.body)
        p = max(1, min(cp, cs + 1))
        s = p + 1
    return min(s, p + 1), min(p, s + 1)


def sigma_level(node) -> int:
    return sigma_pi_levels(node)[0]


def has_universal(node) -> bool:
    node = to_nnf(node)
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Forall):
            return True
        if isinstance(n, Exists):
            stack.append(n.body)
        elif isinstance(n, (And, Or)):
            stack.extend(n.children)
    return False


def is_existential(node) -> bool:
    return not has_universal(node)


# --------------------------------------------------------------------------
# systems of linear equations with valuation constraints


@dataclass(frozen=True)
class LinSystem:
    """``A·x = c`` together with constraints ``V_p(x_i, x_j)`` given as index pairs."""

    matrix: tuple
    rhs: tuple
    vars: tuple
    valuations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "valuations", tuple(tuple(v) for v in self.valuations))
        d = len(self.vars)
        if len(self.matrix) != len(self.rhs):
            raise ValueError("matrix and right-hand side disagree on the number of equations")
        if any(len(row) != d for row in self.matrix):
            raise ValueError(f"every row needs {d} coefficients")
        if any(not (0 <= i < d and 0 <= j < d) for i, j in self.valuations):
            raise ValueError("valuation index out of range")

    @property
    def m(self) -> int:
        return len(self.rhs)

    @property
    def d(self) -> int:
        return len(self.vars)

    def norm_a(self) -> int:
        """‖A‖_{1,∞}: largest row 1-norm."""
        return max([sum(abs(a) for a in row) for row in self.matrix] + [0])

    def norm_c(self) -> int:
        return max([abs(c) for c in self.rhs] + [0])

    def satisfied_by(self, values, base: int) -> bool:
        if any(sum(a * x for a, x in zip(row, values)) != c for row, c in zip(self.matrix, self.rhs)):
            return False
        return all(val_holds(values[i], values[j], base) for i, j in self.valuations)

    def to_node(self) -> object:
        parts = [Lin.make(dict(zip(self.vars, row)), "=", c) for row, c in zip(self.matrix, self.rhs)]
        for i, j in self.valuations:
            parts.append(Pow(self.vars[i]) if i == j else Val(self.vars[i], self.vars[j]))
        return conj(*parts)


def _dnf(node, limit):
    if isinstance(node, Or):
        out = []
        for c in node.children:
            out.extend(_dnf(c, limit))
            if len(out) > limit:
                raise DnfTooLargeError(f"DNF exceeds {limit} disjuncts")
        return out
    if isinstance(node, And):
        out = [[]]
        for c in node.children:
            out = [a + b for a in out for b in _dnf(c, limit)]
            if len(out) > limit:
                raise DnfTooLargeError(f"DNF exceeds {limit} disjuncts")
        return out
    if isinstance(node, (Exists, Forall)) or (isinstance(node, Not)):
        raise ValueError("matrix_to_systems expects a negation-free, quantifier-free matrix")
    return [[node]]


def matrix_to_systems(matrix, vars: Iterable[str] | None = None,
                      max_disjuncts: int = DEFAULT_MAX_DISJUNCTS) -> list[LinSystem]:
    """Expand the matrix into DNF and package each disjunct as a LinSystem.

    Inequalities get one fresh slack variable each; ``P(x)`` becomes the
    valuation pair ``(x, x)``.  Variable order: ``vars`` first, then the
    remaining matrix variables by first occurrence, then slacks.
    """
    if isinstance(matrix, Formula):
        vars = matrix.vars if vars is None else vars
        matrix = matrix.node
    order = list(vars or ())
    for v in ordered_free_vars(matrix):
        if v not in order:
            order.append(v)
    namer = Namer(set(order) | all_vars(matrix), prefix="_s")
    systems = []
    for clause in _dnf(matrix, max_disjuncts):
        rows, rhs, vals, slacks = [], [], [], []
        feasible = True
        for atom in clause:
            if isinstance(atom, Const):
                feasible &= atom.value
            elif isinstance(atom, Lin):
                coeffs = atom.coeff_map
                if not coeffs:
                    feasible &= _compare(0, atom.rel, atom.rhs)
                    continue
                c = atom.rhs
                if atom.rel != "=":
                    s = namer.fresh("_s")
                    slacks.append(s)
                    sign = 1 if atom.rel in ("<=", "<") else -1
                    coeffs[s] = sign
                    c += {"<=": 0, "<": -1, ">=": 0, ">": 1}[atom.rel]
                rows.append(coeffs)
                rhs.append(c)
            elif isinstance(atom, Val):
                vals.append((atom.x, atom.y))
            elif isinstance(atom, Pow):
                vals.append((atom.x, atom.x))
            else:
                raise ValueError(f"unexpected atom {atom!r}")
        if not feasible:
            continue
        names = order + slacks
        idx = {v: i for i, v in enumerate(names)}
        matrix_rows = [[row.get(v, 0) for v in names] for row in rows]
        systems.append(LinSystem(matrix_rows, rhs, names, [(idx[x], idx[y]) for x, y in vals]))
    return systems
