"""Regular expressions over single-track digit alphabets, and block regexes.

Syntax: digits ``0``-``9`` (must be below the base), ``.`` for any digit,
``|``, ``*``, ``+``, ``?``, parentheses, and ``ε`` (or ``()``) for the empty
word.  Compilation uses the Glushkov position automaton, which needs no
epsilon transitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automata import Dfa, Nfa, determinize_minimize, empty_dfa
from .numerics import DigitWord


class RegexSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Sym:
    digits: frozenset


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Cat:
    parts: tuple


@dataclass(frozen=True)
class Alt:
    options: tuple


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Plus:
    inner: object


@dataclass(frozen=True)
class Opt:
    inner: object


class _Parser:
    def __init__(self, text: str, base: int):
        self.text = "".join(text.split())
        self.pos = 0
        self.base = base

    def parse(self):
        node = self.alt()
        if self.pos != len(self.text):
            raise RegexSyntaxError(f"unexpected {self.text[self.pos]!r} at offset {self.pos}")
        return node

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def alt(self):
        options = [self.cat()]
        while self.peek() == "|":
            self.pos += 1
            options.append(self.cat())
        return options[0] if len(options) == 1 else Alt(tuple(options))

    def cat(self):
        parts = []
        while self.peek() is not None and self.peek() not in "|)":
            parts.append(self.postfix())
        if not parts:
            return Eps()
        return parts[0] if len(parts) == 1 else Cat(tuple(parts))

    def postfix(self):
        node = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.text[self.pos]
            self.pos += 1
            node = {"*": Star, "+": Plus, "?": Opt}[op](node)
        return node

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.alt()
            if self.peek() != ")":
                raise RegexSyntaxError(f"missing ')' at offset {self.pos}")
            self.pos += 1
            return node
        if ch == "ε":
            self.pos += 1
            return Eps()
        if ch == ".":
            self.pos += 1
            return Sym(frozenset(range(self.base)))
        if ch is not None and ch.isdigit():
            d = int(ch)
            if d >= self.base:
                raise RegexSyntaxError(f"digit {d} not allowed in base {self.base}")
            self.pos += 1
            return Sym(frozenset((d,)))
        raise RegexSyntaxError(f"unexpected {ch!r} at offset {self.pos}")


def parse_regex(text: str, base: int = 2):
    return _Parser(text, base).parse()


def _glushkov(node, positions):
    """Return (nullable, first, last, follow) with positions appended to ``positions``."""
    if isinstance(node, Eps):
        return True, set(), set(), {}
    if isinstance(node, Sym):
        positions.append(node.digits)
        p = len(positions) - 1
        return False, {p}, {p}, {}
    if isinstance(node, Alt):
        nullable, first, last, follow = False, set(), set(), {}
        for opt in node.options:
            n, f, l, fo = _glushkov(opt, positions)
            nullable |= n
            first |= f
            last |= l
            for k, v in fo.items():
                follow.setdefault(k, set()).update(v)
        return nullable, first, last, follow
    if isinstance(node, Cat):
        nullable, first, last, follow = True, set(), set(), {}
        for part in node.parts:
            n, f, l, fo = _glushkov(part, positions)
            for k, v in fo.items():
                follow.setdefault(k, set()).update(v)
            for p in last:
                follow.setdefault(p, set()).update(f)
            if nullable:
                first |= f
            last = (last | l) if n else l
            nullable &= n
        return nullable, first, last, follow
    if isinstance(node, (Star, Plus, Opt)):
        n, f, l, follow = _glushkov(node.inner, positions)
        if not isinstance(node, Opt):
            for p in l:
                follow.setdefault(p, set()).update(f)
        return (n or not isinstance(node, Plus)), f, l, follow
    raise TypeError(f"not a regex node: {node!r}")


def regex_node_to_dfa(node, base: int) -> Dfa:
    positions = []
    nullable, first, last, follow = _glushkov(node, positions)
    # state 0 is the start, state i+1 is position i
    n = len(positions) + 1
    delta = [dict() for _ in range(n)]

    def add(src, targets):
        for p in targets:
            for d in positions[p]:
                delta[src].setdefault(d, set()).add(p + 1)

    add(0, first)
    for p, targets in follow.items():
        add(p + 1, targets)
    delta = [{d: frozenset(ts) for d, ts in sorted(row.items())} for row in delta]
    finals = {p + 1 for p in last} | ({0} if nullable else set())
    return determinize_minimize(Nfa(base, 1, delta, {0}, finals))


def regex_to_dfa(text: str, base: int = 2) -> Dfa:
    """Minimal DFA of the word language of a regex (no leading-zero closure)."""
    return regex_node_to_dfa(parse_regex(text, base), base)


# --------------------------------------------------------------------------
# block regexes v0 w1* v1 ... wk* vk


@dataclass(frozen=True)
class BlockRegex:
    """``v0 w1^op v1 ... wk^op vk`` with each op in {"*", "+"}."""

    base: int
    head: tuple[int, ...]
    blocks: tuple[tuple[tuple[int, ...], str, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        words = [self.head] + [w for w, _, _ in self.blocks] + [v for _, _, v in self.blocks]
        for w in words:
            if any(not 0 <= d < self.base for d in w):
                raise ValueError(f"digit out of range for base {self.base} in {w}")
        for _, mode, _ in self.blocks:
            if mode not in ("*", "+"):
                raise ValueError(f"block mode must be '*' or '+', got {mode!r}")

    @classmethod
    def of(cls, base: int, v0: str, *rest) -> "BlockRegex":
        """Build from strings: ``BlockRegex.of(2, "1", ("0", "*", ""))``."""
        blocks = []
        for item in rest:
            w, mode, v = item if len(item) == 3 else (item[0], "*", item[1])
            blocks.append((_digits(w), mode, _digits(v)))
        return cls(base, _digits(v0), tuple(blocks))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def words(self) -> list[tuple[int, ...]]:
        return [self.head] + [x for w, _, v in self.blocks for x in (w, v)]

    def to_node(self):
        parts = [_word_node(self.head)]
        for w, mode, v in self.blocks:
            inner = _word_node(w)
            parts.append(Star(inner) if mode == "*" else Plus(inner))
            parts.append(_word_node(v))
        return Cat(tuple(parts))

    def __str__(self):
        out = "".join(map(str, self.head))
        for w, mode, v in self.blocks:
            out += "(" + "".join(map(str, w)) + ")" + mode + "".join(map(str, v))
        return out or "ε"


def _digits(s) -> tuple[int, ...]:
    if isinstance(s, DigitWord):
        return tuple(c[0] for c in s.columns)
    if isinstance(s, str):
        return tuple(int(ch) for ch in s if ch != "ε")
    return tuple(s)


def _word_node(w: Sequence[int]):
    if not w:
        return Eps()
    syms = tuple(Sym(frozenset((d,))) for d in w)
    return syms[0] if len(syms) == 1 else Cat(syms)


def block_regex_to_dfa(r) -> Dfa:
    """Minimal DFA for a BlockRegex or an iterable (union) of them."""
    regexes = [r] if isinstance(r, BlockRegex) else list(r)
    if not regexes:
        raise ValueError("need at least one block regex to fix the base")
    base = regexes[0].base
    if any(x.base != base for x in regexes):
        raise ValueError("block regexes over different bases")
    node = Alt(tuple(x.to_node() for x in regexes)) if len(regexes) > 1 else regexes[0].to_node()
    return regex_node_to_dfa(node, base)


def union_text(regexes) -> str:
    return " | ".join(str(r) for r in regexes)


def parse_block_union(text: str, base: int) -> list[BlockRegex]:
    """Parse ``"1(0)*|(10)+1"``-style unions of block regexes.

    Each alternative must be a concatenation of digit words and
    parenthesized digit words (or single digits) followed by ``*`` or ``+``.
    """
    out = []
    text = text.replace(" ", "")
    depth, alts, start = 0, [], 0
    for i, ch in enumerate(text):
        depth += {"(": 1, ")": -1}.get(ch, 0)
        if ch == "|":
            if depth:
                raise RegexSyntaxError(f"alternation inside a group at offset {i} is not a block regex")
            alts.append(text[start:i])
            start = i + 1
    alts.append(text[start:])
    for alt in alts:
        head, blocks = [], []
        current = head
        i = 0
        while i < len(alt):
            ch = alt[i]
            if ch == "(":
                j = alt.find(")", i)
                if j < 0 or "(" in alt[i + 1:j]:
                    raise RegexSyntaxError(f"unbalanced group at offset {i}")
                if j + 1 >= len(alt) or alt[j + 1] not in "*+":
                    raise RegexSyntaxError(f"group at offset {i} must be starred in a block regex")
                current = []
                blocks.append([_digits(alt[i + 1:j]), alt[j + 1], current])
                i = j + 2
            elif ch.isdigit() and i + 1 < len(alt) and alt[i + 1] in "*+":
                current = []
                blocks.append([(int(ch),), alt[i + 1], current])
                i += 2
            elif ch.isdigit():
                current.append(int(ch))
                i += 1
            elif ch == "ε":
                i += 1
            else:
                raise RegexSyntaxError(f"unexpected {ch!r} in block regex")
        out.append(BlockRegex(base, tuple(head), tuple((w, m, tuple(v)) for w, m, v in blocks)))
    return out


def empty_language(base: int) -> Dfa:
    return empty_dfa(base, 1)
