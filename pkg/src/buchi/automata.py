"""Finite automata over alphabets of d-tuples of base-p digits.

Letters are integers in ``range(base**dim)``; :func:`buchi.numerics.letter_digits`
converts back to digit tuples.  Track 0 is the most significant position of the
letter index, so integer order on letters is lexicographic order on tuples.

Every public operation returns a trimmed, minimal DFA with states numbered in
breadth-first order (letters ascending) from the initial state.  Two DFAs with
the same language are therefore identical, which is what :func:`equivalent`,
the golden tests and the file format rely on.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Sequence

from .numerics import DigitWord, digits_letter, encode, letter_digits

DEFAULT_STATE_CAP = 10**6


class AlphabetMismatchError(ValueError):
    pass


class StateExplosionError(RuntimeError):
    pass


class AutomatonFormatError(ValueError):
    pass


class Dfa:
    """Deterministic automaton with a sparse transition map.

    ``delta[s]`` maps letters to successor states; a missing letter is the
    rejecting sink.  ``labels`` optionally attaches provenance to states.
    """

    __slots__ = ("base", "dim", "delta", "initial", "finals", "labels")

    def __init__(self, base, dim, delta, initial=0, finals=(), labels=None):
        self.base = base
        self.dim = dim
        self.delta = tuple(dict(d) for d in delta)
        self.initial = initial
        self.finals = frozenset(finals)
        self.labels = tuple(labels) if labels is not None else None

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def alphabet_size(self) -> int:
        return self.base**self.dim

    def n_transitions(self) -> int:
        return sum(len(d) for d in self.delta)

    def run(self, letters: Iterable[int], state=None):
        state = self.initial if state is None else state
        for a in letters:
            state = self.delta[state].get(a)
            if state is None:
                return None
        return state

    def accepts(self, word) -> bool:
        if isinstance(word, DigitWord):
            self._check_word(word)
            word = word.letters()
        elif isinstance(word, str):
            word = [int(ch) for ch in word]
        else:
            word = [a if isinstance(a, int) else digits_letter(a, self.base) for a in word]
        return self.run(word) in self.finals

    def accepts_value(self, values) -> bool:
        """Membership of a tuple of naturals via its shortest encoding."""
        if isinstance(values, int):
            values = (values,)
        return self.accepts(encode(tuple(values), self.base))

    def is_empty(self) -> bool:
        return not _reachable(self, [self.initial]) & self.finals

    def same_as(self, other: "Dfa") -> bool:
        return (
            (self.base, self.dim, self.initial, self.finals, self.delta)
            == (other.base, other.dim, other.initial, other.finals, other.delta)
        )

    def _check_word(self, w: DigitWord):
        if (w.base, w.dim) != (self.base, self.dim):
            raise AlphabetMismatchError(
                f"word over base {w.base} dim {w.dim}, automaton over base {self.base} dim {self.dim}"
            )

    def __repr__(self):
        return (
            f"Dfa(base={self.base}, dim={self.dim}, states={self.n_states}, "
            f"finals={sorted(self.finals)}, transitions={self.n_transitions()})"
        )


class Nfa:
    """Nondeterministic automaton; ``delta[s]`` maps letters to frozensets of states."""

    __slots__ = ("base", "dim", "delta", "initials", "finals")

    def __init__(self, base, dim, delta, initials, finals):
        self.base = base
        self.dim = dim
        self.delta = tuple(delta)
        self.initials = frozenset(initials)
        self.finals = frozenset(finals)

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @classmethod
    def from_dfa(cls, a: Dfa) -> "Nfa":
        delta = [{x: frozenset((t,)) for x, t in d.items()} for d in a.delta]
        return cls(a.base, a.dim, delta, {a.initial}, a.finals)

    def accepts(self, word) -> bool:
        if isinstance(word, DigitWord):
            word = word.letters()
        current = set(self.initials)
        for a in word:
            current = {t for s in current for t in self.delta[s].get(a, ())}
            if not current:
                return False
        return bool(current & self.finals)


# --------------------------------------------------------------------------
# construction helpers


def empty_dfa(base: int, dim: int) -> Dfa:
    return Dfa(base, dim, [{}], 0, ())


def universal_dfa(base: int, dim: int) -> Dfa:
    return Dfa(base, dim, [{a: 0 for a in range(base**dim)}], 0, (0,))


def word_dfa(w: DigitWord) -> Dfa:
    letters = w.letters()
    delta = [{a: i + 1} for i, a in enumerate(letters)] + [{}]
    return Dfa(w.base, w.dim, delta, 0, (len(letters),))




def _reachable(a, starts) -> set:
    seen = set(starts)
    stack = list(starts)
    while stack:
        s = stack.pop()
        for t in a.delta[s].values():
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _coreachable(a: Dfa) -> set:
    back = [set() for _ in range(a.n_states)]
    for s, d in enumerate(a.delta):
        for t in d.values():
            back[t].add(s)
    seen = set(a.finals)
    stack = list(a.finals)
    while stack:
        t = stack.pop()
        for s in back[t]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


def trim(a: Dfa) -> Dfa:
    """Drop states that are unreachable or cannot reach a final state."""
    live = _reachable(a, [a.initial]) & _coreachable(a)
    if a.initial not in live:
        return empty_dfa(a.base, a.dim)
    order = sorted(live)
    index = {s: i for i, s in enumerate(order)}
    delta = [{x: index[t] for x, t in a.delta[s].items() if t in index} for s in order]
    labels = [a.labels[s] for s in order] if a.labels is not None else None
    return Dfa(a.base, a.dim, delta, index[a.initial], [index[s] for s in a.finals if s in index], labels)


def canonical_numbering(a: Dfa) -> Dfa:
    """Renumber states in BFS order from the initial state, letters ascending."""
    index = {a.initial: 0}
    order = [a.initial]
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        for x in sorted(a.delta[s]):
            t = a.delta[s][x]
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
    delta = [{x: index[a.delta[s][x]] for x in sorted(a.delta[s])} for s in order]
    labels = [a.labels[s] for s in order] if a.labels is not None else None
    return Dfa(a.base, a.dim, delta, 0, sorted(index[s] for s in a.finals if s in index), labels)


def minimize(a: Dfa) -> Dfa:
    """Trim, merge equivalent states (Moore refinement) and renumber canonically."""
    a = trim(a)
    n = a.n_states
    if not a.finals:
        return empty_dfa(a.base, a.dim)
    cls = [1 if s in a.finals else 0 for s in range(n)]
    n_cls = len(set(cls))
    while True:
        sigs = {}
        new = [0] * n
        for s in range(n):
            sig = (cls[s], tuple((x, cls[t]) for x, t in sorted(a.delta[s].items())))
            new[s] = sigs.setdefault(sig, len(sigs))
        cls = new
        if len(sigs) == n_cls:
            break
        n_cls = len(sigs)
    delta = [None] * n_cls
    for s in range(n):
        if delta[cls[s]] is None:
            delta[cls[s]] = {x: cls[t] for x, t in a.delta[s].items()}
    finals = {cls[s] for s in a.finals}
    return canonical_numbering(Dfa(a.base, a.dim, delta, cls[a.initial], finals))


def determinize_minimize(a: Nfa, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Subset construction followed by minimization."""
    start = frozenset(a.initials)
    index = {start: 0}
    subsets = [start]
    delta = []
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        moves = {}
        for s in subset:
            for x, ts in a.delta[s].items():
                moves.setdefault(x, set()).update(ts)
        row = {}
        for x in sorted(moves):
            target = frozenset(moves[x])
            if target not in index:
                if len(subsets) >= cap:
                    raise StateExplosionError(f"subset construction exceeded {cap} states")
                index[target] = len(subsets)
                subsets.append(target)
                queue.append(target)
            row[x] = index[target]
        delta.append(row)
    finals = [i for i, sub in enumerate(subsets) if sub & a.finals]
    return minimize(Dfa(a.base, a.dim, delta, 0, finals))


# --------------------------------------------------------------------------
# boolean operations


def _check_compatible(a, b):
    if (a.base, a.dim) != (b.base, b.dim):
        raise AlphabetMismatchError(
            f"alphabets differ: base {a.base} dim {a.dim} vs base {b.base} dim {b.dim}"
        )


def product(a: Dfa, b: Dfa, op: str = "and", cap: int = DEFAULT_STATE_CAP) -> Dfa:
    _check_compatible(a, b)
    if op not in ("and", "or"):
        raise ValueError(f"unknown product operation {op!r}")
    dead = -1
    start = (a.initial, b.initial)
    index = {start: 0}
    pairs = [start]
    delta = []
    queue = deque([start])
    while queue:
        s, t = queue.popleft()
        da = a.delta[s] if s != dead else {}
        db = b.delta[t] if t != dead else {}
        if op == "and":
            letters = [x for x in da if x in db]
        else:
            letters = set(da) | set(db)
        row = {}
        for x in sorted(letters):
            nxt = (da.get(x, dead), db.get(x, dead))
            if nxt not in index:
                if len(pairs) >= cap:
                    raise StateExplosionError(f"product exceeded {cap} states")
                index[nxt] = len(pairs)
                pairs.append(nxt)
                queue.append(nxt)
            row[x] = index[nxt]
        delta.append(row)
    if op == "and":
        finals = [i for i, (s, t) in enumerate(pairs) if s in a.finals and t in b.finals]
    else:
        finals = [i for i, (s, t) in enumerate(pairs) if s in a.finals or t in b.finals]
    return minimize(Dfa(a.base, a.dim, delta, 0, finals))


def intersection(*dfas: Dfa) -> Dfa:
    out = dfas[0]
    for b in dfas[1:]:
        out = product(out, b, "and")
    return out


def union(*dfas: Dfa) -> Dfa:
    out = dfas[0]
    for b in dfas[1:]:
        out = product(out, b, "or")
    return out


def complement(a: Dfa) -> Dfa:
    size = a.alphabet_size
    sink = a.n_states
    delta = [{x: d.get(x, sink) for x in range(size)} for d in a.delta]
    delta.append({x: sink for x in range(size)})
    finals = [s for s in range(sink + 1) if s not in a.finals]
    return minimize(Dfa(a.base, a.dim, delta, a.initial, finals))


def difference(a: Dfa, b: Dfa) -> Dfa:
    return product(a, complement(b), "and")


# --------------------------------------------------------------------------
# track manipulation


def _letter_map(base: int, dim: int, keep: Sequence[int]) -> list[int]:
    """Letter index after restricting each letter to the tracks in ``keep``."""
    out = []
    for x in range(base**dim):
        digits = letter_digits(x, base, dim)
        out.append(digits_letter([digits[i] for i in keep], base))
    return out


def map_tracks(a: Dfa, keep: Sequence[int]) -> Nfa:
    """Homomorphic image keeping the listed tracks (in that order), no padding closure."""
    lm = _letter_map(a.base, a.dim, keep)
    delta = []
    for d in a.delta:
        row = {}
        for x, t in d.items():
            row.setdefault(lm[x], set()).add(t)
        delta.append({y: frozenset(ts) for y, ts in sorted(row.items())})
    return Nfa(a.base, len(keep), delta, {a.initial}, a.finals)


def project(a: Dfa, component: int, saturate: bool = True) -> Nfa:
    """Erase one track.

    With ``saturate`` every state reachable from the initial state along
    columns that are zero on the remaining tracks becomes initial, so the
    erased variable may be longer than what is left.
    """
    if not 0 <= component < a.dim:
        raise ValueError(f"component {component} out of range for dim {a.dim}")
    keep = [i for i in range(a.dim) if i != component]
    nfa = map_tracks(a, keep)
    if not saturate:
        return nfa
    zero_cols = [x for x in range(a.alphabet_size) if all(
        d == 0 for i, d in enumerate(letter_digits(x, a.base, a.dim)) if i != component)]
    initials = {a.initial}
    stack = [a.initial]
    while stack:
        s = stack.pop()
        for x in zero_cols:
            t = a.delta[s].get(x)
            if t is not None and t not in initials:
                initials.add(t)
                stack.append(t)
    return Nfa(nfa.base, nfa.dim, nfa.delta, initials, nfa.finals)


def cylindrify(a: Dfa, positions: Sequence[int], new_dim: int) -> Dfa:
    """Re-track ``a``: its track i becomes track ``positions[i]`` of a dim-``new_dim`` automaton.

    Tracks of the result not listed in ``positions`` are unconstrained.
    """
    lm = _letter_map(a.base, new_dim, positions)
    size = a.base**new_dim
    delta = []
    for d in a.delta:
        delta.append({x: d[lm[x]] for x in range(size) if lm[x] in d})
    return minimize(Dfa(a.base, new_dim, delta, a.initial, a.finals))


def reverse(a: Dfa) -> Nfa:
    rows = [dict() for _ in range(a.n_states)]
    for s, d in enumerate(a.delta):
        for x, t in d.items():
            rows[t].setdefault(x, set()).add(s)
    delta = [{x: frozenset(ss) for x, ss in sorted(r.items())} for r in rows]
    return Nfa(a.base, a.dim, delta, a.finals, {a.initial})


def zero_closure(a: Dfa) -> Dfa:
    """Close the language under adding and removing leading all-zero columns."""
    zero = 0
    starts = {a.initial}
    s = a.initial
    while True:
        s = a.delta[s].get(zero)
        if s is None or s in starts:
            break
        starts.add(s)
    hub = a.n_states
    row = {}
    for s in starts:
        for x, t in a.delta[s].items():
            row.setdefault(x, set()).add(t)
    row.setdefault(zero, set()).add(hub)
    delta = [{x: frozenset((t,)) for x, t in d.items()} for d in a.delta]
    delta.append({x: frozenset(ts) for x, ts in row.items()})
    finals = set(a.finals)
    if starts & a.finals:
        finals.add(hub)
    return determinize_minimize(Nfa(a.base, a.dim, delta, {hub}, finals))


def is_zero_closed(a: Dfa) -> bool:
    return zero_closure(a).same_as(minimize(a))


def restrict(a: Dfa, initial: int, finals: Iterable[int]) -> Dfa:
    """Same transition graph with a different initial state and final set (not minimized)."""
    return Dfa(a.base, a.dim, a.delta, initial, finals, a.labels)


# --------------------------------------------------------------------------
# comparison and counting


def counterexample(a: Dfa, b: Dfa) -> DigitWord | None:
    """Shortest, then lexicographically least, word in exactly one of L(a), L(b)."""
    _check_compatible(a, b)
    dead = -1
    start = (a.initial, b.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        s, t = pair
        if (s in a.finals) != (t in b.finals):
            letters = []
            while parent[pair] is not None:
                pair, x = parent[pair]
                letters.append(x)
            return DigitWord.from_letters(reversed(letters), a.base, a.dim)
        da = a.delta[s] if s != dead else {}
        db = b.delta[t] if t != dead else {}
        for x in sorted(set(da) | set(db)):
            nxt = (da.get(x, dead), db.get(x, dead))
            if nxt not in parent:
                parent[nxt] = (pair, x)
                queue.append(nxt)
    return None


def equivalent(a: Dfa, b: Dfa) -> bool:
    return counterexample(a, b) is None


def transition_counts(a: Dfa) -> list[dict[int, int]]:
    """Per state, the number of letters leading to each successor."""
    out = []
    for d in a.delta:
        row = {}
        for t in d.values():
            row[t] = row.get(t, 0) + 1
        out.append(row)
    return out


def count_words(a: Dfa, n: int) -> int:
    return count_words_upto(a, n)[n]


def count_words_upto(a: Dfa, n: int) -> list[int]:
    """``[d(0), ..., d(n)]`` where d(k) is the number of accepted words of length k."""
    mult = transition_counts(a)
    vec = {a.initial: 1}
    out = []
    for k in range(n + 1):
        out.append(sum(c for s, c in vec.items() if s in a.finals))
        if k == n:
            break
        nxt = {}
        for s, c in vec.items():
            for t, m in mult[s].items():
                nxt[t] = nxt.get(t, 0) + c * m
        vec = nxt
    return out


def shortest_word(a: Dfa) -> DigitWord | None:
    """Shortest, lexicographically least accepted word."""
    parent = {a.initial: None}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        if s in a.finals:
            letters = []
            while parent[s] is not None:
                s, x = parent[s]
                letters.append(x)
            return DigitWord.from_letters(reversed(letters), a.base, a.dim)
        for x in sorted(a.delta[s]):
            t = a.delta[s][x]
            if t not in parent:
                parent[t] = (s, x)
                queue.append(t)
    return None


def words_of_length(a: Dfa, n: int) -> Iterator[DigitWord]:
    """Accepted words of length n in lexicographic order."""
    alive = [set(a.finals)]
    back = [set() for _ in range(a.n_states)]
    for s, d in enumerate(a.delta):
        for t in d.values():
            back[t].add(s)
    for _ in range(n):
        alive.append({s for t in alive[-1] for s in back[t]})
    # alive[k]: states that accept some word of length k

    def walk(state, remaining, prefix):
        if remaining == 0:
            yield DigitWord.from_letters(prefix, a.base, a.dim)
            return
        for x in sorted(a.delta[state]):
            t = a.delta[state][x]
            if t in alive[remaining - 1]:
                prefix.append(x)
                yield from walk(t, remaining - 1, prefix)
                prefix.pop()

    if a.initial in alive[n]:
        yield from walk(a.initial, n, [])


# --------------------------------------------------------------------------
# structure


def sccs(a: Dfa) -> list[list[int]]:
    """Strongly connected components (iterative Tarjan), each sorted, listed by least member."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = 0
    for root in range(a.n_states):
        if root in index:
            continue
        work = [(root, iter(sorted(set(a.delta[root].values()))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(set(a.delta[w].values())))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return sorted(out)


# --------------------------------------------------------------------------
# file format

FORMAT_HEADER = "pautomaton v1"


def write_automaton(a: Dfa) -> str:
    lines = [f"{FORMAT_HEADER} base={a.base} dim={a.dim}", f"states {a.n_states}",
             f"initial {a.initial}", "finals " + " ".join(map(str, sorted(a.finals)))]
    for s, d in enumerate(a.delta):
        for x in sorted(d):
            digits = ",".join(map(str, letter_digits(x, a.base, a.dim))) or "-"
            lines.append(f"{s} {digits} {d[x]}")
    return "\n".join(lines) + "\n"


def read_automaton(text: str) -> Dfa:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(FORMAT_HEADER):
        raise AutomatonFormatError("missing 'pautomaton v1' header")
    try:
        fields = dict(f.split("=", 1) for f in lines[0][len(FORMAT_HEADER):].split())
        base, dim = int(fields["base"]), int(fields["dim"])
        key, n = lines[1].split()
        if key != "states":
            raise AutomatonFormatError("expected 'states <n>'")
        n = int(n)
        key, init = lines[2].split()
        if key != "initial":
            raise AutomatonFormatError("expected 'initial <id>'")
        parts = lines[3].split()
        if parts[0] != "finals":
            raise AutomatonFormatError("expected 'finals ...'")
        finals = [int(x) for x in parts[1:]]
        delta = [dict() for _ in range(n)]
        for ln in lines[4:]:
            src, digits, dst = ln.split()
            col = () if digits == "-" else tuple(int(d) for d in digits.split(","))
            if len(col) != dim or any(not 0 <= d < base for d in col):
                raise AutomatonFormatError(f"bad letter {digits!r}")
            s, t = int(src), int(dst)
            if not (0 <= s < n and 0 <= t < n):
                raise AutomatonFormatError(f"state out of range in {ln!r}")
            x = digits_letter(col, base)
            if x in delta[s]:
                raise AutomatonFormatError(f"nondeterministic transition in {ln!r}")
            delta[s][x] = t
    except (KeyError, ValueError, IndexError) as exc:
        if isinstance(exc, AutomatonFormatError):
            raise
        raise AutomatonFormatError(str(exc)) from exc
    return Dfa(base, dim, delta, int(init), finals)
