"""Census functions, cycle counting, quasi-polynomial fits and growth classification."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .automata import (
    Dfa,
    count_words,
    count_words_upto,
    determinize_minimize,
    equivalent,
    is_zero_closed,
    map_tracks,
    minimize,
    restrict,
    sccs,
    zero_closure,
)
from .decide import canonical_words
from .numerics import UPSet, upset_normalize
from .regex import BlockRegex, block_regex_to_dfa

DEFAULT_MAX_MODULUS = 64


class NotZeroClosedError(ValueError):
    pass


class NotPolynomialError(ValueError):
    pass


def _require_dim1(a: Dfa):
    if a.dim != 1:
        raise ValueError(f"expected a one-track automaton, got dim {a.dim}")


# --------------------------------------------------------------------------
# census


def density_words(a: Dfa, n: int) -> int:
    """d_L(n): accepted words of length n."""
    return count_words(a, n)


def density_values(a: Dfa, n: int) -> int:
    """d_M(n): members of the decoded set with exactly n base-p digits."""
    return density_values_upto(a, n)[n]


def density_values_upto(a: Dfa, n: int) -> list[int]:
    _require_dim1(a)
    if not is_zero_closed(a):
        raise NotZeroClosedError("value census needs a zero-closed automaton")
    return count_words_upto(canonical_words(a), n)


def value_automaton(a: Dfa) -> Dfa:
    """Canonical-representation DFA of the value set of ``a`` (zero-closing first)."""
    return canonical_words(zero_closure(a))


# --------------------------------------------------------------------------
# cycle counting


def loop_projection(a: Dfa, q: int, track: int) -> Dfa:
    """Minimal DFA of the track-``track`` images of the words looping at q."""
    if not 0 <= track < a.dim:
        raise ValueError(f"track {track} out of range for dim {a.dim}")
    loops = restrict(a, q, {q})
    return determinize_minimize(map_tracks(loops, [track]))


def cycle_count(a: Dfa, q: int, track: int, n: int) -> int:
    """C_{q,x}(n): distinct x-track projections of length-n loops at q."""
    return count_words(loop_projection(a, q, track), n)


def cycle_counts(a: Dfa, q: int, track: int, n: int) -> list[int]:
    """[C_{q,x}(0), ..., C_{q,x}(n)]."""
    return count_words_upto(loop_projection(a, q, track), n)


# --------------------------------------------------------------------------
# eventual quasi-polynomials


@dataclass(frozen=True)
class EQPoly:
    """f(y) = polys[y mod modulus](y) for y > threshold; coefficients ascending."""

    threshold: int
    modulus: int
    polys: tuple

    def __call__(self, y: int) -> Fraction:
        coeffs = self.polys[y % self.modulus]
        if coeffs is None:
            raise ValueError(f"no polynomial fitted for residue {y % self.modulus}")
        return sum((c * y**i for i, c in enumerate(coeffs)), Fraction(0))

    @property
    def degree(self) -> int:
        return max((len(c) - 1 for c in self.polys if c is not None and any(c)), default=0)

    def __str__(self):
        def show(c):
            if c is None:
                return "?"
            return " + ".join(f"{x}*y^{i}" if i else f"{x}" for i, x in enumerate(c) if x) or "0"
        classes = "; ".join(f"y≡{r}: {show(c)}" for r, c in enumerate(self.polys))
        return f"EQPoly(t={self.threshold}, m={self.modulus}: {classes})"


def _interpolate(points):
    """Coefficients (ascending) of the polynomial through the given points."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k in range(n):
            coeffs[k] += yi * basis[k] / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _eval(coeffs, y):
    return sum(c * y**i for i, c in enumerate(coeffs))


def fit_eqp(samples, base: int, max_modulus: int = DEFAULT_MAX_MODULUS, max_degree: int = 1,
            min_support: int = 4) -> EQPoly | None:
    """Least-degree quasi-polynomial f with f(p^n) = value for all samples past a threshold.

    Candidates are tried by degree, then modulus, then threshold.  Every
    residue class used must contain at least degree + 2 samples, so each
    fitted polynomial is checked on at least one point it was not fitted on.
    Returns None when nothing fits.
    """
    samples = sorted(samples)
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    ys = [base**n for n, _ in samples]
    vals = [Fraction(v) for _, v in samples]
    for deg in range(max_degree + 1):
        for m in range(1, max_modulus + 1):
            for start in range(len(samples)):
                if len(samples) - start < min_support:
                    break
                classes = {}
                for y, v in zip(ys[start:], vals[start:]):
                    classes.setdefault(y % m, []).append((y, v))
                if any(len(pts) < deg + 2 for pts in classes.values()):
                    continue
                polys = [None] * m
                ok = True
                for r, pts in classes.items():
                    coeffs = _interpolate(pts[: deg + 1])
                    if any(_eval(coeffs, y) != v for y, v in pts[deg + 1:]):
                        ok = False
                        break
                    polys[r] = coeffs
                if ok:
                    return EQPoly(ys[start - 1] if start else 0, m, tuple(polys))
    return None


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class CycleEvidence:
    """Two cycles at ``state`` starting with different letters.

    The words u·c^k·v with each c a ``period``-long product of the two cycles
    are pairwise distinct and accepted, so the census at |u| + k·period + |v|
    is at least 2^k.
    """

    state: int
    cycle1: tuple
    cycle2: tuple
    prefix: tuple
    suffix: tuple

    @property
    def period(self) -> int:
        return lcm(len(self.cycle1), len(self.cycle2))

    def lengths(self, upto: int) -> list[tuple[int, int]]:
        """(n, 2^k) pairs with n = |u| + k·period + |v| ≤ upto."""
        out, k = [], 0
        while (n := len(self.prefix) + k * self.period + len(self.suffix)) <= upto:
            out.append((n, 2**k))
            k += 1
        return out


@dataclass(frozen=True)
class CompleteEvidence:
    """A component in which every state keeps every letter inside the component.

    For each word u of length k, prefix·u followed by a shortest path to a
    final state is accepted; these p^k canonical words are pairwise distinct
    and have lengths in [|prefix| + k, |prefix| + k + reach], where ``reach``
    bounds the shortest distance to a final state from the component.
    """

    base: int
    component: tuple
    prefix: tuple
    reach: int

    def windows(self, upto: int) -> list[tuple[int, int, int]]:
        """(lo, hi, p^k) with the census summed over lo..hi at least p^k, hi ≤ upto."""
        lo = len(self.prefix)
        return [(lo + k, lo + k + self.reach, self.base**k) for k in range(upto - lo - self.reach + 1)]


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str  # "polynomial" or "exponential"
    degree: int | None = None
    rate: str | None = None  # "below-p" or "equal-p" for exponential growth
    sigma1: str = "Unknown"  # "InSigma1", "NotInSigma1" or "Unknown"
    evidence: object = None
    decomposition: tuple = field(default=(), compare=False)

    def __str__(self):
        if self.kind == "polynomial":
            return f"Polynomial(degree {self.degree}), {self.sigma1}"
        return f"Exponential({self.rate}), {self.sigma1}"


def _scc_info(a: Dfa):
    comps = sccs(a)
    comp_of = {}
    for i, comp in enumerate(comps):
        for s in comp:
            comp_of[s] = i
    internal = []
    for comp in comps:
        members = set(comp)
        internal.append(sum(1 for s in comp for t in a.delta[s].values() if t in members))
    return comps, comp_of, internal


def _path(a: Dfa, src: int, dst_ok, allowed=None):
    """Shortest, lexicographically least letter sequence from src to a state satisfying dst_ok."""
    parent = {src: None}
    queue = deque([src])
    while queue:
        s = queue.popleft()
        if dst_ok(s):
            letters = []
            while parent[s] is not None:
                s, x = parent[s]
                letters.append(x)
            return tuple(reversed(letters))
        for x in sorted(a.delta[s]):
            t = a.delta[s][x]
            if allowed is not None and t not in allowed:
                continue
            if t not in parent:
                parent[t] = (s, x)
                queue.append(t)
    return None


def is_polynomial(a: Dfa) -> bool:
    """No state of the trimmed automaton lies on two distinct cycles."""
    a = minimize(a)
    comps, _, internal = _scc_info(a)
    return all(e <= len(c) for c, e in zip(comps, internal))


def polynomial_degree(a: Dfa) -> int:
    """(largest number of cycles along a path) − 1, at least 0; assumes polynomial growth."""
    a = minimize(a)
    comps, comp_of, internal = _scc_info(a)
    cyclic = [e > 0 for e in internal]
    best = {}

    def longest(i):
        # components form a DAG; memoized longest count of cyclic components from i
        if i not in best:
            succ = {comp_of[t] for s in comps[i] for t in a.delta[s].values()} - {i}
            best[i] = int(cyclic[i]) + max((longest(j) for j in sorted(succ)), default=0)
        return best[i]

    if not a.finals:
        return 0
    return max(longest(comp_of[a.initial]) - 1, 0)


def _cycle_evidence(a: Dfa, comp) -> CycleEvidence:
    members = set(comp)
    for s in sorted(comp):
        letters = [x for x in sorted(a.delta[s]) if a.delta[s][x] in members]
        if len(letters) >= 2:
            cycles = []
            for x in letters[:2]:
                back = _path(a, a.delta[s][x], lambda t: t == s, members)
                cycles.append((x,) + back)
            prefix = _path(a, a.initial, lambda t: t == s)
            suffix = _path(a, s, lambda t: t in a.finals)
            return CycleEvidence(s, cycles[0], cycles[1], prefix, suffix)
    raise AssertionError("component has no branching state")


def classify(a: Dfa) -> GrowthVerdict:
    """Growth of the value set of a one-track automaton and its Σ₁ verdict."""
    _require_dim1(a)
    c = value_automaton(a)
    comps, comp_of, internal = _scc_info(c)
    branching = [comp for comp, e in zip(comps, internal) if e > len(comp)]
    if not branching:
        degree = polynomial_degree(c)
        blocks = tuple(decompose_poly(c)) if c.finals else ()
        return GrowthVerdict("polynomial", degree=degree, sigma1="InSigma1", decomposition=blocks)
    full = c.alphabet_size
    for comp in comps:
        members = set(comp)
        if all(sum(1 for t in c.delta[s].values() if t in members) == full for s in comp):
            entry = _path(c, c.initial, lambda t: t in members)
            reach = max(len(_path(c, s, lambda t: t in c.finals)) for s in comp)
            evidence = CompleteEvidence(c.base, tuple(comp), entry, reach)
            return GrowthVerdict("exponential", rate="equal-p", sigma1="Unknown", evidence=evidence)
    evidence = _cycle_evidence(c, sorted(branching, key=min)[0])
    return GrowthVerdict("exponential", rate="below-p", sigma1="NotInSigma1", evidence=evidence)


def polynomial_envelope(verdict: GrowthVerdict, n: int) -> int:
    """Upper bound B·(n+1)^degree on the census, B the number of blocks."""
    return max(len(verdict.decomposition), 1) * (n + 1) ** verdict.degree


def census_consistent(verdict: GrowthVerdict, census: list[int]) -> bool:
    """Check a value census (index n ↦ d_M(n)) against a verdict."""
    upto = len(census) - 1
    if verdict.kind == "polynomial":
        return all(census[n] <= polynomial_envelope(verdict, n) for n in range(1, upto + 1))
    if isinstance(verdict.evidence, CompleteEvidence):
        return all(sum(census[lo:hi + 1]) >= bound for lo, hi, bound in verdict.evidence.windows(upto))
    return all(census[n] >= bound for n, bound in verdict.evidence.lengths(upto))


# --------------------------------------------------------------------------
# decomposition into block regexes


def _cycle_word(a: Dfa, s: int, members) -> tuple:
    word, t = [], s
    while True:
        (x, nxt), = [(x, u) for x, u in a.delta[t].items() if u in members]
        word.append(x)
        t = nxt
        if t == s:
            return tuple(word)


def _blocks_from_paths(a: Dfa):
    comps, comp_of, internal = _scc_info(a)
    cyclic = {i for i, e in enumerate(internal) if e > 0}
    members = [set(c) for c in comps]
    out = []

    def emit(segments, stars):
        head = segments[0]
        blocks = tuple((stars[i], "*", segments[i + 1]) for i in range(len(stars)))
        out.append((head, blocks))

    def dfs(s, visited, segments, stars):
        ci = comp_of[s]
        if ci in cyclic and (not visited or comp_of[visited[-1]] != ci):
            stars = stars + [_cycle_word(a, s, members[ci])]
            segments = segments + [()]
        visited = visited + [s]
        if s in a.finals:
            emit(segments, stars)
        for x in sorted(a.delta[s]):
            t = a.delta[s][x]
            if t in visited:
                continue
            segs = segments[:-1] + [segments[-1] + (x,)]
            dfs(t, visited, segs, stars)

    dfs(a.initial, [], [()], [])
    return out


def _merge(blocks: set):
    """Apply P·w w*·Q ∪ P·Q → P·w*·Q until nothing changes."""
    changed = True
    while changed:
        changed = False
        for head, bl in sorted(blocks):
            for i, (w, _, v) in enumerate(bl):
                prev = head if i == 0 else bl[i - 1][2]
                if len(prev) < len(w) or prev[len(prev) - len(w):] != w:
                    continue
                shortened = prev[: len(prev) - len(w)]
                if i == 0:
                    kept = (shortened, bl)
                    dropped_head = shortened + v
                    dropped = (dropped_head, bl[1:])
                else:
                    kept = (head, bl[: i - 1] + ((bl[i - 1][0], "*", shortened),) + bl[i:])
                    dropped = (head, bl[: i - 1] + ((bl[i - 1][0], "*", shortened + v),) + bl[i + 1:])
                if dropped in blocks:
                    blocks.discard((head, bl))
                    blocks.discard(dropped)
                    blocks.add(kept)
                    changed = True
                    break
            if changed:
                break
    return blocks


def decompose_poly(a: Dfa) -> list[BlockRegex]:
    """Finite union of block regexes v0 w1* v1 ... wk* vk with the language of ``a``."""
    _require_dim1(a)
    a = minimize(a)
    if not is_polynomial(a):
        raise NotPolynomialError("language has exponential growth")
    if not a.finals:
        return []
    blocks = _merge(set(_blocks_from_paths(a)))
    out = [BlockRegex(a.base, head, bl) for head, bl in sorted(blocks, key=lambda hb: (len(hb[1]), hb))]
    if not equivalent(block_regex_to_dfa(out), a):
        raise AssertionError("decomposition does not reproduce the language")
    return out


# --------------------------------------------------------------------------
# length sets


def length_set(a: Dfa) -> UPSet:
    """{|w| : w ∈ L(a)} as a normalized ultimately periodic set."""
    a = minimize(a)
    current = frozenset((a.initial,)) if a.finals else frozenset()
    seen = {}
    history = []
    while current not in seen:
        seen[current] = len(history)
        history.append(current)
        current = frozenset(t for s in current for t in a.delta[s].values())
    t = seen[current]
    period = len(history) - t
    hit = [bool(s & a.finals) for s in history]
    base_part = {n for n in range(t) if hit[n]}
    residues = {r for r in range(period) if hit[t + r]}
    return upset_normalize(UPSet(t, period, base_part, residues))


def leading_zero_set(a: Dfa) -> UPSet:
    """Lengths of the maximal zero prefix of accepted words.

    For a language whose words all lie in 0* these are the word lengths;
    otherwise j counts when some accepted word is 0^j followed by a nonzero
    digit.
    """
    _require_dim1(a)
    a = minimize(a)
    all_zero = all(x == 0 for row in a.delta for x in row)
    chain, index = [], {}
    s = a.initial if a.finals else None
    while s is not None and s not in index:
        index[s] = len(chain)
        chain.append(s)
        s = a.delta[s].get(0)
    if not chain:
        return UPSet(0, 1)
    delta = [{0: i + 1} for i in range(len(chain) - 1)] + [{0: index[s]} if s is not None else {}]
    if all_zero:
        finals = [i for i, q in enumerate(chain) if q in a.finals]
    else:
        finals = [i for i, q in enumerate(chain) if any(x != 0 for x in a.delta[q])]
    return length_set(Dfa(a.base, 1, delta, 0, finals))


# --------------------------------------------------------------------------
# cycle-count dichotomy


@dataclass(frozen=True)
class CycleDichotomy:
    """Either a state whose loop count grows like p^n on a residue class, or a uniform bound."""

    kind: str  # "growing" or "bounded"
    state: int | None = None
    fit: EQPoly | None = None
    bound: int | None = None


def cycle_dichotomy(a: Dfa, track: int = 0, n_fit: int = 8) -> CycleDichotomy:
    fits = []
    top = 0
    for q in range(a.n_states):
        counts = cycle_counts(a, q, track, n_fit)
        top = max(top, max(counts))
        f = fit_eqp(list(enumerate(counts))[1:], a.base)
        if f is None:
            raise ArithmeticError(f"no quasi-polynomial fits the loop counts at state {q}")
        if any(c is not None and len(c) > 1 and c[1] != 0 for c in f.polys):
            fits.append((q, f))
    if fits:
        q, f = fits[0]
        return CycleDichotomy("growing", state=q, fit=f)
    return CycleDichotomy("bounded", bound=top)


__all__ = [
    "CompleteEvidence", "CycleDichotomy", "CycleEvidence", "EQPoly", "GrowthVerdict", "NotPolynomialError", "NotZeroClosedError",
    "census_consistent", "classify", "cycle_count", "cycle_counts", "cycle_dichotomy", "decompose_poly",
    "density_values", "density_values_upto", "density_words", "fit_eqp", "is_polynomial", "leading_zero_set",
    "length_set",
    "loop_projection", "polynomial_degree", "polynomial_envelope", "value_automaton",
]
