import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buchi.automata import (
    AutomatonFormatError,
    Dfa,
    StateExplosionError,
    complement,
    count_words,
    count_words_upto,
    counterexample,
    cylindrify,
    determinize_minimize,
    difference,
    equivalent,
    intersection,
    is_zero_closed,
    minimize,
    project,
    read_automaton,
    reverse,
    sccs,
    shortest_word,
    union,
    word_dfa,
    words_of_length,
    write_automaton,
    zero_closure,
)
from buchi.numerics import DigitWord, decode, encode

from conftest import all_words


@st.composite
def dfas(draw, base=None, dim=None, max_states=4):
    base = base or draw(st.integers(2, 3))
    dim = dim if dim is not None else draw(st.integers(1, 2))
    n = draw(st.integers(1, max_states))
    size = base**dim
    delta = []
    for _ in range(n):
        row = {}
        for x in range(size):
            t = draw(st.one_of(st.none(), st.integers(0, n - 1)))
            if t is not None:
                row[x] = t
        delta.append(row)
    finals = draw(st.sets(st.integers(0, n - 1)))
    return Dfa(base, dim, delta, 0, finals)


def language(a, max_len):
    return {w for w in all_words(a.base, a.dim, max_len) if a.accepts(w)}


@settings(max_examples=60, deadline=None)
@given(dfas())
def test_minimize_preserves_language(a):
    m = minimize(a)
    assert language(m, 4) == language(a, 4)
    assert m.n_states <= max(a.n_states, 1)
    assert minimize(m).same_as(m)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_boolean_operations(data):
    base = data.draw(st.integers(2, 3))
    a = data.draw(dfas(base=base, dim=1))
    b = data.draw(dfas(base=base, dim=1))
    La, Lb = language(a, 4), language(b, 4)
    universe = set(all_words(base, 1, 4))
    assert language(intersection(a, b), 4) == La & Lb
    assert language(union(a, b), 4) == La | Lb
    assert language(difference(a, b), 4) == La - Lb
    assert language(complement(a), 4) == universe - La
    assert equivalent(a, b) == (counterexample(a, b) is None)


@settings(max_examples=40, deadline=None)
@given(dfas(dim=2))
def test_project_matches_brute_force(a):
    """∃y: (x, y) accepted, with y allowed to be longer than x."""
    z = zero_closure(a)
    p = determinize_minimize(project(z, 1))
    for x in range(a.base**3):
        expect = any(z.accepts(encode([x, y], a.base)) for y in range(a.base**5))
        # values of y above p^5 are not needed: z has at most a few states
        if expect:
            assert p.accepts(encode([x], a.base))


def test_project_exact_on_known_relation():
    # y = x + 1 projected on x: every x
    from buchi.decide import compile
    from buchi.formulas import parse

    a = compile(parse("x = y + 1", 2))
    px = determinize_minimize(project(a, 1))
    assert [x for x in range(20) if px.accepts(encode([x], 2))] == list(range(1, 20))
    py = determinize_minimize(project(a, 0))
    assert all(py.accepts(encode([y], 2)) for y in range(20))


@settings(max_examples=40, deadline=None)
@given(dfas())
def test_zero_closure(a):
    z = zero_closure(a)
    assert is_zero_closed(z)
    zero = DigitWord(a.base, a.dim, ((0,) * a.dim,))
    for w in all_words(a.base, a.dim, 3):
        if a.accepts(w):
            assert z.accepts(w) and z.accepts(zero + w)
        # membership depends only on the value
        assert z.accepts(w) == z.accepts(encode(decode(w), a.base))


@settings(max_examples=40, deadline=None)
@given(dfas())
def test_counting(a):
    counts = count_words_upto(a, 4)
    for n in range(5):
        brute = sum(1 for w in all_words(a.base, a.dim, n) if len(w) == n and a.accepts(w))
        assert counts[n] == brute == count_words(a, n)
        listed = list(words_of_length(a, n))
        assert len(listed) == brute
        assert [w.letters() for w in listed] == sorted(w.letters() for w in listed)


@settings(max_examples=40, deadline=None)
@given(dfas())
def test_shortest_word_and_reverse(a):
    w = shortest_word(a)
    L = language(a, 5)
    if w is None:
        assert not L
    else:
        assert a.accepts(w)
        assert all(len(u) >= len(w) for u in L)
    r = reverse(a)
    for u in L:
        assert r.accepts(DigitWord(u.base, u.dim, u.columns[::-1]))


def test_cylindrify_swaps_tracks():
    from buchi.decide import compile
    from buchi.formulas import parse

    a = compile(parse("x = 2*y", 2))
    b = cylindrify(a, [1, 0], 2)
    assert b.accepts(encode([3, 6], 2)) and not b.accepts(encode([6, 3], 2))
    c = cylindrify(a, [0, 2], 3)
    assert all(c.accepts(encode([6, z, 3], 2)) for z in range(10))


def test_sccs_partition():
    a = Dfa(2, 1, [{0: 1}, {0: 2, 1: 1}, {1: 1}], 0, (2,))
    comps = sccs(a)
    assert sorted(s for c in comps for s in c) == [0, 1, 2]
    assert [1, 2] in [sorted(c) for c in comps]


@settings(max_examples=30, deadline=None)
@given(dfas())
def test_file_roundtrip(a):
    text = write_automaton(minimize(a))
    b = read_automaton(text)
    assert b.same_as(minimize(a))
    assert write_automaton(b) == text


@pytest.mark.parametrize("text", [
    "",
    "pautomaton v1 base=2 dim=1\nstates 1\ninitial 0\nfinals 0\n0 2 0\n",
    "pautomaton v1 base=2 dim=1\nstates 1\ninitial 0\nfinals 0\n0 1 0\n0 1 0\n",
    "pautomaton v1 base=2 dim=1\nstates 1\ninitial 0\nfinals\n0 1 5\n",
])
def test_file_format_errors(text):
    with pytest.raises(AutomatonFormatError):
        read_automaton(text)


def test_state_cap():
    from buchi.regex import regex_to_dfa

    a = regex_to_dfa("(0|1)(0|1)(0|1)(0|1)(0|1)1(0|1)*", 2)
    with pytest.raises(StateExplosionError):
        determinize_minimize(reverse(a), cap=8)


def test_word_dfa():
    w = DigitWord.from_str("101")
    a = word_dfa(w)
    assert language(a, 4) == {w}
