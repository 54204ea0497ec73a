from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buchi.automata import equivalent, zero_closure
from buchi.decide import compile
from buchi.formulas import parse
from buchi.growth import (
    NotPolynomialError,
    NotZeroClosedError,
    census_consistent,
    classify,
    cycle_counts,
    cycle_dichotomy,
    decompose_poly,
    density_values_upto,
    density_words,
    fit_eqp,
    is_polynomial,
    leading_zero_set,
    length_set,
    polynomial_degree,
    value_automaton,
)
from buchi.numerics import encode
from buchi.regex import block_regex_to_dfa, regex_to_dfa


def brute_values(a, base, n):
    """d_M(n) by testing every value with exactly n digits."""
    return sum(1 for v in range(base ** (n - 1), base**n) if a.accepts(encode([v], base)))


@pytest.mark.parametrize("text,base", [("(10|01)*", 2), ("1*0*", 2), ("(0|1)*", 2), ("(12|0)*2", 3), ("(10)*1", 2)])
def test_value_census_matches_brute_force(text, base):
    a = zero_closure(regex_to_dfa(text, base))
    census = density_values_upto(a, 9 if base == 2 else 6)
    for n in range(1, len(census)):
        assert census[n] == brute_values(a, base, n)


def test_separation_census_values():
    a = zero_closure(regex_to_dfa("(10|01)*", 2))
    census = density_values_upto(a, 16)
    assert census[3] == 2 and census[4] == 2
    assert all(census[n] <= 2 ** (n / 2) for n in range(1, 17))
    assert [density_words(regex_to_dfa("(10|01)*", 2), n) for n in range(1, 6)] == [0, 2, 0, 4, 0]


def test_values_mode_needs_zero_closure():
    with pytest.raises(NotZeroClosedError):
        density_values_upto(regex_to_dfa("1(0)*", 2), 4)


@pytest.mark.parametrize("text,base,kind,detail,sigma1", [
    ("(10|01)*", 2, "exponential", "below-p", "NotInSigma1"),
    ("(0|1)*", 2, "exponential", "equal-p", "Unknown"),
    ("1*0*", 2, "polynomial", 1, "InSigma1"),
    ("1(0)*1(0)*1(0)*1", 2, "polynomial", 2, "InSigma1"),
    ("101|11", 2, "polynomial", 0, "InSigma1"),
    ("(2|1)*", 3, "exponential", "below-p", "NotInSigma1"),
])
def test_classify(text, base, kind, detail, sigma1):
    v = classify(regex_to_dfa(text, base))
    assert v.kind == kind and v.sigma1 == sigma1
    assert (v.degree if kind == "polynomial" else v.rate) == detail


def test_exponential_evidence_is_sound():
    a = regex_to_dfa("(10|01)*", 2)
    v = classify(a)
    census = density_values_upto(zero_closure(a), 16)
    pairs = v.evidence.lengths(16)
    assert len(pairs) >= 4
    assert all(census[n] >= bound for n, bound in pairs)
    assert census_consistent(v, census)


def test_polynomial_envelope_holds():
    a = regex_to_dfa("1(0)*1(0)*1|(10)*", 2)
    v = classify(a)
    assert census_consistent(v, density_values_upto(zero_closure(a), 14))


@pytest.mark.parametrize("text,base", [("1*0*", 2), ("(10)*1", 2), ("0(1)*0(10)*1", 2), ("(12)*0(2)*|1", 3)])
def test_decomposition_reproduces_language(text, base):
    a = regex_to_dfa(text, base)
    blocks = decompose_poly(a)
    assert equivalent(block_regex_to_dfa(blocks), a)


def test_decompose_rejects_exponential():
    with pytest.raises(NotPolynomialError):
        decompose_poly(regex_to_dfa("(10|01)*", 2))


def test_degree_and_polynomial_flags():
    assert is_polynomial(regex_to_dfa("(1)*(0)*(1)*", 2))
    assert polynomial_degree(regex_to_dfa("(1)*(0)*(1)*", 2)) == 2
    assert not is_polynomial(regex_to_dfa("(0|1)*", 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.integers(1, 4), st.sets(st.integers(0, 6), max_size=3), st.sets(st.integers(0, 3)))
def test_length_set_matches_enumeration(t, ell, b, r):
    """Length set of a unary-style language built from an ultimately periodic spec."""
    from buchi.numerics import UPSet

    U = UPSet(t, ell, frozenset(x for x in b if x < t), frozenset(x % ell for x in r))
    parts = [("1" * n) for n in sorted(U.base_part)]
    parts += ["1" * (t + res) + ("(" + "1" * ell + ")*") for res in sorted(U.residues)]
    if not parts:
        return
    a = regex_to_dfa("|".join(f"({p})" if p else "ε" for p in parts), 2)
    got = length_set(a)
    assert [n for n in range(40) if n in got] == [n for n in range(40) if n in U]


def test_leading_zero_set():
    z = leading_zero_set(regex_to_dfa("0(00)*1", 2))
    assert [n for n in range(10) if n in z] == [1, 3, 5, 7, 9]
    zz = leading_zero_set(regex_to_dfa("(000)*", 2))
    assert [n for n in range(10) if n in zz] == [0, 3, 6, 9]


def test_fit_eqp_linear_in_power():
    # C(n) = p^n - 1 for the loop on Σ*
    samples = [(n, 2**n - 1) for n in range(1, 9)]
    f = fit_eqp(samples, 2)
    assert f.degree == 1 and f.modulus == 1
    assert all(f(2**n) == 2**n - 1 for n in range(9, 13))


def test_fit_eqp_alternating_needs_modulus_three():
    # 0 for odd n, p^n for even n: p^n mod 3 separates the parity of n when p = 2
    samples = [(n, 0 if n % 2 else 2**n) for n in range(1, 9)]
    f = fit_eqp(samples, 2)
    assert f.modulus == 3
    assert all(f(2**n) == (0 if n % 2 else 2**n) for n in range(9, 13))


def test_fit_eqp_constant_and_failure():
    f = fit_eqp([(n, 3) for n in range(1, 9)], 3)
    assert f.degree == 0 and f(3**20) == Fraction(3)
    assert fit_eqp([(n, n * n) for n in range(1, 9)], 2) is None


def test_cycle_counts_and_dichotomy():
    a = compile(parse("x = 2*y", 2))
    for q in range(a.n_states):
        for track in range(2):
            counts = cycle_counts(a, q, track, 8)
            f = fit_eqp(list(enumerate(counts))[1:], 2)
            assert f is not None and f.degree <= 1
    assert cycle_dichotomy(zero_closure(regex_to_dfa("(0|1)*", 2))).kind == "growing"
    assert cycle_dichotomy(zero_closure(regex_to_dfa("1(0)*", 2))).kind == "bounded"


def test_value_automaton_is_canonical():
    a = value_automaton(regex_to_dfa("0*11", 2))
    assert a.accepts(encode([3], 2)) and not a.accepts(encode([3], 2, min_len=3))


def test_complete_component_evidence():
    a = regex_to_dfa("11(0|1)*01", 2)
    v = classify(a)
    assert v.rate == "equal-p"
    census = density_values_upto(zero_closure(a), 12)
    windows = v.evidence.windows(12)
    assert windows[0][2] == 1 and windows[-1][1] == 12
    assert all(sum(census[lo:hi + 1]) >= bound for lo, hi, bound in windows)
    assert census_consistent(v, census)


def test_equal_p_with_empty_lengths():
    # values with an even number of binary digits: census 0 at odd n, yet equal-p growth
    a = regex_to_dfa("1(0|1)((0|1)(0|1))*", 2)
    v = classify(a)
    census = density_values_upto(zero_closure(a), 12)
    assert v.rate == "equal-p" and census[3] == 0
    assert census_consistent(v, census)
    assert not census_consistent(v, [0] * 13)


def test_census_consistency_detects_violation():
    v = classify(regex_to_dfa("(10|01)*", 2))
    assert not census_consistent(v, [0] * 17)
    p = classify(regex_to_dfa("1*0*", 2))
    assert not census_consistent(p, [0] + [10**6] * 16)
