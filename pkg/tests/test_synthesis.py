import pytest

from buchi.automata import zero_closure
from buchi.decide import compile, compile_node
from buchi.formulas import Namer, is_existential, parse, sigma_level
from buchi.numerics import UPSet, encode
from buchi.regex import BlockRegex, block_regex_to_dfa, parse_block_union, regex_to_dfa
from buchi.synthesis import (
    RoundTripError,
    SynthesisConfig,
    phi_digit,
    phi_digit_pi1,
    phi_S,
    phi_S_U,
    phi_W,
    phi_w_plus_zeros,
    phi_w_star,
    plus_variants,
    synth_existential,
    synth_sigma2,
)


def members1(node, base, upto):
    a = compile_node(node, base, ("x",))
    return [x for x in range(upto) if a.accepts(encode([x], base))]


def relation(node, base, upto):
    a = compile_node(node, base, ("x", "y"))
    return {(x, y) for x in range(upto) for y in range(upto) if a.accepts(encode([x, y], base))}


def powers(base, upto):
    out, v = [], 1
    while v < upto:
        out.append(v)
        v *= base
    return out


@pytest.mark.parametrize("base", [2, 3])
def test_phi_W(base):
    got = relation(phi_W(base), base, 40)
    expect = {(x, y) for x in range(40) for y in powers(base, 40) if x < y <= base * x}
    assert got == expect


@pytest.mark.parametrize("base,ell", [(2, 1), (2, 2), (3, 2)])
def test_phi_S(base, ell):
    got = relation(phi_S(base, ell), base, 90)
    pw = powers(base, 90)
    expect = {(x, y) for x in pw for y in pw if y >= x and (_log(y, base) - _log(x, base)) % ell == 0}
    assert got == expect


def _log(v, base):
    k = 0
    while v > 1:
        v //= base
        k += 1
    return k


def test_phi_S_U():
    U = UPSet(2, 3, frozenset({0}), frozenset({1}))  # {0} ∪ {3, 6, 9, ...}
    got = relation(phi_S_U(2, U), 2, 130)
    pw = powers(2, 130)
    expect = {(x, y) for x in pw for y in pw if (_log(y, 2) - _log(x, 2)) in U and y >= x}
    assert got == expect


@pytest.mark.parametrize("base,w", [(2, "10"), (2, "1"), (3, "12"), (2, "011")])
def test_phi_w_star(base, w):
    node = phi_w_star(base, w)
    lang = zero_closure(regex_to_dfa(f"({w})*", base))
    assert members1(node, base, 300) == [x for x in range(300) if lang.accepts(encode([x], base))]


@pytest.mark.parametrize("w,U", [("1", UPSet.finite({0, 2})), ("10", UPSet.progression(1, 2)), ("110", UPSet.finite({0}))])
def test_phi_w_plus_zeros(w, U):
    node = phi_w_plus_zeros(2, w, U)
    alts = [f"({w})+" + "0" * n for n in sorted(U.base_part)]
    alts += [f"({w})+" + "0" * (U.threshold + r) + "(" + "0" * U.period + ")*" for r in sorted(U.residues)]
    lang = zero_closure(regex_to_dfa("|".join(alts), 2))
    assert members1(node, 2, 300) == [x for x in range(300) if lang.accepts(encode([x], 2))]


@pytest.mark.parametrize("base", [2, 3])
def test_phi_digit(base):
    for j in range(base):
        got = relation(phi_digit(base, j), base, 40)
        expect = {(x, y) for x in powers(base, 40) for y in range(40) if (y // x) % base == j}
        assert got == expect
        assert relation(phi_digit_pi1(base, j), base, 40) == expect


def test_phi_digit_scaled():
    got = relation(phi_digit(2, 1, xcoef=2), 2, 40)
    expect = {(x, y) for x in powers(2, 40) for y in range(40) if (y // (2 * x)) % 2 == 1}
    assert got == expect


def test_plus_variants():
    r = BlockRegex.of(2, "1", ("0", "*", "1"), ("11", "+", ""))
    variants = plus_variants(r)
    assert len(variants) == 2
    assert all(mode == "+" for v in variants for _, mode, _ in v.blocks)
    assert {str(v) for v in variants} == {"1(0)+1(11)+", "11(11)+"}


@pytest.mark.parametrize("text,base", [
    ("(10)*", 2), ("1*0*", 2), ("(10)*1", 2), ("0(1)*0(10)*1", 2), ("(12)*0(2)*", 3), ("2(0)*|11", 3),
])
def test_existential_round_trip(text, base):
    f = synth_existential(parse_block_union(text, base))
    assert f.metadata["round_trip"] == "ok"
    assert is_existential(f.node) and sigma_level(f.node) == 1
    assert compile(f).same_as(zero_closure(block_regex_to_dfa(parse_block_union(text, base))))
    again = parse(f"{f}", base)
    assert compile(again).same_as(compile(f))


def test_trailing_offset_one_breaks_round_trip():
    with pytest.raises(RoundTripError) as info:
        synth_existential(parse_block_union("1*0*", 2), SynthesisConfig(trailing_offset=1))
    assert str(info.value.counterexample).lstrip("0") == "1"


def test_v0_shift_one_breaks_round_trip():
    with pytest.raises(RoundTripError) as info:
        synth_existential(parse_block_union("1(0)*(1)*", 2), SynthesisConfig(v0_shift=1))
    assert str(info.value.counterexample).lstrip("0") == "10"


def test_unvalidated_mismatch_is_detectable():
    f = synth_existential(parse_block_union("(10)*1", 2), SynthesisConfig(trailing_offset=1), validate=False)
    assert "round_trip" not in f.metadata


@pytest.mark.parametrize("text,base", [("E y. x = 3*y", 2), ("E y. x = 2*y", 3), ("V(x,x)", 2), ("x = y + 1", 2)])
def test_sigma2_round_trip(text, base):
    a = compile(parse(text, base))
    f = synth_sigma2(a, vars=parse(text, base).vars)
    assert f.metadata["round_trip"] == "ok"
    assert sigma_level(f.node) == 2
    assert compile(f).same_as(a)


def test_sigma2_needs_zero_closure():
    with pytest.raises(ValueError):
        synth_sigma2(regex_to_dfa("1(0)*", 2))


def test_namer_threading():
    n = Namer({"x"})
    a = phi_digit(2, 1, "x", "y", n)
    b = phi_digit(2, 0, "x", "y", n)
    from buchi.formulas import all_vars

    assert (all_vars(a) & all_vars(b)) == {"x", "y"}
