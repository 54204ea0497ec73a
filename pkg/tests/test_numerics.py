from hypothesis import given
from hypothesis import strategies as st

from buchi.numerics import (
    DigitWord,
    UPSet,
    decode,
    digit_length,
    digits_letter,
    encode,
    letter_digits,
    upset_member,
    upset_normalize,
)


@given(st.integers(2, 7), st.lists(st.integers(0, 10**6), min_size=1, max_size=3), st.integers(0, 4))
def test_encode_decode_roundtrip(base, values, pad):
    w = encode(values, base)
    assert decode(w) == tuple(values)
    padded = encode(values, base, min_len=len(w) + pad)
    assert decode(padded) == tuple(values)
    assert padded.columns[:pad] == ((0,) * len(values),) * pad


def test_encode_shape():
    w = encode([5, 1], 2)
    assert w.columns == ((1, 0), (0, 0), (1, 1))
    assert str(encode([0], 2)) == "ε"
    assert str(DigitWord.from_str("0110")) == "0110"


@given(st.integers(2, 5), st.integers(1, 3), st.data())
def test_letter_order_matches_tuple_order(base, dim, data):
    a = data.draw(st.integers(0, base**dim - 1))
    b = data.draw(st.integers(0, base**dim - 1))
    da, db = letter_digits(a, base, dim), letter_digits(b, base, dim)
    assert digits_letter(da, base) == a
    assert (a < b) == (da < db)


def test_digit_length():
    assert digit_length(0, 2) == 0
    assert digit_length(1, 2) == 1
    assert digit_length(8, 2) == 4
    assert digit_length(8, 3) == 2


def test_bad_digits_rejected():
    import pytest

    with pytest.raises(ValueError):
        DigitWord(2, 1, ((2,),))
    with pytest.raises(ValueError):
        encode([-1], 2)


upsets = st.builds(
    lambda t, ell, b, r: UPSet(t, ell, frozenset(x for x in b if x < t), frozenset(x % ell for x in r)),
    st.integers(0, 6), st.integers(1, 6), st.sets(st.integers(0, 5)), st.sets(st.integers(0, 5)),
)


@given(upsets)
def test_normalize_preserves_membership(U):
    N = upset_normalize(U)
    assert all(upset_member(U, n) == upset_member(N, n) for n in range(60))
    assert N.threshold <= U.threshold and N.period <= U.period


def test_upset_constructors():
    assert UPSet.progression(3, 2).elements(10) == [3, 5, 7, 9]
    assert UPSet.finite({1, 4}).elements(10) == [1, 4]
    assert UPSet.finite(()).is_empty
