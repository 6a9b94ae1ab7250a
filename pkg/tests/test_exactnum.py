import random

import pytest
from hypothesis import given, strategies as st

from triplesmith.errors import DegenerateInputError, MalformedInputError
from triplesmith.exactnum import (
    canonical,
    from_digits_rev,
    parse_canonical,
    reverse_digits,
    to_digits_rev,
    truncate_last,
)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("123", [3, 2, 1]),
        ("0", [0]),
        # reverse of the decimal expansion of 2^53 - 1, oracle-checked below
        ("9007199254740991", [1, 9, 9, 0, 4, 7, 4, 5, 2, 9, 9, 1, 7, 0, 0, 9]),
    ],
)
def test_to_digits_rev_examples(text, expected):
    assert to_digits_rev(text) == expected
    # independent string-reversal oracle
    assert to_digits_rev(text) == [int(ch) for ch in reversed(text)]


@pytest.mark.parametrize("bad", ["", "12a", "-5", " 1", "007", "1.0"])
def test_to_digits_rev_rejects_malformed(bad):
    with pytest.raises(MalformedInputError):
        to_digits_rev(bad)


@pytest.mark.parametrize(
    "x,expected",
    [(123, 12), (10, 1), (2000000002000000001, 200000000200000000)],
)
def test_truncate_last_examples(x, expected):
    assert truncate_last(x) == expected
    assert truncate_last(x) == x // 10  # bigint floor-division oracle


@pytest.mark.parametrize("x", [0, 5, 9])
def test_truncate_last_degenerate(x):
    with pytest.raises(DegenerateInputError):
        truncate_last(x)


@pytest.mark.parametrize("x,expected", [(123, 321), (7, 7), (120, 21)])
def test_reverse_digits_examples(x, expected):
    assert reverse_digits(x) == expected
    # string-reverse-then-strip oracle
    assert reverse_digits(x) == int(str(x)[::-1].lstrip("0") or "0")


@given(st.integers(min_value=0, max_value=10**40))
def test_reverse_involution_without_trailing_zeros(x):
    if x % 10 != 0 or x == 0:
        assert reverse_digits(reverse_digits(x)) == x


@given(st.integers(min_value=10, max_value=10**40))
def test_truncate_bound(x):
    t = truncate_last(x)
    assert t * 10 <= x < t * 10 + 10


@given(st.integers(min_value=0, max_value=10**60))
def test_canonical_roundtrip(x):
    assert parse_canonical(canonical(x)) == x


def test_positional_reconstruction_bulk():
    # 10^4 random values up to 100 digits against a brute-force positional sum.
    rnd = random.Random(0xE0)
    for _ in range(10_000):
        x = rnd.randrange(0, 10 ** rnd.randint(1, 100))
        tokens = to_digits_rev(canonical(x))
        assert len(tokens) == len(str(x))
        assert sum(d * 10**i for i, d in enumerate(tokens)) == x
        assert from_digits_rev(tokens) == x
