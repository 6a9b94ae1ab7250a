"""Exact decimal-digit utilities over unbounded non-negative integers.

Every value handled here is a plain Python ``int`` (arbitrary precision); the
canonical serialized form is the plain decimal string with no sign, no
separators, and no leading zeros (``"0"`` is the single exception). That
string is the hashing substrate for dataset shards, so it must stay
bit-identical across implementations.

Digit sequences are lists of digit values 0-9 ordered least-significant
first, i.e. ``"123"`` becomes ``[3, 2, 1]``. Downstream consumers that embed
digits reserve token id 0 for padding and shift digit values up by one; that
offset is applied by the consumer, never here.
"""

from __future__ import annotations

from .errors import DegenerateInputError, MalformedInputError

_DIGITS = frozenset("0123456789")


def canonical(x: int) -> str:
    """Serialize a non-negative integer to its canonical decimal string."""
    if x < 0:
        raise MalformedInputError(f"negative value has no canonical form: {x}")
    return str(x)


def parse_canonical(s: str) -> int:
    """Parse a canonical decimal string, rejecting anything non-canonical."""
    if not s or not set(s) <= _DIGITS:
        raise MalformedInputError(f"not a canonical decimal string: {s!r}")
    if len(s) > 1 and s[0] == "0":
        raise MalformedInputError(f"leading zeros are not canonical: {s!r}")
    return int(s)


def to_digits_rev(s: str) -> list[int]:
    """Split a canonical decimal string into digits, least significant first.

    ``"123" -> [3, 2, 1]``. Raises :class:`MalformedInputError` on non-digit
    characters or non-canonical strings.
    """
    parse_canonical(s)
    return [ord(ch) - 48 for ch in reversed(s)]


def from_digits_rev(tokens: list[int]) -> int:
    """Rebuild the integer from a least-significant-first digit list."""
    if not tokens:
        raise MalformedInputError("empty digit sequence")
    value = 0
    for d in reversed(tokens):
        if not 0 <= d <= 9:
            raise MalformedInputError(f"digit value out of range: {d}")
        value = value * 10 + d
    return value


def truncate_last(x: int) -> int:
    """Drop the last decimal digit: 123 -> 12. Requires ``x >= 10``.

    Single-digit inputs would collapse to 0; they are rejected so the caller
    can resample instead of emitting a degenerate value.
    """
    if x < 10:
        raise DegenerateInputError(f"cannot truncate a single-digit value: {x}")
    return x // 10


def reverse_digits(x: int) -> int:
    """Reverse the decimal digits: 123 -> 321, 120 -> 21.

    Trailing zeros of ``x`` become leading zeros and are dropped by the
    integer conversion.
    """
    if x < 0:
        raise MalformedInputError(f"negative value: {x}")
    return int(str(x)[::-1])
