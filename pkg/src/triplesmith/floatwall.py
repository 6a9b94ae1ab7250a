"""Integer-only analysis of IEEE-754 double-precision representability.

Everything here is derived from bit lengths and modular arithmetic on exact
integers; this module never executes a floating-point instruction. That is
deliberate: an analyzer of where doubles lose integer resolution cannot
itself be built on doubles, or it stops being trustworthy exactly where it
matters. The test suite cross-checks ``round_to_double`` against the
platform's native int-to-float conversion, which is the one sanctioned use
of real floats anywhere near this module.

A 53-bit significand represents every integer up to ``MAX_SAFE_INT = 2^53-1``
exactly. Above that, representable integers in the binade ``[2^e, 2^{e+1})``
are spaced ``2^(e-52)`` apart ("ULP gap"), so distinct integers start
mapping to the same double. ``wall_scan`` walks that boundary along the
stifel family: for each decimal exponent d it picks the first n whose long
leg b reaches the family's natural magnitude 2*10^d at that exponent (i.e.
the first n with n(n+1) >= 10^d) and reports whether the hypotenuse c and
its off-by-one neighbor c+1 still round apart.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .triples import stifel

MAX_SAFE_INT = (1 << 53) - 1

# Largest finite double: (2^53 - 1) * 2^971. Anything rounding to >= 2^1024
# is non-finite.
_OVERFLOW_LIMIT = 1 << 1024


def binade_exponent(x: int) -> int:
    """e such that 2^e <= x < 2^{e+1}, for x >= 1."""
    if x < 1:
        raise DomainError(f"binade exponent needs x >= 1: {x}")
    return x.bit_length() - 1


def ulp_gap(x: int) -> int:
    """Spacing of consecutive representable doubles at integer magnitude x.

    Defined as 1 for x = 0 (the subnormal region is out of integer scope).
    """
    if x < 0:
        raise DomainError(f"ulp_gap needs x >= 0: {x}")
    if x == 0:
        return 1
    e = x.bit_length() - 1
    return 1 << max(0, e - 52)


def round_to_double(x: int) -> int:
    """Nearest double to x, round-half-to-even, returned as an exact integer.

    Raises OverflowError when the result would be non-finite.
    """
    if x < 0:
        raise DomainError(f"round_to_double needs x >= 0: {x}")
    gap = ulp_gap(x)
    if gap == 1:
        if x >= _OVERFLOW_LIMIT:
            raise OverflowError(f"{x.bit_length()}-bit value rounds to infinity")
        return x
    q, r = divmod(x, gap)
    twice = 2 * r
    if twice < gap:
        y = q * gap
    elif twice > gap:
        y = (q + 1) * gap
    else:
        y = (q + (q & 1)) * gap
    if y >= _OVERFLOW_LIMIT:
        raise OverflowError(f"{x.bit_length()}-bit value rounds to infinity")
    return y


def is_exact(x: int) -> bool:
    """True iff x is exactly representable as a double."""
    return x % ulp_gap(x) == 0 and x < _OVERFLOW_LIMIT


def collides(x: int, y: int) -> bool:
    """True iff x and y map to the same double."""
    return round_to_double(x) == round_to_double(y)


@dataclass(frozen=True, slots=True)
class FloatWallReport:
    """Representability record for one integer magnitude."""

    value: int
    binade_exponent: int
    ulp_gap: int
    nearest: int | None
    is_exact: bool
    collides_with_successor: bool


def report(x: int) -> FloatWallReport:
    if x < 1:
        raise DomainError(f"report needs x >= 1: {x}")
    try:
        nearest: int | None = round_to_double(x)
        succ_collides = collides(x, x + 1)
    except OverflowError:
        # Past the finite range every value maps to infinity.
        nearest = None
        succ_collides = True
    return FloatWallReport(
        value=x,
        binade_exponent=binade_exponent(x),
        ulp_gap=ulp_gap(x),
        nearest=nearest,
        is_exact=is_exact(x),
        collides_with_successor=succ_collides,
    )


@dataclass(frozen=True, slots=True)
class WallScanRow:
    """One decimal-exponent row of a wall scan over the stifel family."""

    decimal_exp: int
    n: int
    b_digits: int
    leg_report: FloatWallReport
    collision: bool  # do c and c+1 round to the same double?


def _first_stifel_n_at(decimal_exp: int) -> int:
    """First n with n(n+1) >= 10^d, i.e. long leg b >= 2*10^d."""
    target = 10 ** decimal_exp
    import math

    n = max(1, math.isqrt(target))
    while n * (n + 1) < target:
        n += 1
    while n > 1 and (n - 1) * n >= target:
        n -= 1
    return n


def wall_scan(min_exp: int, max_exp: int) -> list[WallScanRow]:
    """Representability rows for decimal exponents [min_exp, max_exp]."""
    if not 1 <= min_exp <= max_exp <= 1023:
        raise DomainError(f"need 1 <= min_exp <= max_exp <= 1023: {min_exp}, {max_exp}")
    rows = []
    for d in range(min_exp, max_exp + 1):
        n = _first_stifel_n_at(d)
        t = stifel(n)
        leg = report(t.b)
        try:
            collision = collides(t.c, t.c + 1)
        except OverflowError:
            collision = True
        rows.append(
            WallScanRow(
                decimal_exp=d,
                n=n,
                b_digits=len(str(t.b)),
                leg_report=leg,
                collision=collision,
            )
        )
    return rows


def scan_table(rows: list[WallScanRow]) -> str:
    """Render scan rows as the tab-delimited text table used by the CLI."""
    out = ["decimal_exp\tn\tb_digits\tulp_gap\tcollision"]
    for r in rows:
        out.append(
            f"{r.decimal_exp}\t{r.n}\t{r.b_digits}\t{r.leg_report.ulp_gap}"
            f"\t{'true' if r.collision else 'false'}"
        )
    return "\n".join(out) + "\n"
