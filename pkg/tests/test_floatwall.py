import random

import pytest
from hypothesis import given, strategies as st

from triplesmith.errors import DomainError
from triplesmith.floatwall import (
    MAX_SAFE_INT,
    FloatWallReport,
    collides,
    is_exact,
    report,
    round_to_double,
    scan_table,
    ulp_gap,
    wall_scan,
)
from triplesmith.triples import stifel


def test_max_safe_int():
    assert MAX_SAFE_INT == 2**53 - 1
    assert round_to_double(MAX_SAFE_INT) == MAX_SAFE_INT
    assert round_to_double(2**53 + 1) != 2**53 + 1


@pytest.mark.parametrize(
    "x,expected",
    [
        (2 * 10**18, 256),
        (2**53, 2),
        (10**6, 1),
        (0, 1),
        (1, 1),
        (2**52, 1),
        (2**53 - 1, 1),
        (2**54, 4),
    ],
)
def test_ulp_gap_examples(x, expected):
    assert ulp_gap(x) == expected


@pytest.mark.parametrize(
    "x,expected",
    [
        (2 * 10**18 + 1, 2 * 10**18),
        (2**53 + 1, 2**53),  # tie resolved to the even significand
        (123, 123),
        (2**53 + 3, 2**53 + 4),
        (2**53 + 2, 2**53 + 2),
    ],
)
def test_round_to_double_examples(x, expected):
    assert round_to_double(x) == expected


def test_round_overflow():
    with pytest.raises(OverflowError):
        round_to_double(2**1024)
    with pytest.raises(OverflowError):
        round_to_double(2**1024 - 1)  # rounds up to 2^1024
    assert round_to_double((2**53 - 1) * 2**971) == (2**53 - 1) * 2**971


@pytest.mark.parametrize(
    "x,y,expected",
    [
        (2 * 10**18, 2 * 10**18 + 1, True),
        (5, 6, False),
        (2**53 - 1, 2**53, False),
    ],
)
def test_collides_examples(x, y, expected):
    assert collides(x, y) is expected


def test_collides_at_the_acceptance_point():
    t = stifel(10**9)
    assert t.b == 2 * 10**18 + 2 * 10**9
    assert collides(t.c, t.c + 1)


@given(st.integers(min_value=0, max_value=2**53 - 1))
def test_exact_below_the_wall(x):
    assert round_to_double(x) == x
    assert is_exact(x)


@given(st.integers(min_value=1, max_value=2**200))
def test_rounding_error_bound_and_idempotence(x):
    y = round_to_double(x)
    assert abs(y - x) * 2 <= ulp_gap(x)
    assert round_to_double(y) == y


def test_native_conversion_oracle():
    # The one permitted use of native floats: cross-check against the
    # platform's int-to-double conversion on 10^5 random values below 2^60.
    rnd = random.Random(0xF10A7)
    for _ in range(100_000):
        x = rnd.randrange(0, 2**60)
        assert round_to_double(x) == int(float(x))
    for x in [2**53 - 1, 2**53, 2**53 + 1, 2**53 + 2, 2**53 + 3, 2**54 - 2, 2**54 + 2]:
        assert round_to_double(x) == int(float(x))


def test_report_fields():
    r = report(2 * 10**18)
    assert r == FloatWallReport(
        value=2 * 10**18,
        binade_exponent=60,
        ulp_gap=256,
        nearest=2 * 10**18,
        is_exact=True,
        collides_with_successor=True,
    )


def test_wall_scan_rows():
    rows = {r.decimal_exp: r for r in wall_scan(3, 19)}
    assert rows[18].leg_report.ulp_gap == 256
    assert rows[18].collision is True
    assert rows[18].n == 10**9
    assert rows[3].leg_report.ulp_gap == 1
    assert rows[3].collision is False
    first_collision = min(d for d, r in rows.items() if r.collision)
    assert first_collision == 16


def test_wall_scan_rows_stay_exact_past_the_float_range():
    rows = wall_scan(400, 401)
    assert all(r.collision for r in rows)
    assert all(r.leg_report.nearest is None for r in rows)


def test_wall_scan_domain():
    with pytest.raises(DomainError):
        wall_scan(0, 5)
    with pytest.raises(DomainError):
        wall_scan(7, 5)
    with pytest.raises(DomainError):
        wall_scan(5, 1024)


def test_scan_table_format():
    table = scan_table(wall_scan(15, 19))
    lines = table.strip().split("\n")
    assert lines[0] == "decimal_exp\tn\tb_digits\tulp_gap\tcollision"
    d18 = [ln for ln in lines if ln.startswith("18\t")][0]
    assert d18.split("\t") == ["18", "1000000000", "19", "256", "true"]
