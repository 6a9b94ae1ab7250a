import math
import random
from decimal import Decimal, localcontext

import pytest

from triplesmith.attacks import pa01_off_by_one
from triplesmith.errors import DomainError
from triplesmith.features import EPS, LN_EPS, extract, write_features
from triplesmith.floatwall import collides
from triplesmith.triples import Label, Triple, stifel


def test_exact_examples():
    v = extract(Triple(3, 4, 6), "exact")
    assert v.f_res == pytest.approx(math.log(11 + EPS), rel=1e-12)
    assert v.f_res == pytest.approx(2.3979, abs=1e-4)
    assert v.f_gap == 2
    with localcontext() as ctx:
        ctx.prec = 30  # ratios carry 30 significant digits
        assert v.f_ratio == Decimal(4) / Decimal(3)

    v = extract(Triple(3, 4, 5), "exact")
    assert v.f_res == LN_EPS
    assert v.f_gap == 1


def test_unknown_path():
    with pytest.raises(DomainError):
        extract(Triple(3, 4, 5), "quad")


def test_float_path_collapse_at_n_1e9():
    base = stifel(10**9)
    neg = pa01_off_by_one(base, +1)
    assert collides(base.c, neg.c)
    fneg = extract(neg, "float")
    fpos = extract(base, "float")
    assert fneg == fpos  # bit-identical feature vectors
    assert fneg.f_res == LN_EPS
    exact = extract(neg, "exact")
    assert exact.f_res == pytest.approx(math.log(2 * base.c + 1), rel=1e-9)
    assert exact.f_res > 40


def test_exact_path_never_collapses_at_huge_magnitudes():
    base = stifel(10**40)
    neg = pa01_off_by_one(base, -1)
    v = extract(neg, "exact")
    # residual is 2c - 1 ~ 4 * 10^80; ln of that via digit decomposition
    expected = math.log(4) + 80 * math.log(10)
    assert v.f_res == pytest.approx(expected, rel=1e-6)
    assert v.f_gap == 0
    assert extract(base, "exact").f_res == LN_EPS


def test_paths_agree_for_small_triples():
    rnd = random.Random(0xFEA7)
    for _ in range(2000):
        a = rnd.randrange(1, 2**17 + 1)
        b = rnd.randrange(1, 2**17 + 1)
        c = rnd.randrange(1, 2**17 + 1)
        t = Triple(a, b, c)
        ve = extract(t, "exact")
        vf = extract(t, "float")
        assert vf.f_res == pytest.approx(ve.f_res, rel=1e-9)
        assert float(ve.f_gap) == vf.f_gap
        assert float(ve.f_ratio) == pytest.approx(vf.f_ratio, rel=1e-12)


def test_paths_agree_on_unit_residual():
    # residual of exactly 1: the + eps absorption must match bit for bit
    t = Triple(1, 1, 1)
    assert extract(t, "exact").f_res == extract(t, "float").f_res


def test_feature_csv(tmp_path):
    out = tmp_path / "features.csv"
    rows = [(stifel(1), Label.POS), (Triple(3, 4, 6), Label.NEG_EQ)]
    count = write_features(rows, "exact", out)
    assert count == 2
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("# eps=1e-12")
    assert lines[1] == "f_gap,f_ratio,f_res,label,path"
    first = lines[2].split(",")
    assert first[0] == "1" and first[3] == "pos" and first[4] == "exact"
    count = write_features(rows, "float", tmp_path / "f2.csv")
    assert count == 2
