"""Classifier features along two precision paths: exact and simulated-double.

The feature triple is

    f_gap   = c - b
    f_ratio = b / a
    f_res   = ln(|a^2 + b^2 - c^2| + eps)      with eps = 1e-12

On the ``exact`` path the residual is computed in unbounded integers before
any real-number conversion; the logarithm of a huge residual is taken by
decimal-digit decomposition (ln r = ln(prefix) + (digits - prefix_len) *
ln 10 on a 15-digit prefix), so nothing overflows and nothing collapses, at
any magnitude. f_gap stays an exact integer and f_ratio is a 30-significant-
digit decimal quotient.

On the ``float`` path, a, b and c are first snapped to their nearest doubles
(via the integer-only rounding in ``floatwall``) and the whole expression is
then evaluated in native double arithmetic, reproducing exactly what a
float64 pipeline would see. Past the representability wall the off-by-one
perturbations vanish at the conversion step, which is the measurable content
of "the model is blind below its precision floor": the float path of a
perturbed triple becomes bit-identical to its unperturbed source.

Natural log; eps chosen at 1e-12. Both constants ride along in the CSV
metadata so downstream consumers are self-describing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from pathlib import Path
from typing import Iterable

from .errors import DomainError
from .floatwall import round_to_double
from .triples import Label, Triple

EPS = 1e-12
LN_EPS = math.log(EPS)
_LN10 = math.log(10)
_PREFIX_DIGITS = 15
_EXACT_DOUBLE_LIMIT = 1 << 53

PATHS = ("exact", "float")


@dataclass(frozen=True, slots=True)
class FeatureVector:
    f_gap: int | float
    f_ratio: Decimal | float
    f_res: float
    path: str


def _ln_big(r: int) -> float:
    """ln of a positive integer via digit-count decomposition; exact enough
    (absolute error ~1e-15) without ever converting r itself to a float."""
    s = str(r)
    prefix = s[:_PREFIX_DIGITS]
    return math.log(int(prefix)) + (len(s) - len(prefix)) * _LN10


def _f_res_exact(residual: int) -> float:
    if residual == 0:
        return LN_EPS
    if residual <= _EXACT_DOUBLE_LIMIT:
        # Lossless conversion; adding eps here mirrors what the float path
        # does for small magnitudes, keeping the two paths comparable.
        return math.log(residual + EPS)
    return _ln_big(residual)


def extract(t: Triple, path: str) -> FeatureVector:
    """Feature vector for one triple along the requested precision path."""
    if path == "exact":
        residual = abs(t.a * t.a + t.b * t.b - t.c * t.c)
        with localcontext() as ctx:
            ctx.prec = 30
            ratio = Decimal(t.b) / Decimal(t.a)
        return FeatureVector(
            f_gap=t.c - t.b,
            f_ratio=ratio,
            f_res=_f_res_exact(residual),
            path="exact",
        )
    if path == "float":
        fa = float(round_to_double(t.a))
        fb = float(round_to_double(t.b))
        fc = float(round_to_double(t.c))
        residual = fa * fa + fb * fb - fc * fc
        return FeatureVector(
            f_gap=fc - fb,
            f_ratio=fb / fa,
            f_res=math.log(abs(residual) + EPS),
            path="float",
        )
    raise DomainError(f"unknown feature path: {path}")


FEATURE_HEADER = "f_gap,f_ratio,f_res,label,path"


def _render(v: FeatureVector, label: Label) -> str:
    if v.path == "exact":
        gap = str(v.f_gap)
        ratio = str(v.f_ratio)
    else:
        gap = repr(v.f_gap)
        ratio = repr(v.f_ratio)
    return f"{gap},{ratio},{repr(v.f_res)},{label.value},{v.path}"


def write_features(
    rows: Iterable[tuple[Triple, Label]], path_mode: str, out_path: str | Path
) -> int:
    """Extract features for (triple, label) pairs into a CSV; returns count."""
    if path_mode not in PATHS:
        raise DomainError(f"unknown feature path: {path_mode}")
    out_path = Path(out_path)
    count = 0
    with open(out_path, "w", encoding="ascii") as fh:
        fh.write(f"# eps={EPS!r} log=natural\n")
        fh.write(FEATURE_HEADER + "\n")
        for triple, label in rows:
            fh.write(_render(extract(triple, path_mode), label) + "\n")
            count += 1
    return count
