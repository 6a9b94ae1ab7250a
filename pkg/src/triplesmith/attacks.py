"""Adversarial hard-negative registry for triple verification tasks.

Each attack is a procedure that turns a valid triple (or a random source)
into a negative sample, together with a machine-checkable defining property
over the (original, mutated) pair. Labels are never trusted from a
generator: every emitted sample is re-classified from scratch, and no
registered attack may ever emit a ``pos`` sample.

Three tiers:

* precision  - PA01 off-by-one, PA02 relative drift of 1e-15, PA03 drop the
  last digit (PA06 is an alias for the same mechanism).
* modular    - AR01 full digit reversal, AR02/AR03/AR04/AR05 additive shifts
  that preserve the equation modulo 10, 7, 3, 11 respectively while
  breaking it over the integers.
* structural - ST01/ST02/ST03 genuine triples from the plato, fibonacci and
  euclid families, which satisfy the equation but violate the c - b = 1
  constraint of the positive stream.

Attack codes are stable ASCII identifiers that appear verbatim in the shard
record format; registering a new attack requires only a new code, so the
dataset format never changes when the suite grows.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .errors import (
    DegenerateInputError,
    DomainError,
    NotApplicableError,
    RetryExhaustedError,
)
from .exactnum import reverse_digits, truncate_last
from .rng import CounterRng
from .triples import GenParams, Label, Triple, classify, euclid, fibonacci_triple, plato

# Fibonacci index cap: keeps hypotenuses under ~130 decimal digits, the
# widest numbers any downstream consumer (tokenizer max length 128) accepts.
_FIB_INDEX_CAP = 300

# digits(F_i) grows at ~log10(phi) per index step.
_LOG10_PHI = 0.20898764024997873


@dataclass(frozen=True, slots=True)
class LabeledSample:
    triple: Triple
    label: Label
    attack: str | None
    origin: GenParams | None
    seed_path: str


def make_sample(
    triple: Triple,
    attack: str | None = None,
    origin: GenParams | None = None,
    seed_path: str = "",
) -> LabeledSample:
    """Build a sample with its label recomputed from the triple."""
    return LabeledSample(triple, classify(triple), attack, origin, seed_path)


def pa01_off_by_one(t: Triple, direction: int) -> Triple:
    """(a, b, c +/- 1). Degenerate when the shift would leave c below 1."""
    if direction not in (-1, 1):
        raise DomainError(f"direction must be +1 or -1: {direction}")
    c = t.c + direction
    if c < 1:
        raise DegenerateInputError("c = 1 cannot shift down")
    return Triple(t.a, t.b, c)


_DRIFT_DEN = 10**15
_DRIFT_NUM = 10**15 + 1


def pa02_float_drift(t: Triple) -> Triple:
    """c' = nearest integer to c * (1 + 1e-15), ties away from zero.

    Computed in exact rational arithmetic. Below c = 5*10^14 the drift
    rounds away entirely (c' = c) and the attack is not applicable.
    """
    q, r = divmod(t.c * _DRIFT_NUM, _DRIFT_DEN)
    c = q + (1 if 2 * r >= _DRIFT_DEN else 0)
    if c == t.c:
        raise NotApplicableError(f"drift below rounding threshold at c={t.c}")
    return Triple(t.a, t.b, c)


def pa03_truncate(t: Triple) -> Triple:
    """(a, b, c) with the last decimal digit of c dropped; needs c >= 10."""
    return Triple(t.a, t.b, truncate_last(t.c))


def ar01_digit_swap(t: Triple) -> Triple:
    """(a, b, reverse_digits(c)); palindromic c is not applicable."""
    c = reverse_digits(t.c)
    if c == t.c:
        raise NotApplicableError(f"palindromic c={t.c}")
    mutated = Triple(t.a, t.b, c)
    if classify(mutated) is not Label.NEG_EQ:
        raise NotApplicableError(f"reversal of c={t.c} did not break the equation")
    return mutated


def verify_mod(t: Triple, modulus: int) -> bool:
    """True iff a^2 + b^2 = c^2 holds modulo ``modulus``."""
    if modulus < 2:
        raise DomainError(f"modulus must be >= 2: {modulus}")
    return (t.a * t.a + t.b * t.b - t.c * t.c) % modulus == 0


def mod_mimic(t: Triple, modulus: int) -> Triple:
    """Shift c by the smallest positive multiple of ``modulus`` that breaks
    the equation over the integers while preserving it mod ``modulus``.

    For a valid input triple the first shift already works, since
    (c + modulus)^2 > c^2 = a^2 + b^2.
    """
    if modulus not in (3, 7, 10, 11):
        raise DomainError(f"supported moduli are 3, 7, 10, 11: {modulus}")
    c = t.c
    for _ in range(4):
        c += modulus
        mutated = Triple(t.a, t.b, c)
        if classify(mutated) is Label.NEG_EQ:
            return mutated
    raise NotApplicableError(f"no breaking shift found near c={t.c}")


def _fib_index_for_scale(scale_n: int) -> int:
    """Fibonacci index whose triple magnitude tracks stifel triples at n ~ scale_n."""
    digits = len(str(2 * scale_n * (scale_n + 1)))
    return max(4, min(_FIB_INDEX_CAP, round(digits / (2 * _LOG10_PHI))))


def structural(code: str, rng: CounterRng, scale_n: int = 1000) -> LabeledSample:
    """Draw a family negative: a genuine triple whose hypotenuse gap is not 1.

    ``scale_n`` pins the magnitude to roughly match stifel triples generated
    around index scale_n, so structural negatives blend into a stream
    instead of standing out by size.
    """
    scale_n = max(2, scale_n)
    if code == "ST01":
        n = rng.randrange(2, 2 * scale_n + 1)
        return make_sample(plato(n), "ST01", GenParams("plato", n=n))
    if code == "ST02":
        hi = _fib_index_for_scale(scale_n)
        i = rng.randrange(3, hi + 1)
        return make_sample(fibonacci_triple(i), "ST02", GenParams("fibonacci", n=i))
    if code == "ST03":
        m = rng.randrange(3, 2 * scale_n + 2)
        k = rng.randrange(1, m - 1)  # m - k >= 2, so c - b = (m-k)^2 != 1
        return make_sample(euclid(m, k), "ST03", GenParams("euclid", m=m, k=k))
    raise DomainError(f"unknown structural code: {code}")


@dataclass(frozen=True)
class AttackSpec:
    """Registry entry: stable code, tier, mutation procedure, and the exact
    predicate that defines the attack over (original, mutated) pairs."""

    code: str
    tier: str
    description: str
    mutate: Callable[[Triple, CounterRng], Triple]
    defining_property: Callable[[Triple, Triple], bool]


def _prop_pa01(orig: Triple, mut: Triple) -> bool:
    return abs(mut.c - orig.c) == 1 and (mut.a, mut.b) == (orig.a, orig.b)


def _prop_pa02(orig: Triple, mut: Triple) -> bool:
    q, r = divmod(orig.c * _DRIFT_NUM, _DRIFT_DEN)
    return mut.c == q + (1 if 2 * r >= _DRIFT_DEN else 0) and mut.c != orig.c


def _prop_pa03(orig: Triple, mut: Triple) -> bool:
    return orig.c >= 10 and mut.c == orig.c // 10


def _prop_ar01(orig: Triple, mut: Triple) -> bool:
    return mut.c == reverse_digits(orig.c) and classify(mut) is Label.NEG_EQ


def _mod_property(modulus: int) -> Callable[[Triple, Triple], bool]:
    def prop(orig: Triple, mut: Triple) -> bool:
        return (
            verify_mod(mut, modulus)
            and classify(mut) is Label.NEG_EQ
            and (mut.c - orig.c) % modulus == 0
            and mut.c > orig.c
        )

    return prop


def _prop_structural(_orig: Triple, mut: Triple) -> bool:
    return classify(mut) is Label.NEG_FAMILY


REGISTRY: dict[str, AttackSpec] = {}
ALIASES: dict[str, str] = {"PA06": "PA03"}


def register(spec: AttackSpec) -> None:
    if spec.code in REGISTRY or spec.code in ALIASES:
        raise DomainError(f"attack code already registered: {spec.code}")
    if spec.tier not in ("precision", "modular", "structural"):
        raise DomainError(f"unknown tier: {spec.tier}")
    REGISTRY[spec.code] = spec


def resolve(code: str) -> AttackSpec:
    code = ALIASES.get(code, code)
    try:
        return REGISTRY[code]
    except KeyError:
        raise DomainError(f"unknown attack code: {code}") from None


def registered_codes() -> list[str]:
    return sorted(REGISTRY)


def _register_builtins() -> None:
    register(
        AttackSpec(
            "PA01",
            "precision",
            "off-by-one shift of the hypotenuse",
            lambda t, rng: pa01_off_by_one(t, rng.sign()),
            _prop_pa01,
        )
    )
    register(
        AttackSpec(
            "PA02",
            "precision",
            "relative drift of the hypotenuse by 1e-15, rounded to integer",
            lambda t, rng: pa02_float_drift(t),
            _prop_pa02,
        )
    )
    register(
        AttackSpec(
            "PA03",
            "precision",
            "drop the last decimal digit of the hypotenuse",
            lambda t, rng: pa03_truncate(t),
            _prop_pa03,
        )
    )
    register(
        AttackSpec(
            "AR01",
            "modular",
            "reverse the decimal digits of the hypotenuse",
            lambda t, rng: ar01_digit_swap(t),
            _prop_ar01,
        )
    )
    for code, modulus in (("AR02", 10), ("AR03", 7), ("AR04", 3), ("AR05", 11)):
        register(
            AttackSpec(
                code,
                "modular",
                f"hypotenuse shift preserving the equation mod {modulus}",
                (lambda m: lambda t, rng: mod_mimic(t, m))(modulus),
                _mod_property(modulus),
            )
        )
    for code, family in (("ST01", "plato"), ("ST02", "fibonacci"), ("ST03", "euclid")):
        register(
            AttackSpec(
                code,
                "structural",
                f"valid {family}-family triple with hypotenuse gap != 1",
                lambda t, rng: t,  # structural attacks generate, not mutate
                _prop_structural,
            )
        )


_register_builtins()

STRUCTURAL_CODES = ("ST01", "ST02", "ST03")


def apply_attack(
    code: str,
    rng: CounterRng,
    base: Triple | None = None,
    origin: GenParams | None = None,
    resample: Callable[[CounterRng], tuple[Triple, GenParams | None]] | None = None,
    scale_n: int = 1000,
    seed_path: str = "",
    max_retries: int = 64,
) -> LabeledSample:
    """Dispatch an attack and return a freshly classified sample.

    Mutating attacks need a ``base`` triple (or a ``resample`` callback to
    draw one); when an attack reports not-applicable or degenerate input,
    a new base is drawn up to ``max_retries`` times. Structural attacks
    ignore the base entirely and generate their own triple from ``rng``.
    """
    canonical_code = ALIASES.get(code, code)
    spec = resolve(canonical_code)
    if canonical_code in STRUCTURAL_CODES:
        sample = structural(canonical_code, rng, scale_n=scale_n)
        return replace(sample, seed_path=seed_path)
    if base is None:
        if resample is None:
            raise DomainError(f"attack {code} needs a base triple or a resampler")
        base, origin = resample(rng)
    for _ in range(max_retries):
        try:
            mutated = spec.mutate(base, rng)
        except (NotApplicableError, DegenerateInputError):
            if resample is None:
                raise
            base, origin = resample(rng)
            continue
        return make_sample(mutated, canonical_code, origin, seed_path)
    raise RetryExhaustedError(f"attack {code}: no applicable base after {max_retries} tries")
