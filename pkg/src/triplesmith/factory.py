"""Dataset composition, canonical shard serialization, and integrity checks.

Record format (the bit-exact contract)
--------------------------------------

One sample per line, LF-terminated ASCII, no padding:

    a,b,c,label,attack,n

``a``, ``b``, ``c`` are canonical decimal strings; ``label`` is one of
``pos``/``neg_eq``/``neg_family``; ``attack`` is a registered attack code or
``-``; ``n`` is the single generator index behind the sample (the stifel
index of a positive or an attacked base, the plato/fibonacci index of a
structural negative) or ``-`` when there is none (euclid negatives carry an
(m, k) pair that does not fit the column). Shard files are named
``shard_<id>.csv``; each is described by ``shard_<id>.manifest.json`` whose
``sha256`` is the digest of the record bytes only, and ``dataset.json``
lists every manifest plus the generating config.

Stream layout
-------------

The stream is a deterministic interleave of positives ``stifel(n)`` for n in
[n_start, n_end] (in order) with attack negatives. Slot t of the global
stream is a negative exactly when floor((t+1)*r) > floor(t*r) for the exact
rational ratio r, which keeps the running negative fraction within one
sample of r at every prefix; the total negative count is
round(P * r / (1 - r)) for P positives. Within each shard, negatives are
assigned to attack codes by a smoothed weighted round-robin over the sorted
codes (pick the code with the largest weight*(u+1) - emitted deficit), so
per-shard attack counts stay within one sample of the configured mix. The
round-robin state resets at shard boundaries, which is what makes any shard
reproducible in isolation: byte content depends only on (config, shard id),
never on which worker produced it or in what order.

Every random decision inside a sample (negative base index, off-by-one
direction, structural family parameters) comes from a CounterRng keyed on
(seed, shard id, global record index); see ``rng.py`` for the exact keyed
construction, which shard digests depend on.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from . import attacks
from .errors import DomainError, MalformedInputError
from .rng import CounterRng
from .triples import GenParams, Label, Triple, classify, stifel

DEFAULT_SHARD_SIZE = 100_000

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def _as_fraction(x: float | str | int | Fraction) -> Fraction:
    # Floats go through str() so that e.g. 0.1 means the decimal 1/10,
    # not its binary approximation.
    if isinstance(x, Fraction):
        return x
    return Fraction(str(x))


@dataclass(frozen=True)
class DatasetConfig:
    n_start: int
    n_end: int
    shard_size: int = DEFAULT_SHARD_SIZE
    negative_ratio: Fraction = Fraction(0)
    attack_mix: dict[str, Fraction] = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "dataset"

    def __post_init__(self) -> None:
        object.__setattr__(self, "negative_ratio", _as_fraction(self.negative_ratio))
        object.__setattr__(
            self, "attack_mix", {k: _as_fraction(v) for k, v in self.attack_mix.items()}
        )
        if self.n_start < 1 or self.n_end < self.n_start:
            raise DomainError(f"empty generator range [{self.n_start}, {self.n_end}]")
        if self.shard_size < 1:
            raise DomainError(f"shard_size must be >= 1: {self.shard_size}")
        if not 0 <= self.negative_ratio < 1:
            raise DomainError(f"negative_ratio must be in [0, 1): {self.negative_ratio}")
        if self.negative_ratio > 0:
            if sum(self.attack_mix.values()) != 1:
                raise DomainError("attack_mix weights must sum to 1 when negatives are on")
            for code in self.attack_mix:
                attacks.resolve(code)  # raises on unknown codes
            if any(w < 0 for w in self.attack_mix.values()):
                raise DomainError("attack_mix weights must be non-negative")

    # --- derived stream geometry -------------------------------------

    @property
    def positives_total(self) -> int:
        return self.n_end - self.n_start + 1

    @property
    def negatives_total(self) -> int:
        r = self.negative_ratio
        if r == 0:
            return 0
        exact = Fraction(self.positives_total) * r / (1 - r)
        return int(exact + Fraction(1, 2))  # round half up

    @property
    def stream_total(self) -> int:
        return self.positives_total + self.negatives_total

    @property
    def shard_count(self) -> int:
        return -(-self.stream_total // self.shard_size)

    def to_json_dict(self) -> dict:
        return {
            "n_start": self.n_start,
            "n_end": self.n_end,
            "shard_size": self.shard_size,
            "negative_ratio": str(self.negative_ratio),
            "attack_mix": {k: str(v) for k, v in self.attack_mix.items()},
            "seed": self.seed,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DatasetConfig":
        return cls(
            n_start=int(d["n_start"]),
            n_end=int(d["n_end"]),
            shard_size=int(d.get("shard_size", DEFAULT_SHARD_SIZE)),
            negative_ratio=Fraction(d.get("negative_ratio", "0")),
            attack_mix={k: Fraction(v) for k, v in d.get("attack_mix", {}).items()},
            seed=int(d.get("seed", 0)),
            output_dir=d.get("output_dir", "dataset"),
        )


@dataclass(frozen=True)
class ShardManifest:
    shard_id: int
    n_range: tuple[int, int] | None
    count: int
    sha256: str
    seed: int
    attack_counts: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "shard_id": self.shard_id,
            "n_range": list(self.n_range) if self.n_range else None,
            "count": self.count,
            "sha256": self.sha256,
            "seed": self.seed,
            "attack_counts": dict(sorted(self.attack_counts.items())),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ShardManifest":
        nr = d.get("n_range")
        return cls(
            shard_id=int(d["shard_id"]),
            n_range=(int(nr[0]), int(nr[1])) if nr else None,
            count=int(d["count"]),
            sha256=d["sha256"],
            seed=int(d["seed"]),
            attack_counts={k: int(v) for k, v in d.get("attack_counts", {}).items()},
        )


# --- record serialization --------------------------------------------


def serialize_record(sample: attacks.LabeledSample) -> bytes:
    t = sample.triple
    attack = sample.attack or "-"
    n = "-"
    if sample.origin is not None and sample.origin.index is not None:
        n = str(sample.origin.index)
    return f"{t.a},{t.b},{t.c},{sample.label.value},{attack},{n}\n".encode("ascii")


def parse_record(line: bytes, lineno: int) -> tuple[Triple, Label, str, str]:
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedInputError(f"line {lineno}: non-ascii bytes") from exc
    parts = text.rstrip("\n").split(",")
    if len(parts) != 6:
        raise MalformedInputError(f"line {lineno}: expected 6 fields, got {len(parts)}")
    a_s, b_s, c_s, label_s, attack_s, n_s = parts
    try:
        triple = Triple(int(a_s), int(b_s), int(c_s))
        label = Label(label_s)
    except (ValueError, DomainError) as exc:
        raise MalformedInputError(f"line {lineno}: {exc}") from exc
    return triple, label, attack_s, n_s


# --- stream composition ----------------------------------------------


def _neg_before(t: int, ratio: Fraction) -> int:
    return int(t * ratio)  # floor for non-negative rationals


def _is_negative_slot(t: int, cfg: DatasetConfig) -> bool:
    r = cfg.negative_ratio
    if r == 0:
        return False
    j = _neg_before(t, r)
    if _neg_before(t + 1, r) > j:
        return j < cfg.negatives_total
    return (t - j) >= cfg.positives_total  # positives exhausted: pad with negatives


class _MixRoundRobin:
    """Smoothed weighted round-robin over attack codes; resets per shard."""

    def __init__(self, mix: dict[str, Fraction]):
        self.codes = sorted(code for code, w in mix.items() if w > 0)
        self.weights = [mix[c] for c in self.codes]
        self.emitted = [0] * len(self.codes)
        self.step = 0

    def next_code(self) -> str:
        self.step += 1
        best, best_deficit = 0, None
        for i, w in enumerate(self.weights):
            deficit = w * self.step - self.emitted[i]
            if best_deficit is None or deficit > best_deficit:
                best, best_deficit = i, deficit
        self.emitted[best] += 1
        return self.codes[best]


def _resampler(cfg: DatasetConfig):
    def resample(rng: CounterRng) -> tuple[Triple, GenParams | None]:
        n = rng.randrange(cfg.n_start, cfg.n_end + 1)
        return stifel(n), GenParams("stifel", n=n)

    return resample


def compose_shard(cfg: DatasetConfig, shard_id: int) -> Iterator[attacks.LabeledSample]:
    """Lazily yield the samples of one shard, independent of other shards.

    Memory use is O(1) in the shard id: the positive index is computed
    directly from the global slot, and RNG streams are counter-addressed.
    """
    if not 0 <= shard_id < cfg.shard_count:
        raise DomainError(f"shard id out of range: {shard_id}")
    start = shard_id * cfg.shard_size
    stop = min(start + cfg.shard_size, cfg.stream_total)
    rr = _MixRoundRobin(cfg.attack_mix)
    resample = _resampler(cfg)
    for t in range(start, stop):
        seed_path = f"{cfg.seed}/{shard_id}/{t}"
        if _is_negative_slot(t, cfg):
            rng = CounterRng(cfg.seed, shard_id, t)
            code = rr.next_code()
            yield attacks.apply_attack(
                code,
                rng,
                resample=resample,
                scale_n=cfg.n_end,
                seed_path=seed_path,
            )
        else:
            n = cfg.n_start + (t - _neg_before(t, cfg.negative_ratio))
            yield attacks.make_sample(
                stifel(n), None, GenParams("stifel", n=n), seed_path
            )


def compose(cfg: DatasetConfig) -> Iterator[attacks.LabeledSample]:
    """The full deterministic stream, shard by shard."""
    for shard_id in range(cfg.shard_count):
        yield from compose_shard(cfg, shard_id)


# --- shard files -------------------------------------------------------


def shard_filename(shard_id: int) -> str:
    return f"shard_{shard_id:06d}.csv"


def manifest_filename(shard_id: int) -> str:
    return f"shard_{shard_id:06d}.manifest.json"


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def write_shard(
    samples: Iterable[attacks.LabeledSample],
    path: str | Path,
    shard_id: int,
    seed: int,
    shard_size: int | None = None,
) -> ShardManifest:
    """Stream samples to a shard file atomically and emit its manifest.

    The temp-file-plus-rename dance guarantees that a crash mid-write never
    leaves a partial shard visible; the manifest is written only after the
    shard bytes are durable.
    """
    path = Path(path)
    digest = hashlib.sha256()
    count = 0
    attack_counts: dict[str, int] = {}
    n_lo: int | None = None
    n_hi: int | None = None
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    try:
        with open(tmp, "wb") as fh:
            for sample in samples:
                record = serialize_record(sample)
                fh.write(record)
                digest.update(record)
                count += 1
                if shard_size is not None and count > shard_size:
                    raise DomainError(f"more than {shard_size} samples for one shard")
                if sample.attack:
                    attack_counts[sample.attack] = attack_counts.get(sample.attack, 0) + 1
                elif sample.origin is not None and sample.origin.index is not None:
                    n = sample.origin.index
                    n_lo = n if n_lo is None else min(n_lo, n)
                    n_hi = n if n_hi is None else max(n_hi, n)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()
    manifest = ShardManifest(
        shard_id=shard_id,
        n_range=(n_lo, n_hi) if n_lo is not None and n_hi is not None else None,
        count=count,
        sha256=digest.hexdigest(),
        seed=seed,
        attack_counts=attack_counts,
    )
    manifest_path = path.with_name(manifest_filename(shard_id))
    _atomic_write(
        manifest_path,
        json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True).encode() + b"\n",
    )
    return manifest


@dataclass(frozen=True)
class ShardVerification:
    ok: bool
    count: int
    problems: list[str]


def verify_shard(path: str | Path, manifest: ShardManifest) -> ShardVerification:
    """Recompute the digest and re-classify every record against its label."""
    path = Path(path)
    digest = hashlib.sha256()
    problems: list[str] = []
    count = 0
    with open(path, "rb") as fh:
        for lineno, line in enumerate(fh, start=1):
            digest.update(line)
            count += 1
            try:
                triple, label, attack, _n = parse_record(line, lineno)
            except MalformedInputError as exc:
                problems.append(str(exc))
                continue
            actual = classify(triple)
            if actual is not label:
                problems.append(
                    f"line {lineno}: stored label {label.value} but classifies {actual.value}"
                )
            if attack != "-":
                try:
                    attacks.resolve(attack)
                except DomainError:
                    problems.append(f"line {lineno}: unknown attack code {attack}")
    if digest.hexdigest() != manifest.sha256:
        problems.insert(0, f"digest mismatch: {digest.hexdigest()} != {manifest.sha256}")
    if count != manifest.count:
        problems.insert(0, f"record count {count} != manifest count {manifest.count}")
    return ShardVerification(ok=not problems, count=count, problems=problems)


def load_manifest(path: str | Path) -> ShardManifest:
    with open(path, "r", encoding="ascii") as fh:
        return ShardManifest.from_json_dict(json.load(fh))


# --- dataset-level production ----------------------------------------


def _produce_one(cfg: DatasetConfig, shard_id: int) -> ShardManifest:
    out = Path(cfg.output_dir)
    return write_shard(
        compose_shard(cfg, shard_id),
        out / shard_filename(shard_id),
        shard_id=shard_id,
        seed=cfg.seed,
        shard_size=cfg.shard_size,
    )


def generate(cfg: DatasetConfig, workers: int = 1) -> list[ShardManifest]:
    """Produce every shard plus the dataset index; byte output is identical
    for any worker count."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ids = list(range(cfg.shard_count))
    if workers <= 1 or len(ids) <= 1:
        manifests = [_produce_one(cfg, sid) for sid in ids]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            manifests = list(pool.map(_produce_one, [cfg] * len(ids), ids))
    manifests.sort(key=lambda m: m.shard_id)
    index = {
        "config": cfg.to_json_dict(),
        "shards": [m.to_json_dict() for m in manifests],
    }
    _atomic_write(out / "dataset.json", json.dumps(index, indent=2, sort_keys=True).encode() + b"\n")
    return manifests


def load_index(directory: str | Path) -> tuple[DatasetConfig, list[ShardManifest]]:
    directory = Path(directory)
    with open(directory / "dataset.json", "r", encoding="ascii") as fh:
        index = json.load(fh)
    cfg = DatasetConfig.from_json_dict(index["config"])
    manifests = [ShardManifest.from_json_dict(d) for d in index["shards"]]
    return cfg, manifests


def verify_dataset(directory: str | Path) -> dict[int, ShardVerification]:
    """Integrity sweep over every shard listed in the dataset index."""
    directory = Path(directory)
    _cfg, manifests = load_index(directory)
    results: dict[int, ShardVerification] = {}
    for m in manifests:
        results[m.shard_id] = verify_shard(directory / shard_filename(m.shard_id), m)
    return results
