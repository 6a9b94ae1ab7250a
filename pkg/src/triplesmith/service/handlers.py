"""Service operation handlers, shared by the HTTP app and the CLI."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .. import factory, features
from ..attacks import apply_attack
from ..errors import DomainError, MalformedInputError
from ..floatwall import scan_table, wall_scan
from ..rng import CounterRng
from ..triples import GenParams, stifel
from . import schemas as s


def generate(req: s.GenerateRequest) -> s.GenerateResponse:
    cfg = factory.DatasetConfig(
        n_start=req.start,
        n_end=req.end,
        shard_size=req.shard_size,
        negative_ratio=Fraction(req.negative_ratio),
        attack_mix={k: Fraction(v) for k, v in req.attack_mix.items()},
        seed=req.seed,
        output_dir=req.out_dir,
    )
    manifests = factory.generate(cfg, workers=req.workers)
    return s.GenerateResponse(
        ok=True,
        out_dir=req.out_dir,
        shard_count=len(manifests),
        record_count=sum(m.count for m in manifests),
        shards=[s.ShardManifestModel(**m.to_json_dict()) for m in manifests],
    )


def attack(req: s.AttackRequest) -> s.AttackResponse:
    span = max(4 * req.count, 1024)

    def resample(rng: CounterRng):
        n = rng.randrange(req.base_start, req.base_start + span)
        return stifel(n), GenParams("stifel", n=n)

    def stream():
        for i in range(req.count):
            rng = CounterRng(req.seed, 0, i)
            n = req.base_start + i
            yield apply_attack(
                req.code,
                rng,
                base=stifel(n),
                origin=GenParams("stifel", n=n),
                resample=resample,
                scale_n=req.base_start + req.count,
                seed_path=f"{req.seed}/attack/{i}",
            )

    label_counts: dict[str, int] = {}

    def counted():
        for sample in stream():
            label_counts[sample.label.value] = label_counts.get(sample.label.value, 0) + 1
            yield sample

    manifest = factory.write_shard(
        counted(), Path(req.out_path), shard_id=0, seed=req.seed
    )
    return s.AttackResponse(
        ok=True,
        out_path=req.out_path,
        code=req.code,
        count=manifest.count,
        label_counts=label_counts,
    )


def verify(req: s.VerifyRequest) -> s.VerifyResponse:
    path = Path(req.path)
    if not path.is_file():
        raise FileNotFoundError(f"no such shard file: {path}")
    manifest_path = Path(req.manifest_path) if req.manifest_path else _sibling_manifest(path)
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no such manifest: {manifest_path}")
    manifest = factory.load_manifest(manifest_path)
    result = factory.verify_shard(path, manifest)
    return s.VerifyResponse(
        ok=result.ok, path=req.path, record_count=result.count, problems=result.problems
    )


def _sibling_manifest(shard_path: Path) -> Path:
    return shard_path.with_name(shard_path.name.removesuffix(".csv") + ".manifest.json")


def verify_dataset(req: s.DatasetVerifyRequest) -> s.DatasetVerifyResponse:
    directory = Path(req.directory)
    if not (directory / "dataset.json").is_file():
        raise FileNotFoundError(f"no dataset index in: {directory}")
    results = factory.verify_dataset(directory)
    shards = [
        s.ShardResult(
            shard_id=sid, ok=res.ok, record_count=res.count, problems=res.problems
        )
        for sid, res in sorted(results.items())
    ]
    return s.DatasetVerifyResponse(
        ok=all(r.ok for r in shards),
        directory=req.directory,
        shard_count=len(shards),
        shards=shards,
    )


def floatwall(req: s.FloatWallRequest) -> s.FloatWallResponse:
    if req.min_exp > req.max_exp:
        raise DomainError(f"min_exp {req.min_exp} > max_exp {req.max_exp}")
    rows = wall_scan(req.min_exp, req.max_exp)
    return s.FloatWallResponse(
        ok=True,
        rows=[
            s.FloatWallRow(
                decimal_exp=r.decimal_exp,
                n=r.n,
                b_digits=r.b_digits,
                ulp_gap=r.leg_report.ulp_gap,
                collision=r.collision,
            )
            for r in rows
        ],
        table=scan_table(rows),
    )


def extract_features(req: s.FeaturesRequest) -> s.FeaturesResponse:
    in_path = Path(req.in_path)
    if not in_path.is_file():
        raise FileNotFoundError(f"no such shard file: {in_path}")

    def rows():
        with open(in_path, "rb") as fh:
            for lineno, line in enumerate(fh, start=1):
                triple, label, _attack, _n = factory.parse_record(line, lineno)
                yield triple, label

    count = features.write_features(rows(), req.path_mode, req.out_path)
    return s.FeaturesResponse(
        ok=True,
        in_path=req.in_path,
        out_path=req.out_path,
        path_mode=req.path_mode,
        count=count,
    )
