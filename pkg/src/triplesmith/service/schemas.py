"""Request/response models for the HTTP service.

These are also the CLI's wire format: the CLI builds a request model, runs
the matching handler (in-process by default, over HTTP with --server), and
prints the response model as the JSON summary.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ShardManifestModel(BaseModel):
    shard_id: int
    n_range: tuple[int, int] | None
    count: int
    sha256: str
    seed: int
    attack_counts: dict[str, int]


class GenerateRequest(BaseModel):
    start: int = Field(ge=1)
    end: int = Field(ge=1)
    out_dir: str = "dataset"
    shard_size: int = Field(default=100_000, ge=1)
    negative_ratio: str = "0"
    attack_mix: dict[str, str] = Field(default_factory=dict)
    seed: int = 0
    workers: int = Field(default=1, ge=1)


class GenerateResponse(BaseModel):
    ok: bool
    out_dir: str
    shard_count: int
    record_count: int
    shards: list[ShardManifestModel]


class AttackRequest(BaseModel):
    code: str
    count: int = Field(ge=1)
    seed: int = 0
    base_start: int = Field(default=1, ge=1)
    out_path: str = "attack.csv"


class AttackResponse(BaseModel):
    ok: bool
    out_path: str
    code: str
    count: int
    label_counts: dict[str, int]


class VerifyRequest(BaseModel):
    path: str
    manifest_path: str | None = None


class VerifyResponse(BaseModel):
    ok: bool
    path: str
    record_count: int
    problems: list[str]


class DatasetVerifyRequest(BaseModel):
    directory: str


class ShardResult(BaseModel):
    shard_id: int
    ok: bool
    record_count: int
    problems: list[str]


class DatasetVerifyResponse(BaseModel):
    ok: bool
    directory: str
    shard_count: int
    shards: list[ShardResult]


class FloatWallRequest(BaseModel):
    min_exp: int = Field(ge=1, le=1023)
    max_exp: int = Field(ge=1, le=1023)


class FloatWallRow(BaseModel):
    decimal_exp: int
    n: int
    b_digits: int
    ulp_gap: int
    collision: bool


class FloatWallResponse(BaseModel):
    ok: bool
    rows: list[FloatWallRow]
    table: str


class FeaturesRequest(BaseModel):
    in_path: str
    path_mode: str = "exact"
    out_path: str = "features.csv"


class FeaturesResponse(BaseModel):
    ok: bool
    in_path: str
    out_path: str
    path_mode: str
    count: int
