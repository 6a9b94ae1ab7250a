"""Operator CLI: a thin client over the service handlers.

Every run prints a single machine-readable JSON summary as the last line of
stdout (the ``floatwall`` verb prints its text table above the summary).
Exit codes: 0 success, 1 verification/generation failure, 2 usage errors.

By default each verb executes in-process; pass ``--server http://host:port``
to send the identical request to a running service instance instead. All
randomness flows from an explicit ``--seed`` (default 0) so that two runs
with the same flags produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DomainError, MalformedInputError, RetryExhaustedError
from .service import handlers
from .service import schemas as s

_EXIT_OK = 0
_EXIT_FAIL = 1
_EXIT_USAGE = 2


def _parse_mix(text: str) -> dict[str, str]:
    """Parse 'PA01=0.5,ST01=0.5' into a code->weight mapping."""
    mix: dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise argparse.ArgumentTypeError(f"expected CODE=WEIGHT, got {part!r}")
        code, weight = part.split("=", 1)
        mix[code.strip()] = weight.strip()
    if not mix:
        raise argparse.ArgumentTypeError("empty attack mix")
    return mix


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triplesmith",
        description="exact Pythagorean-triple dataset factory and float-wall analyzer",
    )
    parser.add_argument("--server", default=None, help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="verb", required=True)

    gen = sub.add_parser("gen", help="generate shards and manifests")
    gen.add_argument("--start", type=int, required=True)
    gen.add_argument("--end", type=int, required=True)
    gen.add_argument("--out", default="dataset")
    gen.add_argument("--shard-size", type=int, default=100_000)
    gen.add_argument("--ratio", default="0", help="negative fraction, e.g. 0.5 or 1/2")
    gen.add_argument("--mix", type=_parse_mix, default=None, help="attack mix, e.g. PA01=0.5,ST01=0.5")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--workers", type=int, default=1)

    atk = sub.add_parser("attack", help="generate a labeled negative stream for one attack")
    atk.add_argument("--code", required=True)
    atk.add_argument("--count", type=int, required=True)
    atk.add_argument("--seed", type=int, default=0)
    atk.add_argument("--base-start", type=int, default=1)
    atk.add_argument("--out", default="attack.csv")

    ver = sub.add_parser("verify", help="check one shard: digest plus per-record labels")
    ver.add_argument("--in", dest="in_path", required=True)
    ver.add_argument("--manifest", default=None)

    fw = sub.add_parser("floatwall", help="scan double-precision representability by decimal exponent")
    fw.add_argument("--min-exp", type=int, required=True)
    fw.add_argument("--max-exp", type=int, required=True)

    shard = sub.add_parser("shard", help="dataset-wide integrity sweep")
    shard.add_argument("--verify", dest="directory", required=True, help="dataset directory")

    feat = sub.add_parser("features", help="extract classifier features from a shard")
    feat.add_argument("--in", dest="in_path", required=True)
    feat.add_argument("--path", dest="path_mode", choices=["exact", "float"], default="exact")
    feat.add_argument("--out", default="features.csv")

    return parser


def _request_for(args: argparse.Namespace):
    if args.verb == "gen":
        return "/generate", s.GenerateRequest(
            start=args.start,
            end=args.end,
            out_dir=args.out,
            shard_size=args.shard_size,
            negative_ratio=args.ratio,
            attack_mix=args.mix or {},
            seed=args.seed,
            workers=args.workers,
        ), handlers.generate
    if args.verb == "attack":
        return "/attack", s.AttackRequest(
            code=args.code,
            count=args.count,
            seed=args.seed,
            base_start=args.base_start,
            out_path=args.out,
        ), handlers.attack
    if args.verb == "verify":
        return "/verify", s.VerifyRequest(path=args.in_path, manifest_path=args.manifest), handlers.verify
    if args.verb == "floatwall":
        return "/floatwall", s.FloatWallRequest(min_exp=args.min_exp, max_exp=args.max_exp), handlers.floatwall
    if args.verb == "shard":
        return "/dataset/verify", s.DatasetVerifyRequest(directory=args.directory), handlers.verify_dataset
    if args.verb == "features":
        return "/features", s.FeaturesRequest(
            in_path=args.in_path, path_mode=args.path_mode, out_path=args.out
        ), handlers.extract_features
    raise AssertionError(f"unhandled verb {args.verb}")


def _call_remote(server: str, route: str, request) -> dict:
    import httpx

    resp = httpx.post(server.rstrip("/") + route, json=request.model_dump(), timeout=None)
    resp.raise_for_status()
    return resp.json()


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        route, request, handler = _request_for(args)
        if args.server:
            summary = _call_remote(args.server, route, request)
        else:
            summary = handler(request).model_dump()
    except (DomainError, MalformedInputError, ValueError) as exc:
        print(json.dumps({"ok": False, "error": str(exc)}))
        return _EXIT_USAGE
    except FileNotFoundError as exc:
        print(json.dumps({"ok": False, "error": str(exc)}))
        return _EXIT_USAGE
    except RetryExhaustedError as exc:
        print(json.dumps({"ok": False, "error": str(exc)}))
        return _EXIT_FAIL

    if args.verb == "floatwall" and "table" in summary:
        sys.stdout.write(summary["table"])
    print(json.dumps(summary, default=str))
    return _EXIT_OK if summary.get("ok", False) else _EXIT_FAIL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
