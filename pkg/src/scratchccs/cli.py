"""Command-line interface.

Subcommands run in-process by default; pass ``--server URL`` to send the
same request to a running service instead. Both paths share the request and
response models, so output and exit codes do not depend on the transport.

Exit codes: 0 success, 1 configuration or environment problem, 2 domain
error (bad studio, undefined statistic, and so on).
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, TypeVar

import httpx
from pydantic import BaseModel

from . import TOOL_NAME, __version__
from .errors import ConfigError, DomainError
from .pipeline import resolve_config, load_config_file
from .service import handlers
from .service.schemas import (
    CompareRequest,
    CompareResponse,
    FetchRequest,
    FetchResponse,
    ScoreRequest,
    ScoreResponse,
)

R = TypeVar("R", bound=BaseModel)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Score the creativity of Scratch studio projects.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--server",
        metavar="URL",
        help="send the request to a running service instead of executing in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fetch = sub.add_parser(
        "fetch", parents=[common], help="download a studio's projects from the Scratch API"
    )
    p_fetch.add_argument("studio_id", help="numeric studio id")
    p_fetch.add_argument("dest", help="directory to download projects into")
    p_fetch.add_argument("--limit", type=int, help="fetch at most this many projects")
    p_fetch.set_defaults(func=_cmd_fetch)

    p_score = sub.add_parser(
        "score", parents=[common], help="score every project of a local studio directory"
    )
    p_score.add_argument("--studio", help="studio directory (sb3 archives or unpacked projects)")
    p_score.add_argument("--out", help="output directory for scores and reports")
    p_score.add_argument("--config", help="JSON config file; command-line flags override it")
    p_score.add_argument("--seed", type=int, help="clustering PRNG seed (default: 42)")
    p_score.add_argument(
        "--k-visual", type=int, help="image cluster count (default: rule of thumb from studio size)"
    )
    p_score.add_argument(
        "--k-text", type=int, help="text cluster count (default: rule of thumb from studio size)"
    )
    p_score.add_argument(
        "--embedding",
        help="image embedding backend: 'builtin' or 'import:<csv>' (default: builtin)",
    )
    p_score.add_argument(
        "--external", help="external metric CSV; when given, a comparison is written too"
    )
    p_score.add_argument(
        "--top-k", type=int, help="rows in comparison rank tables (default: 5)"
    )
    p_score.add_argument(
        "--text-granularity",
        choices=["project", "element"],
        help="cluster one document per project, or one per text element (default: project)",
    )
    p_score.set_defaults(func=_cmd_score)

    p_compare = sub.add_parser(
        "compare", parents=[common], help="compare a scores file against an external metric"
    )
    p_compare.add_argument("--scores", required=True, help="scores.json produced by 'score'")
    p_compare.add_argument("--external", required=True, help="CSV with header project_id,score")
    p_compare.add_argument(
        "--top-k", type=int, default=5, help="rows in the rank tables (default: 5)"
    )
    p_compare.set_defaults(func=_cmd_compare)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1", help="bind address (default: 127.0.0.1)")
    p_serve.add_argument("--port", type=int, default=8000, help="port (default: 8000)")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def _dispatch(args, path: str, request: BaseModel, response_cls: type[R], local: Callable[..., R]) -> R:
    """Run a handler in-process, or POST the request to ``--server``."""
    if not getattr(args, "server", None):
        return local(request)
    try:
        with httpx.Client(base_url=args.server, timeout=300.0) as client:
            response = client.post(path, json=request.model_dump())
    except httpx.HTTPError as exc:
        raise ConfigError(f"cannot reach server {args.server}: {exc}") from exc
    if response.status_code == 200:
        return response_cls.model_validate(response.json())
    try:
        body = response.json()
        detail = f"{body.get('error', 'error')}: {body.get('detail', response.text)}"
    except ValueError:
        detail = response.text
    if response.status_code == 422:
        raise DomainError(detail)
    raise ConfigError(detail)


def _cmd_fetch(args) -> int:
    request = FetchRequest(studio_id=args.studio_id, dest=args.dest, limit=args.limit)
    result = _dispatch(args, "/fetch", request, FetchResponse, handlers.handle_fetch)
    print(
        f"studio {result.studio_id}: {result.fetched} fetched, "
        f"{result.cached} cached, {result.failed} failed"
    )
    print(f"manifest: {result.manifest_path}")
    return 0


def _cmd_score(args) -> int:
    file_values = load_config_file(args.config) if args.config else None
    overrides = {
        "studio_dir": args.studio,
        "output_dir": args.out,
        "seed": args.seed,
        "k_visual": args.k_visual,
        "k_text": args.k_text,
        "embedding": args.embedding,
        "external_scores": args.external,
        "top_k": args.top_k,
        "text_granularity": args.text_granularity,
    }
    config = resolve_config(file_values, overrides)
    request = ScoreRequest(
        studio_dir=str(config.studio_dir),
        output_dir=str(config.output_dir),
        seed=config.seed,
        k_visual=config.k_visual,
        k_text=config.k_text,
        embedding=config.embedding,
        external_scores=str(config.external_scores) if config.external_scores else None,
        top_k=config.top_k,
        text_granularity=config.text_granularity,
    )
    result = _dispatch(args, "/score", request, ScoreResponse, handlers.handle_score)
    print(f"scored {len(result.scores)} project(s) -> {config.output_dir}")
    for name in sorted(result.files):
        print(f"  {result.files[name]}")
    for failure in result.failures:
        print(
            f"warning: {failure['project_id']} skipped ({failure['error']}: {failure['detail']})",
            file=sys.stderr,
        )
    return 0


def _cmd_compare(args) -> int:
    request = CompareRequest(
        scores_path=args.scores, external_path=args.external, top_k=args.top_k
    )
    result = _dispatch(args, "/compare", request, CompareResponse, handlers.handle_compare)
    print(result.table)
    print(f"report: {result.comparison_path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
