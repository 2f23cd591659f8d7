"""Command-line front end.

Subcommands run the pipeline stage-wise (answer, contextualize, explain),
end to end (pipeline), over a dataset (evaluate, label), or as a small
HTTP service (serve). All JSON output is canonical: sorted keys, floats at
6 significant digits, so identical inputs give byte-identical output.

Exit codes: 0 success, 2 input error, 3 provider error, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .consolidation import Strategy
from .corpus import (
    CorpusError,
    Passage,
    label_spans,
    load,
    record_to_dict,
)
from .explanation import RankingStrategy, UnusableStrategyError
from .jsonio import canonical_dumps
from .metrics import count_metrics, instance_metrics, metrics_report_table
from .pipeline import (
    PipelineConfig,
    build_provider,
    package_to_dict,
    record_passages,
    run_pipeline,
)
from .providers import ProviderConfig, ProviderError, ProviderMode

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PROVIDER = 3
EXIT_INTERNAL = 4

ENV_ENDPOINT = "COQEX_ENDPOINT"
ENV_TIMEOUT_MS = "COQEX_TIMEOUT_MS"

logger = logging.getLogger(__name__)


class InputError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coqex",
        description="Answer count queries over text passages: one consolidated "
        "count, qualified noun phrases, and supporting instances.",
    )
    parser.add_argument("--config", help="TOML config file; flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--strategy", choices=[s.value for s in Strategy])
        p.add_argument("--alpha", type=float)
        p.add_argument("--similarity-threshold", type=float, dest="similarity_threshold")
        p.add_argument(
            "--explanation-strategy",
            choices=[s.value for s in RankingStrategy],
            dest="explanation_strategy",
        )
        p.add_argument("--k", type=int)
        p.add_argument("--provider", choices=[m.value for m in ProviderMode])
        p.add_argument("--endpoint")
        p.add_argument("--timeout-ms", type=float, dest="timeout_ms")
        p.add_argument("--allow-degrade", action="store_true", default=None, dest="allow_degrade")
        p.add_argument("--cache-dir", dest="cache_dir")

    for name, desc in (
        ("answer", "consolidate a count prediction from the passages"),
        ("contextualize", "predict a count and classify its qualifier phrases"),
        ("explain", "rank instance entities supporting the count"),
        ("pipeline", "run all stages and emit the full answer package"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("query")
        p.add_argument("--passages", required=True, help="JSON passages file")
        add_common(p)

    p = sub.add_parser("evaluate", help="run the pipeline over a dataset and score it")
    p.add_argument("--dataset", required=True, help="coquad.v1 dataset file")
    p.add_argument("--ks", default="1,5,10", help="comma-separated ranking cutoffs")
    p.add_argument("--table", action="store_true", help="plain-text table instead of JSON")
    add_common(p)

    p = sub.add_parser("label", help="label every count span against the gold counts")
    p.add_argument("--dataset", required=True)
    p.add_argument("--output", help="write labeled dataset here instead of stdout")

    p = sub.add_parser("serve", help="HTTP service exposing POST /v1/answer")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    add_common(p)

    return parser


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"bad config file {path}: {exc}") from exc


def _setting(args: argparse.Namespace, file_cfg: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in file_cfg:
        return file_cfg[key]
    return default


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    file_cfg = _load_config_file(getattr(args, "config", None))
    mode = ProviderMode(_setting(args, file_cfg, "provider", ProviderMode.OFFLINE.value))
    endpoint = _setting(args, file_cfg, "endpoint", os.environ.get(ENV_ENDPOINT))
    timeout_ms = _setting(
        args, file_cfg, "timeout_ms", float(os.environ.get(ENV_TIMEOUT_MS, 30000.0))
    )
    if mode == ProviderMode.REMOTE and not endpoint:
        raise InputError(
            f"remote provider needs --endpoint or {ENV_ENDPOINT}"
        )
    provider = ProviderConfig(
        mode=mode,
        endpoint=endpoint if mode == ProviderMode.REMOTE else None,
        timeout=float(timeout_ms) / 1000.0,
    )
    try:
        return PipelineConfig(
            strategy=Strategy(_setting(args, file_cfg, "strategy", Strategy.WEIGHTED_MEDIAN.value)),
            alpha=float(_setting(args, file_cfg, "alpha", 0.30)),
            similarity_threshold=float(_setting(args, file_cfg, "similarity_threshold", 0.0)),
            explanation_strategy=RankingStrategy(
                _setting(
                    args, file_cfg, "explanation_strategy", RankingStrategy.CONTEXT_FREQUENCY.value
                )
            ),
            k=int(_setting(args, file_cfg, "k", 10)),
            provider=provider,
            allow_degrade=bool(_setting(args, file_cfg, "allow_degrade", False)),
            cache_dir=_setting(args, file_cfg, "cache_dir", None),
        )
    except ValueError as exc:
        raise InputError(f"bad configuration value: {exc}") from exc


def load_passages_file(path: str) -> list[Passage]:
    """Read a passages file: a JSON list of passage objects, or an object
    with a "passages" list (optionally carrying the query). Missing ids and
    ranks are filled in file order."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"passages file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON in {path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("passages", [])
    if not isinstance(data, list):
        raise InputError(f"{path}: expected a list of passages")
    passages = []
    for i, item in enumerate(data, start=1):
        if isinstance(item, str):
            item = {"text": item}
        if not isinstance(item, dict) or "text" not in item:
            raise InputError(f"{path}: passage {i} must be an object with a 'text' field")
        passages.append(
            Passage(
                id=str(item.get("id", f"p{i}")),
                rank=int(item.get("rank", i)),
                text=item["text"],
                url=item.get("url", ""),
            )
        )
    return passages


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def cmd_stagewise(args: argparse.Namespace, command: str) -> int:
    config = resolve_config(args)
    passages = load_passages_file(args.passages)
    package = run_pipeline(
        args.query,
        passages,
        config,
        with_context=command in ("contextualize", "pipeline"),
        with_instances=command in ("explain", "pipeline"),
    )
    _emit(canonical_dumps(package_to_dict(package)))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    try:
        ks = [int(k) for k in str(args.ks).split(",") if k.strip()]
    except ValueError as exc:
        raise InputError(f"bad --ks value {args.ks!r}") from exc
    records = load(args.dataset)
    provider = build_provider(config)

    preds: list[float | None] = []
    golds: list[float] = []
    rankings: list[list[str]] = []
    gold_instances: list[list[str]] = []
    for record in records:
        passages = record_passages(record)
        want_instances = record.gold_instances is not None
        try:
            package = run_pipeline(
                record.query,
                passages,
                config,
                provider=provider,
                with_context=False,
                with_instances=want_instances,
            )
        except UnusableStrategyError:
            package = run_pipeline(
                record.query, passages, config, provider=provider,
                with_context=False, with_instances=False,
            )
        if record.gold_count is not None:
            golds.append(record.gold_count.value)
            preds.append(package.prediction.value if package.prediction else None)
        if want_instances:
            items = package.instances.items if package.instances else ()
            rankings.append([c.surface for c in items])
            gold_instances.append(list(record.gold_instances))

    count_result = count_metrics(preds, golds) if golds else None
    instance_result = instance_metrics(rankings, gold_instances, ks) if gold_instances else None
    if args.table:
        _emit(metrics_report_table(count_result, instance_result, ks))
    else:
        report = {
            "count": count_result.to_dict() if count_result else None,
            "instances": instance_result.to_dict() if instance_result else None,
            "ks": sorted(set(ks)),
            "n_records": len(records),
        }
        _emit(canonical_dumps(report))
    return EXIT_OK


def cmd_label(args: argparse.Namespace) -> int:
    records = load(args.dataset)
    lines = [json.dumps({"format": "coquad.v1"})]
    for record in records:
        if record.gold_count is None:
            raise InputError(f"record {record.id!r} has no gold count; cannot label")
        data = record_to_dict(record)
        data["span_labels"] = [
            {
                "passage_id": sl.span.passage_id,
                "char_start": sl.span.char_start,
                "char_end": sl.span.char_end,
                "text": sl.span.text,
                "count": sl.quantity.value,
                "label": sl.label.value,
            }
            for sl in label_spans(record)
        ]
        lines.append(canonical_dumps(data, indent=None))
    output = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .serve import serve_forever

    config = resolve_config(args)
    serve_forever(args.host, args.port, config)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("COQEX_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("answer", "contextualize", "explain", "pipeline"):
            return cmd_stagewise(args, args.command)
        if args.command == "evaluate":
            return cmd_evaluate(args)
        if args.command == "label":
            return cmd_label(args)
        if args.command == "serve":
            return cmd_serve(args)
        parser.error(f"unknown command {args.command!r}")
    except (InputError, CorpusError, UnusableStrategyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # noqa: BLE001 - deliberate catch-all at the boundary
        logger.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
