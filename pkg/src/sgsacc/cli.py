"""Command-line entry point.

Subcommands: evaluate, validate, rerank, robustness, build-refs. Options can
come from a JSON config file (--config) with command-line flags taking
precedence. Exit codes: 0 success, 2 unreadable or malformed input, 3 NLI
backend failure after retries.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from .config import RunConfig, load_config
from .data import (
    build_value_pools,
    generation_to_record,
    group_by_instance,
    index_generations,
    parse_generations,
    parse_instances,
    parse_schemas,
)
from .errors import DataError, NliError, ProtocolError, SchemaError, SgsaccError, TransportError
from .evaluator import run_evaluation, validate_instance
from .nli import create_backend
from .references import build_instance_references
from .reporting import (
    atomic_write_json,
    atomic_write_jsonl,
    result_record,
    robustness_table,
    summary_table,
)
from .reranker import fidelity_score, pick_best
from .robustness import run_robustness

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BACKEND = 3


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--schemas", help="schema catalog file")
    parser.add_argument("--instances", help="instance file")
    parser.add_argument(
        "--generations",
        action="append",
        help="generations file (repeatable, one per system)",
    )
    parser.add_argument("--nli", help="NLI backend: 'mock', 'remote' or a base URL")
    parser.add_argument(
        "--unseen-domain",
        action="append",
        dest="unseen_domains",
        help="domain treated as unseen (repeatable)",
    )
    parser.add_argument(
        "--no-validation",
        action="store_const",
        const=False,
        dest="validation",
        help="skip the ground-truth validation filter",
    )
    parser.add_argument(
        "--no-augmentation",
        action="store_const",
        const=False,
        dest="augmentation",
        help="never augment premises with dialogue context",
    )
    parser.add_argument("--negatives-per-slot", type=int, help="negatives sampled per non-categorical slot")
    parser.add_argument("--seed", type=int, help="seed for negative sampling")
    parser.add_argument("--output-dir", help="directory for report files")
    parser.add_argument("--workers", type=int, help="parallel instance workers")
    parser.add_argument(
        "--ser-exact-case",
        action="store_const",
        const=True,
        dest="ser_exact_case",
        help="match slot values case-sensitively for SER",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgsacc",
        description="Schema-guided faithfulness evaluation for dialogue generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="score generations and report metrics")
    _add_common_options(evaluate)
    evaluate.set_defaults(func=cmd_evaluate)

    validate = sub.add_parser("validate", help="run only the validation filter")
    _add_common_options(validate)
    validate.set_defaults(func=cmd_validate)

    rerank = sub.add_parser("rerank", help="pick the most faithful generation per instance")
    _add_common_options(rerank)
    rerank.set_defaults(func=cmd_rerank)

    robustness = sub.add_parser("robustness", help="score reference rules under schema variants")
    _add_common_options(robustness)
    robustness.add_argument(
        "--schema-variant",
        action="append",
        dest="schema_variants",
        help="schema variant file (repeatable); variant id is the file stem",
    )
    robustness.set_defaults(func=cmd_robustness)

    build_refs = sub.add_parser("build-refs", help="dump candidate and negative references")
    _add_common_options(build_refs)
    build_refs.set_defaults(func=cmd_build_refs)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "schemas",
            "instances",
            "generations",
            "nli",
            "unseen_domains",
            "validation",
            "augmentation",
            "negatives_per_slot",
            "seed",
            "output_dir",
            "workers",
            "ser_exact_case",
            "schema_variants",
        )
    }
    return load_config(args.config, overrides)


def _load_dataset(config: RunConfig):
    if not config.schemas or not config.instances:
        raise DataError("both --schemas and --instances are required")
    catalog = parse_schemas(config.schemas)
    instances = parse_instances(config.instances, catalog, config.unseen_domains)
    return catalog, instances


def _load_generations(config: RunConfig, known_ids: set[str]):
    if not config.generations:
        raise DataError("at least one --generations file is required")
    candidates = []
    for path in config.generations:
        candidates.extend(parse_generations(path, known_ids))
    return candidates


def _system_filename(system_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", system_id)


def cmd_evaluate(config: RunConfig) -> int:
    catalog, instances = _load_dataset(config)
    known_ids = {i.instance_id for i in instances}
    by_system = index_generations(_load_generations(config, known_ids))
    backend = create_backend(config.nli)
    run = run_evaluation(
        instances,
        catalog,
        by_system,
        backend,
        validation=config.validation,
        augment=config.augmentation,
        max_negatives=config.negatives_per_slot,
        seed=config.seed,
        workers=config.workers,
        ser_exact_case=config.ser_exact_case,
    )
    meta = config.report_meta(backend.name)
    out = Path(config.output_dir)
    reports = [run.systems[s].report for s in sorted(run.systems)]
    atomic_write_json(
        out / "summary.json",
        {
            "meta": meta,
            "excluded_count": run.excluded_count,
            "systems": [r.to_dict() for r in reports],
        },
    )
    for system_id in sorted(run.systems):
        evaluation = run.systems[system_id]
        records = [{"meta": meta}]
        records += [
            result_record(
                result,
                evaluation.slot_error_flags[result.instance_id],
                evaluation.slot_error_details[result.instance_id],
            )
            for result in evaluation.results
        ]
        atomic_write_jsonl(out / f"details_{_system_filename(system_id)}.jsonl", records)
    print(summary_table(reports))
    print(f"reports written to {out}")
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    catalog, instances = _load_dataset(config)
    pools = build_value_pools(instances, catalog)
    backend = create_backend(config.nli)
    outcomes = []
    for instance in sorted(instances, key=lambda i: i.instance_id):
        refs = build_instance_references(
            instance, catalog, pools, max_negatives=config.negatives_per_slot, seed=config.seed
        )
        outcomes.append(validate_instance(instance, refs, backend, augment=config.augmentation))
    failed = sum(1 for outcome in outcomes if not outcome.passed)
    rate = 100.0 * failed / len(outcomes) if outcomes else 0.0
    atomic_write_json(
        Path(config.output_dir) / "validation.json",
        {
            "meta": config.report_meta(backend.name),
            "total": len(outcomes),
            "failed": failed,
            "exclusion_rate": rate,
            "outcomes": [
                {
                    "instance_id": o.instance_id,
                    "passed": o.passed,
                    "failed_positive": o.failed_positive,
                    "failed_negative": o.failed_negative,
                }
                for o in outcomes
            ],
        },
    )
    print(f"validation: {failed}/{len(outcomes)} instances excluded ({rate:.1f}%)")
    return EXIT_OK


def cmd_rerank(config: RunConfig) -> int:
    catalog, instances = _load_dataset(config)
    known_ids = {i.instance_id for i in instances}
    candidates = _load_generations(config, known_ids)
    grouped = group_by_instance(candidates)
    pools = build_value_pools(instances, catalog)
    backend = create_backend(config.nli)
    instances_by_id = {i.instance_id: i for i in instances}
    records = []
    winner_counts: dict[str, int] = {}
    for instance_id in sorted(grouped):
        instance = instances_by_id[instance_id]
        refs = build_instance_references(
            instance, catalog, pools, max_negatives=config.negatives_per_slot, seed=config.seed
        )
        group = grouped[instance_id]
        scores = [
            fidelity_score(c, instance, refs, backend, augment=config.augmentation)
            for c in group
        ]
        winner = pick_best(group, scores)
        winner_counts[winner.system_id] = winner_counts.get(winner.system_id, 0) + 1
        records.append(
            generation_to_record(
                winner,
                system_id="ensemble",
                source_system=winner.system_id,
            )
        )
    out = Path(config.output_dir)
    atomic_write_jsonl(out / "ensemble.jsonl", records)
    atomic_write_json(
        out / "rerank_summary.json",
        {
            "meta": config.report_meta(backend.name),
            "instances": len(records),
            "wins_by_system": dict(sorted(winner_counts.items())),
        },
    )
    wins = ", ".join(f"{system}: {count}" for system, count in sorted(winner_counts.items()))
    print(f"reranked {len(records)} instances ({wins})")
    return EXIT_OK


def cmd_robustness(config: RunConfig) -> int:
    catalog, instances = _load_dataset(config)
    pools = build_value_pools(instances, catalog)
    backend = create_backend(config.nli)
    variants = list(config.schema_variants) or [config.schemas]
    reports = []
    for variant_path in variants:
        variant_catalog = parse_schemas(variant_path)
        reports.append(
            run_robustness(
                instances,
                variant_catalog,
                backend,
                variant_id=Path(variant_path).stem,
                value_pools=pools,
                max_negatives=config.negatives_per_slot,
                seed=config.seed,
                augment=config.augmentation,
            )
        )
    atomic_write_json(
        Path(config.output_dir) / "robustness.json",
        {
            "meta": config.report_meta(backend.name),
            "variants": [r.to_dict() for r in reports],
        },
    )
    print(robustness_table([r.formatted_row() for r in reports]))
    return EXIT_OK


def cmd_build_refs(config: RunConfig) -> int:
    catalog, instances = _load_dataset(config)
    pools = build_value_pools(instances, catalog)
    dump = {}
    for instance in sorted(instances, key=lambda i: i.instance_id):
        refs = build_instance_references(
            instance, catalog, pools, max_negatives=config.negatives_per_slot, seed=config.seed
        )
        dump[instance.instance_id] = [
            {
                "action_index": bundle.action_index,
                "candidates": [{"text": c.text, "rule_id": c.rule_id} for c in bundle.candidates],
                "negatives": [
                    {"text": n.text, "tampered_value": n.tampered_value}
                    for n in bundle.negatives
                ],
            }
            for bundle in refs
        ]
    path = Path(config.output_dir) / "references.json"
    atomic_write_json(
        path,
        {"meta": config.report_meta("none"), "instances": dump},
    )
    print(f"references written to {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return args.func(config)
    except (TransportError, ProtocolError) as exc:
        print(f"error: NLI backend failed: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (OSError, DataError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NliError as exc:
        print(f"error: NLI backend failed: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except SgsaccError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
