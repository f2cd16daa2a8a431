"""Command-line entry point exposing the pipeline as subcommands."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import kbstore
from .config import ConfigError, PipelineConfig, load_config
from .curation import (
    read_curated_tsv,
    run_curation,
    write_audit_log,
    write_curated_tsv,
)
from .curation.wordnet import LexiconLoadError, WordNetLexicon
from .evaluation import (
    AdapterError,
    QuestionCategory,
    ResponseOption,
    ResponseTally,
    aggregate_option_fractions,
    aggregate_unlikely_reasons,
    generate_questions,
    load_overlay_tsv,
    load_reference_tsv,
    reports,
    score_comparison,
    tally_credits,
)
from .kbmodel import KbValidationError, print_material_expr, MaterialExpr
from .llmclient import CacheMissError, LlmClient, LlmError, Mode, TranscriptStore
from .miner import FewShotMiner, GrammarError, ZeroShotMiner, mine_entities

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_LLM = 3
EXIT_GRAMMAR = 4


def _build_client(config: PipelineConfig) -> LlmClient:
    store = TranscriptStore(config.transcripts)
    return LlmClient(
        config.llm_mode,
        store,
        base_url=config.base_url,
        rpm=config.rpm,
    )


def _read_entity_list(path: Path) -> list[str]:
    """Entity names from a plain list or a curated TSV (title column)."""
    names = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        names.append(fields[1] if len(fields) > 1 and fields[1] else fields[0])
    return names


def _read_lines(path: Path) -> list[str]:
    return [
        line.strip()
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]


def cmd_curate(args: argparse.Namespace, config: PipelineConfig) -> int:
    dump = config.require_path("dump")
    lexicon = WordNetLexicon.load(config.require_path("wordnet_dir"))
    keywords = _read_lines(config.require_path("keywords"))
    excluded = _read_lines(config.require_path("excluded"))
    if not config.roots:
        raise ConfigError("config value 'roots' is required for curate")
    client = _build_client(config)
    result = run_curation(
        dump,
        config.roots,
        keywords=keywords,
        excluded=excluded,
        lexicon=lexicon,
        client=client,
        model_id=config.model_id,
        batch_size=config.batch_size,
    )
    output = Path(args.output)
    count = write_curated_tsv(result.records, output)
    reports_dir = Path(config.reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    write_audit_log(result.records, reports_dir / "curation_audit.jsonl")
    print(f"curated {count} of {len(result.records)} candidates -> {output}")
    if args.strict and result.report.malformed:
        print(f"{result.report.malformed} malformed dump line(s)", file=sys.stderr)
        return EXIT_GRAMMAR
    return EXIT_OK


def cmd_mine(args: argparse.Namespace, config: PipelineConfig) -> int:
    entities = _read_entity_list(Path(args.entities))
    client = _build_client(config)
    if args.strategy == "fewshot":
        miner = FewShotMiner(client, config.model_id)
    else:
        miner = ZeroShotMiner(client, config.model_id, config.max_prompts)
    kb_dir = Path(config.kb_dir) / args.strategy
    reports_dir = Path(config.reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    summary = mine_entities(
        entities,
        miner.mine,
        kb_dir=kb_dir,
        quarantine_dir=config.quarantine_dir,
        audit_path=reports_dir / f"mining_{args.strategy}.jsonl",
        jobs=config.jobs,
    )
    print(
        f"mined {summary.mined}/{len(entities)} entities -> {kb_dir} "
        f"({summary.quarantined} quarantined, {summary.flagged} flagged)"
    )
    if args.strict and (summary.quarantined or summary.flagged):
        return EXIT_GRAMMAR
    return EXIT_OK


def _load_repo(kb_dir: str) -> kbstore.Repository:
    directory = Path(kb_dir)
    if (directory / "manifest.json").is_file():
        return kbstore.load(directory)
    files = sorted(directory.glob("*.json"))
    if not files:
        raise ConfigError(f"no kb documents under {directory}")
    return kbstore.load_entity_files(files)


def cmd_kb_stats(args: argparse.Namespace, config: PipelineConfig) -> int:
    repo = _load_repo(args.kb or config.kb_dir)
    stats = kbstore.compute_stats(repo)
    reports_dir = Path(config.reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    (reports_dir / "kb_stats.json").write_text(
        json.dumps(stats.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(kbstore.format_stats(stats))
    return EXIT_OK


def cmd_eval_recall(args: argparse.Namespace, config: PipelineConfig) -> int:
    repo = _load_repo(args.kb or config.kb_dir)
    references = load_reference_tsv(args.reference)
    overlay = load_overlay_tsv(args.credits) if args.credits else None
    aliases = None
    if args.aliases:
        aliases = dict(
            line.split("\t", 1)
            for line in _read_lines(Path(args.aliases))
            if "\t" in line
        )
    by_dataset: dict[str, list] = {}
    for item in references:
        by_dataset.setdefault(item.dataset.value, []).append(item)
    tallies = {
        dataset: tally_credits(items, repo, overlay, aliases)
        for dataset, items in sorted(by_dataset.items())
    }
    report = reports.recall_report(tallies)
    reports_dir = Path(config.reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    (reports_dir / "recall.json").write_text(
        json.dumps(report, indent=2) + "\n", encoding="utf-8"
    )
    print(reports.format_recall_report(report))
    return EXIT_OK


def cmd_gen_questions(args: argparse.Namespace, config: PipelineConfig) -> int:
    repo = _load_repo(args.kb or config.kb_dir)
    sample = _read_lines(Path(args.sample))
    batch = generate_questions(
        repo,
        QuestionCategory(args.category),
        sample,
        cap=args.cap if args.cap is not None else config.question_cap,
        seed=args.seed if args.seed is not None else config.seed,
    )
    output = Path(args.output)
    batch.write_csv(output)
    print(f"{len(batch.questions)} questions -> {output}")
    return EXIT_OK


def _read_response_rows(path: Path) -> list[tuple[str, str, str, str | None]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        required = {"question_id", "worker_id", "option"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise AdapterError(f"{path}: need columns question_id,worker_id,option")
        for row in reader:
            rows.append(
                (
                    row["question_id"],
                    row["worker_id"],
                    row["option"],
                    row.get("reason_code") or None,
                )
            )
    return rows


def cmd_aggregate(args: argparse.Namespace, config: PipelineConfig) -> int:
    tally = ResponseTally.from_rows(_read_response_rows(Path(args.responses)))
    fractions = aggregate_option_fractions(tally)
    report = reports.fractions_report(fractions, tally.question_count)
    if args.reasons:
        report["unlikely_reasons"] = aggregate_unlikely_reasons(tally)
    reports_dir = Path(config.reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    (reports_dir / "aggregate.json").write_text(
        json.dumps(report, indent=2) + "\n", encoding="utf-8"
    )
    print(reports.format_fractions_report(report))
    if args.reasons and report.get("unlikely_reasons"):
        print("Reasons among unlikely responses:")
        for reason, value in report["unlikely_reasons"].items():
            print(f"  {reason}: {value:.2f}")
    return EXIT_OK


def _read_comparison_counts(path: Path) -> dict[ResponseOption, int]:
    counts: dict[ResponseOption, int] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        required = {"section", "criterion", "label", "count"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise AdapterError(f"{path}: need columns section,criterion,label,count")
        for row in reader:
            option = ResponseOption(
                row["section"].strip(), row["criterion"].strip(), row["label"].strip()
            )
            counts[option] = counts.get(option, 0) + int(row["count"])
    return counts


def cmd_compare(args: argparse.Namespace, config: PipelineConfig) -> int:
    weights = None
    if args.weights:
        raw = json.loads(Path(args.weights).read_text(encoding="utf-8"))
        weights = {ResponseOption.from_key(key): value for key, value in raw.items()}
    scores = {}
    for spec in args.responses:
        label, _, path = spec.partition("=")
        if not path:
            label, path = Path(spec).stem, spec
        counts = _read_comparison_counts(Path(path))
        scores[label] = score_comparison(counts, weights)
    report = reports.comparison_report(scores)
    reports_dir = Path(config.reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    (reports_dir / "comparison.json").write_text(
        json.dumps(report, indent=2) + "\n", encoding="utf-8"
    )
    print(reports.format_comparison_report(report))
    return EXIT_OK


def cmd_query(args: argparse.Namespace, config: PipelineConfig) -> int:
    repo = _load_repo(args.kb or config.kb_dir)
    if args.parts:
        question = kbstore.Question.PARTS
    elif args.subtypes:
        question = kbstore.Question.SUBTYPES
    else:
        question = kbstore.Question.MATERIALS
    answers = kbstore.query(repo, args.name, question)
    show_paths = len(answers) > 1
    for answer in answers:
        prefix = " > ".join(answer.path) + ": " if show_paths else ""
        if question is kbstore.Question.PARTS:
            print(prefix + (", ".join(answer.parts) or "(no parts)"))
        elif question is kbstore.Question.SUBTYPES:
            print(prefix + (", ".join(answer.subtypes) or "(no subtypes)"))
        else:
            if answer.per_part:
                for part_name, expr in answer.per_part:
                    rendered = (
                        print_material_expr(expr)
                        if isinstance(expr, MaterialExpr)
                        else ("entity" if expr is not None else "(unknown)")
                    )
                    print(f"{prefix}{part_name}: {rendered}")
            else:
                expr = answer.materials
                rendered = (
                    print_material_expr(expr)
                    if isinstance(expr, MaterialExpr)
                    else ("entity" if expr is not None else "(unknown)")
                )
                print(prefix + rendered)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="composition-miner",
        description="Mine and evaluate part/material knowledge about "
        "common physical objects.",
    )
    parser.add_argument("--config", help="path to the key = value config file")
    parser.add_argument("--verbose", action="store_true")
    common_overrides = {
        "--mode": dict(choices=["live", "record", "replay"], dest="mode"),
        "--transcripts": dict(dest="transcripts"),
        "--kb-dir": dict(dest="kb_dir"),
        "--reports-dir": dict(dest="reports_dir"),
        "--model-id": dict(dest="model_id"),
        "--jobs": dict(dest="jobs", type=int),
        "--seed": dict(dest="seed", type=int),
    }
    for flag, kwargs in common_overrides.items():
        parser.add_argument(flag, **kwargs)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="build the curated entity list")
    p.add_argument("--output", default="curated.tsv")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("mine", help="mine entity trees")
    p.add_argument("--strategy", choices=["fewshot", "zeroshot"], required=True)
    p.add_argument("--entities", required=True, help="curated TSV or name list")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("kb-stats", help="repository statistics")
    p.add_argument("--kb", help="kb directory (defaults to config kb_dir)")
    p.set_defaults(func=cmd_kb_stats)

    p = sub.add_parser("eval-recall", help="credit-weighted reference recall")
    p.add_argument("--kb")
    p.add_argument("--reference", required=True, help="reference items TSV")
    p.add_argument("--credits", help="adjudication overlay TSV")
    p.add_argument("--aliases", help="name alias TSV")
    p.set_defaults(func=cmd_eval_recall)

    p = sub.add_parser("gen-questions", help="emit a crowd-question batch")
    p.add_argument("--kb")
    p.add_argument(
        "--category",
        choices=[c.value for c in QuestionCategory],
        required=True,
    )
    p.add_argument("--sample", required=True, help="entity list file")
    p.add_argument("--cap", type=int)
    p.add_argument("--output", default="questions.csv")
    p.set_defaults(func=cmd_gen_questions)

    p = sub.add_parser("aggregate", help="aggregate intrinsic responses")
    p.add_argument("--responses", required=True, help="responses CSV")
    p.add_argument("--reasons", action="store_true")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("compare", help="score the dataset comparison")
    p.add_argument(
        "--responses",
        nargs="+",
        required=True,
        help="count CSVs, optionally label=path",
    )
    p.add_argument("--weights", help="JSON of option-key to weight")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("query", help="look a name up in the kb")
    p.add_argument("name")
    p.add_argument("--kb")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--parts", action="store_true")
    group.add_argument("--materials", action="store_true")
    group.add_argument("--subtypes", action="store_true")
    p.set_defaults(func=cmd_query)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "mode",
            "transcripts",
            "kb_dir",
            "reports_dir",
            "model_id",
            "jobs",
            "seed",
        )
    }
    try:
        config = load_config(args.config, overrides)
        return args.func(args, config)
    except (ConfigError, AdapterError, FileNotFoundError, LexiconLoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (kbstore.KbStoreError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CacheMissError, LlmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LLM
    except (GrammarError, KbValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR


if __name__ == "__main__":
    sys.exit(main())
