"""Command-line surface and line-delimited record formats.

Subcommands: ``validate``, ``split``, ``score``, ``analyze``, ``strip``.

File schemas (UTF-8 JSON lines, one record per sentence):

* corpus:      ``{"novel_id", "sent_id", "annotated"}``
* pairs:       ``{"novel_id", "sent_id", "input", "output"}``
* predictions: ``{"novel_id", "sent_id", "input", "prediction"}``

Exit codes: 0 success, 1 domain/validation failure, 2 environment or I/O
failure.  All commands are deterministic given identical inputs and flags;
sentence output ordering is by (novel_id, sent_id).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import corefmark
from corefmark.coref_metrics import CONVENTIONS, MetricScores, score_standard_suite
from corefmark.dataset_builder import (
    NovelRecord,
    SplitConfig,
    SplitError,
    split,
    validate_corpus,
    write_split,
)
from corefmark.error_analysis import analyze_corpus
from corefmark.markup import MarkupParseError, parse_lenient
from corefmark.strict_eval import EvalReport, LengthGate, SentencePair, score_corpus

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 2

STRICT_COLUMNS = ["Ent. F1", "Coref. F1", "Average Edit Distance", "Exact String Match"]
STANDARD_COLUMNS = ["MUC", "B³", "CEAF_m", "CEAF_e", "BLANC", "LEA", "CoNLL avg."]


class RecordError(ValueError):
    """A data file line is not a valid record."""


class DomainError(ValueError):
    """Inputs are well-formed but violate a command's contract."""


@dataclass(frozen=True)
class CorpusRecord:
    novel_id: str
    sent_id: int
    annotated: str


@dataclass(frozen=True)
class PredictionRecord:
    novel_id: str
    sent_id: int
    input: str
    prediction: str


def _read_jsonl(path: str, required: tuple[str, ...]) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as err:
                raise RecordError(f"{path}:{lineno}: not valid JSON ({err})") from err
            missing = [key for key in required if key not in row]
            if missing:
                raise RecordError(f"{path}:{lineno}: missing fields {missing}")
            rows.append(row)
    return rows


def read_corpus(path: str) -> list[CorpusRecord]:
    return [
        CorpusRecord(str(r["novel_id"]), int(r["sent_id"]), str(r["annotated"]))
        for r in _read_jsonl(path, ("novel_id", "sent_id", "annotated"))
    ]


def read_predictions(path: str) -> list[PredictionRecord]:
    return [
        PredictionRecord(
            str(r["novel_id"]), int(r["sent_id"]), str(r["input"]), str(r["prediction"])
        )
        for r in _read_jsonl(path, ("novel_id", "sent_id", "input", "prediction"))
    ]


def group_novels(records: list[CorpusRecord]) -> list[NovelRecord]:
    """Bundle corpus rows per novel, preserving file order within each."""
    grouped: dict[str, list[tuple[int, str]]] = {}
    for r in records:
        grouped.setdefault(r.novel_id, []).append((r.sent_id, r.annotated))
    return [NovelRecord(novel_id, tuple(rows)) for novel_id, rows in grouped.items()]


def join_pairs(
    gold: list[CorpusRecord], predictions: list[PredictionRecord]
) -> list[tuple[CorpusRecord, SentencePair]]:
    """Join on (novel_id, sent_id); every key must appear on both sides."""
    gold_by_key = {(g.novel_id, g.sent_id): g for g in gold}
    pred_by_key = {(p.novel_id, p.sent_id): p for p in predictions}
    if len(gold_by_key) != len(gold):
        raise DomainError("gold corpus has duplicate (novel_id, sent_id) keys")
    if len(pred_by_key) != len(predictions):
        raise DomainError("prediction file has duplicate (novel_id, sent_id) keys")
    missing = sorted(set(gold_by_key) - set(pred_by_key))
    extra = sorted(set(pred_by_key) - set(gold_by_key))
    if missing or extra:
        raise DomainError(
            f"unmatched keys: {len(missing)} gold-only, {len(extra)} prediction-only "
            f"(first: {(missing + extra)[0]})"
        )
    out = []
    for key in sorted(gold_by_key):
        g, p = gold_by_key[key], pred_by_key[key]
        try:
            pair = SentencePair.from_strings(g.annotated, p.prediction)
        except MarkupParseError as err:
            raise DomainError(f"gold {key} does not parse: {err}") from err
        if p.input != pair.input_text:
            raise DomainError(
                f"prediction record {key} carries an input that does not match "
                "the gold sentence"
            )
        out.append((g, pair))
    return out


def render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    for row in rows:
        lines.append("  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def strict_table(report: EvalReport) -> str:
    row = [
        _fmt(report.entity_f1),
        _fmt(report.coref_f1),
        _fmt(report.mean_edit_distance),
        _fmt(report.exact_match_rate),
    ]
    return render_table(STRICT_COLUMNS, [row])


def standard_table(scores: MetricScores) -> str:
    row = [
        _fmt(scores.muc.f1),
        _fmt(scores.b3.f1),
        _fmt(scores.ceaf_m.f1),
        _fmt(scores.ceaf_e.f1),
        _fmt(scores.blanc.f1),
        _fmt(scores.lea.f1),
        _fmt(scores.conll_avg),
    ]
    return render_table(STANDARD_COLUMNS, [row])


def _report_header(gate: LengthGate) -> dict:
    return {
        "toolkit": {"name": "corefmark", "version": corefmark.__version__},
        "gate": gate.value,
        "conventions": CONVENTIONS,
    }


def cmd_validate(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus)
    novels = group_novels(records)
    violations = validate_corpus(novels, args.min_sentences)
    for v in violations:
        where = v.novel_id if v.sent_id is None else f"{v.novel_id}:{v.sent_id}"
        print(f"{where}: {v.kind.value}: {v.message}")
    print(f"{len(violations)} violations in {len(records)} sentences")
    return EXIT_OK if not violations else EXIT_FAILURE


def cmd_split(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus)
    novels = group_novels(records)
    withheld = tuple(args.withhold.split(",")) if args.withhold else None
    try:
        config = SplitConfig(
            withheld_novel_ids=withheld,
            withhold_count=args.withhold_count,
            train_per_novel=args.train_per_novel,
            val_per_novel=args.val_per_novel,
            min_sentences=args.min_sentences,
            seed=args.seed,
        )
        result = split(novels, config)
    except SplitError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    paths = write_split(result, args.out_dir)
    print(
        f"train={len(result.train)} val={len(result.val)} test={len(result.test)} "
        f"withheld={','.join(result.manifest.withheld)}"
    )
    print(f"manifest {result.manifest.content_hash[:16]} -> {paths['manifest']}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    gate = LengthGate(args.gate)
    joined = join_pairs(read_corpus(args.gold), read_predictions(args.predictions))
    pairs = [pair for _, pair in joined]
    document = _report_header(gate)
    document["suite"] = args.suite
    document["n_sentences"] = len(pairs)
    if args.suite in ("strict", "all"):
        report = score_corpus(pairs, gate)
        strict_doc = report.to_dict()
        for entry, (record, _) in zip(strict_doc["per_sentence"], joined):
            entry["novel_id"] = record.novel_id
            entry["sent_id"] = record.sent_id
        document["strict"] = strict_doc
        print(strict_table(report))
    if args.suite in ("standard", "all"):
        scores = score_standard_suite(pairs, gate)
        document["standard"] = scores.to_dict()
        if args.suite == "all":
            print()
        print(standard_table(scores))
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(document, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    joined = join_pairs(read_corpus(args.gold), read_predictions(args.predictions))
    report = analyze_corpus(
        [pair for _, pair in joined],
        min_repeat_len=args.min_repeat_len,
        min_repeat_count=args.min_repeat_count,
    )
    print(render_table(
        ["Label", "Count"],
        [[label, str(count)] for label, count in report.histogram],
    ))
    if report.replacement_table:
        print()
        print(render_table(
            ["Original", "Substituted", "Count"],
            [[o, s, str(c)] for o, s, c in report.replacement_table[:args.top]],
        ))
    if report.hallucinations:
        print()
        for index, tail in report.hallucinations:
            record = joined[index][0]
            kind = "periodic" if tail.is_periodic else "aperiodic"
            print(
                f"{record.novel_id}:{record.sent_id}: {kind} tail "
                f"({len(tail.tail)} chars)"
            )
    if args.json_out:
        document = _report_header(LengthGate.TOKEN)
        document["analysis"] = report.to_dict()
        document["analysis"]["keys"] = [
            {"novel_id": r.novel_id, "sent_id": r.sent_id} for r, _ in joined
        ]
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(document, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_strip(args: argparse.Namespace) -> int:
    n_issues = 0
    with open(args.input, encoding="utf-8") as src, open(
        args.output, "w", encoding="utf-8"
    ) as dst:
        for lineno, line in enumerate(src, start=1):
            text = line.rstrip("\n")
            sentence, issues = parse_lenient(text)
            if issues:
                n_issues += len(issues)
                for issue in issues:
                    print(
                        f"{args.input}:{lineno}: {issue.kind.value}: {issue.message}",
                        file=sys.stderr,
                    )
            dst.write(sentence.clean_text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corefmark",
        description="Inline coreference markup tooling: validate, split, score, analyze, strip.",
    )
    parser.add_argument("--version", action="version", version=corefmark.__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a gold corpus file")
    p.add_argument("corpus")
    p.add_argument("--min-sentences", type=int, default=50)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("split", help="build train/val/test pair files")
    p.add_argument("corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--withhold", default=None, metavar="ID,ID,...")
    p.add_argument("--withhold-count", type=int, default=5)
    p.add_argument("--train-per-novel", type=int, default=40)
    p.add_argument("--val-per-novel", type=int, default=2)
    p.add_argument("--min-sentences", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("score", help="score predictions against gold")
    p.add_argument("gold")
    p.add_argument("predictions")
    p.add_argument("--suite", choices=("strict", "standard", "all"), default="all")
    p.add_argument("--gate", choices=("char", "token"), default="char")
    p.add_argument("--json-out", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("analyze", help="failure taxonomy and replacement tables")
    p.add_argument("gold")
    p.add_argument("predictions")
    p.add_argument("--min-repeat-len", type=int, default=3)
    p.add_argument("--min-repeat-count", type=int, default=3)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--json-out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("strip", help="remove annotation from a text file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_strip)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RecordError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, MarkupParseError, SplitError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
