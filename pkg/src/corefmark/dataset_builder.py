"""Deterministic train/validation/test splits over annotated novels.

Policy: novels with fewer than ``min_sentences`` annotated sentences are
excluded; a fixed set of novels is withheld whole into the test split; from
every other eligible novel a seeded pseudo-random sample of
``train_per_novel`` sentences goes to train and ``val_per_novel`` to
validation, the remainder to test.  Identical inputs and seed always produce
byte-identical manifests; the per-novel RNG is keyed by (seed, novel_id) so
membership never depends on corpus order.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import random
from dataclasses import dataclass, field

from corefmark.markup import (
    MarkupParseError,
    parse_strict,
    strip_markup,
)


class SplitError(ValueError):
    """Corpus or configuration cannot produce the requested split."""


@dataclass(frozen=True)
class NovelRecord:
    """One novel's annotated sentences, keyed by ascending sentence id."""

    novel_id: str
    sentences: tuple[tuple[int, str], ...]

    @property
    def sent_ids(self) -> list[int]:
        return [sid for sid, _ in self.sentences]


@dataclass(frozen=True)
class SplitConfig:
    withheld_novel_ids: tuple[str, ...] | None = None
    withhold_count: int = 5
    train_per_novel: int = 40
    val_per_novel: int = 2
    min_sentences: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.train_per_novel < 1 or self.val_per_novel < 0:
            raise SplitError("per-novel sample sizes must be positive")
        # Guarantee every eligible novel leaves at least 8 test sentences.
        if self.train_per_novel + self.val_per_novel + 8 > self.min_sentences:
            raise SplitError(
                f"train_per_novel + val_per_novel + 8 must be <= min_sentences "
                f"({self.train_per_novel} + {self.val_per_novel} + 8 > "
                f"{self.min_sentences})"
            )

    def to_dict(self) -> dict:
        return {
            "withheld_novel_ids": list(self.withheld_novel_ids)
            if self.withheld_novel_ids is not None
            else None,
            "withhold_count": self.withhold_count,
            "train_per_novel": self.train_per_novel,
            "val_per_novel": self.val_per_novel,
            "min_sentences": self.min_sentences,
            "seed": self.seed,
        }


class ViolationKind(enum.Enum):
    PARSE_ERROR = "parse_error"
    DUPLICATE_SENT_ID = "duplicate_sent_id"
    UNSORTED_SENT_ID = "unsorted_sent_id"
    CLUSTER_ID_CONVENTION = "cluster_id_convention"
    DUPLICATE_SPAN = "duplicate_span"
    UNSUPPORTED_LITERAL = "unsupported_literal"
    SMALL_NOVEL = "excluded_small_novel"


@dataclass(frozen=True)
class Violation:
    novel_id: str
    sent_id: int | None
    kind: ViolationKind
    message: str


def _check_sentence(novel_id: str, sent_id: int, annotated: str) -> list[Violation]:
    try:
        sentence = parse_strict(annotated)
    except MarkupParseError as err:
        return [
            Violation(
                novel_id,
                sent_id,
                ViolationKind.PARSE_ERROR,
                f"{err.issue.kind.value} at {err.issue.position}: {err.issue.message}",
            )
        ]
    out: list[Violation] = []
    # Cluster ids must be 1-based and assigned in order of first appearance.
    ids = sentence.cluster_ids()
    if ids != list(range(1, len(ids) + 1)):
        out.append(
            Violation(
                novel_id,
                sent_id,
                ViolationKind.CLUSTER_ID_CONVENTION,
                f"cluster ids appear as {ids}, expected 1..{len(ids)} in order",
            )
        )
    seen_spans = set()
    for m in sentence.mentions:
        if m.key in seen_spans:
            out.append(
                Violation(
                    novel_id,
                    sent_id,
                    ViolationKind.DUPLICATE_SPAN,
                    f"span [{m.start}, {m.end}) annotated more than once",
                )
            )
        seen_spans.add(m.key)
    for literal in ("[", "]", ": "):
        if literal in sentence.clean_text:
            out.append(
                Violation(
                    novel_id,
                    sent_id,
                    ViolationKind.UNSUPPORTED_LITERAL,
                    f"clean text contains literal {literal!r}, unsupported in v1",
                )
            )
            break
    return out


def validate_corpus(
    records: list[NovelRecord], min_sentences: int = 50
) -> list[Violation]:
    """Report every corpus problem; never raises."""
    violations: list[Violation] = []
    for record in records:
        seen: set[int] = set()
        previous: int | None = None
        for sent_id, annotated in record.sentences:
            if sent_id in seen:
                violations.append(
                    Violation(
                        record.novel_id,
                        sent_id,
                        ViolationKind.DUPLICATE_SENT_ID,
                        "sentence id repeats within the novel",
                    )
                )
            elif previous is not None and sent_id < previous:
                violations.append(
                    Violation(
                        record.novel_id,
                        sent_id,
                        ViolationKind.UNSORTED_SENT_ID,
                        "sentence ids must ascend",
                    )
                )
            seen.add(sent_id)
            previous = sent_id
            violations.extend(_check_sentence(record.novel_id, sent_id, annotated))
        if len(record.sentences) < min_sentences:
            violations.append(
                Violation(
                    record.novel_id,
                    None,
                    ViolationKind.SMALL_NOVEL,
                    f"{len(record.sentences)} sentences < {min_sentences}; "
                    "novel will be excluded",
                )
            )
    return violations


@dataclass(frozen=True)
class PairRecord:
    """One fine-tuning example: plain input sentence and annotated output."""

    novel_id: str
    sent_id: int
    input: str
    output: str

    def to_dict(self) -> dict:
        return {
            "novel_id": self.novel_id,
            "sent_id": self.sent_id,
            "input": self.input,
            "output": self.output,
        }


@dataclass(frozen=True)
class ManifestRow:
    novel_id: str
    sent_id: int
    split: str | None  # train / val / test; None when excluded
    reason: str

    def to_dict(self) -> dict:
        return {
            "novel_id": self.novel_id,
            "sent_id": self.sent_id,
            "split": self.split,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class SplitManifest:
    config: dict
    withheld: tuple[str, ...]
    rows: tuple[ManifestRow, ...] = field(repr=False)
    content_hash: str = ""

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "withheld": list(self.withheld),
            "content_hash": self.content_hash,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


@dataclass(frozen=True)
class SplitResult:
    train: tuple[PairRecord, ...]
    val: tuple[PairRecord, ...]
    test: tuple[PairRecord, ...]
    manifest: SplitManifest


def _novel_rng(seed: int, novel_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{novel_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _manifest_hash(config: dict, withheld: list[str], rows: list[ManifestRow]) -> str:
    payload = json.dumps(
        {
            "config": config,
            "withheld": withheld,
            "rows": [r.to_dict() for r in rows],
        },
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def split(records: list[NovelRecord], config: SplitConfig) -> SplitResult:
    """Assign every sentence to train/val/test per the split policy."""
    eligible = {
        r.novel_id: r for r in records if len(r.sentences) >= config.min_sentences
    }
    excluded = [r for r in records if r.novel_id not in eligible]

    if config.withheld_novel_ids is not None:
        withheld = list(config.withheld_novel_ids)
        unknown = [n for n in withheld if n not in eligible]
        if unknown:
            raise SplitError(f"withheld novels not eligible or unknown: {unknown}")
    else:
        by_size = sorted(
            eligible.values(), key=lambda r: (-len(r.sentences), r.novel_id)
        )
        withheld = [r.novel_id for r in by_size[: config.withhold_count]]
    if len(eligible) < len(withheld) + 1:
        raise SplitError(
            f"need at least {len(withheld) + 1} eligible novels, have {len(eligible)}"
        )

    train: list[PairRecord] = []
    val: list[PairRecord] = []
    test: list[PairRecord] = []
    rows: list[ManifestRow] = []
    withheld_set = set(withheld)

    def pair(record: NovelRecord, index: int) -> PairRecord:
        sent_id, annotated = record.sentences[index]
        return PairRecord(
            record.novel_id, sent_id, strip_markup(annotated), annotated
        )

    for record in sorted(records, key=lambda r: r.novel_id):
        n = len(record.sentences)
        if record.novel_id not in eligible:
            for sent_id, _ in record.sentences:
                rows.append(
                    ManifestRow(
                        record.novel_id, sent_id, None,
                        ViolationKind.SMALL_NOVEL.value,
                    )
                )
            continue
        if record.novel_id in withheld_set:
            for i in range(n):
                test.append(pair(record, i))
                rows.append(
                    ManifestRow(
                        record.novel_id, record.sentences[i][0],
                        "test", "withheld_novel",
                    )
                )
            continue
        wanted = config.train_per_novel + config.val_per_novel
        if n < wanted:
            raise SplitError(
                f"novel {record.novel_id} has {n} sentences, needs {wanted}"
            )
        rng = _novel_rng(config.seed, record.novel_id)
        chosen = rng.sample(range(n), wanted)
        train_idx = set(chosen[: config.train_per_novel])
        val_idx = set(chosen[config.train_per_novel:])
        for i in range(n):
            if i in train_idx:
                split_name, reason = "train", "sampled_train"
                train.append(pair(record, i))
            elif i in val_idx:
                split_name, reason = "val", "sampled_val"
                val.append(pair(record, i))
            else:
                split_name, reason = "test", "remainder_test"
                test.append(pair(record, i))
            rows.append(
                ManifestRow(
                    record.novel_id, record.sentences[i][0], split_name, reason
                )
            )

    config_echo = config.to_dict()
    manifest = SplitManifest(
        config=config_echo,
        withheld=tuple(sorted(withheld)),
        rows=tuple(rows),
        content_hash=_manifest_hash(config_echo, sorted(withheld), rows),
    )

    def key(p: PairRecord) -> tuple[str, int]:
        return (p.novel_id, p.sent_id)

    return SplitResult(
        train=tuple(sorted(train, key=key)),
        val=tuple(sorted(val, key=key)),
        test=tuple(sorted(test, key=key)),
        manifest=manifest,
    )


def emit_pairs(pairs: tuple[PairRecord, ...], path) -> None:
    """Write pair records as UTF-8 JSON lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in pairs:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")


def write_split(result: SplitResult, out_dir) -> dict[str, str]:
    """Write train/val/test pair files plus the manifest; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for name, pairs in (
        ("train", result.train),
        ("val", result.val),
        ("test", result.test),
    ):
        path = os.path.join(out_dir, f"{name}.jsonl")
        emit_pairs(pairs, path)
        paths[name] = path
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(result.manifest.to_json())
    paths["manifest"] = manifest_path
    return paths
