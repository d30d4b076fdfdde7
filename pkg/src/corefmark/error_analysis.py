"""Deterministic failure taxonomy and replacement mining for generations.

Positional word-replacement extraction (gated on equal token counts),
hallucinated-tail detection with periodic-repetition flagging, and a fixed
first-match failure taxonomy per sentence pair.

Tokenization is whitespace splitting with trailing commas, quotes and
sentence marks split off as their own tokens.  Trailing periods stay
attached so abbreviations ("Mr.") and final words ("skin.") survive as
single tokens, which is what replacement pairs are reported over.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from corefmark.markup import IssueKind
from corefmark.strict_eval import SentencePair, exact_match

_PEEL = set(",;!?\"'") | {"‘", "’", "“", "”"}

_BRACKET_ISSUES = {
    IssueKind.UNBALANCED_OPEN,
    IssueKind.UNBALANCED_CLOSE,
    IssueKind.MISSING_CLUSTER_ID,
    IssueKind.NON_INTEGER_CLUSTER_ID,
    IssueKind.EMPTY_MENTION,
    IssueKind.TRAILING_GARBAGE,
    IssueKind.DELIMITER_SPACING,
}


def tokenize(text: str) -> list[str]:
    """Whitespace tokens with trailing punctuation peeled off (periods kept)."""
    tokens: list[str] = []
    for chunk in text.split():
        peeled: list[str] = []
        while len(chunk) > 1 and chunk[-1] in _PEEL:
            peeled.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.append(chunk)
        tokens.extend(reversed(peeled))
    return tokens


@dataclass(frozen=True)
class Replacement:
    """One token swapped for another at the same position."""

    position: int
    original: str
    substituted: str

    def __post_init__(self) -> None:
        if self.original == self.substituted:
            raise ValueError("a replacement must change the token")


def extract_replacements(input_text: str, cleaned_output: str) -> list[Replacement]:
    """Positional token differences; requires equal token counts."""
    source = tokenize(input_text)
    target = tokenize(cleaned_output)
    if len(source) != len(target):
        raise ValueError(
            f"token counts differ ({len(source)} vs {len(target)}); "
            "positional comparison is meaningless"
        )
    return [
        Replacement(i, a, b)
        for i, (a, b) in enumerate(zip(source, target))
        if a != b
    ]


@dataclass(frozen=True)
class HallucinatedTail:
    """Text a model appended after faithfully copying its input."""

    tail: str
    repeated_unit: str | None

    @property
    def is_periodic(self) -> bool:
        return self.repeated_unit is not None


def _count_overlapping(text: str, unit: str) -> int:
    count = 0
    start = 0
    while True:
        i = text.find(unit, start)
        if i < 0:
            return count
        count += 1
        start = i + 1


def _repeated_unit(tail: str, min_len: int, min_count: int) -> str | None:
    grams = Counter(tail[i:i + min_len] for i in range(len(tail) - min_len + 1))
    frequent = [g for g, c in grams.items() if c >= min_count]
    if not frequent:
        return None
    unit = max(frequent, key=lambda g: (grams[g], g))
    # Greedily extend while some continuation still repeats often enough.
    while True:
        continuations: Counter = Counter()
        start = 0
        while True:
            i = tail.find(unit, start)
            if i < 0:
                break
            if i + len(unit) < len(tail):
                continuations[tail[i + len(unit)]] += 1
            start = i + 1
        viable = [ch for ch, c in continuations.items() if c >= min_count]
        if not viable:
            return unit
        unit += max(viable, key=lambda ch: (continuations[ch], ch))


def detect_hallucinated_tail(
    input_text: str,
    cleaned_output: str,
    min_repeat_len: int = 3,
    min_repeat_count: int = 3,
) -> HallucinatedTail | None:
    """The suffix appended after a faithful copy of the input, if any.

    Flags periodic repetition: a substring of length >= ``min_repeat_len``
    occurring >= ``min_repeat_count`` times in the suffix.
    """
    base = input_text.strip()
    out = cleaned_output.strip()
    if not base or len(out) <= len(base) or not out.startswith(base):
        return None
    tail = out[len(base):]
    return HallucinatedTail(tail, _repeated_unit(tail, min_repeat_len, min_repeat_count))


class FailureLabel(enum.Enum):
    EXACT = "Exact"
    ANNOTATION_ONLY_DIFF = "AnnotationOnlyDiff"
    WORD_SUBSTITUTION = "WordSubstitution"
    WORD_INSERTION_DELETION = "WordInsertionDeletion"
    HALLUCINATED_TAIL = "HallucinatedTail"
    BRACKET_MISMATCH = "BracketMismatch"
    TRUNCATION = "Truncation"
    OTHER = "Other"


@dataclass(frozen=True)
class Classification:
    label: FailureLabel
    evidence: str = ""


def classify(
    pair: SentencePair,
    min_repeat_len: int = 3,
    min_repeat_count: int = 3,
) -> Classification:
    """First matching label in the fixed taxonomy order; total and deterministic."""
    if exact_match(pair.gold_annotated, pair.prediction_raw):
        return Classification(FailureLabel.EXACT)

    input_cmp = pair.input_text.strip()
    clean_cmp = pair.prediction_clean.strip()
    if input_cmp == clean_cmp:
        return Classification(
            FailureLabel.ANNOTATION_ONLY_DIFF,
            "clean text replicated; annotations differ",
        )

    source = tokenize(input_cmp)
    target = tokenize(clean_cmp)
    if len(source) == len(target):
        replacements = [
            Replacement(i, a, b)
            for i, (a, b) in enumerate(zip(source, target))
            if a != b
        ]
        if replacements:
            shown = ", ".join(
                f"{r.original}->{r.substituted}" for r in replacements[:3]
            )
            return Classification(FailureLabel.WORD_SUBSTITUTION, shown)

    tail = detect_hallucinated_tail(
        pair.input_text, pair.prediction_clean, min_repeat_len, min_repeat_count
    )
    truncated = clean_cmp != input_cmp and clean_cmp in input_cmp
    if len(source) != len(target) and tail is None and not truncated:
        delta = len(target) - len(source)
        return Classification(
            FailureLabel.WORD_INSERTION_DELETION,
            f"{delta:+d} tokens",
        )
    if tail is not None:
        note = "periodic" if tail.is_periodic else "aperiodic"
        return Classification(
            FailureLabel.HALLUCINATED_TAIL, f"{note} tail of {len(tail.tail)} chars"
        )
    if any(issue.kind in _BRACKET_ISSUES for issue in pair.prediction_issues):
        kinds = sorted({i.kind.value for i in pair.prediction_issues})
        return Classification(FailureLabel.BRACKET_MISMATCH, ", ".join(kinds))
    if truncated:
        return Classification(
            FailureLabel.TRUNCATION,
            f"replicated only {len(clean_cmp)} of {len(input_cmp)} chars",
        )
    return Classification(FailureLabel.OTHER)


def replacement_frequency_table(
    replacements: Iterable[Replacement],
) -> list[tuple[str, str, int]]:
    """(original, substituted, count) rows, most frequent first."""
    counts = Counter((r.original, r.substituted) for r in replacements)
    return sorted(
        ((orig, sub, n) for (orig, sub), n in counts.items()),
        key=lambda row: (-row[2], row[0], row[1]),
    )


@dataclass(frozen=True)
class AnalysisReport:
    """Corpus-level qualitative analysis: taxonomy, replacements, tails."""

    classifications: tuple[Classification, ...]
    histogram: tuple[tuple[str, int], ...]
    replacement_table: tuple[tuple[str, str, int], ...]
    hallucinations: tuple[tuple[int, HallucinatedTail], ...]

    def to_dict(self) -> dict:
        return {
            "histogram": {label: count for label, count in self.histogram},
            "replacements": [
                {"original": o, "substituted": s, "count": c}
                for o, s, c in self.replacement_table
            ],
            "hallucinations": [
                {
                    "index": i,
                    "tail": t.tail,
                    "periodic": t.is_periodic,
                    "repeated_unit": t.repeated_unit,
                }
                for i, t in self.hallucinations
            ],
            "labels": [c.label.value for c in self.classifications],
        }


def analyze_corpus(
    pairs: Sequence[SentencePair],
    min_repeat_len: int = 3,
    min_repeat_count: int = 3,
) -> AnalysisReport:
    """Classify every pair and aggregate replacements and hallucinations."""
    classifications = tuple(
        classify(p, min_repeat_len, min_repeat_count) for p in pairs
    )
    label_counts = Counter(c.label for c in classifications)
    histogram = tuple(
        (label.value, label_counts.get(label, 0)) for label in FailureLabel
    )
    replacements: list[Replacement] = []
    hallucinations: list[tuple[int, HallucinatedTail]] = []
    for i, pair in enumerate(pairs):
        source = tokenize(pair.input_text.strip())
        target = tokenize(pair.prediction_clean.strip())
        if len(source) == len(target):
            replacements.extend(
                Replacement(j, a, b)
                for j, (a, b) in enumerate(zip(source, target))
                if a != b
            )
        tail = detect_hallucinated_tail(
            pair.input_text, pair.prediction_clean, min_repeat_len, min_repeat_count
        )
        if tail is not None:
            hallucinations.append((i, tail))
    return AnalysisReport(
        classifications=classifications,
        histogram=histogram,
        replacement_table=tuple(replacement_frequency_table(replacements)),
        hallucinations=tuple(hallucinations),
    )
