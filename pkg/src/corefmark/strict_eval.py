"""Strict sentence-fidelity metrics for generated annotations.

Four measures over (gold, prediction) sentence pairs: entity F1, coreference
F1, mean character edit distance between the input and the markup-stripped
generation, and sentence-level exact string match.  Entity and coreference
credit is gated: a sentence's mentions count only when the stripped
generation has exactly the input's length (character gate, the default) or
its whitespace token count (token gate).

An entity true positive needs identical character offsets AND an identical
surface string; a coreference true positive additionally needs the identical
integer cluster id.  Entity F1 ignores cluster ids entirely (it measures
recognition only).  Identically-spanned duplicate mentions are collapsed to
the outermost wrapper's id on both sides before matching.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields

from corefmark.markup import (
    AnnotatedSentence,
    ParseIssue,
    parse_lenient,
    parse_strict,
    serialize,
    simplify_duplicates,
    token_count,
)


class LengthGate(enum.Enum):
    """How "same length as the input" is measured before granting credit."""

    CHAR = "char"
    TOKEN = "token"


@dataclass(frozen=True)
class SentencePair:
    """A gold-annotated sentence joined with one raw model generation."""

    input_text: str
    gold: AnnotatedSentence
    prediction_raw: str
    prediction: AnnotatedSentence
    prediction_clean: str
    prediction_issues: tuple[ParseIssue, ...] = ()

    def __post_init__(self) -> None:
        if self.gold.clean_text != self.input_text:
            raise ValueError("gold clean text does not match the input sentence")

    @classmethod
    def from_strings(cls, gold_annotated: str, prediction_raw: str) -> "SentencePair":
        """Build a pair from a gold annotation string and a raw generation."""
        gold = parse_strict(gold_annotated)
        prediction, issues = parse_lenient(prediction_raw)
        return cls(
            input_text=gold.clean_text,
            gold=gold,
            prediction_raw=prediction_raw,
            prediction=prediction,
            prediction_clean=prediction.clean_text,
            prediction_issues=tuple(issues),
        )

    @property
    def gold_annotated(self) -> str:
        return serialize(self.gold)


@dataclass(frozen=True)
class StrictCounts:
    """Per-sentence tallies feeding the corpus-level strict report."""

    entity_tp: int = 0
    entity_fp: int = 0
    entity_fn: int = 0
    coref_tp: int = 0
    coref_fp: int = 0
    coref_fn: int = 0
    edit_distance: int = 0
    exact_match: bool = False
    length_gate_passed: bool = False

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "StrictCounts":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


@dataclass(frozen=True)
class EvalReport:
    """Corpus-level strict metrics (percent scale) plus per-sentence detail."""

    entity_precision: float
    entity_recall: float
    entity_f1: float
    coref_precision: float
    coref_recall: float
    coref_f1: float
    mean_edit_distance: float
    exact_match_rate: float
    per_sentence: tuple[StrictCounts, ...] = field(repr=False, default=())

    def to_dict(self) -> dict:
        return {
            "entity": {
                "precision": self.entity_precision,
                "recall": self.entity_recall,
                "f1": self.entity_f1,
            },
            "coref": {
                "precision": self.coref_precision,
                "recall": self.coref_recall,
                "f1": self.coref_f1,
            },
            "mean_edit_distance": self.mean_edit_distance,
            "exact_match_rate": self.exact_match_rate,
            "per_sentence": [c.to_dict() for c in self.per_sentence],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(
            entity_precision=d["entity"]["precision"],
            entity_recall=d["entity"]["recall"],
            entity_f1=d["entity"]["f1"],
            coref_precision=d["coref"]["precision"],
            coref_recall=d["coref"]["recall"],
            coref_f1=d["coref"]["f1"],
            mean_edit_distance=d["mean_edit_distance"],
            exact_match_rate=d["exact_match_rate"],
            per_sentence=tuple(
                StrictCounts.from_dict(c) for c in d["per_sentence"]
            ),
        )


def edit_distance(a: str, b: str) -> int:
    """Character-level Levenshtein distance with unit costs."""
    if a == b:
        return 0
    # Shared affixes never change the distance; trimming them keeps the DP
    # table small for near-identical sentences.
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # delete
                    current[j - 1] + 1,  # insert
                    previous[j - 1] + (ca != cb),  # substitute
                )
            )
        previous = current
    return previous[-1]


def exact_match(gold_annotated: str, prediction_raw: str) -> bool:
    """Sentence-level string identity, ignoring leading/trailing whitespace."""
    return gold_annotated.strip() == prediction_raw.strip()


def _measure(text: str, gate: LengthGate) -> int:
    return len(text) if gate is LengthGate.CHAR else token_count(text)


def length_gate_passed(
    input_text: str, prediction_clean: str, gate: LengthGate
) -> bool:
    """Whether the stripped generation earns annotation credit for a sentence."""
    return _measure(prediction_clean.strip(), gate) == _measure(input_text.strip(), gate)


def _mention_table(
    sentence: AnnotatedSentence, shift: int
) -> dict[tuple[int, int], tuple[str, int]]:
    return {
        (m.start - shift, m.end - shift): (sentence.surface(m), m.cluster_id)
        for m in sentence.mentions
    }


def score_sentence(pair: SentencePair, gate: LengthGate = LengthGate.CHAR) -> StrictCounts:
    """Tally one sentence.

    Outer whitespace is trimmed from both sides before the gate, the edit
    distance and offset alignment (mirroring the exact-match trimming rule),
    with mention offsets shifted to stay anchored.
    """
    gold = simplify_duplicates(pair.gold)
    pred = simplify_duplicates(pair.prediction)

    input_cmp = pair.input_text.strip()
    clean_cmp = pair.prediction_clean.strip()
    distance = edit_distance(input_cmp, clean_cmp)
    exact = exact_match(pair.gold_annotated, pair.prediction_raw)
    gate_passed = length_gate_passed(pair.input_text, pair.prediction_clean, gate)

    n_gold = len(gold.mentions)
    n_pred = len(pred.mentions)
    if not gate_passed:
        return StrictCounts(
            entity_tp=0,
            entity_fp=n_pred,
            entity_fn=n_gold,
            coref_tp=0,
            coref_fp=n_pred,
            coref_fn=n_gold,
            edit_distance=distance,
            exact_match=exact,
            length_gate_passed=False,
        )

    gold_shift = len(pair.input_text) - len(pair.input_text.lstrip())
    pred_shift = len(pair.prediction_clean) - len(pair.prediction_clean.lstrip())
    gold_table = _mention_table(gold, gold_shift)
    pred_table = _mention_table(pred, pred_shift)

    entity_tp = sum(
        1
        for key, (surface, _) in pred_table.items()
        if key in gold_table and gold_table[key][0] == surface
    )
    coref_tp = sum(
        1
        for key, (surface, cid) in pred_table.items()
        if key in gold_table and gold_table[key] == (surface, cid)
    )
    return StrictCounts(
        entity_tp=entity_tp,
        entity_fp=n_pred - entity_tp,
        entity_fn=n_gold - entity_tp,
        coref_tp=coref_tp,
        coref_fp=n_pred - coref_tp,
        coref_fn=n_gold - coref_tp,
        edit_distance=distance,
        exact_match=exact,
        length_gate_passed=True,
    )


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    r = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def score_corpus(
    pairs: list[SentencePair], gate: LengthGate = LengthGate.CHAR
) -> EvalReport:
    """Micro-averaged strict metrics over a non-empty corpus of pairs."""
    if not pairs:
        raise ValueError("cannot score an empty corpus")
    counts = tuple(score_sentence(pair, gate) for pair in pairs)
    ep, er, ef = _prf(
        sum(c.entity_tp for c in counts),
        sum(c.entity_fp for c in counts),
        sum(c.entity_fn for c in counts),
    )
    cp, cr, cf = _prf(
        sum(c.coref_tp for c in counts),
        sum(c.coref_fp for c in counts),
        sum(c.coref_fn for c in counts),
    )
    return EvalReport(
        entity_precision=ep,
        entity_recall=er,
        entity_f1=ef,
        coref_precision=cp,
        coref_recall=cr,
        coref_f1=cf,
        mean_edit_distance=sum(c.edit_distance for c in counts) / len(counts),
        exact_match_rate=100.0 * sum(c.exact_match for c in counts) / len(counts),
        per_sentence=counts,
    )
