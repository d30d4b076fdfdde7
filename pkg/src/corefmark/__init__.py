"""Toolkit for inline coreference markup over literary sentences.

Parses and serializes the bracket annotation format, builds deterministic
train/val/test corpora, scores model generations with strict entity/coref
metrics and the standard coreference metric suite, and classifies failure
modes of generated output.
"""

from corefmark.markup import (
    AnnotatedSentence,
    IssueKind,
    MarkupParseError,
    Mention,
    ParseIssue,
    parse_lenient,
    parse_strict,
    serialize,
    simplify_duplicates,
    strip_markup,
)
from corefmark.strict_eval import (
    EvalReport,
    LengthGate,
    SentencePair,
    StrictCounts,
    edit_distance,
    exact_match,
    score_corpus,
    score_sentence,
)
from corefmark.coref_metrics import (
    Clustering,
    MetricScores,
    score_all,
    score_standard_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence",
    "Clustering",
    "EvalReport",
    "IssueKind",
    "LengthGate",
    "MarkupParseError",
    "Mention",
    "MetricScores",
    "ParseIssue",
    "SentencePair",
    "StrictCounts",
    "edit_distance",
    "exact_match",
    "parse_lenient",
    "parse_strict",
    "score_all",
    "score_corpus",
    "score_sentence",
    "score_standard_suite",
    "serialize",
    "simplify_duplicates",
    "strip_markup",
    "__version__",
]
