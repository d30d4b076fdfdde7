"""Inline coreference markup: parsing, serialization and stripping.

The markup wraps entity mentions in brackets and tags each with an integer
cluster id::

    [Carl: 1] thrust [his: 1] hands into [his: 1] pockets.

Grammar (canonical form)::

    annotated := (text | mention)*
    mention   := '[' (text | mention)* ': ' INT ']'
    INT       := [1-9][0-9]*

Mentions may nest (``[[her: 2] father: 1]``) but never cross.  Parsed
mentions carry character offsets into the markup-free ("clean") text.
``parse_strict`` rejects malformed input; ``parse_lenient`` never fails and
instead records every repair it makes as a diagnostic, which is what makes
raw model generations scoreable.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class IssueKind(enum.Enum):
    """Taxonomy of markup problems found while parsing."""

    UNBALANCED_OPEN = "UnbalancedOpen"
    UNBALANCED_CLOSE = "UnbalancedClose"
    MISSING_CLUSTER_ID = "MissingClusterId"
    NON_INTEGER_CLUSTER_ID = "NonIntegerClusterId"
    EMPTY_MENTION = "EmptyMention"
    CROSSING_SPANS = "CrossingSpans"
    DUPLICATE_SPAN = "DuplicateSpan"
    TRAILING_GARBAGE = "TrailingGarbage"
    EMPTY_INPUT = "EmptyInput"
    AMBIGUOUS_DELIMITER = "AmbiguousDelimiter"
    DELIMITER_SPACING = "DelimiterSpacing"


@dataclass(frozen=True)
class ParseIssue:
    """One problem at a character position of the raw annotated string."""

    kind: IssueKind
    position: int
    message: str


class MarkupParseError(ValueError):
    """Raised by parse_strict on the first malformed construct."""

    def __init__(self, issue: ParseIssue):
        super().__init__(f"{issue.kind.value} at {issue.position}: {issue.message}")
        self.issue = issue


@dataclass(frozen=True, order=True)
class Mention:
    """A bracketed span: [start, end) offsets into clean text plus cluster id."""

    start: int
    end: int
    cluster_id: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"bad mention span [{self.start}, {self.end})")
        if self.cluster_id < 1:
            raise ValueError(f"cluster id must be >= 1, got {self.cluster_id}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.start, self.end)


def _canonical_order(mentions: list[Mention]) -> list[Mention]:
    # Stable: identical spans keep their given (inner-before-outer) order.
    return sorted(mentions, key=lambda m: (m.start, -(m.end - m.start)))


@dataclass(frozen=True)
class AnnotatedSentence:
    """Clean text plus its mentions, held in canonical order.

    Canonical order is by start offset, then decreasing span length;
    mentions with identical spans (pre-normalization duplicates) keep
    insertion order, innermost first.  Spans must be well-nested: any two
    are disjoint or one strictly contains the other.
    """

    clean_text: str
    mentions: tuple[Mention, ...] = ()

    def __post_init__(self) -> None:
        ordered = _canonical_order(list(self.mentions))
        object.__setattr__(self, "mentions", tuple(ordered))
        n = len(self.clean_text)
        for m in ordered:
            if m.end > n:
                raise ValueError(f"mention {m} exceeds text length {n}")
        stack: list[Mention] = []
        for m in ordered:
            while stack and stack[-1].end <= m.start:
                stack.pop()
            if stack and m.end > stack[-1].end:
                raise ValueError(
                    f"crossing spans: [{stack[-1].start}, {stack[-1].end}) "
                    f"and [{m.start}, {m.end})"
                )
            stack.append(m)

    def surface(self, mention: Mention) -> str:
        return self.clean_text[mention.start:mention.end]

    def cluster_ids(self) -> list[int]:
        """Distinct cluster ids in canonical mention order."""
        seen: list[int] = []
        for m in self.mentions:
            if m.cluster_id not in seen:
                seen.append(m.cluster_id)
        return seen


def token_count(text: str) -> int:
    """Number of whitespace-delimited tokens."""
    return len(text.split())


# Cluster-id tail of a mention body: the delimiter is the LAST top-level
# ': ' whose remainder is a bare integer.  Searched against the text
# accumulated since the previous bracket, which the id can never span.
_STRICT_TAIL = re.compile(r": ([1-9][0-9]*)$")
_LENIENT_TAIL = re.compile(r":[ ]*([0-9]+)[ ]*$")


@dataclass
class _Frame:
    clean_start: int
    raw_pos: int


class _Parser:
    """Single-pass bracket parser shared by strict and lenient modes.

    Strict mode raises on the first issue; lenient mode repairs every issue
    by deleting the offending delimiter(s) and records what it did.
    """

    def __init__(self, raw: str, strict: bool):
        self.raw = raw
        self.strict = strict
        self.clean_parts: list[str] = []
        self.clean_len = 0
        self.pending: list[str] = []
        self.frames: list[_Frame] = []
        self.mentions: list[Mention] = []
        self.issues: list[ParseIssue] = []
        self.garbage_flagged = False

    def issue(self, kind: IssueKind, pos: int, message: str) -> None:
        if self.strict:
            raise MarkupParseError(ParseIssue(kind, pos, message))
        self.issues.append(ParseIssue(kind, pos, message))

    def commit(self, text: str) -> None:
        if text:
            self.clean_parts.append(text)
            self.clean_len += len(text)

    def flush_pending(self) -> str:
        text = "".join(self.pending)
        self.pending.clear()
        self.commit(text)
        return text

    def open_bracket(self, pos: int) -> None:
        self.flush_pending()
        self.frames.append(_Frame(self.clean_len, pos))

    def close_bracket(self, pos: int) -> None:
        if not self.frames:
            self.unmatched_close(pos)
            return
        tail = "".join(self.pending)
        match = _STRICT_TAIL.search(tail)
        if match is None:
            if self.strict:
                self.close_without_id(pos, tail)
                return
            match = _LENIENT_TAIL.search(tail)
            if match is None or int(match.group(1)) < 1:
                self.close_without_id(pos, tail)
                return
            self.issues.append(
                ParseIssue(
                    IssueKind.DELIMITER_SPACING,
                    pos,
                    f"cluster id written {match.group(0)!r}, canonical is ': <int>]'",
                )
            )
        frame = self.frames.pop()
        body_tail = tail[: match.start()]
        if not self.strict and _LENIENT_TAIL.search(body_tail):
            self.issues.append(
                ParseIssue(
                    IssueKind.AMBIGUOUS_DELIMITER,
                    pos,
                    f"body ends with id-like text {body_tail!r}; "
                    "took the last ': <int>' as the delimiter",
                )
            )
        self.pending.clear()
        self.commit(body_tail)
        if self.clean_len == frame.clean_start:
            self.issue(IssueKind.EMPTY_MENTION, pos, "mention body is empty; dropped")
            return
        self.mentions.append(
            Mention(frame.clean_start, self.clean_len, int(match.group(1)))
        )

    def close_without_id(self, pos: int, tail: str) -> None:
        frame = self.frames[-1]
        if ": " in tail or tail.rstrip(" ").endswith(":"):
            kind, what = IssueKind.NON_INTEGER_CLUSTER_ID, "non-integer cluster id"
        else:
            kind, what = IssueKind.MISSING_CLUSTER_ID, "no ': <int>' before ']'"
        self.issue(kind, pos, f"{what}; mention opened at {frame.raw_pos} unwrapped")
        # Repair: drop both brackets, keep the body text.
        self.flush_pending()
        self.frames.pop()

    def unmatched_close(self, pos: int) -> None:
        if self.strict:
            self.issue(IssueKind.UNBALANCED_CLOSE, pos, "']' with no open '['")
        if not self.garbage_flagged and not self.issues:
            self.garbage_flagged = True
            self.issues.append(
                ParseIssue(
                    IssueKind.TRAILING_GARBAGE,
                    pos,
                    "markup after the balanced prefix is not well-formed",
                )
            )
        # Repair: drop the ']' and, when present, the id-slot residue
        # (': <int>') left behind by a wrapper that lost its '['.
        tail = "".join(self.pending)
        match = _LENIENT_TAIL.search(tail)
        dropped = match.group(0) + "]" if match else "]"
        if match:
            self.pending = list(tail[: match.start()])
        self.issues.append(
            ParseIssue(IssueKind.UNBALANCED_CLOSE, pos, f"dropped {dropped!r}")
        )

    def run(self) -> tuple[AnnotatedSentence, list[ParseIssue]]:
        if not self.raw and not self.strict:
            self.issues.append(ParseIssue(IssueKind.EMPTY_INPUT, 0, "empty input"))
        for pos, ch in enumerate(self.raw):
            if ch == "[":
                self.open_bracket(pos)
            elif ch == "]":
                self.close_bracket(pos)
            else:
                self.pending.append(ch)
        self.flush_pending()
        for frame in self.frames:
            self.issue(
                IssueKind.UNBALANCED_OPEN, frame.raw_pos, "'[' never closed; dropped"
            )
        clean = "".join(self.clean_parts)
        if not self.strict:
            seen: set[tuple[int, int]] = set()
            for m in self.mentions:
                if m.key in seen:
                    self.issues.append(
                        ParseIssue(
                            IssueKind.DUPLICATE_SPAN,
                            0,
                            f"span [{m.start}, {m.end}) annotated more than once",
                        )
                    )
                seen.add(m.key)
        return AnnotatedSentence(clean, tuple(self.mentions)), self.issues


def parse_strict(annotated: str) -> AnnotatedSentence:
    """Parse canonical markup; raise MarkupParseError on the first issue.

    The result serializes back to the input byte-for-byte.
    """
    sentence, _ = _Parser(annotated, strict=True).run()
    return sentence


def parse_lenient(generated: str) -> tuple[AnnotatedSentence, list[ParseIssue]]:
    """Best-effort parse of arbitrary (model-generated) text.

    Never fails: unbalanced delimiters, deviant id spacing, empty bodies
    and the like are repaired by minimal deletion and reported as issues.
    On strict-clean input the result equals ``parse_strict`` with no issues.
    """
    return _Parser(generated, strict=False).run()


def serialize(sentence: AnnotatedSentence) -> str:
    """Render clean text with every mention wrapped as ``[surface: id]``.

    Inverse of ``parse_strict``; bracket placement follows nesting, with
    identically-spanned duplicates re-wrapped in their original order.
    """
    order = {m: i for i, m in enumerate(sentence.mentions)}
    opens: dict[int, list[Mention]] = {}
    closes: dict[int, list[Mention]] = {}
    for m in sentence.mentions:
        opens.setdefault(m.start, []).append(m)
        closes.setdefault(m.end, []).append(m)
    for ms in opens.values():
        # Outermost opens first: longest span, then the later duplicate.
        ms.sort(key=lambda m: (-(m.end - m.start), -order[m]))
    for ms in closes.values():
        ms.sort(key=lambda m: (m.end - m.start, order[m]))
    out: list[str] = []
    for i in range(len(sentence.clean_text) + 1):
        for m in closes.get(i, ()):
            out.append(f": {m.cluster_id}]")
        for m in opens.get(i, ()):
            out.append("[")
        if i < len(sentence.clean_text):
            out.append(sentence.clean_text[i])
    return "".join(out)


def strip_markup(generated: str) -> str:
    """Remove all annotation syntax recognized by the lenient parser.

    Equals the clean text on well-formed input and is idempotent.
    """
    sentence, _ = parse_lenient(generated)
    return sentence.clean_text


def simplify_duplicates(sentence: AnnotatedSentence) -> AnnotatedSentence:
    """Collapse mentions sharing a span to one with the outermost wrapper's id.

    ``[[he: 1]: 2]`` becomes the single mention ``[he: 2]``: within each
    group of identical spans only the last (outermost) wrapper's cluster id
    survives.
    """
    last_for_span: dict[tuple[int, int], Mention] = {}
    for m in sentence.mentions:
        last_for_span[m.key] = m
    if len(last_for_span) == len(sentence.mentions):
        return sentence
    return AnnotatedSentence(sentence.clean_text, tuple(last_for_span.values()))
