"""Standard coreference metric suite over sentence-level clusterings.

MUC (Vilain et al. 1995), B³ (Bagga & Baldwin 1998), CEAF under both the
mention-overlap and normalized entity similarities (Luo 2005), BLANC in the
extended form that tolerates non-identical mention sets (Luo et al. 2014),
LEA (Moosavi & Strube 2016), and the CoNLL average of MUC, B³ and CEAF_e.

Singletons are counted.  Gold and system mentions correspond exactly when
their character spans are identical; surface spelling is not re-checked.
Corpus scores aggregate raw numerators and denominators across sentences
(micro), never averages of per-sentence F1s.

Zero-division convention: a score whose numerator and denominator are both
zero is 0, unless both clusterings are entirely empty, which scores 100
(perfect agreement on nothing).  BLANC's doubly-degenerate case (no links of
either kind anywhere) scores 100 exactly when the two mention sets are
identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from corefmark.markup import AnnotatedSentence, simplify_duplicates
from corefmark.strict_eval import LengthGate, SentencePair, length_gate_passed

MentionKey = tuple[int, int]

CONVENTIONS = (
    "singletons counted; exact-span mention matching; micro aggregation; "
    "0/0 scores 0 unless both clusterings are empty (then 100); BLANC with "
    "no links of either kind scores on mention-set identity"
)


@dataclass(frozen=True)
class Clustering:
    """A sentence's entities as disjoint, non-empty sets of mention spans."""

    entities: tuple[frozenset[MentionKey], ...] = ()

    def __post_init__(self) -> None:
        seen: set[MentionKey] = set()
        for entity in self.entities:
            if not entity:
                raise ValueError("entities must be non-empty")
            if seen & entity:
                raise ValueError("entities must have disjoint mention sets")
            seen |= entity

    @classmethod
    def from_entities(cls, entities: Iterable[Iterable[MentionKey]]) -> "Clustering":
        return cls(tuple(frozenset(e) for e in entities))

    @classmethod
    def from_sentence(cls, sentence: AnnotatedSentence) -> "Clustering":
        """Group mentions by cluster id, collapsing duplicate spans first."""
        simplified = simplify_duplicates(sentence)
        by_id: dict[int, set[MentionKey]] = {}
        for m in simplified.mentions:
            by_id.setdefault(m.cluster_id, set()).add(m.key)
        return cls.from_entities(by_id.values())

    @property
    def mentions(self) -> frozenset[MentionKey]:
        out: set[MentionKey] = set()
        for entity in self.entities:
            out |= entity
        return frozenset(out)

    def entity_of(self) -> dict[MentionKey, frozenset[MentionKey]]:
        return {m: entity for entity in self.entities for m in entity}

    @property
    def is_empty(self) -> bool:
        return not self.entities


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class MetricScores:
    """All report columns: six metric triples plus the CoNLL average F1."""

    muc: Score
    b3: Score
    ceaf_m: Score
    ceaf_e: Score
    blanc: Score
    lea: Score
    conll_avg: float

    def to_dict(self) -> dict:
        return {
            "muc": self.muc.to_dict(),
            "b3": self.b3.to_dict(),
            "ceaf_m": self.ceaf_m.to_dict(),
            "ceaf_e": self.ceaf_e.to_dict(),
            "blanc": self.blanc.to_dict(),
            "lea": self.lea.to_dict(),
            "conll_avg": {"f1": self.conll_avg},
        }


def align_mentions(
    gold: Clustering, system: Clustering
) -> tuple[frozenset[MentionKey], frozenset[MentionKey], frozenset[MentionKey]]:
    """Split mention keys into (matched, gold-only, system-only)."""
    g, s = gold.mentions, system.mentions
    return g & s, g - s, s - g


def optimal_assignment(weights: Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Maximum-total-weight one-to-one row/column assignment.

    Hungarian algorithm in the potentials formulation, O(n^3).  The matrix
    may be rectangular; the returned pairs cover min(rows, cols) rows.
    """
    n = len(weights)
    m = len(weights[0]) if n else 0
    if n == 0 or m == 0:
        return []
    size = max(n, m)
    # Pad to square and negate: minimize cost == maximize weight.
    cost = [[0.0] * size for _ in range(size)]
    for i in range(n):
        for j in range(m):
            cost[i][j] = -float(weights[i][j])
    INF = float("inf")
    u = [0.0] * (size + 1)
    v = [0.0] * (size + 1)
    match_for_col = [0] * (size + 1)  # 1-based row matched to each column
    for row in range(1, size + 1):
        match_for_col[0] = row
        j0 = 0
        minv = [INF] * (size + 1)
        used = [False] * (size + 1)
        prev = [0] * (size + 1)
        while True:
            used[j0] = True
            i0 = match_for_col[j0]
            delta = INF
            j1 = 0
            for j in range(1, size + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    prev[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(size + 1):
                if used[j]:
                    u[match_for_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_for_col[j0] == 0:
                break
        while j0:
            j1 = prev[j0]
            match_for_col[j0] = match_for_col[j1]
            j0 = j1
    return sorted(
        (match_for_col[j] - 1, j - 1)
        for j in range(1, size + 1)
        if match_for_col[j] - 1 < n and j - 1 < m
    )


# Each metric reduces a clustering pair to raw sufficient statistics that
# sum across sentences; BLANC needs six counts, the others four.

Parts = tuple[float, ...]


def muc_parts(gold: Clustering, system: Clustering) -> Parts:
    def side(a: Clustering, b: Clustering) -> tuple[float, float]:
        b_entity = b.entity_of()
        num = den = 0
        for cluster in a.entities:
            partitions = {id(b_entity[m]) for m in cluster if m in b_entity}
            unaligned = sum(1 for m in cluster if m not in b_entity)
            num += len(cluster) - unaligned - len(partitions)
            den += len(cluster) - 1
        return float(num), float(den)

    r_num, r_den = side(gold, system)
    p_num, p_den = side(system, gold)
    return (p_num, p_den, r_num, r_den)


def b_cubed_parts(gold: Clustering, system: Clustering) -> Parts:
    def side(a: Clustering, b: Clustering) -> tuple[float, float]:
        b_entity = b.entity_of()
        num = 0.0
        den = 0
        for cluster in a.entities:
            for m in cluster:
                other = b_entity.get(m)
                if other is not None:
                    num += len(cluster & other) / len(cluster)
            den += len(cluster)
        return num, float(den)

    r_num, r_den = side(gold, system)
    p_num, p_den = side(system, gold)
    return (p_num, p_den, r_num, r_den)


def _phi_m(a: frozenset, b: frozenset) -> float:
    return float(len(a & b))


def _phi_4(a: frozenset, b: frozenset) -> float:
    return 2.0 * len(a & b) / (len(a) + len(b))


def ceaf_parts(gold: Clustering, system: Clustering, phi) -> Parts:
    if gold.is_empty or system.is_empty:
        total = 0.0
    else:
        weights = [[phi(g, s) for s in system.entities] for g in gold.entities]
        pairs = optimal_assignment(weights)
        total = sum(weights[i][j] for i, j in pairs)
    r_den = sum(phi(g, g) for g in gold.entities)
    p_den = sum(phi(s, s) for s in system.entities)
    return (total, p_den, total, r_den)


def lea_parts(gold: Clustering, system: Clustering) -> Parts:
    def side(a: Clustering, b: Clustering) -> tuple[float, float]:
        b_entity = b.entity_of()
        num = 0.0
        den = 0
        for cluster in a.entities:
            size = len(cluster)
            if size == 1:
                (mention,) = cluster
                resolved = 1.0 if len(b_entity.get(mention, ())) == 1 else 0.0
                links = 1.0
            else:
                links = size * (size - 1) / 2.0
                resolved = sum(
                    1.0
                    for m1, m2 in combinations(cluster, 2)
                    if m1 in b_entity and b_entity[m1] is b_entity.get(m2)
                )
            num += size * resolved / links
            den += size
        return num, float(den)

    r_num, r_den = side(gold, system)
    p_num, p_den = side(system, gold)
    return (p_num, p_den, r_num, r_den)


def blanc_parts(gold: Clustering, system: Clustering) -> Parts:
    """(rc, |C_s|, |C_g|, rn, |N_s|, |N_g|): right/total links of each kind."""

    def n_pairs(k: int) -> int:
        return k * (k - 1) // 2

    common = gold.mentions & system.mentions
    rc = sum(
        n_pairs(len(g & s)) for g in gold.entities for s in system.entities
    )
    c_g = sum(n_pairs(len(g)) for g in gold.entities)
    c_s = sum(n_pairs(len(s)) for s in system.entities)
    n_g = n_pairs(len(gold.mentions)) - c_g
    n_s = n_pairs(len(system.mentions)) - c_s
    # Pairs of common mentions non-coreferent on both sides, by
    # inclusion-exclusion over the coreferent pair sets.
    c_g_common = sum(n_pairs(len(g & common)) for g in gold.entities)
    c_s_common = sum(n_pairs(len(s & common)) for s in system.entities)
    rn = n_pairs(len(common)) - c_g_common - c_s_common + rc
    return (float(rc), float(c_s), float(c_g), float(rn), float(n_s), float(n_g))


def _ratio(num: float, den: float, both_empty: bool) -> float:
    if den > 0:
        return 100.0 * num / den
    return 100.0 if both_empty else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def _score_from_parts(parts: Parts, both_empty: bool) -> Score:
    p_num, p_den, r_num, r_den = parts
    p = _ratio(p_num, p_den, both_empty)
    r = _ratio(r_num, r_den, both_empty)
    f1 = 100.0 if both_empty else _f1(p, r)
    return Score(p, r, f1)


def _blanc_score(parts: Parts, both_empty: bool, mentions_identical: bool) -> Score:
    rc, c_s, c_g, rn, n_s, n_g = parts
    if both_empty:
        return Score(100.0, 100.0, 100.0)
    have_coref = c_s + c_g > 0
    have_non_coref = n_s + n_g > 0
    if not have_coref and not have_non_coref:
        value = 100.0 if mentions_identical else 0.0
        return Score(value, value, value)
    p_c, r_c = _ratio(rc, c_s, False), _ratio(rc, c_g, False)
    p_n, r_n = _ratio(rn, n_s, False), _ratio(rn, n_g, False)
    if not have_non_coref:
        return Score(p_c, r_c, _f1(p_c, r_c))
    if not have_coref:
        return Score(p_n, r_n, _f1(p_n, r_n))
    return Score(
        (p_c + p_n) / 2.0, (r_c + r_n) / 2.0, (_f1(p_c, r_c) + _f1(p_n, r_n)) / 2.0
    )


def _sum_parts(rows: list[Parts]) -> Parts:
    return tuple(sum(col) for col in zip(*rows))


def _aggregate(pairs: Sequence[tuple[Clustering, Clustering]]) -> MetricScores:
    if not pairs:
        raise ValueError("cannot score an empty corpus")
    both_empty = all(g.is_empty and s.is_empty for g, s in pairs)
    mentions_identical = all(g.mentions == s.mentions for g, s in pairs)
    muc = _score_from_parts(
        _sum_parts([muc_parts(g, s) for g, s in pairs]), both_empty
    )
    b3 = _score_from_parts(
        _sum_parts([b_cubed_parts(g, s) for g, s in pairs]), both_empty
    )
    ceaf_m = _score_from_parts(
        _sum_parts([ceaf_parts(g, s, _phi_m) for g, s in pairs]), both_empty
    )
    ceaf_e = _score_from_parts(
        _sum_parts([ceaf_parts(g, s, _phi_4) for g, s in pairs]), both_empty
    )
    blanc = _blanc_score(
        _sum_parts([blanc_parts(g, s) for g, s in pairs]),
        both_empty,
        mentions_identical,
    )
    lea = _score_from_parts(
        _sum_parts([lea_parts(g, s) for g, s in pairs]), both_empty
    )
    return MetricScores(
        muc=muc,
        b3=b3,
        ceaf_m=ceaf_m,
        ceaf_e=ceaf_e,
        blanc=blanc,
        lea=lea,
        conll_avg=(muc.f1 + b3.f1 + ceaf_e.f1) / 3.0,
    )


def muc(gold: Clustering, system: Clustering) -> Score:
    return _score_from_parts(muc_parts(gold, system), gold.is_empty and system.is_empty)


def b_cubed(gold: Clustering, system: Clustering) -> Score:
    return _score_from_parts(
        b_cubed_parts(gold, system), gold.is_empty and system.is_empty
    )


def ceaf(gold: Clustering, system: Clustering, similarity: str = "phi_4") -> Score:
    phi = {"phi_m": _phi_m, "phi_4": _phi_4}[similarity]
    return _score_from_parts(
        ceaf_parts(gold, system, phi), gold.is_empty and system.is_empty
    )


def blanc(gold: Clustering, system: Clustering) -> Score:
    return _blanc_score(
        blanc_parts(gold, system),
        gold.is_empty and system.is_empty,
        gold.mentions == system.mentions,
    )


def lea(gold: Clustering, system: Clustering) -> Score:
    return _score_from_parts(lea_parts(gold, system), gold.is_empty and system.is_empty)


def score_all(gold: Clustering, system: Clustering) -> MetricScores:
    """Every metric column for a single clustering pair."""
    return _aggregate([(gold, system)])


def score_standard_suite(
    pairs: Sequence[SentencePair], gate: LengthGate = LengthGate.CHAR
) -> MetricScores:
    """Corpus-level suite over sentence pairs, honoring the length gate.

    A sentence whose stripped generation fails the gate contributes an empty
    system clustering (its gold entities all count as missed).
    """
    clusterings: list[tuple[Clustering, Clustering]] = []
    for pair in pairs:
        gold = Clustering.from_sentence(pair.gold)
        passed = length_gate_passed(pair.input_text, pair.prediction_clean, gate)
        system = Clustering.from_sentence(pair.prediction) if passed else Clustering()
        clusterings.append((gold, system))
    return _aggregate(clusterings)
