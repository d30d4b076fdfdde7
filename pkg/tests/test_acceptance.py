"""Acceptance suite: one test per release criterion, at stated tolerances.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line
per criterion (add ``-s`` to also see the explicit ACCEPTANCE lines).
"""

import random
import time
from functools import lru_cache

import pytest

from corefmark.coref_metrics import Clustering, score_all
from corefmark.dataset_builder import NovelRecord, SplitConfig, split
from corefmark.error_analysis import FailureLabel, analyze_corpus
from corefmark.markup import (
    Mention,
    parse_strict,
    serialize,
    simplify_duplicates,
    strip_markup,
)
from corefmark.strict_eval import SentencePair, edit_distance, score_corpus

from genutil import random_clustering_pair, random_sentence
from oracles import (
    oracle_b_cubed,
    oracle_blanc,
    oracle_ceaf,
    oracle_lea,
    oracle_muc,
    phi_4,
    phi_m,
)

CARL_INPUT = (
    "Carl thrust his hands into his pockets, lowered his head, "
    "and darted up the street against the north wind."
)
CARL_OUTPUT = (
    "[Carl: 1] thrust [his: 1] hands into [his: 1] pockets, lowered [his: 1] "
    "head, and darted up [the street: 2] against the north wind."
)
SHIVER_INPUT = "He shivered as if he had cold slimy water next his skin."
SHIVER_OUTPUT = "He shivered as if he had cold slimy water next to his skin."
PYTHIA_INPUT = "We must go to Athens."
PYTHIA_OUTPUT = (
    "We must go to Athens. go to [Athens: 2]. go to [Athens: 2]: 2]. "
    "go to [A [Athens: 2]:]: 2]: 2 to [A [A [A: 2]: 2]: 2]: 2 to "
    "[: 2 [A: 2]: 2]: 2 2 2 2 2 to [: 2 [: 2]: 2]: 2 2 2 2 to [: 2 2]: 2 2..."
)
LADY_GOLD = "[The lady: 1] in [the room: 2] picked up [his: 3] hat."
LADY_PRED = "[The lady: 1] in the room picked up [his: 2] hat."


def passed(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


def test_golden_annotation_example():
    start = time.perf_counter()
    sentence = parse_strict(CARL_OUTPUT)
    assert len(sentence.mentions) == 5
    assert len(set(m.cluster_id for m in sentence.mentions)) == 2
    assert serialize(sentence) == CARL_OUTPUT
    assert strip_markup(CARL_OUTPUT) == CARL_INPUT
    assert time.perf_counter() - start < 1.0
    passed("golden annotation example: parse/serialize/strip")


def test_round_trip_property_1000():
    start = time.perf_counter()
    failures = 0
    for seed in range(1000):
        s = random_sentence(random.Random(seed))
        raw = serialize(s)
        if parse_strict(raw) != s or strip_markup(raw) != s.clean_text:
            failures += 1
    assert failures == 0
    assert time.perf_counter() - start < 10.0
    passed("1,000-sentence round-trip property")


def test_duplicate_simplification():
    simplified = simplify_duplicates(parse_strict("[[he: 1]: 2]"))
    assert simplified.mentions == (Mention(0, 2, 2),)
    assert serialize(simplified) == "[he: 2]"
    passed("duplicate wrap normalizes to the outer id")


def test_split_arithmetic():
    start = time.perf_counter()
    rng = random.Random(92)
    records = []
    for k in range(92):
        n = rng.randint(50, 90)
        records.append(
            NovelRecord(
                f"novel_{k:03d}",
                tuple((i, serialize(random_sentence(rng))) for i in range(1, n + 1)),
            )
        )
    config = SplitConfig(seed=2024)
    result = split(records, config)
    total = sum(len(r.sentences) for r in records)
    assert len(result.train) == 3480
    assert len(result.val) == 174
    assert len(result.test) == total - 3654
    rerun = split(records, SplitConfig(seed=2024))
    assert rerun.manifest.to_json() == result.manifest.to_json()
    assert time.perf_counter() - start < 5.0
    passed("92-novel split arithmetic and manifest determinism")


def test_strict_scorer_fixture():
    report = score_corpus([SentencePair.from_strings(LADY_GOLD, LADY_PRED)])
    counts = report.per_sentence[0]
    assert (counts.entity_tp, counts.entity_fp, counts.entity_fn) == (2, 0, 1)
    assert counts.coref_tp == 1
    assert report.entity_f1 == pytest.approx(80.00, abs=0.01)
    passed("lady/room strict fixture: entity F1 80.00, coref tp 1")


def test_metric_oracle_equivalence_500():
    start = time.perf_counter()
    checks = [
        (lambda g, s: score_all(g, s).muc, oracle_muc),
        (lambda g, s: score_all(g, s).b3, oracle_b_cubed),
        (lambda g, s: score_all(g, s).lea, oracle_lea),
        (lambda g, s: score_all(g, s).blanc, oracle_blanc),
        (lambda g, s: score_all(g, s).ceaf_m, lambda g, s: oracle_ceaf(g, s, phi_m)),
        (lambda g, s: score_all(g, s).ceaf_e, lambda g, s: oracle_ceaf(g, s, phi_4)),
    ]
    for seed in range(500):
        gold_e, sys_e = random_clustering_pair(random.Random(seed))
        gold, system = Clustering(tuple(gold_e)), Clustering(tuple(sys_e))
        scores = score_all(gold, system)
        for metric, oracle in checks:
            ours = metric(gold, system)
            reference = oracle(gold_e, sys_e)
            assert abs(ours.precision - reference[0]) < 1e-9
            assert abs(ours.recall - reference[1]) < 1e-9
            assert abs(ours.f1 - reference[2]) < 1e-9
    assert time.perf_counter() - start < 60.0
    passed("500 clustering pairs match brute-force oracles within 1e-9")


def _with_non_singleton(entities):
    if any(len(e) > 1 for e in entities):
        return entities
    return entities + [frozenset({(500, 501), (502, 503)})]


def test_metric_identities():
    all_columns = ("muc", "b3", "ceaf_m", "ceaf_e", "blanc", "lea")
    for seed in range(50):
        entities, _ = random_clustering_pair(random.Random(seed))
        entities = _with_non_singleton(entities)
        c = Clustering(tuple(entities))
        scores = score_all(c, c)
        for name in all_columns:
            assert getattr(scores, name).f1 == pytest.approx(100.0), name
        assert scores.conll_avg == pytest.approx(100.0)
        empty = score_all(c, Clustering())
        for name in all_columns:
            assert getattr(empty, name).f1 == 0.0, name
        assert empty.conll_avg == 0.0
    for seed in range(200):
        gold_e, sys_e = random_clustering_pair(random.Random(10_000 + seed))
        gold, system = Clustering(tuple(gold_e)), Clustering(tuple(sys_e))
        forward = score_all(gold, system)
        backward = score_all(system, gold)
        for name in all_columns:
            f, b = getattr(forward, name), getattr(backward, name)
            assert f.precision == pytest.approx(b.recall, abs=1e-9), name
            assert f.recall == pytest.approx(b.precision, abs=1e-9), name
    passed("identity=100, empty-system=0, duality on 200 pairs")


def test_edit_distance_criterion():
    def oracle(a: str, b: str) -> int:
        @lru_cache(maxsize=None)
        def d(i, j):
            if i == 0:
                return j
            if j == 0:
                return i
            return min(
                d(i - 1, j) + 1,
                d(i, j - 1) + 1,
                d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
            )

        return d(len(a), len(b))

    rng = random.Random(8)
    for _ in range(400):
        a = "".join(rng.choice("abc") for _ in range(rng.randint(0, 8)))
        b = "".join(rng.choice("abc") for _ in range(rng.randint(0, 8)))
        assert edit_distance(a, b) == oracle(a, b)
    assert edit_distance(SHIVER_INPUT, SHIVER_OUTPUT) == 3
    passed("edit distance matches recursive oracle; insertion case = 3")


def test_error_analysis_criterion():
    pairs = [
        SentencePair.from_strings("Katharine smiled.", "Catarine smiled."),
        SentencePair.from_strings("Mr. Smith left.", "Mrs. Smith left."),
        SentencePair.from_strings("Mr. Jones ran.", "Mrs. Jones ran."),
        SentencePair.from_strings(PYTHIA_INPUT, PYTHIA_OUTPUT),
        SentencePair.from_strings(CARL_OUTPUT, CARL_OUTPUT),
    ]
    report = analyze_corpus(pairs)
    assert report.replacement_table[0] == ("Mr.", "Mrs.", 2)
    assert ("Katharine", "Catarine", 1) in report.replacement_table
    assert report.classifications[3].label == FailureLabel.HALLUCINATED_TAIL
    assert dict(report.histogram)["Exact"] == 1
    passed("replacement table recovered; Pythia output labeled HallucinatedTail")
