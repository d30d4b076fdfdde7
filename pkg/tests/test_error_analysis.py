"""Failure taxonomy, replacement mining and hallucination detection."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corefmark.error_analysis import (
    FailureLabel,
    analyze_corpus,
    classify,
    detect_hallucinated_tail,
    extract_replacements,
    replacement_frequency_table,
    tokenize,
)
from corefmark.markup import serialize
from corefmark.strict_eval import SentencePair, edit_distance

from genutil import random_sentence

PYTHIA_INPUT = "We must go to Athens."
PYTHIA_OUTPUT = (
    "We must go to Athens. go to [Athens: 2]. go to [Athens: 2]: 2]. "
    "go to [A [Athens: 2]:]: 2]: 2 to [A [A [A: 2]: 2]: 2]: 2 to "
    "[: 2 [A: 2]: 2]: 2 2 2 2 2 to [: 2 [: 2]: 2]: 2 2 2 2 to [: 2 2]: 2 2..."
)


class TestTokenize:
    def test_plain(self):
        assert tokenize("Carl thrust his hands") == ["Carl", "thrust", "his", "hands"]

    def test_periods_stay_attached(self):
        assert tokenize("Mr. Smith left.") == ["Mr.", "Smith", "left."]

    def test_commas_and_quotes_peel(self):
        assert tokenize('said, "so"') == ["said", ",", '"so', '"']


class TestExtractReplacements:
    def test_katharine(self):
        reps = extract_replacements("Katharine smiled.", "Catarine smiled.")
        assert [(r.position, r.original, r.substituted) for r in reps] == [
            (0, "Katharine", "Catarine")
        ]

    def test_identical(self):
        assert extract_replacements("all the same.", "all the same.") == []

    def test_mr_mrs(self):
        reps = extract_replacements("Mr. Smith left.", "Mrs. Smith left.")
        assert [(r.position, r.original, r.substituted) for r in reps] == [
            (0, "Mr.", "Mrs.")
        ]

    def test_count_mismatch_rejected(self):
        with pytest.raises(ValueError, match="token counts"):
            extract_replacements("one two", "one two three")

    @given(st.integers(0, 2**32))
    def test_zero_replacements_iff_token_identity(self, seed):
        rng = random.Random(seed)
        a = random_sentence(rng).clean_text
        b = random_sentence(rng).clean_text
        if len(tokenize(a)) != len(tokenize(b)):
            return
        reps = extract_replacements(a, b)
        assert (reps == []) == (tokenize(a) == tokenize(b))
        assert len(reps) <= len(tokenize(a))


class TestHallucinatedTail:
    def test_pythia_output(self):
        from corefmark.markup import strip_markup

        tail = detect_hallucinated_tail(PYTHIA_INPUT, strip_markup(PYTHIA_OUTPUT))
        assert tail is not None
        assert tail.tail.startswith(" go to")
        assert tail.is_periodic

    def test_identity_no_tail(self):
        assert detect_hallucinated_tail("same text.", "same text.") is None

    def test_shorter_output_no_tail(self):
        assert detect_hallucinated_tail("a longer sentence.", "a longer") is None

    def test_aperiodic_tail(self):
        tail = detect_hallucinated_tail("Start here.", "Start here. qwzjx")
        assert tail is not None
        assert not tail.is_periodic

    @given(st.integers(0, 2**32))
    def test_never_fires_at_zero_distance(self, seed):
        text = random_sentence(random.Random(seed)).clean_text
        assert edit_distance(text, text) == 0
        assert detect_hallucinated_tail(text, text) is None


class TestClassify:
    def pair(self, gold: str, pred: str) -> SentencePair:
        return SentencePair.from_strings(gold, pred)

    def test_exact(self):
        gold = "[Carl: 1] left."
        c = classify(self.pair(gold, gold))
        assert c.label == FailureLabel.EXACT

    def test_annotation_only(self):
        c = classify(self.pair("[Carl: 1] left.", "[Carl: 2] left."))
        assert c.label == FailureLabel.ANNOTATION_ONLY_DIFF

    def test_word_substitution(self):
        c = classify(self.pair("Katharine smiled.", "Catarine smiled."))
        assert c.label == FailureLabel.WORD_SUBSTITUTION

    def test_insertion(self):
        c = classify(
            self.pair(
                "He had cold slimy water next his skin.",
                "He had cold slimy water next to his skin.",
            )
        )
        assert c.label == FailureLabel.WORD_INSERTION_DELETION

    def test_hallucinated_tail_beats_insertion(self):
        c = classify(self.pair(PYTHIA_INPUT, PYTHIA_OUTPUT))
        assert c.label == FailureLabel.HALLUCINATED_TAIL

    def test_truncation(self):
        c = classify(self.pair("He replicates only substrings.", "replicates only"))
        assert c.label == FailureLabel.TRUNCATION

    def test_bracket_mismatch(self):
        # Same tokens but doubled whitespace plus a stray '[': no earlier
        # rule matches, the bracket damage is the distinguishing evidence.
        c = classify(self.pair("Carl left early.", "Carl  left early. ["))
        assert c.label == FailureLabel.BRACKET_MISMATCH
        assert "UnbalancedOpen" in c.evidence

    @given(st.integers(0, 2**32))
    def test_total_and_deterministic(self, seed):
        rng = random.Random(seed)
        gold = serialize(random_sentence(rng))
        pred = serialize(random_sentence(rng))
        pair = SentencePair.from_strings(gold, pred)
        first = classify(pair)
        assert first == classify(pair)
        assert isinstance(first.label, FailureLabel)


class TestFrequencyTable:
    def test_empty(self):
        assert replacement_frequency_table([]) == []

    def test_counting(self):
        reps = extract_replacements("Mr. A met Mr. B.", "Mrs. A met Mrs. B.")
        table = replacement_frequency_table(reps)
        assert table == [("Mr.", "Mrs.", 2)]

    def test_sorted_descending(self):
        pairs = [
            ("their story.", "there story."),
            ("their turn.", "there turn."),
            ("however bad.", "nevertheless bad."),
        ]
        reps = []
        for gold, pred in pairs:
            reps.extend(extract_replacements(gold, pred))
        table = replacement_frequency_table(reps)
        assert table[0] == ("their", "there", 2)
        assert table[1] == ("however", "nevertheless", 1)


class TestAnalyzeCorpus:
    def test_perfect_predictions(self):
        gold = "[Carl: 1] left."
        report = analyze_corpus([SentencePair.from_strings(gold, gold)] * 3)
        assert dict(report.histogram)["Exact"] == 3
        assert report.replacement_table == ()
        assert report.hallucinations == ()

    def test_seeded_replacements_recovered(self):
        pairs = [
            SentencePair.from_strings("Katharine smiled.", "Catarine smiled."),
            SentencePair.from_strings("Mr. Smith left.", "Mrs. Smith left."),
            SentencePair.from_strings("Mr. Jones ran.", "Mrs. Jones ran."),
        ]
        report = analyze_corpus(pairs)
        assert ("Mr.", "Mrs.", 2) in report.replacement_table
        assert ("Katharine", "Catarine", 1) in report.replacement_table

    def test_pythia_counted_as_tail(self):
        report = analyze_corpus(
            [SentencePair.from_strings(PYTHIA_INPUT, PYTHIA_OUTPUT)]
        )
        assert dict(report.histogram)["HallucinatedTail"] == 1
        assert len(report.hallucinations) == 1
        index, tail = report.hallucinations[0]
        assert index == 0 and tail.is_periodic
