"""Round-trip and idempotence properties of the markup grammar."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from corefmark.markup import parse_lenient, parse_strict, serialize, strip_markup

from genutil import random_sentence

seeds = st.integers(min_value=0, max_value=2**48)


@given(seeds)
def test_parse_serialize_round_trip(seed):
    s = random_sentence(random.Random(seed))
    assert parse_strict(serialize(s)) == s


@given(seeds)
def test_strip_serialize_is_clean_text(seed):
    s = random_sentence(random.Random(seed))
    assert strip_markup(serialize(s)) == s.clean_text


@given(seeds)
def test_lenient_equals_strict_on_clean_input(seed):
    raw = serialize(random_sentence(random.Random(seed)))
    lenient, issues = parse_lenient(raw)
    assert issues == []
    assert lenient == parse_strict(raw)


@given(seeds)
def test_strip_idempotent(seed):
    raw = serialize(random_sentence(random.Random(seed)))
    once = strip_markup(raw)
    assert strip_markup(once) == once


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80))
@settings(max_examples=300)
def test_lenient_never_fails_and_strip_idempotent_on_noise(text):
    sentence, _ = parse_lenient(text)
    assert strip_markup(sentence.clean_text) == sentence.clean_text


@given(seeds)
def test_bracket_count_matches_mentions(seed):
    s = random_sentence(random.Random(seed))
    raw = serialize(s)
    assert raw.count("[") == len(s.mentions)
    assert raw.count("]") == len(s.mentions)
