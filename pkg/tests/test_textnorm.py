import pytest
from hypothesis import given
from hypothesis import strategies as st

from stpipe.errors import NotANumber, TooLarge
from stpipe.textnorm import is_spoken_form, normalize_written_to_spoken, number_to_words

from oracles import cardinal_0_9999


@pytest.mark.parametrize("numeral, words", [
    ("0", "zero"),
    ("42", "forty two"),
    ("2.5", "two point five"),
    ("101", "one hundred one"),
    ("1000", "one thousand"),
    ("1000001", "one million one"),
    ("3.14", "three point one four"),
    ("0.05", "zero point zero five"),
    ("999999999999999", "nine hundred ninety nine trillion nine hundred ninety nine billion "
                        "nine hundred ninety nine million nine hundred ninety nine thousand "
                        "nine hundred ninety nine"),
])
def test_number_to_words(numeral, words):
    assert number_to_words(numeral) == words


@pytest.mark.parametrize("bad", ["", "1.2.3", "-4", "4.", ".5", "1e5", "12a", " 1"])
def test_number_to_words_rejects(bad):
    with pytest.raises(NotANumber):
        number_to_words(bad)


def test_number_too_large():
    with pytest.raises(TooLarge):
        number_to_words("1" + "0" * 15)


def test_oracle_agreement_0_9999():
    mismatches = [n for n in range(10000) if number_to_words(str(n)) != cardinal_0_9999(n)]
    assert mismatches == []


@pytest.mark.parametrize("text, tokens", [
    ("Hello, World!", ["hello", "world"]),
    ("It's 2 PM.", ["it's", "two", "pm"]),
    ("", []),
    ("The 3D film cost $1,200 (roughly).", ["the", "three", "d", "film", "cost", "one", "thousand",
                                           "two", "hundred", "roughly"]),
    ("'Quoted' rock 'n' roll", ["quoted", "rock", "n", "roll"]),
    ("Pi is 3.14; e is 2.71...", ["pi", "is", "three", "point", "one", "four", "e", "is", "two",
                                  "point", "seven", "one"]),
    ("Über Café \u2014 naïve!", ["über", "café", "naïve"]),
    ("don’t stop", ["don't", "stop"]),
    ("50% & more", ["fifty", "more"]),
])
def test_normalize_examples(text, tokens):
    assert normalize_written_to_spoken(text) == tokens


def test_oversized_numeral_read_digitwise():
    assert normalize_written_to_spoken("1234567890123456") == (
        "one two three four five six seven eight nine zero one two three four five six".split())


def test_is_spoken_form():
    assert is_spoken_form(["hello", "world"])
    assert is_spoken_form([])
    assert is_spoken_form(["it's"])
    assert not is_spoken_form(["Hello"])
    assert not is_spoken_form(["two", "2"])
    assert not is_spoken_form(["'tis"])
    assert not is_spoken_form([""])
    assert not is_spoken_form(["a-b"])


@given(st.text(max_size=80))
def test_normalize_idempotent_and_valid(text):
    once = normalize_written_to_spoken(text)
    assert is_spoken_form(once)
    assert normalize_written_to_spoken(" ".join(once)) == once
