import random

import pytest

from dialectid.corpus import Corpus, LabeledExample
from dialectid.errors import ValidationError
from dialectid.preprocess import (
    CleaningConfig,
    clean_corpus,
    clean_corpus_with_stats,
    clean_text,
    count_noise_tokens,
)


def test_all_noise_tokens_removed():
    assert clean_text("USER NUM URL") == ""


def test_identity_on_clean_text():
    assert clean_text("مرحبا") == "مرحبا"


def test_mixed_noise_and_arabic():
    assert clean_text("USER  مرحبا   URL بكم") == "مرحبا بكم"


def test_token_boundary_not_substring():
    assert clean_text("URLS URL urls") == "URLS urls"


def test_case_sensitive():
    assert clean_text("user USER User") == "user User"


def test_no_collapse_keeps_other_whitespace():
    config = CleaningConfig(collapse_whitespace=False, trim=False)
    assert clean_text("a  b", config) == "a  b"
    # Deleting a token leaves its surrounding whitespace untouched.
    assert clean_text("a USER b", config) == "a  b"


def test_trim_only():
    config = CleaningConfig(collapse_whitespace=False, trim=True)
    assert clean_text("  a b  ", config) == "a b"


def test_custom_noise_tokens():
    config = CleaningConfig(noise_tokens=("FOO",))
    assert clean_text("FOO USER bar", config) == "USER bar"


def test_noise_token_validation():
    with pytest.raises(ValidationError):
        CleaningConfig(noise_tokens=("",))
    with pytest.raises(ValidationError):
        CleaningConfig(noise_tokens=("a b",))


def _random_texts(count, seed):
    rng = random.Random(seed)
    pieces = ["USER", "NUM", "URL", "USERS", "مرحبا", "بكم", "abc", "a", "", " ", "  ", "\t", "\n"]
    return [
        "".join(rng.choice(pieces) for _ in range(rng.randint(0, 12))) for _ in range(count)
    ]


@pytest.mark.parametrize("config", [CleaningConfig(), CleaningConfig(collapse_whitespace=False), CleaningConfig(trim=False)])
def test_idempotence_and_no_survivors(config):
    for text in _random_texts(500, seed=11):
        once = clean_text(text, config)
        assert clean_text(once, config) == once
        assert not set(once.split()) & set(config.noise_tokens)


def test_non_noise_tokens_preserved_in_order():
    config = CleaningConfig()
    for text in _random_texts(300, seed=23):
        kept = [t for t in text.split() if t not in config.noise_tokens]
        assert clean_text(text, config).split() == kept


def test_clean_corpus_preserves_ids_labels_order():
    corpus = Corpus.from_examples(
        [
            LabeledExample("a", "USER hi URL", "X"),
            LabeledExample("b", "URL", "Y"),
            LabeledExample("c", "", None),
        ]
    )
    cleaned = clean_corpus(corpus)
    assert cleaned.ids() == ["a", "b", "c"]
    assert cleaned.labels() == ["X", "Y", None]
    assert cleaned.contents() == ["hi", "", ""]
    assert cleaned.label_space == corpus.label_space


def test_clean_empty_corpus():
    corpus = Corpus.from_examples([])
    assert clean_corpus(corpus) == corpus


def test_total_removal_keeps_rows():
    corpus = Corpus.from_examples([LabeledExample(str(i), "URL", "A") for i in range(5)])
    cleaned, stats = clean_corpus_with_stats(corpus)
    assert len(cleaned) == 5
    assert all(ex.content == "" for ex in cleaned)
    assert stats.emptied_contents == 5
    assert stats.tokens_removed == 5
    assert stats.examples == 5


def test_count_noise_tokens():
    assert count_noise_tokens("USER x URL URL") == 3
    assert count_noise_tokens("nothing here") == 0
