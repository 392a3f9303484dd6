import random

import pytest

from dialectid.corpus import (
    Corpus,
    LabeledExample,
    SplitSpec,
    load_corpus,
    save_corpus,
    split_corpus,
    split_sizes,
)
from dialectid.errors import EncodingError, ParseError, ValidationError

PAPER_FRACTIONS = (10 / 13, 1 / 13, 2 / 13)


def write(path, text):
    path.write_bytes(text.encode("utf-8"))
    return path


def test_load_tsv_basic(tmp_path):
    path = write(tmp_path / "c.tsv", "id\tcontent\tlabel\n1\tمرحبا\tEgypt\n2\thello USER\tSyria\n")
    corpus = load_corpus(path)
    assert len(corpus) == 2
    assert corpus.examples[0] == LabeledExample("1", "مرحبا", "Egypt")
    assert corpus.label_space == ("Egypt", "Syria")


def test_load_header_only(tmp_path):
    path = write(tmp_path / "c.tsv", "id\tcontent\tlabel\n")
    corpus = load_corpus(path)
    assert len(corpus) == 0
    assert corpus.label_space == ()


def test_label_space_sorted_distinct(tmp_path):
    rows = ["id\tcontent\tlabel"] + [
        f"{i}\tx\t{label}" for i, label in enumerate(["B", "A", "A", "C", "B"])
    ]
    corpus = load_corpus(write(tmp_path / "c.tsv", "\n".join(rows) + "\n"))
    assert corpus.label_space == ("A", "B", "C")


def test_load_without_label_column(tmp_path):
    corpus = load_corpus(write(tmp_path / "c.tsv", "id\tcontent\n1\tabc\n"))
    assert corpus.examples[0].label is None
    assert corpus.label_space == ()


def test_load_empty_label_cell_means_unlabeled(tmp_path):
    corpus = load_corpus(write(tmp_path / "c.tsv", "id\tcontent\tlabel\n1\tabc\t\n2\tdef\tA\n"))
    assert corpus.examples[0].label is None
    assert corpus.examples[1].label == "A"


def test_load_wrong_column_count_names_line(tmp_path):
    path = write(tmp_path / "c.tsv", "id\tcontent\tlabel\n1\ta\tA\n2\tb\n")
    with pytest.raises(ParseError, match="line 3"):
        load_corpus(path)


def test_load_duplicate_id(tmp_path):
    path = write(tmp_path / "c.tsv", "id\tcontent\n1\ta\n1\tb\n")
    with pytest.raises(ValidationError, match="duplicate"):
        load_corpus(path)


def test_load_non_utf8(tmp_path):
    path = tmp_path / "c.tsv"
    path.write_bytes(b"id\tcontent\n1\t\xff\xfe\n")
    with pytest.raises(EncodingError):
        load_corpus(path)


def test_load_missing_required_column(tmp_path):
    path = write(tmp_path / "c.tsv", "id\ttext\n1\ta\n")
    with pytest.raises(ParseError):
        load_corpus(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path / "nope.tsv")


def _random_corpus(rng, n, labels=("A", "B", "C")):
    examples = [
        LabeledExample(
            id=f"id{i}",
            content="".join(rng.choice("ab cd") for _ in range(rng.randint(0, 12))),
            label=rng.choice(labels) if rng.random() < 0.9 else None,
        )
        for i in range(n)
    ]
    return Corpus.from_examples(examples)


@pytest.mark.parametrize("fmt", ["tsv", "csv"])
def test_round_trip_load_save(tmp_path, fmt):
    rng = random.Random(7)
    corpus = _random_corpus(rng, 50)
    path = tmp_path / f"c.{fmt}"
    save_corpus(corpus, path, fmt)
    assert load_corpus(path, fmt) == corpus


@pytest.mark.parametrize("fmt", ["tsv", "csv"])
def test_byte_stable_reserialization(tmp_path, fmt):
    rng = random.Random(13)
    corpus = _random_corpus(rng, 30)
    first = tmp_path / f"a.{fmt}"
    second = tmp_path / f"b.{fmt}"
    save_corpus(corpus, first, fmt)
    save_corpus(load_corpus(first, fmt), second, fmt)
    assert first.read_bytes() == second.read_bytes()


def test_csv_embedded_tab_quoted_round_trip(tmp_path):
    corpus = Corpus.from_examples(
        [LabeledExample("1", "a\tb, with \"quotes\"", "A"), LabeledExample("2", "line\nbreak", "A")]
    )
    path = tmp_path / "c.csv"
    save_corpus(corpus, path, "csv")
    assert load_corpus(path, "csv") == corpus


def test_tsv_rejects_embedded_tab(tmp_path):
    corpus = Corpus.from_examples([LabeledExample("1", "a\tb", "A")])
    with pytest.raises(ValidationError, match="tab"):
        save_corpus(corpus, tmp_path / "c.tsv", "tsv")


def test_save_empty_corpus_header_only(tmp_path):
    path = tmp_path / "c.tsv"
    save_corpus(Corpus.from_examples([]), path, "tsv")
    assert path.read_text() == "id\tcontent\n"


def test_label_space_invariant_under_reordering():
    rng = random.Random(3)
    corpus = _random_corpus(rng, 40)
    shuffled = list(corpus.examples)
    rng.shuffle(shuffled)
    assert Corpus.from_examples(shuffled).label_space == corpus.label_space


def test_corpus_rejects_label_outside_space():
    with pytest.raises(ValidationError):
        Corpus(examples=(LabeledExample("1", "x", "Z"),), label_space=("A",))


def test_split_sizes_paper_fractions():
    spec = SplitSpec(*PAPER_FRACTIONS, seed=0)
    assert split_sizes(23400, spec) == (18000, 1800, 3600)


def test_load_and_split_paper_scale(tmp_path):
    rows = ["id\tcontent\tlabel"] + [f"t{i}\ttweet {i}\tD{i % 18:02d}" for i in range(23400)]
    corpus = load_corpus(write(tmp_path / "full.tsv", "\n".join(rows) + "\n"))
    assert len(corpus) == 23400
    assert len(corpus.label_space) == 18
    train, dev, test = split_corpus(corpus, SplitSpec(*PAPER_FRACTIONS, seed=42))
    assert (len(train), len(dev), len(test)) == (18000, 1800, 3600)


def test_split_degenerate_empty_split():
    corpus = Corpus.from_examples([LabeledExample(f"{i}", "x", "A") for i in range(10)])
    with pytest.raises(ValidationError, match="degenerate"):
        split_corpus(corpus, SplitSpec(1.0, 0.0, 0.0, seed=1))


def test_split_fractions_must_sum_to_one():
    with pytest.raises(ValidationError):
        SplitSpec(0.5, 0.2, 0.2, seed=0)


def test_split_deterministic_and_partition():
    rng = random.Random(99)
    corpus = _random_corpus(rng, 100)
    spec = SplitSpec(0.8, 0.1, 0.1, seed=7)
    first = split_corpus(corpus, spec)
    second = split_corpus(corpus, spec)
    assert [len(p) for p in first] == [80, 10, 10]
    assert first == second
    ids = sorted(ex.id for part in first for ex in part)
    assert ids == sorted(corpus.ids())
    assert all(part.label_space == corpus.label_space for part in first)


def test_split_different_seeds_differ():
    corpus = Corpus.from_examples([LabeledExample(f"{i}", "x", "A") for i in range(100)])
    a = split_corpus(corpus, SplitSpec(0.8, 0.1, 0.1, seed=1))
    b = split_corpus(corpus, SplitSpec(0.8, 0.1, 0.1, seed=2))
    assert a[1].ids() != b[1].ids()
