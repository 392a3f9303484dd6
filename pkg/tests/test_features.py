import math
import random

import numpy as np
import pytest

from dialectid.baseline.features import FeatureVector, fit_vocabulary, iter_ngrams, vectorize
from dialectid.errors import ValidationError


def test_iter_ngrams_enumeration():
    assert list(iter_ngrams("abc", 2, 3)) == ["ab", "bc", "abc"]
    assert list(iter_ngrams("a", 2, 3)) == []


def test_fit_single_text():
    vocab = fit_vocabulary(["ab"], n_min=2, n_max=2, max_features=10)
    assert vocab.token_to_index == {"ab": 0}
    assert vocab.document_frequency == (1,)
    assert vocab.num_documents == 1


def test_fit_two_texts_document_frequency():
    vocab = fit_vocabulary(["abc", "bcd"], n_min=2, n_max=2, max_features=10)
    assert vocab.token_to_index == {"ab": 0, "bc": 1, "cd": 2}
    assert vocab.document_frequency == (1, 2, 1)


def test_fit_max_features_by_df_then_lexicographic():
    # df: ab=2, bb=2, bc=2, cx=1, xy=1 -> keep the two highest-df n-grams,
    # lexicographic order breaking the df tie.
    vocab = fit_vocabulary(["abbc", "abbcxy"], n_min=2, n_max=2, max_features=2)
    assert set(vocab.token_to_index) == {"ab", "bb"}
    # Tie on df: the lexicographically smaller of the tied survivors is kept.
    tied = fit_vocabulary(["zz", "aa"], n_min=2, n_max=2, max_features=1)
    assert set(tied.token_to_index) == {"aa"}


def test_fit_empty_list_errors():
    with pytest.raises(ValidationError):
        fit_vocabulary([], n_min=2, n_max=2, max_features=5)


def test_fit_marker_ngrams_retained_per_class():
    # 18 classes, each with a unique marker trigram in all 10 of its texts
    # (df = 10); every other trigram is a boundary artifact with df = 1, so
    # the 18 markers are exactly the top of the frequency cut.
    texts, markers = [], []
    for k in range(18):
        marker = f"q{chr(ord('a') + k)}x"
        markers.append(marker)
        texts.extend(f"{marker}{d}" for d in range(10))
    vocab = fit_vocabulary(texts, n_min=3, n_max=3, max_features=18)
    assert set(vocab.token_to_index) == set(markers)
    assert all(df == 10 for df in vocab.document_frequency)


def test_vectorize_single_document_identity():
    vocab = fit_vocabulary(["ab"], n_min=2, n_max=2, max_features=10)
    # tf=1, idf = ln(2/2) + 1 = 1, L2 norm -> weight exactly 1.
    assert vectorize("ab", vocab).as_pairs() == [(0, 1.0)]


def test_vectorize_idf_formula():
    vocab = fit_vocabulary(["abc", "bcd"], n_min=2, n_max=2, max_features=10)
    vec = vectorize("ab", vocab)
    expected_idf = math.log((1 + 2) / (1 + 1)) + 1
    assert vec.as_pairs() == [(0, 1.0)]  # single feature normalizes to 1
    raw = vectorize("abbc", vocab)  # "ab","bb","bc": bb is OOV
    idf_ab = math.log(3 / 2) + 1
    idf_bc = math.log(3 / 3) + 1
    norm = math.hypot(idf_ab, idf_bc)
    pairs = dict(raw.as_pairs())
    assert pairs[0] == pytest.approx(idf_ab / norm, abs=1e-12)
    assert pairs[1] == pytest.approx(idf_bc / norm, abs=1e-12)
    assert expected_idf == pytest.approx(idf_ab)


def test_vectorize_oov_only_gives_zero_vector():
    vocab = fit_vocabulary(["ab"], n_min=2, n_max=2, max_features=10)
    assert len(vectorize("zz", vocab)) == 0
    assert len(vectorize("", vocab)) == 0


def test_vectorize_unit_norm_property():
    rng = random.Random(17)
    alphabet = "abcdefg "
    texts = ["".join(rng.choice(alphabet) for _ in range(rng.randint(2, 40))) for _ in range(200)]
    vocab = fit_vocabulary(texts, n_min=2, n_max=4, max_features=500)
    for text in texts:
        vec = vectorize(text, vocab)
        if len(vec):
            assert vec.norm() == pytest.approx(1.0, abs=1e-9)
            assert np.all(np.diff(vec.indices) > 0)


def test_feature_vector_rejects_unsorted():
    with pytest.raises(ValidationError):
        FeatureVector(indices=np.array([3, 1]), values=np.array([0.5, 0.5]))
