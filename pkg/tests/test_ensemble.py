import math
import random

import pytest

from dialectid.ensemble import (
    VotePolicy,
    agreement_report,
    format_agreement_text,
    hard_vote,
    soft_vote,
    write_agreement_tsv,
)
from dialectid.errors import AlignmentError, ValidationError
from dialectid.predfile import PredictionSet


def make_set(model_id, labels, ids=None, probabilities=None, label_space=None):
    ids = ids or [f"e{i}" for i in range(len(labels))]
    return PredictionSet(
        model_id=model_id,
        entries=tuple(zip(ids, labels)),
        probabilities=probabilities,
        label_space=label_space,
    )


def oracle_mode_vote(per_model_labels, model_ids, tie_break, priority):
    """Brute-force mode with tie policy, written independently of hard_vote."""
    winners = []
    n = len(per_model_labels[0])
    for row in range(n):
        counts = {}
        for labels in per_model_labels:
            counts[labels[row]] = counts.get(labels[row], 0) + 1
        best = max(counts.values())
        tied = sorted(label for label, c in counts.items() if c == best)
        if len(tied) == 1 or tie_break == "lexicographic":
            winners.append(tied[0])
        else:
            for model_id in priority:
                candidate = per_model_labels[model_ids.index(model_id)][row]
                if candidate in tied:
                    winners.append(candidate)
                    break
    return winners


def test_strict_majority():
    sets = [make_set(f"m{i}", labels) for i, labels in enumerate([["A"], ["A"], ["B"]])]
    policy = VotePolicy(tie_break="lexicographic")
    assert hard_vote(sets, policy).labels() == ["A"]


def test_three_way_tie_model_priority():
    sets = [make_set(f"m{i}", [label]) for i, label in enumerate(["A", "B", "C"])]
    policy = VotePolicy(tie_break="model-priority", model_priority=("m0", "m1", "m2"))
    assert hard_vote(sets, policy).labels() == ["A"]
    policy = VotePolicy(tie_break="model-priority", model_priority=("m2", "m0", "m1"))
    assert hard_vote(sets, policy).labels() == ["C"]


def test_tie_lexicographic():
    sets = [make_set(f"m{i}", [label]) for i, label in enumerate(["C", "B"])]
    policy = VotePolicy(tie_break="lexicographic")
    assert hard_vote(sets, policy).labels() == ["B"]


def test_output_model_id_is_ensemble():
    sets = [make_set("x", ["A"]), make_set("y", ["A"])]
    assert hard_vote(sets, VotePolicy(tie_break="lexicographic")).model_id == "ensemble"


def test_hard_vote_matches_oracle_on_random_instances():
    rng = random.Random(2024)
    for _ in range(200):
        n_models = rng.randint(2, 7)
        n_labels = rng.randint(2, 18)
        n_examples = rng.randint(1, 12)
        labels_pool = [f"L{j:02d}" for j in range(n_labels)]
        model_ids = [f"m{j}" for j in range(n_models)]
        per_model = [
            [rng.choice(labels_pool) for _ in range(n_examples)] for _ in range(n_models)
        ]
        tie_break = rng.choice(["model-priority", "lexicographic"])
        priority = model_ids[:]
        rng.shuffle(priority)
        sets = [make_set(mid, labels) for mid, labels in zip(model_ids, per_model)]
        policy = VotePolicy(
            tie_break=tie_break,
            model_priority=tuple(priority) if tie_break == "model-priority" else None,
        )
        expected = oracle_mode_vote(per_model, model_ids, tie_break, priority)
        assert hard_vote(sets, policy).labels() == expected


def test_unanimity_is_policy_independent():
    labels = ["X", "Y", "X"]
    sets = [make_set(f"m{i}", labels) for i in range(3)]
    for policy in (
        VotePolicy(tie_break="lexicographic"),
        VotePolicy(tie_break="model-priority", model_priority=("m2", "m1", "m0")),
    ):
        assert hard_vote(sets, policy).labels() == labels


def test_permutation_invariance_without_ties():
    rng = random.Random(5)
    labels_pool = ["A", "B", "C"]
    per_model = [[rng.choice(labels_pool) for _ in range(30)] for _ in range(5)]
    sets = [make_set(f"m{i}", labels) for i, labels in enumerate(per_model)]
    policy = VotePolicy(tie_break="lexicographic")
    base = hard_vote(sets, policy).labels()
    shuffled = sets[:]
    rng.shuffle(shuffled)
    permuted = hard_vote(shuffled, policy).labels()
    for row in range(30):
        counts = {}
        for labels in per_model:
            counts[labels[row]] = counts.get(labels[row], 0) + 1
        top = sorted(counts.values(), reverse=True)
        if len(top) == 1 or top[0] > top[1]:  # unique modal label
            assert permuted[row] == base[row]


def test_dominant_label_makes_tie_policy_irrelevant():
    rng = random.Random(8)
    pool = ["A", "B", "C", "D"]
    per_model = [[rng.choice(pool) for _ in range(40)] for _ in range(5)]
    sets = [make_set(f"m{i}", labels) for i, labels in enumerate(per_model)]
    policies = [
        VotePolicy(tie_break="lexicographic"),
        VotePolicy(tie_break="model-priority", model_priority=("m4", "m3", "m2", "m1", "m0")),
    ]
    outputs = [hard_vote(sets, policy).labels() for policy in policies]
    for row in range(40):
        counts = {}
        for labels in per_model:
            counts[labels[row]] = counts.get(labels[row], 0) + 1
        top = sorted(counts.values(), reverse=True)
        if len(top) == 1 or top[0] > top[1]:
            assert outputs[0][row] == outputs[1][row]


def test_reads_crlf_prediction_files(tmp_path):
    from dialectid.predfile import read_predictions

    path = tmp_path / "win.tsv"
    path.write_bytes(b"# model_id=w\r\nexample_id\tlabel\r\ne0\tA\r\n")
    assert read_predictions(path, expected_ids=["e0"]).labels() == ["A"]


def test_requires_two_sets():
    with pytest.raises(ValidationError, match=">= 2"):
        hard_vote([make_set("m0", ["A"])], VotePolicy(tie_break="lexicographic"))


def test_misaligned_sets_rejected():
    a = make_set("a", ["A", "B"], ids=["1", "2"])
    b = make_set("b", ["A", "B"], ids=["1", "3"])
    with pytest.raises(AlignmentError):
        hard_vote([a, b], VotePolicy(tie_break="lexicographic"))


def test_priority_must_cover_models():
    sets = [make_set("a", ["A"]), make_set("b", ["B"])]
    with pytest.raises(ValidationError, match="model_priority"):
        hard_vote(sets, VotePolicy(tie_break="model-priority", model_priority=("a",)))
    with pytest.raises(ValidationError, match="model_priority"):
        hard_vote(sets, VotePolicy(tie_break="model-priority", model_priority=None))


def test_soft_vote_mean_argmax():
    a = make_set("a", ["A", "A"], probabilities=((0.6, 0.4), (0.9, 0.1)), label_space=("A", "B"))
    b = make_set("b", ["B", "A"], probabilities=((0.1, 0.9), (0.8, 0.2)), label_space=("A", "B"))
    voted = soft_vote([a, b], VotePolicy(strategy="soft"))
    # means: (0.35, 0.65) -> B ; (0.85, 0.15) -> A
    assert voted.labels() == ["B", "A"]
    assert voted.probabilities[0] == pytest.approx((0.35, 0.65))


def test_soft_vote_identical_inputs():
    probs = ((0.2, 0.8), (0.7, 0.3))
    a = make_set("a", ["B", "A"], probabilities=probs, label_space=("A", "B"))
    b = make_set("b", ["B", "A"], probabilities=probs, label_space=("A", "B"))
    assert soft_vote([a, b], VotePolicy(strategy="soft")).labels() == ["B", "A"]


def test_soft_vote_uniform_ties_to_first_class():
    uniform = ((0.5, 0.5),)
    a = make_set("a", ["B"], probabilities=uniform, label_space=("A", "B"))
    b = make_set("b", ["B"], probabilities=uniform, label_space=("A", "B"))
    assert soft_vote([a, b], VotePolicy(strategy="soft")).labels() == ["A"]


def test_soft_vote_requires_probabilities():
    a = make_set("a", ["A"])
    b = make_set("b", ["A"], probabilities=((1.0, 0.0),), label_space=("A", "B"))
    with pytest.raises(ValidationError, match="probabilities"):
        soft_vote([a, b], VotePolicy(strategy="soft"))


def test_soft_vote_requires_shared_label_space():
    a = make_set("a", ["A"], probabilities=((1.0, 0.0),), label_space=("A", "B"))
    b = make_set("b", ["C"], probabilities=((0.0, 1.0),), label_space=("B", "C"))
    with pytest.raises(ValidationError, match="label space"):
        soft_vote([a, b], VotePolicy(strategy="soft"))


def test_agreement_identical_sets():
    sets = [make_set(f"m{i}", ["A", "B", "C"]) for i in range(3)]
    report = agreement_report(sets)
    assert all(rate == 1.0 for _, _, rate in report.pairwise)
    assert report.split_histogram == {"3": 3}
    assert all(abs(e) < 1e-12 for e in report.vote_entropy)


def test_agreement_disjoint_sets():
    report = agreement_report([make_set("a", ["A", "A"]), make_set("b", ["B", "B"])])
    assert all(rate == 0.0 for _, _, rate in report.pairwise)
    assert report.split_histogram == {"1+1": 2}
    assert report.vote_entropy[0] == pytest.approx(math.log(2))


def test_agreement_hand_counted():
    a = make_set("a", ["A", "A", "B", "C"])
    b = make_set("b", ["A", "B", "B", "C"])
    c = make_set("c", ["A", "A", "A", "C"])
    report = agreement_report([a, b, c])
    rates = {(x, y): r for x, y, r in report.pairwise}
    assert rates[("a", "b")] == pytest.approx(3 / 4)
    assert rates[("a", "c")] == pytest.approx(3 / 4)
    assert rates[("b", "c")] == pytest.approx(2 / 4)
    assert report.split_histogram == {"2+1": 2, "3": 2}


def test_agreement_outputs(tmp_path):
    sets = [make_set("a", ["A", "B"]), make_set("b", ["A", "A"])]
    report = agreement_report(sets)
    write_agreement_tsv(report, tmp_path / "agr.tsv")
    body = (tmp_path / "agr.tsv").read_text()
    assert body.startswith("section\tkey\tvalue\n")
    assert "pairwise\ta|b\t" in body
    text = format_agreement_text(report)
    assert "a vs b" in text
