import os
import random

import pytest

# The smoke suite must run without network: checkpoints are built locally.
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("HF_HUB_OFFLINE", "1")

LABELS = ("Egypt", "Morocco", "Syria", "Yemen")
MARKERS = {"Egypt": "zqegy", "Morocco": "zqmor", "Syria": "zqsyr", "Yemen": "zqyem"}
FILLER = ("ya", "fi", "ana", "min", "bas", "dar")


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A local BERT checkpoint small enough to fine-tune in seconds."""
    import torch
    from transformers import BertConfig, BertModel, BertTokenizerFast

    ckpt_dir = tmp_path_factory.mktemp("tiny-ckpt")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += list("abcdefghijklmnopqrstuvwxyz") + ["##" + c for c in "abcdefghijklmnopqrstuvwxyz"]
    vocab_file = ckpt_dir / "base-vocab.txt"
    vocab_file.write_text("\n".join(vocab) + "\n", encoding="utf-8")

    tokenizer = BertTokenizerFast(vocab_file=str(vocab_file), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(1234)
    BertModel(config).save_pretrained(ckpt_dir)
    tokenizer.save_pretrained(ckpt_dir)
    return str(ckpt_dir)


def make_corpus_rows(n, seed, labeled=True):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        label = LABELS[i % len(LABELS)]
        words = [MARKERS[label]] * 2 + [rng.choice(FILLER) for _ in range(rng.randint(2, 5))]
        rng.shuffle(words)
        rows.append((f"hf{i:04d}", " ".join(words), label if labeled else None))
    return rows


def write_corpus(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        labeled = any(label is not None for _, _, label in rows)
        f.write("id\tcontent\tlabel\n" if labeled else "id\tcontent\n")
        for ex_id, content, label in rows:
            if labeled:
                f.write(f"{ex_id}\t{content}\t{label or ''}\n")
            else:
                f.write(f"{ex_id}\t{content}\n")


@pytest.fixture(scope="session")
def smoke_corpora(tmp_path_factory):
    base = tmp_path_factory.mktemp("corpora")
    train = base / "train.tsv"
    evaluation = base / "eval.tsv"
    write_corpus(train, make_corpus_rows(50, seed=5))
    write_corpus(evaluation, make_corpus_rows(20, seed=6))
    return {"train": str(train), "eval": str(evaluation)}
