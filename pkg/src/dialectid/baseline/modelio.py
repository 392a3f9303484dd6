"""Single-file model serialization.

Layout: an ASCII magic line, an 8-byte little-endian header length, a JSON
header (format version, n-gram range, vocabulary with document frequencies in
index order, label space, dimensions), then the raw parameters — weights
row-major followed by biases, as little-endian 64-bit floats. Loading rejects
unknown magic bytes and format-version mismatches.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from ..fileio import atomic_write
from .features import NgramVocabulary
from .model import SoftmaxClassifier

MAGIC = b"DIALECTID-BASELINE\n"
FORMAT_VERSION = 1
_F64LE = np.dtype("<f8")


def save_model(model: SoftmaxClassifier, vocab: NgramVocabulary, path: str | Path) -> None:
    if model.num_features != len(vocab):
        raise ValidationError(
            f"model has {model.num_features} features but vocabulary has {len(vocab)}"
        )
    index_to_token = sorted(vocab.token_to_index, key=vocab.token_to_index.get)
    header = {
        "format_version": FORMAT_VERSION,
        "n_min": vocab.n_min,
        "n_max": vocab.n_max,
        "num_documents": vocab.num_documents,
        "vocabulary": [[token, vocab.document_frequency[i]] for i, token in enumerate(index_to_token)],
        "label_space": list(model.label_space),
        "num_classes": model.num_classes,
        "num_features": model.num_features,
    }
    header_bytes = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with atomic_write(path, mode="wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(header_bytes)))
        f.write(header_bytes)
        f.write(np.ascontiguousarray(model.weights, dtype=_F64LE).tobytes())
        f.write(np.ascontiguousarray(model.bias, dtype=_F64LE).tobytes())


def load_model(path: str | Path) -> tuple[SoftmaxClassifier, NgramVocabulary]:
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise ValidationError(f"{path}: not a baseline model file (bad magic)")
    offset = len(MAGIC)
    (header_len,) = struct.unpack_from("<Q", raw, offset)
    offset += 8
    try:
        header = json.loads(raw[offset : offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{path}: corrupt model header: {exc}") from exc
    offset += header_len
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            f"{path}: model format version {version} not supported (expected {FORMAT_VERSION})"
        )

    k, d = header["num_classes"], header["num_features"]
    expected = (k * d + k) * 8
    if len(raw) - offset != expected:
        raise ValidationError(
            f"{path}: parameter payload is {len(raw) - offset} bytes, expected {expected}"
        )
    weights = np.frombuffer(raw, dtype=_F64LE, count=k * d, offset=offset).reshape(k, d)
    bias = np.frombuffer(raw, dtype=_F64LE, count=k, offset=offset + k * d * 8)

    vocab = NgramVocabulary(
        n_min=header["n_min"],
        n_max=header["n_max"],
        token_to_index={token: i for i, (token, _) in enumerate(header["vocabulary"])},
        document_frequency=tuple(df for _, df in header["vocabulary"]),
        num_documents=header["num_documents"],
    )
    if len(vocab) != d:
        raise ValidationError(f"{path}: vocabulary size {len(vocab)} != num_features {d}")
    model = SoftmaxClassifier(
        weights=weights.copy(), bias=bias.copy(), label_space=tuple(header["label_space"])
    )
    return model, vocab
