"""Noise-token removal and whitespace normalization for tweet text.

The dataset ships with placeholder tokens ("USER", "NUM", "URL") standing in
for mentions, numbers, and links. Cleaning deletes whitespace-delimited tokens
that exactly match a noise token — never substrings, so Arabic words and
tokens like "URLS" pass through untouched — then optionally collapses
whitespace runs and trims the ends. Everything here is a pure function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Corpus, LabeledExample
from .errors import ValidationError

DEFAULT_NOISE_TOKENS = ("USER", "NUM", "URL")

_WHITESPACE_RUN = re.compile(r"\s+")
# Split into alternating non-space / space chunks, keeping the separators.
_TOKEN_SPLIT = re.compile(r"(\s+)")


@dataclass(frozen=True)
class CleaningConfig:
    noise_tokens: tuple[str, ...] = DEFAULT_NOISE_TOKENS
    collapse_whitespace: bool = True
    trim: bool = True

    def __post_init__(self):
        object.__setattr__(self, "noise_tokens", tuple(self.noise_tokens))
        for token in self.noise_tokens:
            if not token or _WHITESPACE_RUN.search(token):
                raise ValidationError(f"noise token {token!r} must be non-empty and whitespace-free")


@dataclass
class CleaningStats:
    examples: int = 0
    tokens_removed: int = 0
    emptied_contents: int = 0


def clean_text(text: str, config: CleaningConfig | None = None) -> str:
    """Delete noise tokens (exact, case-sensitive token matches) from `text`.

    With collapse_whitespace, any whitespace run becomes a single space; with
    trim, leading/trailing whitespace is dropped. All other characters are
    preserved verbatim. Idempotent for any config.
    """
    config = config or CleaningConfig()
    noise = set(config.noise_tokens)
    parts = _TOKEN_SPLIT.split(text)
    # Even positions are tokens (possibly empty at the ends), odd are whitespace.
    cleaned = "".join("" if i % 2 == 0 and part in noise else part for i, part in enumerate(parts))
    if config.collapse_whitespace:
        cleaned = _WHITESPACE_RUN.sub(" ", cleaned)
    if config.trim:
        cleaned = cleaned.strip()
    return cleaned


def count_noise_tokens(text: str, config: CleaningConfig | None = None) -> int:
    """Number of whitespace-delimited tokens clean_text would delete."""
    config = config or CleaningConfig()
    noise = set(config.noise_tokens)
    return sum(1 for token in text.split() if token in noise)


def clean_corpus(corpus: Corpus, config: CleaningConfig | None = None) -> Corpus:
    """Map clean_text over every example's content; ids, labels, order unchanged."""
    cleaned, _ = clean_corpus_with_stats(corpus, config)
    return cleaned


def clean_corpus_with_stats(
    corpus: Corpus, config: CleaningConfig | None = None
) -> tuple[Corpus, CleaningStats]:
    """clean_corpus plus counts surfaced by the CLI (emptied rows are kept)."""
    config = config or CleaningConfig()
    stats = CleaningStats(examples=len(corpus))
    examples = []
    for ex in corpus:
        content = clean_text(ex.content, config)
        stats.tokens_removed += count_noise_tokens(ex.content, config)
        if content == "" and ex.content != "":
            stats.emptied_contents += 1
        examples.append(LabeledExample(id=ex.id, content=content, label=ex.label))
    return Corpus(examples=tuple(examples), label_space=corpus.label_space), stats
