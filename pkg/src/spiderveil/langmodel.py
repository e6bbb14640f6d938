"""One-class character n-gram relevance model.

A single model is trained on on-topic exemplar documents.  A text is scored
by the mean log10 probability per character under additive smoothing; a
blogger whose posts score strictly above a threshold (the mean score of a
set of trusted seed bloggers) is judged relevant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ScoringError

SENTINEL = "\x02"   # start-of-document padding character
UNKNOWN = "\x01"    # bucket every character unseen in training maps to

MODEL_FORMAT = "spiderveil.ngram"
MODEL_VERSION = 1


class Verdict(Enum):
    RELEVANT = "relevant"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RelevanceScore:
    """Mean log10 character probability; always negative for real text."""
    value: float


@dataclass(frozen=True)
class Threshold:
    """Classification cut: mean of the seed bloggers' scores."""
    value: float
    seed_count: int

    def __post_init__(self):
        if self.seed_count < 1:
            raise ValueError("threshold needs at least one seed score")
        if not math.isfinite(self.value):
            raise ValueError("threshold value must be finite")


class NGramModel:
    """Character n-gram counts with additive smoothing.

    ``counts`` maps a context string of length order-1 to per-character
    counts.  The vocabulary is every character observed in training plus the
    start sentinel; one extra smoothing slot is reserved for the unknown
    bucket, so each conditional is

        (count + alpha) / (context_total + alpha * (|vocabulary| + 1))
    """

    def __init__(self, order: int, alpha: float,
                 counts: dict[str, dict[str, int]],
                 vocabulary: frozenset[str], trained_chars: int):
        if order < 1:
            raise ValueError("order must be >= 1")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.order = order
        self.alpha = alpha
        self.counts = counts
        self.vocabulary = vocabulary
        self.trained_chars = trained_chars
        self._totals = {ctx: sum(row.values()) for ctx, row in counts.items()}

    def probability(self, context: str, char: str) -> float:
        """Smoothed P(char | context); both already mapped to the vocabulary."""
        row = self.counts.get(context)
        total = self._totals.get(context, 0)
        count = row.get(char, 0) if row else 0
        denom = total + self.alpha * (len(self.vocabulary) + 1)
        return (count + self.alpha) / denom

    def map_char(self, char: str) -> str:
        return char if char in self.vocabulary else UNKNOWN

    def __eq__(self, other) -> bool:
        if not isinstance(other, NGramModel):
            return NotImplemented
        return (self.order == other.order and self.alpha == other.alpha
                and self.counts == other.counts
                and self.vocabulary == other.vocabulary
                and self.trained_chars == other.trained_chars)

    def to_json_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "order": self.order,
            "alpha": self.alpha,
            "vocabulary": sorted(self.vocabulary),
            "trained_chars": self.trained_chars,
            "contexts": {ctx: dict(sorted(row.items()))
                         for ctx, row in sorted(self.counts.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NGramModel":
        if data.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a {MODEL_FORMAT} document")
        if data.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {data.get('version')!r}")
        counts = {ctx: {ch: int(n) for ch, n in row.items()}
                  for ctx, row in data["contexts"].items()}
        return cls(order=int(data["order"]), alpha=float(data["alpha"]),
                   counts=counts, vocabulary=frozenset(data["vocabulary"]),
                   trained_chars=int(data["trained_chars"]))


def train(corpus, order: int = 3, alpha: float = 1.0) -> NGramModel:
    """Count every order-length window of every document.

    Documents are padded with order-1 start sentinels, so each character is
    the target of exactly one window.  ``corpus`` may be an ExemplarCorpus
    or any iterable of strings.
    """
    documents = getattr(corpus, "documents", corpus)
    if order < 1:
        raise ValueError("order must be >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")

    counts: dict[str, dict[str, int]] = {}
    vocabulary = {SENTINEL}
    trained_chars = 0
    for doc in documents:
        if not doc:
            continue
        vocabulary.update(doc)
        padded = SENTINEL * (order - 1) + doc
        for i in range(order - 1, len(padded)):
            context = padded[i - order + 1:i]
            row = counts.setdefault(context, {})
            char = padded[i]
            row[char] = row.get(char, 0) + 1
            trained_chars += 1
    if trained_chars == 0:
        raise ValueError("corpus has no non-empty documents")
    return NGramModel(order=order, alpha=alpha, counts=counts,
                      vocabulary=frozenset(vocabulary),
                      trained_chars=trained_chars)


def score_text(model: NGramModel, text: str) -> RelevanceScore:
    """Mean log10 probability per character of ``text`` under ``model``.

    The text is expected to be normalized already; characters outside the
    model vocabulary fall into the unknown bucket.
    """
    if not text:
        raise ScoringError("cannot score empty text")
    mapped = "".join(model.map_char(c) for c in text)
    padded = SENTINEL * (model.order - 1) + mapped
    total = 0.0
    for i in range(model.order - 1, len(padded)):
        context = padded[i - model.order + 1:i]
        total += math.log10(model.probability(context, padded[i]))
    return RelevanceScore(total / len(text))


def score_blogger(model: NGramModel, posts) -> RelevanceScore:
    """Score a blogger's whole output as one text.

    Equals score_text of the posts' normalized texts joined by newlines;
    character weighting therefore favors longer posts.
    """
    texts = [post.normalized_text() for post in posts]
    texts = [t for t in texts if t]
    if not texts:
        raise ScoringError("blogger has no scoreable text")
    return score_text(model, "\n".join(texts))


def compute_threshold(scores) -> Threshold:
    """Arithmetic mean of seed blogger scores (RelevanceScore or float)."""
    values = [s.value if isinstance(s, RelevanceScore) else float(s)
              for s in scores]
    if not values:
        raise ValueError("no seed scores given")
    return Threshold(value=math.fsum(values) / len(values),
                     seed_count=len(values))


def classify(score: RelevanceScore, threshold: "Threshold | float") -> Verdict:
    """Relevant only when strictly above the threshold."""
    cutoff = threshold.value if isinstance(threshold, Threshold) else threshold
    if score.value > cutoff:
        return Verdict.RELEVANT
    return Verdict.UNKNOWN


def save_model(model: NGramModel, path) -> None:
    Path(path).write_text(
        json.dumps(model.to_json_dict(), sort_keys=True, ensure_ascii=True),
        encoding="utf-8")


def load_model(path) -> NGramModel:
    return NGramModel.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
