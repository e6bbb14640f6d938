"""Post ingestion: normalization, language filtering, exemplar bootstrapping.

The exemplar corpus is grown from a handful of seed tags: every round fetches
the posts carrying the newest tags, keeps their English text, and widens the
tag lexicon with tags that co-occur on those posts.  The resulting documents
feed the one-class character model in :mod:`spiderveil.langmodel`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import RetrievalError

_MARKUP_RE = re.compile(r"<[^>]*>")
# \t \n \r \f \v count as whitespace and collapse below; the rest is junk.
_CONTROL_RE = re.compile(r"[\x00-\x08\x0e-\x1f\x7f]")
_WHITESPACE_RE = re.compile(r"\s+")
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)

# Function words only.  Content words would drag topical text toward an
# "English" verdict regardless of its actual language.
ENGLISH_FUNCTION_WORDS = frozenset("""
    a about after again all also an and any are as at be because been being
    but by can could did do does down for from had has have he her here him
    his how i if in into is it its just like me more most my no not now of
    off on only or other our out over own same she so some such than that the
    their them then there these they this those through to too under until up
    us very was we were what when where which who why will with would you
    your
""".split())


def normalize_text(raw: str) -> str:
    """Lowercase, strip markup tags and control bytes, collapse whitespace.

    Idempotent: normalizing twice gives the same string.
    """
    text = _MARKUP_RE.sub(" ", raw)
    text = _CONTROL_RE.sub("", text)
    text = _WHITESPACE_RE.sub(" ", text)
    return text.strip().lower()


def normalize_tag(tag: str) -> str:
    """Canonical tag form: lowercase, no leading '#', trimmed."""
    return tag.strip().lstrip("#").strip().lower()


class LanguageVerdict(Enum):
    ENGLISH = "english"
    NON_ENGLISH = "non_english"
    UNDETERMINED = "undetermined"


class StopwordRatioDetector:
    """Default language heuristic: share of English function words among tokens.

    Texts shorter than ``min_length`` characters (or with no word tokens) are
    Undetermined rather than guessed at.
    """

    def __init__(self, min_length: int = 20, ratio: float = 0.12,
                 stopwords: frozenset[str] = ENGLISH_FUNCTION_WORDS):
        self.min_length = min_length
        self.ratio = ratio
        self.stopwords = stopwords

    def __call__(self, text: str) -> LanguageVerdict:
        if len(text) < self.min_length:
            return LanguageVerdict.UNDETERMINED
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            return LanguageVerdict.UNDETERMINED
        hits = sum(1 for t in tokens if t in self.stopwords)
        if hits / len(tokens) >= self.ratio:
            return LanguageVerdict.ENGLISH
        return LanguageVerdict.NON_ENGLISH


DEFAULT_DETECTOR = StopwordRatioDetector()


def detect_language(text: str, detector=None) -> LanguageVerdict:
    """Run ``detector`` (any callable str -> LanguageVerdict) on ``text``."""
    return (detector or DEFAULT_DETECTOR)(text)


class NoteKind(Enum):
    LIKE = "like"
    REBLOG = "reblog"


@dataclass(frozen=True)
class NoteRecord:
    """One like/reblog on a post, newest notes first in a post's list."""
    blog_name: str
    kind: NoteKind


@dataclass(frozen=True)
class Post:
    """A single microblog post with its engagement notes."""
    id: str
    blog_name: str
    body: str
    caption: str = ""
    slug: str = ""
    tags: tuple[str, ...] = ()
    notes: tuple[NoteRecord, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("post id must be non-empty")
        if not self.blog_name:
            raise ValueError("post blog_name must be non-empty")

    def normalized_text(self) -> str:
        """Body and caption joined by a space, then normalized."""
        return normalize_text(self.body + " " + self.caption)


def filter_english(posts, detector=None) -> list[Post]:
    """Keep posts whose combined text reads as English; order preserved.

    Undetermined posts (too short to judge) are retained.
    """
    kept = []
    for post in posts:
        verdict = detect_language(post.normalized_text(), detector)
        if verdict is not LanguageVerdict.NON_ENGLISH:
            kept.append(post)
    return kept


class TagLexicon:
    """Ordered tag set remembering the expansion round that added each tag."""

    def __init__(self, seed_tags=()):
        self._generations: dict[str, int] = {}
        for tag in seed_tags:
            self.add(tag, 0)

    def add(self, tag: str, generation: int) -> bool:
        """Add a tag; the first generation to see it wins.  True if new."""
        tag = normalize_tag(tag)
        if not tag or tag in self._generations:
            return False
        self._generations[tag] = generation
        return True

    def generation(self, tag: str) -> int:
        return self._generations[normalize_tag(tag)]

    def tags(self) -> list[str]:
        return list(self._generations)

    def tags_in_generation(self, generation: int) -> list[str]:
        return [t for t, g in self._generations.items() if g == generation]

    def __contains__(self, tag: str) -> bool:
        return normalize_tag(tag) in self._generations

    def __len__(self) -> int:
        return len(self._generations)

    def __iter__(self):
        return iter(self._generations)

    def to_json_dict(self) -> dict:
        return dict(self._generations)

    @classmethod
    def from_json_dict(cls, data: dict) -> "TagLexicon":
        lex = cls()
        for tag, generation in data.items():
            lex.add(tag, int(generation))
        return lex


@dataclass
class ExemplarCorpus:
    """Normalized on-topic documents used to train the relevance model."""
    documents: list[str] = field(default_factory=list)
    document_ids: list[str] = field(default_factory=list)
    source_tags: list[str] = field(default_factory=list)
    target_size: int = 0

    def save(self, path) -> None:
        """Write one {id, text} JSON object per line."""
        lines = []
        for doc_id, text in zip(self.document_ids, self.documents):
            lines.append(json.dumps({"id": doc_id, "text": text}, sort_keys=True))
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                              encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ExemplarCorpus":
        documents, ids = [], []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            ids.append(record["id"])
            documents.append(record["text"])
        return cls(documents=documents, document_ids=ids,
                   source_tags=[], target_size=len(documents))


def bootstrap_exemplars(store, seed_tags, target_size: int, max_rounds: int = 4,
                        detector=None) -> tuple[ExemplarCorpus, TagLexicon]:
    """Grow an exemplar corpus from seed tags by tag co-occurrence.

    Round g fetches posts for every generation-g tag, keeps normalized
    English texts (deduplicated by post id), and files unseen co-occurring
    tags under generation g+1.  Stops at ``target_size`` documents, after
    ``max_rounds`` rounds, or when a round adds nothing.
    """
    if target_size <= 0:
        raise ValueError("target_size must be positive")
    lexicon = seed_tags if isinstance(seed_tags, TagLexicon) else TagLexicon(seed_tags)
    if len(lexicon) == 0:
        raise ValueError("seed lexicon is empty")

    documents: list[str] = []
    document_ids: list[str] = []
    seen_ids: set[str] = set()
    queried: list[str] = []

    generation = 0
    for _ in range(max_rounds):
        current = lexicon.tags_in_generation(generation)
        if not current or len(documents) >= target_size:
            break
        added_docs = added_tags = 0
        for tag in current:
            if len(documents) >= target_size:
                break
            queried.append(tag)
            try:
                posts = store.tagged_posts(tag, limit=target_size)
            except RetrievalError as err:
                err.tag = tag
                raise
            for post in posts:
                if post.id in seen_ids:
                    continue
                text = post.normalized_text()
                if not text:
                    continue
                if detect_language(text, detector) is LanguageVerdict.NON_ENGLISH:
                    continue
                seen_ids.add(post.id)
                documents.append(text)
                document_ids.append(post.id)
                added_docs += 1
                for co_tag in post.tags:
                    if lexicon.add(co_tag, generation + 1):
                        added_tags += 1
                if len(documents) >= target_size:
                    break
        generation += 1
        if added_docs == 0 and added_tags == 0:
            break

    corpus = ExemplarCorpus(documents=documents, document_ids=document_ids,
                            source_tags=queried, target_size=target_size)
    return corpus, lexicon
