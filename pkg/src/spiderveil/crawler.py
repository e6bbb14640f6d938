"""Topical crawl engine.

A self-avoiding walk over bloggers: fetch a blogger's recent text posts,
score them with the one-class model, and if the blogger clears the threshold
add them to the community graph and queue the people who liked or reblogged
those posts.  The next blogger to visit is picked either uniformly at random
or by the propagated mass of a Markov chain over the graph built so far.
"""

from __future__ import annotations

import json
import logging
import math
import random
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from urllib.parse import quote

import numpy as np
import requests

from .corpus import NoteKind, NoteRecord, Post, filter_english, normalize_tag
from .errors import GraphFormatError, NotFoundError, RetrievalError, ScoringError
from .langmodel import NGramModel, Verdict, classify, score_blogger
from .socialgraph import CommunityGraph

logger = logging.getLogger("spiderveil.crawler")

CHECKPOINT_FORMAT = "spiderveil.checkpoint"
CHECKPOINT_VERSION = 1

# The selection chain is propagated one step per completed visit, capped so
# that selection stays cheap on large graphs; the chain has long converged
# by then.
PROPAGATION_CAP = 64

FIXTURE_SCHEMA = {
    "type": "object",
    "required": ["blogs", "posts"],
    "properties": {
        "blogs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {"name": {"type": "string", "minLength": 1}},
            },
        },
        "posts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "blog_name", "type"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "blog_name": {"type": "string", "minLength": 1},
                    "type": {"type": "string", "minLength": 1},
                    "body": {"type": "string"},
                    "caption": {"type": "string"},
                    "slug": {"type": "string"},
                    "tags": {"type": "array", "items": {"type": "string"}},
                    "notes": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["blog_name", "kind"],
                            "properties": {
                                "blog_name": {"type": "string", "minLength": 1},
                                "kind": {"enum": ["like", "reblog"]},
                            },
                        },
                    },
                },
            },
        },
        "seed": {"type": "string", "minLength": 1},
    },
}


def validate_fixture(data: dict) -> None:
    """Raise GraphFormatError unless ``data`` matches the fixture schema."""
    import jsonschema

    try:
        jsonschema.validate(data, FIXTURE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise GraphFormatError(f"bad fixture store: {exc.message}") from exc
    seen = set()
    for record in data["posts"]:
        if record["id"] in seen:
            raise GraphFormatError(f"duplicate post id {record['id']!r}")
        seen.add(record["id"])


def post_from_record(record: dict) -> tuple[str, Post]:
    """Parse one store record into (post type, Post)."""
    try:
        notes = tuple(NoteRecord(n["blog_name"], NoteKind(n["kind"]))
                      for n in record.get("notes", []))
        tags = tuple(t for t in (normalize_tag(raw) for raw in record.get("tags", ())) if t)
        post = Post(id=str(record["id"]), blog_name=record["blog_name"],
                    body=record.get("body", ""), caption=record.get("caption", ""),
                    slug=record.get("slug", ""), tags=tags, notes=notes)
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad post record: {exc}") from exc
    return record.get("type", "text"), post


def slice_notes(notes, per_kind_limit: int | None) -> list[NoteRecord]:
    """First ``per_kind_limit`` notes of each kind, original order kept."""
    if per_kind_limit is None:
        return list(notes)
    taken: dict[NoteKind, int] = {}
    out = []
    for note in notes:
        count = taken.get(note.kind, 0)
        if count < per_kind_limit:
            out.append(note)
            taken[note.kind] = count + 1
    return out


class FixtureStore:
    """Data source backed by one JSON document.

    Post arrays are ordered most-recent-first, so "the newest N" is a prefix
    slice.  Responses are deterministic for identical requests.
    """

    def __init__(self, data: dict, validate: bool = True):
        if validate:
            validate_fixture(data)
        self._posts: list[tuple[str, Post]] = []
        self._by_id: dict[str, int] = {}
        self._by_blogger: dict[str, list[int]] = {}
        self._by_tag: dict[str, list[int]] = {}
        self._blogs = {blog["name"] for blog in data.get("blogs", [])}
        self.seed_blogger: str | None = data.get("seed")
        for record in data["posts"]:
            post_type, post = post_from_record(record)
            index = len(self._posts)
            if post.id in self._by_id:
                raise GraphFormatError(f"duplicate post id {post.id!r}")
            self._posts.append((post_type, post))
            self._by_id[post.id] = index
            self._by_blogger.setdefault(post.blog_name, []).append(index)
            for tag in post.tags:
                self._by_tag.setdefault(tag, []).append(index)

    @classmethod
    def load(cls, path, validate: bool = True) -> "FixtureStore":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"store file is not valid JSON: {exc}") from exc
        return cls(data, validate=validate)

    def blog_names(self) -> list[str]:
        return sorted(self._blogs | set(self._by_blogger))

    def tagged_posts(self, tag: str, limit: int | None = None,
                     type: str = "text") -> list[Post]:
        indexes = self._by_tag.get(normalize_tag(tag), [])
        posts = [self._posts[i][1] for i in indexes if self._posts[i][0] == type]
        return posts[:limit] if limit is not None else posts

    def blogger_posts(self, blog_name: str, limit: int | None = None,
                      type: str = "text") -> list[Post]:
        if blog_name not in self._blogs and blog_name not in self._by_blogger:
            raise NotFoundError(f"unknown blogger {blog_name!r}")
        indexes = self._by_blogger.get(blog_name, [])
        posts = [self._posts[i][1] for i in indexes if self._posts[i][0] == type]
        return posts[:limit] if limit is not None else posts

    def notes(self, post_id: str, per_kind_limit: int | None = None) -> list[NoteRecord]:
        index = self._by_id.get(post_id)
        if index is None:
            raise NotFoundError(f"unknown post {post_id!r}")
        return slice_notes(self._posts[index][1].notes, per_kind_limit)


class HttpJsonStore:
    """Read-only JSON client speaking the fixture schema over HTTP.

    Endpoints: /tagged/{tag}, /blog/{name}/posts, /post/{id}/notes, each
    accepting a ``limit`` query parameter.  Transient failures are retried;
    404 means the blogger or post does not exist.
    """

    def __init__(self, base_url: str, timeout: float = 5.0, retries: int = 3,
                 backoff: float = 0.1, session=None):
        if retries < 1:
            raise ValueError("retries must be >= 1")
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._session = session or requests.Session()

    def _get(self, path: str, params: dict) -> dict:
        params = {k: v for k, v in params.items() if v is not None}
        failure: Exception | None = None
        for attempt in range(1, self.retries + 1):
            try:
                response = self._session.get(self.base_url + path, params=params,
                                             timeout=self.timeout)
            except requests.RequestException as exc:
                failure = exc
            else:
                if response.status_code == 404:
                    raise NotFoundError(f"{path} not found")
                if response.status_code == 200:
                    try:
                        return response.json()
                    except ValueError as exc:
                        failure = exc
                else:
                    failure = RuntimeError(f"HTTP {response.status_code}")
            if attempt < self.retries and self.backoff > 0:
                time.sleep(self.backoff * attempt)
        raise RetrievalError(
            f"GET {path} failed after {self.retries} attempts: {failure}",
            retries=self.retries)

    @staticmethod
    def _parse_posts(payload: dict, type: str) -> list[Post]:
        records = payload.get("posts", [])
        out = []
        for record in records:
            post_type, post = post_from_record(record)
            if post_type == type:
                out.append(post)
        return out

    def tagged_posts(self, tag: str, limit: int | None = None,
                     type: str = "text") -> list[Post]:
        payload = self._get(f"/tagged/{quote(normalize_tag(tag))}",
                            {"limit": limit, "type": type})
        posts = self._parse_posts(payload, type)
        return posts[:limit] if limit is not None else posts

    def blogger_posts(self, blog_name: str, limit: int | None = None,
                      type: str = "text") -> list[Post]:
        payload = self._get(f"/blog/{quote(blog_name)}/posts",
                            {"limit": limit, "type": type})
        posts = self._parse_posts(payload, type)
        return posts[:limit] if limit is not None else posts

    def notes(self, post_id: str, per_kind_limit: int | None = None) -> list[NoteRecord]:
        payload = self._get(f"/post/{quote(post_id)}/notes",
                            {"limit": per_kind_limit})
        try:
            notes = [NoteRecord(n["blog_name"], NoteKind(n["kind"]))
                     for n in payload.get("notes", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"bad notes payload: {exc}") from exc
        return slice_notes(notes, per_kind_limit)


# -- crawl configuration ------------------------------------------------------


class SelectionPolicy(Enum):
    MAX_MARKOV = "max_markov"
    UNIFORM_RANDOM = "uniform_random"


class StopReason(Enum):
    SIZE_LIMIT = "size_limit"
    FRONTIER_EXHAUSTED = "frontier_exhausted"


@dataclass(frozen=True)
class CrawlConfig:
    """Knobs of one crawl run."""
    seed: str
    threshold: float
    graph_size_limit: int = 1000
    frontier_width: int = 25
    posts_per_blogger: int = 100
    ngram_order: int = 3
    selection_policy: SelectionPolicy = SelectionPolicy.MAX_MARKOV
    rng_seed: int = 0

    def __post_init__(self):
        if not self.seed:
            raise ValueError("seed blogger must be non-empty")
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        for field_name in ("graph_size_limit", "frontier_width",
                           "posts_per_blogger", "ngram_order"):
            if getattr(self, field_name) < 1:
                raise ValueError(f"{field_name} must be >= 1")

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "threshold": self.threshold,
            "graph_size_limit": self.graph_size_limit,
            "frontier_width": self.frontier_width,
            "posts_per_blogger": self.posts_per_blogger,
            "ngram_order": self.ngram_order,
            "selection_policy": self.selection_policy.value,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CrawlConfig":
        return cls(
            seed=data["seed"],
            threshold=float(data["threshold"]),
            graph_size_limit=int(data.get("graph_size_limit", 1000)),
            frontier_width=int(data.get("frontier_width", 25)),
            posts_per_blogger=int(data.get("posts_per_blogger", 100)),
            ngram_order=int(data.get("ngram_order", 3)),
            selection_policy=SelectionPolicy(
                data.get("selection_policy", SelectionPolicy.MAX_MARKOV.value)),
            rng_seed=int(data.get("rng_seed", 0)),
        )


@dataclass
class FrontierEntry:
    """A discovered but unvisited blogger and how they engaged."""
    blog_name: str
    relation: set[NoteKind]
    parent: str

    def __post_init__(self):
        if self.blog_name == self.parent:
            raise ValueError("frontier entry cannot point at its own parent")
        if not self.relation:
            raise ValueError("frontier entry needs at least one relation kind")


@dataclass(frozen=True)
class VisitRecord:
    blog_name: str
    score: float
    verdict: Verdict


@dataclass(frozen=True)
class CrawlResult:
    graph: CommunityGraph
    visit_log: list[VisitRecord]
    discarded: frozenset[str]
    stop_reason: StopReason

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "visit_log": [[r.blog_name, r.score, r.verdict.value]
                          for r in self.visit_log],
            "discarded": sorted(self.discarded),
            "stop_reason": self.stop_reason.value,
        }

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":"), ensure_ascii=True).encode("utf-8")

    @classmethod
    def from_json_dict(cls, data: dict) -> "CrawlResult":
        return cls(
            graph=CommunityGraph.from_json_dict(data["graph"]),
            visit_log=[VisitRecord(name, float(score), Verdict(verdict))
                       for name, score, verdict in data["visit_log"]],
            discarded=frozenset(data["discarded"]),
            stop_reason=StopReason(data["stop_reason"]),
        )

    def predicted_verdicts(self) -> dict[str, Verdict]:
        """Per-blogger verdicts for evaluation; discards count as Unknown."""
        predicted = {r.blog_name: r.verdict for r in self.visit_log}
        for name in self.discarded:
            predicted[name] = Verdict.UNKNOWN
        return predicted


# -- transition matrix --------------------------------------------------------


@dataclass
class TransitionMatrix:
    """Row-stochastic walk matrix aligned with ``ordering``."""
    ordering: list[str]
    entries: np.ndarray


def build_transition_matrix(graph: CommunityGraph) -> TransitionMatrix:
    """Each node spreads its mass uniformly over its out-edges.

    A node without out-edges keeps its mass (self-loop entry), which keeps
    every row summing to one.
    """
    nodes = graph.nodes()
    if not nodes:
        raise ValueError("cannot build a transition matrix for an empty graph")
    index = {name: i for i, name in enumerate(nodes)}
    matrix = np.zeros((len(nodes), len(nodes)), dtype=float)
    for i, name in enumerate(nodes):
        successors = graph.successors(name)
        if successors:
            share = 1.0 / len(successors)
            for succ in successors:
                matrix[i, index[succ]] = share
        else:
            matrix[i, i] = 1.0
    return TransitionMatrix(ordering=nodes, entries=matrix)


def propagate(p0, matrix: TransitionMatrix, k: int) -> np.ndarray:
    """Push the distribution ``k`` steps through the chain: p_(i+1) = p_i M."""
    p = np.asarray(p0, dtype=float)
    if p.shape != (len(matrix.ordering),):
        raise ValueError("distribution and matrix dimensions do not match")
    if abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError("initial distribution must sum to 1")
    if k < 0:
        raise ValueError("step count must be >= 0")
    for _ in range(k):
        p = p @ matrix.entries
    return p


# -- crawl steps --------------------------------------------------------------


def fetch_posts(source, blogger: str, config: CrawlConfig) -> list[Post]:
    """The blogger's newest text posts, capped and language-filtered."""
    posts = source.blogger_posts(blogger, limit=config.posts_per_blogger,
                                 type="text")
    return filter_english(posts[:config.posts_per_blogger])


def extract_frontiers(blogger: str, posts, config: CrawlConfig) -> list[FrontierEntry]:
    """Collect noting bloggers from ``posts`` as frontier entries.

    Per post, up to ``frontier_width`` most-recent noters of each kind are
    taken; a noter appearing in both slices gets both labels and triggers one
    extra pull: the next most-recent noter not already collected.  Entries
    merge across posts by unioning relation kinds.  The blogger's own notes
    are ignored.
    """
    width = config.frontier_width
    entries: dict[str, FrontierEntry] = {}
    for post in posts:
        notes = [n for n in post.notes if n.blog_name != blogger]
        likes = [n for n in notes if n.kind is NoteKind.LIKE][:width]
        reblogs = [n for n in notes if n.kind is NoteKind.REBLOG][:width]
        for note in likes + reblogs:
            entry = entries.get(note.blog_name)
            if entry is None:
                entries[note.blog_name] = FrontierEntry(
                    note.blog_name, {note.kind}, blogger)
            else:
                entry.relation.add(note.kind)
        reblog_names = {n.blog_name for n in reblogs}
        duals = [name for name in dict.fromkeys(n.blog_name for n in likes)
                 if name in reblog_names]
        for _ in duals:
            extra = next((n for n in notes if n.blog_name not in entries), None)
            if extra is None:
                break
            entries[extra.blog_name] = FrontierEntry(
                extra.blog_name, {extra.kind}, blogger)
    return list(entries.values())


def select_next(frontier, p, policy: SelectionPolicy, rng: random.Random,
                graph: CommunityGraph | None = None,
                parents=None) -> FrontierEntry:
    """Pick the next frontier entry to visit.

    MaxMarkovProbability takes the entry with the most propagated mass; a
    frontier node absent from the distribution inherits one walk step from
    its discoverers: sum over parents of parent mass / parent out-degree.
    Ties go to the earliest-inserted entry.  UniformRandom draws one float
    from ``rng``.
    """
    if not frontier:
        raise ValueError("frontier is empty")
    if policy is SelectionPolicy.UNIFORM_RANDOM:
        return frontier[int(rng.random() * len(frontier))]

    best = None
    best_mass = -1.0
    for entry in frontier:
        if entry.blog_name in p:
            mass = p[entry.blog_name]
        else:
            discoverers = None
            if parents is not None:
                recorded = parents.get(entry.blog_name)
                if recorded:
                    discoverers = list(recorded)
            if discoverers is None:
                discoverers = [entry.parent]
            mass = 0.0
            for discoverer in discoverers:
                out_degree = 0
                if graph is not None and graph.has_node(discoverer):
                    out_degree = graph.out_degree(discoverer)
                mass += p.get(discoverer, 0.0) / max(out_degree, 1)
        if mass > best_mass:
            best_mass = mass
            best = entry
    return best


# -- the crawl ----------------------------------------------------------------


class CrawlSession:
    """A stepwise crawl whose full state can round-trip through JSON."""

    def __init__(self, source, model: NGramModel, config: CrawlConfig):
        self._source = source
        self._model = model
        self._config = config
        self._rng = random.Random(config.rng_seed)
        self._graph = CommunityGraph()
        self._visit_log: list[VisitRecord] = []
        self._discarded: dict[str, None] = {}
        self._processed: dict[str, None] = {}
        self._frontier: list[FrontierEntry] = []
        self._frontier_index: dict[str, FrontierEntry] = {}
        # blogger -> every relevant parent that discovered them, with labels
        self._pending: dict[str, dict[str, set[NoteKind]]] = {}
        self._selections = 0
        self._current: str | None = config.seed
        self._stop: StopReason | None = None

    @property
    def config(self) -> CrawlConfig:
        return self._config

    @property
    def finished(self) -> bool:
        return self._stop is not None

    def step(self) -> bool:
        """Visit one blogger; returns False once the crawl has stopped."""
        if self._stop is not None:
            return False
        self._visit(self._current)
        if self._graph.node_count() >= self._config.graph_size_limit:
            self._stop = StopReason.SIZE_LIMIT
            self._current = None
        elif not self._frontier:
            self._stop = StopReason.FRONTIER_EXHAUSTED
            self._current = None
        else:
            entry = select_next(self._frontier, self._distribution(),
                                self._config.selection_policy, self._rng,
                                graph=self._graph, parents=self._pending)
            self._selections += 1
            self._frontier.remove(entry)
            del self._frontier_index[entry.blog_name]
            self._current = entry.blog_name
        return self._stop is None

    def run(self, max_steps: int | None = None) -> CrawlResult | None:
        """Step until finished (or ``max_steps``); result only when finished."""
        steps = 0
        while self._stop is None and (max_steps is None or steps < max_steps):
            self.step()
            steps += 1
        return self.result() if self._stop is not None else None

    def result(self) -> CrawlResult:
        if self._stop is None:
            raise ValueError("crawl has not finished")
        return CrawlResult(graph=self._graph, visit_log=list(self._visit_log),
                           discarded=frozenset(self._discarded),
                           stop_reason=self._stop)

    # -- internals --------------------------------------------------------

    def _visit(self, name: str) -> None:
        self._processed[name] = None
        try:
            posts = fetch_posts(self._source, name, self._config)
            score = score_blogger(self._model, posts)
        except NotFoundError:
            if name == self._config.seed:
                raise
            self._skip(name, "unknown blogger")
            return
        except RetrievalError as exc:
            self._skip(name, f"retrieval failed ({exc})")
            return
        except ScoringError:
            self._skip(name, "no scoreable text")
            return

        verdict = classify(score, self._config.threshold)
        self._visit_log.append(VisitRecord(name, score.value, verdict))
        if verdict is Verdict.RELEVANT:
            self._admit(name, score.value, posts)
        else:
            self._discarded[name] = None
            self._pending.pop(name, None)

    def _skip(self, name: str, reason: str) -> None:
        logger.warning("skipping %s: %s", name, reason)
        self._discarded[name] = None
        self._pending.pop(name, None)

    def _admit(self, name: str, score: float, posts) -> None:
        self._graph.add_node(name, Verdict.RELEVANT, score)
        for parent, labels in self._pending.pop(name, {}).items():
            for label in sorted(labels, key=lambda kind: kind.value):
                self._graph.add_link(parent, name, label)
        for entry in extract_frontiers(name, posts, self._config):
            target = entry.blog_name
            if target in self._processed:
                # Reappearing blogger: link if they made it into the graph,
                # drop silently if they were discarded.
                if self._graph.has_node(target):
                    for label in sorted(entry.relation, key=lambda kind: kind.value):
                        self._graph.add_link(name, target, label)
                continue
            pending = self._pending.setdefault(target, {})
            pending.setdefault(name, set()).update(entry.relation)
            queued = self._frontier_index.get(target)
            if queued is None:
                queued = FrontierEntry(target, set(entry.relation), name)
                self._frontier.append(queued)
                self._frontier_index[target] = queued
            else:
                queued.relation |= entry.relation

    def _distribution(self) -> dict[str, float]:
        if self._graph.node_count() == 0:
            return {}
        matrix = build_transition_matrix(self._graph)
        p0 = np.zeros(len(matrix.ordering))
        try:
            p0[matrix.ordering.index(self._config.seed)] = 1.0
        except ValueError:
            # Seed was never admitted; fall back to a uniform start.
            p0[:] = 1.0 / len(matrix.ordering)
        steps = min(len(self._visit_log), PROPAGATION_CAP)
        mass = propagate(p0, matrix, steps)
        return dict(zip(matrix.ordering, mass.tolist()))

    # -- persistence --------------------------------------------------------

    def checkpoint(self) -> dict:
        """Complete crawl state as a JSON-serializable document."""
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "config": self._config.to_json_dict(),
            "current": self._current,
            "stop_reason": self._stop.value if self._stop is not None else None,
            "selections": self._selections,
            "visit_log": [[r.blog_name, r.score, r.verdict.value]
                          for r in self._visit_log],
            "discarded": list(self._discarded),
            "processed": list(self._processed),
            "frontier": [{"blog_name": e.blog_name,
                          "relation": sorted(k.value for k in e.relation),
                          "parent": e.parent} for e in self._frontier],
            "pending": {target: {parent: sorted(k.value for k in labels)
                                 for parent, labels in parents.items()}
                        for target, parents in self._pending.items()},
            "graph": self._graph.to_json_dict(),
        }

    @classmethod
    def resume(cls, source, model: NGramModel, checkpoint: dict) -> "CrawlSession":
        """Rebuild a session; finishing it matches an uninterrupted run."""
        if checkpoint.get("format") != CHECKPOINT_FORMAT:
            raise GraphFormatError("not a crawl checkpoint document")
        if checkpoint.get("version") != CHECKPOINT_VERSION:
            raise GraphFormatError(
                f"unsupported checkpoint version {checkpoint.get('version')!r}")
        config = CrawlConfig.from_json_dict(checkpoint["config"])
        session = cls(source, model, config)
        session._visit_log = [VisitRecord(name, float(score), Verdict(verdict))
                              for name, score, verdict in checkpoint["visit_log"]]
        session._discarded = dict.fromkeys(checkpoint["discarded"])
        session._processed = dict.fromkeys(checkpoint["processed"])
        session._frontier = []
        session._frontier_index = {}
        for item in checkpoint["frontier"]:
            entry = FrontierEntry(item["blog_name"],
                                  {NoteKind(k) for k in item["relation"]},
                                  item["parent"])
            session._frontier.append(entry)
            session._frontier_index[entry.blog_name] = entry
        session._pending = {
            target: {parent: {NoteKind(k) for k in labels}
                     for parent, labels in parents.items()}
            for target, parents in checkpoint["pending"].items()}
        session._graph = CommunityGraph.from_json_dict(checkpoint["graph"])
        session._selections = int(checkpoint["selections"])
        session._current = checkpoint["current"]
        stop = checkpoint.get("stop_reason")
        session._stop = StopReason(stop) if stop is not None else None
        # Replay consumed randomness: uniform selection draws one float each.
        if config.selection_policy is SelectionPolicy.UNIFORM_RANDOM:
            for _ in range(session._selections):
                session._rng.random()
        return session


def crawl(source, model: NGramModel, config: CrawlConfig) -> CrawlResult:
    """Run a full crawl from the configured seed blogger."""
    return CrawlSession(source, model, config).run()
