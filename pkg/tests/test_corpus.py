import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiderveil.corpus import (ExemplarCorpus, LanguageVerdict, NoteKind,
                               NoteRecord, Post, StopwordRatioDetector,
                               TagLexicon, bootstrap_exemplars,
                               detect_language, filter_english, normalize_tag,
                               normalize_text)
from spiderveil.errors import RetrievalError


def _post(pid="p1", blog="someone", body="", caption="", tags=(), notes=()):
    return Post(id=pid, blog_name=blog, body=body, caption=caption,
                tags=tuple(tags), notes=tuple(notes))


class TestNormalizeText:
    def test_strips_markup_and_case(self):
        assert normalize_text("<b>Hello  World</b>") == "hello world"

    def test_empty(self):
        assert normalize_text("") == ""

    def test_whitespace_and_case(self):
        assert normalize_text("  Tag:  NEBULA \n") == "tag: nebula"

    def test_control_chars_removed(self):
        assert normalize_text("a\x00b\x07c") == "abc"

    @given(st.text(max_size=200))
    def test_idempotent(self, raw):
        once = normalize_text(raw)
        assert normalize_text(once) == once


class TestNormalizeTag:
    def test_hash_and_case(self):
        assert normalize_tag("#StarGazing ") == "stargazing"

    def test_plain(self):
        assert normalize_tag("nebula") == "nebula"


class TestDetectLanguage:
    def test_english_sentence(self):
        verdict = detect_language("the quick brown fox jumps over the lazy dog")
        assert verdict is LanguageVerdict.ENGLISH

    def test_german_sentence(self):
        verdict = detect_language(
            "der schnelle braune fuchs springt über den faulen hund")
        assert verdict is LanguageVerdict.NON_ENGLISH

    def test_short_text_undetermined(self):
        assert detect_language("ok") is LanguageVerdict.UNDETERMINED

    def test_custom_detector_threshold(self):
        lax = StopwordRatioDetector(min_length=1, ratio=0.0)
        assert detect_language("wszystko gra", lax) is LanguageVerdict.ENGLISH


class TestFilterEnglish:
    def test_drops_non_english(self):
        english = _post("p1", body="the quick brown fox jumps over the lazy dog")
        german = _post("p2", body="der schnelle braune fuchs springt über den faulen hund")
        assert filter_english([english, german]) == [english]

    def test_empty(self):
        assert filter_english([]) == []

    def test_short_post_retained(self):
        stub = _post("p1", body="hi")
        assert filter_english([stub]) == [stub]

    def test_idempotent(self):
        posts = [_post("p1", body="the quick brown fox jumps over the lazy dog"),
                 _post("p2", body="ein kurzer deutscher satz ohne englische woerter")]
        once = filter_english(posts)
        assert filter_english(once) == once


class TestPost:
    def test_requires_id_and_blog(self):
        with pytest.raises(ValueError):
            _post(pid="")
        with pytest.raises(ValueError):
            _post(blog="")

    def test_normalized_text_joins_body_and_caption(self):
        post = _post(body="<p>Star</p>", caption="  Gazing ")
        assert post.normalized_text() == "star gazing"

    def test_note_records(self):
        note = NoteRecord("friend", NoteKind.LIKE)
        assert note.kind is NoteKind.LIKE
        assert NoteKind("reblog") is NoteKind.REBLOG


class TestTagLexicon:
    def test_first_generation_wins(self):
        lex = TagLexicon(["alpha"])
        assert not lex.add("alpha", 3)
        assert lex.generation("alpha") == 0
        assert lex.add("beta", 1)
        assert lex.tags() == ["alpha", "beta"]

    def test_generation_lookup(self):
        lex = TagLexicon(["a"])
        lex.add("b", 1)
        lex.add("c", 1)
        assert lex.tags_in_generation(1) == ["b", "c"]
        assert "b" in lex and "#B" in lex

    def test_json_round_trip(self):
        lex = TagLexicon(["a"])
        lex.add("b", 2)
        again = TagLexicon.from_json_dict(lex.to_json_dict())
        assert again.to_json_dict() == {"a": 0, "b": 2}


class TestExemplarCorpus:
    def test_save_load_round_trip(self, tmp_path):
        corpus = ExemplarCorpus(documents=["one text", "two text"],
                                document_ids=["p1", "p2"], target_size=5)
        path = tmp_path / "corpus.ndjson"
        corpus.save(path)
        loaded = ExemplarCorpus.load(path)
        assert loaded.documents == corpus.documents
        assert loaded.document_ids == corpus.document_ids


class _ListStore:
    """Minimal tagged_posts-only store for bootstrap tests."""

    def __init__(self, posts_by_tag):
        self.posts_by_tag = posts_by_tag

    def tagged_posts(self, tag, limit=None, type="text"):
        posts = self.posts_by_tag.get(tag, [])
        return posts[:limit] if limit is not None else posts


ENGLISH_BODY = "the quick brown fox jumps over the lazy dog"


class TestBootstrap:
    def test_store_exhausted_before_target(self):
        posts = [_post(f"p{i}", body=f"{ENGLISH_BODY} {i}", tags=("terrorism",))
                 for i in range(3)]
        store = _ListStore({"terrorism": posts})
        corpus, lexicon = bootstrap_exemplars(store, ["terrorism"], 400,
                                              max_rounds=1)
        assert len(corpus.documents) == 3
        assert lexicon.tags() == ["terrorism"]

    def test_target_zero_rejected(self):
        with pytest.raises(ValueError):
            bootstrap_exemplars(_ListStore({}), ["x"], 0)

    def test_empty_seed_lexicon_rejected(self):
        with pytest.raises(ValueError):
            bootstrap_exemplars(_ListStore({}), [], 10)

    def test_two_round_tag_expansion(self):
        post1 = _post("p1", body=ENGLISH_BODY + " one", tags=("taga", "tagb"))
        post2 = _post("p2", body=ENGLISH_BODY + " two", tags=("tagb",))
        store = _ListStore({"taga": [post1], "tagb": [post2]})
        corpus, lexicon = bootstrap_exemplars(store, ["taga"], 2)
        assert corpus.document_ids == ["p1", "p2"]
        assert lexicon.to_json_dict() == {"taga": 0, "tagb": 1}

    def test_deduplicates_by_post_id(self):
        post = _post("p1", body=ENGLISH_BODY, tags=("a", "b"))
        store = _ListStore({"a": [post], "b": [post]})
        corpus, _ = bootstrap_exemplars(store, ["a", "b"], 10)
        assert corpus.document_ids == ["p1"]

    def test_skips_non_english_documents(self):
        german = _post("p1", tags=("a",),
                       body="der schnelle braune fuchs springt über den faulen hund")
        english = _post("p2", body=ENGLISH_BODY, tags=("a",))
        store = _ListStore({"a": [german, english]})
        corpus, _ = bootstrap_exemplars(store, ["a"], 10)
        assert corpus.document_ids == ["p2"]

    def test_stops_at_target(self):
        posts = [_post(f"p{i}", body=f"{ENGLISH_BODY} {i}", tags=("a",))
                 for i in range(10)]
        store = _ListStore({"a": posts})
        corpus, _ = bootstrap_exemplars(store, ["a"], 4)
        assert len(corpus.documents) == 4

    def test_retrieval_error_carries_tag(self):
        class FailingStore:
            def tagged_posts(self, tag, limit=None, type="text"):
                raise RetrievalError("backend down", retries=3)

        with pytest.raises(RetrievalError) as err:
            bootstrap_exemplars(FailingStore(), ["culprit"], 10)
        assert err.value.tag == "culprit"

    def test_max_rounds_bounds_expansion(self):
        # Each tag's post introduces the next tag; only max_rounds fire.
        chain = {}
        for i in range(6):
            chain[f"t{i}"] = [_post(f"p{i}", body=f"{ENGLISH_BODY} {i}",
                                    tags=(f"t{i}", f"t{i + 1}"))]
        store = _ListStore(chain)
        corpus, lexicon = bootstrap_exemplars(store, ["t0"], 100, max_rounds=3)
        assert len(corpus.documents) == 3
        assert "t3" in lexicon and "t4" not in lexicon


@settings(max_examples=30)
@given(st.lists(st.sampled_from(["taga", "tagb", "tagc"]), min_size=1,
                max_size=3, unique=True),
       st.integers(min_value=1, max_value=6))
def test_bootstrap_never_duplicates_ids(seed_tags, target):
    posts = {
        "taga": [_post("p1", body=ENGLISH_BODY + " a", tags=("taga", "tagb"))],
        "tagb": [_post("p2", body=ENGLISH_BODY + " b", tags=("tagb", "tagc")),
                 _post("p1", body=ENGLISH_BODY + " a", tags=("taga",))],
        "tagc": [_post("p3", body=ENGLISH_BODY + " c", tags=("tagc",))],
    }
    corpus, _ = bootstrap_exemplars(_ListStore(posts), seed_tags, target)
    assert len(corpus.document_ids) == len(set(corpus.document_ids))
    assert len(corpus.documents) <= target
