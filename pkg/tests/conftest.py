import random
from types import SimpleNamespace

import pytest

from spiderveil.corpus import bootstrap_exemplars, filter_english
from spiderveil.crawler import CrawlConfig, FixtureStore
from spiderveil.langmodel import compute_threshold, score_blogger, train
from spiderveil.simnet import GeneratorParams, generate

# Six bloggers: four write astronomy text, two write cooking text.  Notes
# chain alpha -> bravo -> carol -> {dave (both kinds), xena} and dave -> yuri,
# so a crawl from alpha admits exactly the four astronomy bloggers.
HAND_TRAIN_DOCS = [
    "the nebula and the quasar drift with starlight over the horizon",
    "a telescope from the observatory tracks the comet through the aurora",
    "the galaxy spins and the pulsar beats under the lunar corona",
    "stellar orbit of the meteor and the eclipse over the zenith",
    "the constellation rises with the moonrise and the solar spectrum",
    "redshift of the supernova and the celestial cluster through the cosmos",
]

HAND_BODIES = {
    "alpha": "the nebula and the quasar drift with starlight over the horizon",
    "bravo": "the galaxy spins and the pulsar beats under the lunar corona",
    "carol": "stellar orbit of the meteor and the eclipse over the zenith",
    "dave": "the constellation rises with the moonrise and the solar spectrum",
    "xena": "whisk the dough and knead the sourdough with butter and flour",
    "yuri": "simmer the broth and braise the garlic with thyme and rosemary",
}


def make_post(pid, blog, body, notes=(), tags=(), type="text"):
    return {"id": pid, "blog_name": blog, "type": type, "body": body,
            "tags": list(tags),
            "notes": [{"blog_name": n, "kind": k} for n, k in notes]}


@pytest.fixture(scope="session")
def hand_store_data():
    return {
        "blogs": [{"name": n} for n in
                  ("alpha", "bravo", "carol", "dave", "xena", "yuri")],
        "posts": [
            make_post("p1", "alpha", HAND_BODIES["alpha"],
                      notes=[("bravo", "like")]),
            make_post("p2", "bravo", HAND_BODIES["bravo"],
                      notes=[("carol", "reblog")]),
            make_post("p3", "carol", HAND_BODIES["carol"],
                      notes=[("dave", "like"), ("dave", "reblog"),
                             ("xena", "like")]),
            make_post("p4", "dave", HAND_BODIES["dave"],
                      notes=[("yuri", "reblog")]),
            make_post("p5", "xena", HAND_BODIES["xena"]),
            make_post("p6", "yuri", HAND_BODIES["yuri"]),
        ],
        "seed": "alpha",
    }


@pytest.fixture(scope="session")
def hand_store(hand_store_data):
    return FixtureStore(hand_store_data)


@pytest.fixture(scope="session")
def hand_model():
    return train(HAND_TRAIN_DOCS, order=3, alpha=1.0)


@pytest.fixture(scope="session")
def hand_threshold(hand_store, hand_model):
    """Midpoint between the astronomy and cooking score clusters."""
    def blogger_score(name):
        posts = filter_english(hand_store.blogger_posts(name, limit=100))
        return score_blogger(hand_model, posts).value

    on = [blogger_score(n) for n in ("alpha", "bravo", "carol", "dave")]
    off = [blogger_score(n) for n in ("xena", "yuri")]
    assert min(on) > max(off)
    return (min(on) + max(off)) / 2.0


@pytest.fixture()
def hand_config(hand_threshold):
    return CrawlConfig(seed="alpha", threshold=hand_threshold)


@pytest.fixture(scope="session")
def small_bundle():
    """A 60-blogger generated network with a trained model and threshold."""
    params = GeneratorParams(total_bloggers=60, rng_seed=5)
    store_data, truth = generate(params)
    store = FixtureStore(store_data, validate=False)
    corpus, lexicon = bootstrap_exemplars(store, ["stargazing"], 80)
    model = train(corpus, order=3)
    seed_names = [n for n, label in truth.items() if label][:10]
    scores = []
    for name in seed_names:
        posts = filter_english(store.blogger_posts(name, limit=100))
        scores.append(score_blogger(model, posts))
    threshold = compute_threshold(scores)
    return SimpleNamespace(params=params, store_data=store_data, truth=truth,
                           store=store, model=model, threshold=threshold,
                           seed_names=seed_names)


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)
