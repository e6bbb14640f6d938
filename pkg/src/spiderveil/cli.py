"""Command-line pipeline.

Subcommands cover the whole flow: ``gen`` a synthetic network, ``bootstrap``
an exemplar corpus from seed tags, ``train`` the n-gram model (optionally
deriving the threshold from seed bloggers), ``crawl`` a store, ``analyze``
and ``export`` graphs, and ``eval`` predictions against ground truth.

Exit codes: 0 success, 2 I/O or malformed file, 3 empty or degenerate
input, 4 domain error.  Outputs land in --out-dir; a manifest.json recording
the invocation is written before any artifact.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .corpus import NoteKind, bootstrap_exemplars, ExemplarCorpus, filter_english
from .crawler import (CrawlConfig, CrawlSession, FixtureStore, HttpJsonStore,
                      SelectionPolicy)
from .errors import (GraphFormatError, NotFoundError, RetrievalError,
                     ScoringError, SpiderveilError)
from .langmodel import (Verdict, compute_threshold, load_model, save_model,
                        score_blogger, train)
from .simnet import (ConfusionMatrix, GeneratorParams, evaluate, generate,
                     report_from_matrix, truth_from_json_dict,
                     truth_to_json_dict)
from .socialgraph import export_graph, import_json_edge_list, measure

EXIT_OK = 0
EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_DOMAIN = 4


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# -- small file helpers --------------------------------------------------------


def atomic_write_bytes(path: Path, payload: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    try:
        tmp.write_bytes(payload)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink(missing_ok=True)


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=1) + "\n")


def read_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise CLIError(EXIT_IO, f"file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def ensure_out_dir(args) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def write_manifest(args, out_dir: Path, output_paths: list[Path]) -> None:
    """Record the invocation before producing any artifact."""
    manifest = {
        "command": args.command,
        "argv": sys.argv[1:],
        "config_path": args.config,
        "started_at": datetime.now(timezone.utc).isoformat(),
        "rng_seed": args.seed,
        "output_paths": [str(p) for p in output_paths],
    }
    write_json(out_dir / "manifest.json", manifest)


def load_config(args) -> dict:
    if not args.config:
        return {}
    data = read_json(args.config)
    if not isinstance(data, dict):
        raise CLIError(EXIT_IO, "config file must hold a JSON object")
    return data


def setting(args, config: dict, name: str, key: str | None = None, default=None):
    """Flag value if given, else config value, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(key or name, default)


def open_store(args, config: dict):
    url = setting(args, config, "url")
    if url:
        return HttpJsonStore(url)
    path = setting(args, config, "store") or os.environ.get("SPIDERVEIL_STORE")
    if not path:
        raise CLIError(EXIT_EMPTY,
                       "no store given (use --store, config, or SPIDERVEIL_STORE)")
    if not Path(path).exists():
        raise CLIError(EXIT_IO, f"store not found: {path}")
    return FixtureStore.load(path)


# -- subcommands ---------------------------------------------------------------


def cmd_gen(args, config: dict) -> int:
    out_dir = ensure_out_dir(args)
    base = read_json(args.params) if args.params else {}
    if not isinstance(base, dict):
        raise CLIError(EXIT_IO, "params file must hold a JSON object")
    overrides = {
        "total_bloggers": args.bloggers,
        "relevant_fraction": args.fraction,
        "mixing_prob": args.mixing,
        "intra_community_note_bias": args.bias,
        "rng_seed": args.seed,
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    params = GeneratorParams.from_json_dict(base)

    store_path = out_dir / "store.json"
    truth_path = out_dir / "truth.json"
    write_manifest(args, out_dir, [store_path, truth_path])
    store, truth = generate(params)
    write_json(store_path, store)
    write_json(truth_path, truth_to_json_dict(truth))
    relevant = sum(1 for label in truth.values() if label)
    print(f"bloggers: {params.total_bloggers} (relevant {relevant})")
    print(f"posts: {len(store['posts'])}")
    print(f"seed blogger: {store['seed']}")
    print(f"wrote {store_path} and {truth_path}")
    return EXIT_OK


def cmd_bootstrap(args, config: dict) -> int:
    out_dir = ensure_out_dir(args)
    store = open_store(args, config)
    tags = args.tag or config.get("tags")
    if not tags:
        raise CLIError(EXIT_EMPTY, "no seed tags given (use --tag)")
    target = setting(args, config, "target", default=100)

    corpus_path = Path(args.out) if args.out else out_dir / "corpus.ndjson"
    lexicon_path = corpus_path.with_name(corpus_path.stem + ".lexicon.json")
    write_manifest(args, out_dir, [corpus_path, lexicon_path])

    corpus, lexicon = bootstrap_exemplars(store, tags, int(target))
    if not corpus.documents:
        raise CLIError(EXIT_EMPTY,
                       f"no documents collected for tags: {', '.join(tags)}")
    generation = 0
    while True:
        round_tags = lexicon.tags_in_generation(generation)
        if not round_tags:
            break
        print(f"round {generation}: {len(round_tags)} tags "
              f"({', '.join(round_tags)})")
        generation += 1
    print(f"collected {len(corpus.documents)} documents "
          f"(target {corpus.target_size})")
    corpus.save(corpus_path)
    write_json(lexicon_path, lexicon.to_json_dict())
    print(f"wrote {corpus_path} and {lexicon_path}")
    return EXIT_OK


def _load_seed_bloggers(path) -> list[str]:
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get("bloggers")
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise CLIError(EXIT_IO,
                       "seed blogger file must hold a JSON list of names")
    return data


def cmd_train(args, config: dict) -> int:
    out_dir = ensure_out_dir(args)
    corpus_path = setting(args, config, "corpus")
    if not corpus_path:
        raise CLIError(EXIT_EMPTY, "no corpus given (use --corpus)")
    if not Path(corpus_path).exists():
        raise CLIError(EXIT_IO, f"corpus not found: {corpus_path}")
    corpus = ExemplarCorpus.load(corpus_path)
    if not corpus.documents:
        raise CLIError(EXIT_EMPTY, f"corpus {corpus_path} holds no documents")

    model_path = Path(args.out) if args.out else out_dir / "model.json"
    outputs = [model_path]
    threshold_path = model_path.with_name(model_path.stem + ".threshold.json")
    seed_names = _load_seed_bloggers(args.seed_bloggers) if args.seed_bloggers else None
    if seed_names:
        outputs.append(threshold_path)
    write_manifest(args, out_dir, outputs)

    model = train(corpus, order=args.order, alpha=args.alpha)
    save_model(model, model_path)
    print(f"trained order-{model.order} model on {len(corpus.documents)} "
          f"documents ({model.trained_chars} characters)")
    print(f"wrote {model_path}")

    if seed_names:
        store = open_store(args, config)
        scored: list[tuple[float, str]] = []
        for name in seed_names:
            posts = filter_english(
                store.blogger_posts(name, limit=args.posts, type="text"))
            score = score_blogger(model, posts)
            scored.append((score.value, name))
        scored.sort()
        print("seed blogger scores (ascending):")
        for value, name in scored:
            print(f"  {value:.17g}  {name}")
        low, high = scored[0][0], scored[-1][0]
        inside = sum(1 for value, _ in scored if low <= value <= high)
        print(f"band: min={low:.17g} max={high:.17g} "
              f"within={100.0 * inside / len(scored):.1f}%")
        threshold = compute_threshold([value for value, _ in scored])
        print(f"threshold: {threshold.value:.17g} "
              f"(mean of {threshold.seed_count} scores)")
        write_json(threshold_path, {
            "threshold": threshold.value,
            "seed_count": threshold.seed_count,
            "scores": {name: value for value, name in scored},
        })
        print(f"wrote {threshold_path}")
    return EXIT_OK


def cmd_crawl(args, config: dict) -> int:
    out_dir = ensure_out_dir(args)
    store = open_store(args, config)
    model_path = setting(args, config, "model")
    if not model_path:
        raise CLIError(EXIT_EMPTY, "no model given (use --model)")
    if not Path(model_path).exists():
        raise CLIError(EXIT_IO, f"model not found: {model_path}")
    model = load_model(model_path)

    threshold = setting(args, config, "threshold")
    if threshold is None and args.threshold_file:
        threshold = read_json(args.threshold_file).get("threshold")
    if threshold is None:
        raise CLIError(EXIT_EMPTY,
                       "no threshold given (use --threshold or --threshold-file)")

    seed_blogger = setting(args, config, "seed_blogger")
    if seed_blogger is None and isinstance(store, FixtureStore):
        seed_blogger = store.seed_blogger
    if not seed_blogger:
        raise CLIError(EXIT_EMPTY, "no seed blogger given (use --seed-blogger)")

    crawl_config = CrawlConfig(
        seed=seed_blogger,
        threshold=float(threshold),
        graph_size_limit=int(setting(args, config, "graph_size", "graph_size_limit", 1000)),
        frontier_width=int(setting(args, config, "width", "frontier_width", 25)),
        posts_per_blogger=int(setting(args, config, "posts", "posts_per_blogger", 100)),
        ngram_order=model.order,
        selection_policy=SelectionPolicy(
            setting(args, config, "policy", "selection_policy",
                    SelectionPolicy.MAX_MARKOV.value)),
        rng_seed=int(setting(args, config, "seed", "rng_seed", 0) or 0),
    )

    crawl_path = out_dir / "crawl.json"
    graph_paths = {fmt: out_dir / f"graph.{ext}"
                   for fmt, ext in (("json", "json"), ("graphml", "graphml"),
                                    ("dot", "dot"))}
    write_manifest(args, out_dir, [crawl_path, *graph_paths.values()])

    session = CrawlSession(store, model, crawl_config)
    result = session.run()
    write_json(crawl_path, session.checkpoint())
    for fmt, path in graph_paths.items():
        atomic_write_bytes(path, export_graph(result.graph, fmt))

    processed = {record.blog_name for record in result.visit_log} | set(result.discarded)
    print(f"stop reason: {result.stop_reason.value}")
    print(f"processed: {len(processed)} bloggers")
    print(f"graph: {result.graph.node_count()} nodes, "
          f"{result.graph.edge_count()} edges")
    print(f"discarded: {len(result.discarded)}")
    print(f"wrote {crawl_path} and graph files")
    return EXIT_OK


def cmd_analyze(args, config: dict) -> int:
    path = Path(args.graph)
    if not path.exists():
        raise CLIError(EXIT_IO, f"graph file not found: {path}")
    graph = import_json_edge_list(path.read_bytes())
    if args.label:
        graph = graph.project(NoteKind(args.label))
    try:
        measurements = measure(graph)
    except ValueError as exc:
        raise CLIError(EXIT_EMPTY, str(exc)) from exc
    print(measurements.format_table())
    if args.out:
        out_dir = ensure_out_dir(args)
        out_path = Path(args.out)
        write_manifest(args, out_dir, [out_path])
        write_json(out_path, measurements.to_json_dict())
        print(f"wrote {out_path}")
    return EXIT_OK


def cmd_export(args, config: dict) -> int:
    path = Path(args.graph)
    if not path.exists():
        raise CLIError(EXIT_IO, f"graph file not found: {path}")
    graph = import_json_edge_list(path.read_bytes())
    out_dir = ensure_out_dir(args)
    extension = {"json": "json", "jsonedgelist": "json", "json-edge-list": "json",
                 "graphml": "graphml", "dot": "dot"}.get(args.format, args.format)
    out_path = Path(args.out) if args.out else out_dir / f"graph.{extension}"
    write_manifest(args, out_dir, [out_path])
    atomic_write_bytes(out_path, export_graph(graph, args.format))
    print(f"wrote {out_path}")
    return EXIT_OK


def _predicted_from_document(data: dict) -> dict[str, Verdict]:
    if "visit_log" not in data or "discarded" not in data:
        raise CLIError(EXIT_IO,
                       "result file lacks visit_log/discarded fields")
    predicted = {}
    for name, _score, verdict in data["visit_log"]:
        predicted[name] = Verdict(verdict)
    for name in data["discarded"]:
        predicted[name] = Verdict.UNKNOWN
    return predicted


def cmd_eval(args, config: dict) -> int:
    if args.matrix:
        parts = args.matrix.split(",")
        if len(parts) != 4:
            raise CLIError(EXIT_DOMAIN, "--matrix expects tp,fn,fp,tn")
        try:
            tp, fn, fp, tn = (int(p) for p in parts)
            matrix = ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=tn)
            report = report_from_matrix(matrix)
        except ValueError as exc:
            raise CLIError(EXIT_DOMAIN, f"bad confusion matrix: {exc}") from exc
    else:
        if not args.result or not args.truth:
            raise CLIError(EXIT_EMPTY,
                           "eval needs --matrix or both --result and --truth")
        predicted = _predicted_from_document(read_json(args.result))
        try:
            truth = truth_from_json_dict(read_json(args.truth))
            matrix, report = evaluate(predicted, truth)
        except ValueError as exc:
            raise CLIError(EXIT_EMPTY, str(exc)) from exc

    print("confusion matrix")
    print(matrix.format_table())
    print()
    print("accuracy results")
    print(report.format_table())
    if args.out:
        out_dir = ensure_out_dir(args)
        out_path = Path(args.out)
        write_manifest(args, out_dir, [out_path])
        write_json(out_path, {"confusion_matrix": matrix.to_json_dict(),
                              "report": report.to_json_dict()})
        print(f"wrote {out_path}")
    return EXIT_OK


# -- wiring --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spiderveil",
        description="Topical crawler over microblog like/reblog networks.")
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed for reproducible runs")
    parser.add_argument("--out-dir", default=".",
                        help="directory for output artifacts")
    parser.add_argument("--verbose", action="store_true",
                        help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic network fixture")
    p.add_argument("--params", help="JSON file of generator parameters")
    p.add_argument("--bloggers", type=int, help="total blogger count")
    p.add_argument("--fraction", type=float, help="relevant fraction")
    p.add_argument("--mixing", type=float, help="off-topic mixing probability")
    p.add_argument("--bias", type=float, help="intra-community note bias")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bootstrap", help="collect an exemplar corpus by tags")
    p.add_argument("--store", help="fixture store path")
    p.add_argument("--url", help="HTTP store base URL")
    p.add_argument("--tag", action="append", help="seed tag (repeatable)")
    p.add_argument("--target", type=int, help="document count to stop at")
    p.add_argument("--out", help="corpus output path (NDJSON)")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("train", help="train the n-gram relevance model")
    p.add_argument("--corpus", help="exemplar corpus (NDJSON)")
    p.add_argument("--order", type=int, default=3, help="n-gram order")
    p.add_argument("--alpha", type=float, default=1.0, help="additive smoothing")
    p.add_argument("--seed-bloggers", help="JSON list of seed blogger names")
    p.add_argument("--store", help="fixture store path (for seed scoring)")
    p.add_argument("--url", help="HTTP store base URL (for seed scoring)")
    p.add_argument("--posts", type=int, default=100,
                   help="posts per blogger when scoring seeds")
    p.add_argument("--out", help="model output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("crawl", help="run the focused crawl")
    p.add_argument("--store", help="fixture store path")
    p.add_argument("--url", help="HTTP store base URL")
    p.add_argument("--model", help="trained model path")
    p.add_argument("--threshold", type=float, help="relevance threshold")
    p.add_argument("--threshold-file", help="JSON file holding {threshold: x}")
    p.add_argument("--seed-blogger", help="blogger to start from")
    p.add_argument("--graph-size", type=int, dest="graph_size",
                   help="stop once the graph reaches this many nodes")
    p.add_argument("--width", type=int, help="noters taken per relation per post")
    p.add_argument("--posts", type=int, help="posts fetched per blogger")
    p.add_argument("--policy",
                   choices=[policy.value for policy in SelectionPolicy],
                   help="frontier selection policy")
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("analyze", help="measure a graph file")
    p.add_argument("graph", help="JSON edge-list file")
    p.add_argument("--label", choices=[k.value for k in NoteKind],
                   help="measure only this relation's projection")
    p.add_argument("--out", help="write measurements JSON here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="convert a graph file")
    p.add_argument("graph", help="JSON edge-list file")
    p.add_argument("--format", required=True,
                   choices=["json", "graphml", "dot"], help="output format")
    p.add_argument("--out", help="output path")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--matrix", help="direct confusion counts: tp,fn,fp,tn")
    p.add_argument("--result", help="crawl result or checkpoint JSON")
    p.add_argument("--truth", help="ground-truth label map JSON")
    p.add_argument("--out", help="write report JSON here")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args)
        return args.func(args, config)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (GraphFormatError, RetrievalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScoringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except SpiderveilError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
