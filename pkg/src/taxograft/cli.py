"""Command-line pipeline: one subcommand per artifact-producing step.

Exit codes: 0 success, 1 usage error, 2 data error.  All randomness flows
from --seed, so reruns with the same inputs write byte-identical files.
The TAXOGRAFT_LOG environment variable sets the logging level; everything
else is flags.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from .dataset import (FilterConfig, diff_versions, load_dataset, load_id_map,
                      save_dataset)
from .errors import ConfigError, TaxograftError, ZeroQueryError
from .evaluation import evaluate
from .graph import (GcnConfig, GcnModel, HopeConfig, Node2VecConfig,
                    PoincareConfig, TadwConfig, load_embeddings,
                    save_embeddings, train_gcn, train_hope, train_node2vec,
                    train_poincare, train_tadw)
from .meta import (Source, TripletConfig, build_source_set, concat_space,
                   fit_autoencoder_meta, fit_svd_meta, load_meta, save_meta)
from .ranker import (Ranker, RankerTrainConfig, build_training_set,
                     load_predictions, load_wiktionary, predict_for_query,
                     save_predictions, train_ranker)
from .spaces import GraphSynsetSpace, MetaSynsetSpace, WordSynsetSpace
from .taxonomy import load_taxonomy
from .vectors import SynsetIndex, load_vectors, phrase_vector

log = logging.getLogger("taxograft")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_space_flags(sub):
    sub.add_argument("--space", choices=("word", "graph", "meta"),
                     default="word", help="embedding space the ranker runs "
                     "over (default: word)")
    sub.add_argument("--embeddings",
                     help="trained graph embedding file (--space graph)")
    sub.add_argument("--gcn-model",
                     help="trained gcn weights (defaults to "
                     "<embeddings>.model.npz when present)")
    sub.add_argument("--meta", help="fitted meta space JSON (--space meta)")
    sub.add_argument("--wikt", help="wiktionary feature TSV")


def _build_parser() -> _Parser:
    parser = _Parser(prog="taxograft",
                     description="Attach new words to a hypernymy taxonomy.")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap; execution is single-threaded for "
                        "reproducibility, so values > 1 change nothing")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-dataset",
                       help="diff two taxonomy releases into query words")
    p.add_argument("--old", required=True, help="older taxonomy JSONL")
    p.add_argument("--new", required=True, help="newer taxonomy JSONL")
    p.add_argument("--out", required=True, help="output TSV path")
    p.add_argument("--min-length", type=int, default=0,
                   help="drop words shorter than this many characters")
    p.add_argument("--drop-substrings", action="store_true",
                   help="drop words containing a gold hypernym lemma")
    p.add_argument("--drop-multiword", action="store_true",
                   help="drop words with spaces")
    p.add_argument("--id-map",
                   help="TSV of old TAB new synset ids for drifted releases")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("embed-graph", help="train node embeddings")
    p.add_argument("--method", required=True,
                   choices=("node2vec", "poincare", "tadw", "hope", "gcn"))
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vectors",
                   help="text vectors for node features (tadw, gcn)")
    p.add_argument("--dim", type=int, help="override the method default")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_embed_graph)

    p = sub.add_parser("fit-meta", help="fuse embedding sources")
    p.add_argument("--mode", required=True,
                   choices=("concat", "svd", "caeme", "aaeme"))
    p.add_argument("--source", action="append", required=True,
                   metavar="NAME=PATH",
                   help="embedding source; word2vec text file, or a graph "
                   "embedding saved by embed-graph (repeatable)")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--vectors", required=True,
                   help="text vectors used for lemma lookups and OOV")
    p.add_argument("--dataset", help="query TSV whose words join the "
                   "training vocabulary")
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, help="target dimension (svd)")
    p.add_argument("--triplet", action="store_true",
                   help="add the taxonomy triplet term (caeme/aaeme)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fit_meta)

    p = sub.add_parser("train-ranker",
                       help="fit the candidate scorer on pseudo-queries")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--vectors", required=True)
    _add_space_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--n-pseudo", type=int, default=1000)
    p.add_argument("--k-assoc", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_ranker)

    p = sub.add_parser("predict", help="rank attachment points per query")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--vectors", required=True)
    _add_space_flags(p)
    p.add_argument("--ranker", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--k-assoc", type=int, default=10)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON report here")
    p.add_argument("--per-query", help="write word TAB ap TSV here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="start the annotation service")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--vectors", required=True)
    _add_space_flags(p)
    p.add_argument("--ranker", required=True)
    p.add_argument("--dataset", required=True,
                   help="query words to annotate")
    p.add_argument("--state-dir", required=True,
                   help="decision log and snapshots live here")
    p.add_argument("--port", type=int, default=8570)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)
    return parser


def build_space(args, t, store):
    """The ranking space selected by --space and its companion flags."""
    if args.space == "word":
        return WordSynsetSpace(store, t)
    if args.space == "graph":
        if not args.embeddings:
            raise ConfigError("--space graph needs --embeddings")
        emb = load_embeddings(args.embeddings)
        gcn = None
        if emb.method == "gcn":
            model_path = args.gcn_model or _default_gcn_model(args.embeddings)
            if model_path is None:
                raise ConfigError("gcn embeddings need --gcn-model")
            gcn = GcnModel.load(model_path)
        return GraphSynsetSpace(emb, t, store, gcn=gcn)
    if not args.meta:
        raise ConfigError("--space meta needs --meta")
    ss = _rebuild_source_set_for(args.meta, t, store)
    return MetaSynsetSpace(load_meta(args.meta, ss), t, store)


def _default_gcn_model(embeddings_path):
    candidate = Path(str(embeddings_path) + ".model.npz")
    return str(candidate) if candidate.exists() else None


def _word_source(name, path):
    vs = load_vectors(path)

    def lookup(token):
        vec, missed = phrase_vector(vs, token)
        return None if missed else vec

    return Source(name=name, lookup=lookup, dim=vs.dim, path=str(path))


def _graph_source(name, path, t, store, text_index):
    emb = load_embeddings(path)
    gcn = None
    if emb.method == "gcn":
        model_path = _default_gcn_model(path)
        if model_path is None:
            raise ConfigError(f"graph source {name!r} is gcn but has no "
                              f"model file next to it")
        gcn = GcnModel.load(model_path)
    space = GraphSynsetSpace(emb, t, store, text_index, gcn=gcn)

    def lookup(token):
        try:
            return space.query_vector(token)
        except ZeroQueryError:
            return None

    return Source(name=name, lookup=lookup, dim=emb.dim, path=str(path))


def _parse_source_flag(flag):
    if "=" not in flag:
        raise ConfigError(f"--source must be NAME=PATH, got {flag!r}")
    return flag.split("=", 1)


def _load_sources(flags, t, store, text_index):
    sources = []
    for flag in flags:
        name, path = _parse_source_flag(flag)
        if Path(str(path) + ".meta").exists():
            sources.append(_graph_source(name, path, t, store, text_index))
        else:
            sources.append(_word_source(name, path))
    return sources


def _rebuild_source_set_for(meta_path, t, store):
    """Source set matching a saved meta space's manifest."""
    import json

    with open(meta_path, encoding="utf-8") as fh:
        manifest = json.load(fh).get("sources", [])
    text_index = SynsetIndex(store, t)
    flags = [f"{s['name']}={s['path']}" for s in manifest]
    sources = _load_sources(flags, t, store, text_index)
    vocab = _training_vocabulary(t, None)
    return build_source_set(sources, vocab)


def _training_vocabulary(t, dataset_path):
    vocab = set(t.lemma_index)
    if dataset_path:
        ds = load_dataset(dataset_path, pos=t.pos)
        vocab.update(e.word for e in ds.entries)
    return sorted(vocab)


def cmd_build_dataset(args) -> int:
    old = load_taxonomy(args.old)
    new = load_taxonomy(args.new)
    id_map = load_id_map(args.id_map) if args.id_map else None
    filters = FilterConfig(min_length=args.min_length,
                           substring_of_hypernym=args.drop_substrings,
                           multiword=args.drop_multiword)
    ds = diff_versions(old, new, filters, id_map=id_map,
                       provenance=(str(args.old), str(args.new)))
    save_dataset(ds, args.out)
    print(f"{len(ds.entries)} query words -> {args.out}")
    return 0


def cmd_embed_graph(args) -> int:
    t = load_taxonomy(args.taxonomy)
    needs_text = args.method in ("tadw", "gcn")
    if needs_text and not args.vectors:
        raise ConfigError(f"--method {args.method} needs --vectors for "
                          f"node text features")
    index = None
    if needs_text:
        index = SynsetIndex(load_vectors(args.vectors), t)
    dim = args.dim
    if args.method == "node2vec":
        cfg = Node2VecConfig(seed=args.seed,
                             **({"dim": dim} if dim else {}))
        emb = train_node2vec(t, cfg)
    elif args.method == "poincare":
        cfg = PoincareConfig(seed=args.seed, **({"dim": dim} if dim else {}))
        emb = train_poincare(t, cfg)
    elif args.method == "tadw":
        cfg = TadwConfig(seed=args.seed, **({"dim": dim} if dim else {}))
        emb = train_tadw(t, index, cfg)
    elif args.method == "hope":
        cfg = HopeConfig(seed=args.seed, **({"dim": dim} if dim else {}))
        emb = train_hope(t, cfg)
    else:
        cfg = GcnConfig(seed=args.seed, **({"dim": dim} if dim else {}))
        emb, model = train_gcn(t, index, cfg)
        model.save(str(args.out) + ".model.npz")
    save_embeddings(emb, args.out)
    print(f"{args.method}: {len(emb.vectors)} nodes, dim {emb.dim} "
          f"-> {args.out}")
    return 0


def cmd_fit_meta(args) -> int:
    t = load_taxonomy(args.taxonomy)
    store = load_vectors(args.vectors)
    text_index = SynsetIndex(store, t)
    sources = _load_sources(args.source, t, store, text_index)
    vocab = _training_vocabulary(t, args.dataset)
    ss = build_source_set(sources, vocab)
    if args.mode == "concat":
        ms = concat_space(ss)
    elif args.mode == "svd":
        if not args.dim:
            raise ConfigError("--mode svd needs --dim")
        ms = fit_svd_meta(ss, args.dim)
    else:
        tcfg = TripletConfig() if args.triplet else None
        ms = fit_autoencoder_meta(ss, args.mode, tcfg=tcfg,
                                  taxonomy=t if args.triplet else None,
                                  seed=args.seed)
    save_meta(ms, args.out)
    print(f"{args.mode}: dim {ms.dim}, vocabulary {len(ss.vocabulary)} "
          f"-> {args.out}")
    return 0


def cmd_train_ranker(args) -> int:
    t = load_taxonomy(args.taxonomy)
    store = load_vectors(args.vectors)
    space = build_space(args, t, store)
    wikt = load_wiktionary(args.wikt) if args.wikt else {}
    cfg = RankerTrainConfig(n_pseudo=args.n_pseudo, k_assoc=args.k_assoc,
                            seed=args.seed)
    data = build_training_set(t, space, wikt, cfg)
    ranker = train_ranker(data, cfg)
    ranker.save(args.out)
    positives = sum(label for _, label in data)
    print(f"trained on {len(data)} rows ({positives} positive), "
          f"l2={ranker.l2} -> {args.out}")
    return 0


def cmd_predict(args) -> int:
    t = load_taxonomy(args.taxonomy)
    store = load_vectors(args.vectors)
    space = build_space(args, t, store)
    ranker = Ranker.load(args.ranker)
    wikt = load_wiktionary(args.wikt) if args.wikt else {}
    ds = load_dataset(args.dataset, pos=t.pos)
    predictions = {}
    skipped = 0
    for entry in ds.entries:
        try:
            predictions[entry.word] = predict_for_query(
                entry.word, space, t, ranker, wikt.get(entry.word),
                k=args.k, k_assoc=args.k_assoc)
        except ZeroQueryError:
            skipped += 1
    save_predictions(predictions, args.out)
    print(f"{len(predictions)} words predicted, {skipped} skipped "
          f"-> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    t = load_taxonomy(args.taxonomy)
    predictions = load_predictions(args.pred)
    ds = load_dataset(args.gold, pos=t.pos)
    gold = {e.word: set(e.gold_ids) for e in ds.entries}
    report = evaluate({w: [sid for sid, _ in rows]
                       for w, rows in predictions.items()},
                      gold, t, k=args.k, seed=args.seed)
    body = report.to_json()
    sys.stdout.write(body)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    if args.per_query:
        with open(args.per_query, "w", encoding="utf-8") as fh:
            for word, ap in report.per_query:
                fh.write(f"{word}\t{repr(ap)}\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_session, create_app

    t = load_taxonomy(args.taxonomy)
    store = load_vectors(args.vectors)
    space = build_space(args, t, store)
    ranker = Ranker.load(args.ranker)
    wikt = load_wiktionary(args.wikt) if args.wikt else {}
    ds = load_dataset(args.dataset, pos=t.pos)
    session = build_session(t, space, ranker,
                            [e.word for e in ds.entries],
                            Path(args.state_dir), wikt=wikt)
    app = create_app(session)
    uvicorn.run(app, host=args.host, port=args.port,
                log_level=os.environ.get("TAXOGRAFT_LOG", "info").lower())
    return 0


def run(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("TAXOGRAFT_LOG", "WARNING").upper())
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        parser.print_usage(sys.stderr)
        sys.stderr.write("taxograft: error: --threads must be >= 1\n")
        return 1
    try:
        return args.func(args)
    except TaxograftError as exc:
        sys.stderr.write(f"taxograft: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"taxograft: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
