"""Annotation service: ranked candidates out, accepted hypernyms in.

A human works through a queue of query words, accepts or rejects the
proposed attachment points, and commits the accepted ones, which grafts a
new leaf synset into the working taxonomy.  Every decision and commit is
appended to a JSON-Lines log and fsynced before the response goes out, so
replaying the log over the starting taxonomy rebuilds the working state
exactly.
"""

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .errors import ParseError, ZeroQueryError
from .ranker import Ranker, predict_for_query
from .taxonomy import Taxonomy, attach, dump_taxonomy

SNAPSHOT_EVERY = 20  # commits between taxonomy snapshots

LOG_NAME = "decisions.jsonl"
SNAPSHOT_NAME = "taxonomy.snapshot.jsonl"


@dataclass
class SessionState:
    """Working taxonomy, pending queue, and the durable decision log.

    `decisions` keeps the latest verdict per (synset, annotator) pair per
    word; the log underneath is append-only, so the file records the full
    history while reads see only the compacted view.
    """

    taxonomy: Taxonomy
    space: object
    ranker: Ranker
    queue: list
    log_path: Path
    snapshot_dir: Path
    wikt: dict = field(default_factory=dict)
    k: int = 10
    k_assoc: int = 10
    decisions: dict = field(default_factory=dict)
    committed: dict = field(default_factory=dict)
    commits_since_snapshot: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


def _append_event(state: SessionState, event: dict) -> None:
    with open(state.log_path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(event, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def _write_snapshot(state: SessionState) -> None:
    path = state.snapshot_dir / SNAPSHOT_NAME
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(dump_taxonomy(state.taxonomy))
    tmp.replace(path)
    state.commits_since_snapshot = 0


def _record_decision(state: SessionState, word: str, synset_id: str,
                     verdict: str, annotator: str) -> None:
    if word in state.committed:
        raise HTTPException(409, f"{word!r} already committed")
    if word not in state.queue:
        raise HTTPException(404, f"unknown word {word!r}")
    if synset_id not in state.taxonomy.synsets:
        raise HTTPException(404, f"unknown synset {synset_id!r}")
    _append_event(state, {"event": "decision", "word": word,
                          "synset_id": synset_id, "verdict": verdict,
                          "annotator": annotator, "ts": time.time()})
    state.decisions.setdefault(word, {})[(synset_id, annotator)] = verdict


def _accepted_synsets(state: SessionState, word: str) -> list:
    verdicts = state.decisions.get(word, {})
    return sorted({sid for (sid, _), v in verdicts.items() if v == "accept"})


def _commit_word(state: SessionState, word: str) -> str:
    if word not in state.queue:
        raise HTTPException(409, f"{word!r} is not pending")
    accepted = _accepted_synsets(state, word)
    if not accepted:
        raise HTTPException(409, f"no accepted decisions for {word!r}")
    t2, new_id = attach(state.taxonomy, word, accepted)
    _append_event(state, {"event": "commit", "word": word,
                          "new_synset_id": new_id, "parents": accepted,
                          "ts": time.time()})
    state.taxonomy = t2
    state.space = state.space.add_synset(t2.synsets[new_id], t2)
    state.queue.remove(word)
    state.committed[word] = new_id
    state.commits_since_snapshot += 1
    if state.commits_since_snapshot >= SNAPSHOT_EVERY:
        _write_snapshot(state)
    return new_id


def replay_log(taxonomy: Taxonomy, space, words, log_path: Path):
    """Rebuild (taxonomy, space, decisions, committed, queue) from the log.

    Commits are re-applied in file order against the evolving taxonomy; the
    logged synset id must match what attach regenerates, otherwise the log
    belongs to a different starting taxonomy.
    """
    decisions: dict = {}
    committed: dict = {}
    queue = list(dict.fromkeys(words))
    if not log_path.exists():
        return taxonomy, space, decisions, committed, queue
    with open(log_path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                event = json.loads(raw)
            except json.JSONDecodeError:
                raise ParseError(f"{log_path}:{lineno}: not JSON")
            kind = event.get("event")
            if kind == "decision":
                key = (event["synset_id"], event["annotator"])
                decisions.setdefault(event["word"], {})[key] = \
                    event["verdict"]
            elif kind == "commit":
                taxonomy, new_id = attach(taxonomy, event["word"],
                                          event["parents"])
                if new_id != event["new_synset_id"]:
                    raise ParseError(
                        f"{log_path}:{lineno}: log replays to {new_id}, "
                        f"not {event['new_synset_id']}; wrong taxonomy?")
                space = space.add_synset(taxonomy.synsets[new_id], taxonomy)
                committed[event["word"]] = new_id
                if event["word"] in queue:
                    queue.remove(event["word"])
            else:
                raise ParseError(f"{log_path}:{lineno}: unknown event "
                                 f"{kind!r}")
    return taxonomy, space, decisions, committed, queue


def build_session(taxonomy: Taxonomy, space, ranker: Ranker, words,
                  state_dir: Path, wikt=None, k: int = 10,
                  k_assoc: int = 10) -> SessionState:
    state_dir = Path(state_dir)
    state_dir.mkdir(parents=True, exist_ok=True)
    log_path = state_dir / LOG_NAME
    taxonomy, space, decisions, committed, queue = replay_log(
        taxonomy, space, words, log_path)
    return SessionState(taxonomy=taxonomy, space=space, ranker=ranker,
                        queue=queue, log_path=log_path,
                        snapshot_dir=state_dir, wikt=wikt or {}, k=k,
                        k_assoc=k_assoc, decisions=decisions,
                        committed=committed)


class DecisionIn(BaseModel):
    word: str
    synset_id: str
    verdict: Literal["accept", "reject"]
    annotator: str


class CommitIn(BaseModel):
    word: str


def create_app(state: SessionState) -> FastAPI:
    app = FastAPI(title="taxograft annotation service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.get("/words/next")
    def words_next():
        with state.lock:
            if not state.queue:
                raise HTTPException(404, "no words pending")
            return {"word": state.queue[0],
                    "remaining_count": len(state.queue)}

    @app.get("/candidates")
    def candidates(word: str = "", k: int | None = None):
        if not word:
            raise HTTPException(400, "word parameter required")
        k = state.k if k is None else k
        if k < 1:
            raise HTTPException(400, "k must be >= 1")
        with state.lock:
            space, t = state.space, state.taxonomy
            ranker, record = state.ranker, state.wikt.get(word)
        try:
            ranked = predict_for_query(word, space, t, ranker, record,
                                       k=k, k_assoc=state.k_assoc)
        except ZeroQueryError as exc:
            raise HTTPException(422, str(exc))
        return [{"synset_id": sid, "words": list(t.synsets[sid].words),
                 "score": score, "rank": pos}
                for pos, (sid, score) in enumerate(ranked, start=1)]

    @app.post("/decision", status_code=204)
    def decision(body: DecisionIn):
        with state.lock:
            _record_decision(state, body.word, body.synset_id,
                             body.verdict, body.annotator)
        return Response(status_code=204)

    @app.post("/commit")
    def commit(body: CommitIn):
        with state.lock:
            new_id = _commit_word(state, body.word)
        return {"new_synset_id": new_id}

    @app.get("/taxonomy/export")
    def export():
        with state.lock:
            body = dump_taxonomy(state.taxonomy)
        return PlainTextResponse(body, media_type="application/x-ndjson")

    return app
