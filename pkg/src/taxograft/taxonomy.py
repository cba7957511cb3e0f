"""In-memory hypernymy taxonomy: synsets, traversal, connectivity, attachment.

The file format is UTF-8 JSON Lines, one synset per line:

    {"id": "s1", "pos": "n", "words": ["animal"], "hypernyms": []}

Edges are stored directed child -> parent.  Connectivity queries treat them
as undirected.  A loaded taxonomy is immutable; :func:`attach` returns a new
value and never mutates existing synsets.
"""

import json
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    CycleError,
    DanglingEdgeError,
    ParseError,
    UnknownSynsetError,
)

_WS = re.compile(r"\s+")


def normalize_lemma(lemma: str) -> str:
    """Lowercase and collapse internal whitespace."""
    return _WS.sub(" ", lemma.strip().lower())


@dataclass(frozen=True)
class Synset:
    id: str
    pos: str
    words: tuple[str, ...]
    hypernym_ids: tuple[str, ...]

    def __post_init__(self):
        if not self.words:
            raise ParseError(f"synset {self.id!r} has no words")
        for w in self.words:
            if w != normalize_lemma(w) or not w:
                raise ParseError(
                    f"synset {self.id!r}: lemma {w!r} is not normalized")


@dataclass(frozen=True)
class Taxonomy:
    pos: str
    synsets: dict[str, Synset]
    lemma_index: dict[str, tuple[str, ...]] = field(default_factory=dict)
    children: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __contains__(self, synset_id: str) -> bool:
        return synset_id in self.synsets

    def __len__(self) -> int:
        return len(self.synsets)

    def require(self, synset_id: str) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise UnknownSynsetError(synset_id) from None

    def sorted_ids(self) -> list[str]:
        return sorted(self.synsets)


def _build_indexes(synsets: dict[str, Synset]) -> tuple[dict, dict]:
    lemma_index: dict[str, list[str]] = {}
    children: dict[str, list[str]] = {sid: [] for sid in synsets}
    for sid in sorted(synsets):
        syn = synsets[sid]
        for w in syn.words:
            lemma_index.setdefault(w, []).append(sid)
        for hid in syn.hypernym_ids:
            children[hid].append(sid)
    return (
        {w: tuple(ids) for w, ids in lemma_index.items()},
        {sid: tuple(sorted(ids)) for sid, ids in children.items()},
    )


def _check_acyclic(synsets: dict[str, Synset]) -> None:
    # Kahn topological sort over child -> parent edges; leftovers are cyclic.
    out_degree = {sid: len(set(s.hypernym_ids)) for sid, s in synsets.items()}
    dependents: dict[str, list[str]] = {sid: [] for sid in synsets}
    for sid, syn in synsets.items():
        for hid in set(syn.hypernym_ids):
            dependents[hid].append(sid)
    queue = deque(sid for sid, deg in out_degree.items() if deg == 0)
    seen = 0
    while queue:
        sid = queue.popleft()
        seen += 1
        for child in dependents[sid]:
            out_degree[child] -= 1
            if out_degree[child] == 0:
                queue.append(child)
    if seen != len(synsets):
        on_cycle = min(sid for sid, deg in out_degree.items() if deg > 0)
        raise CycleError(on_cycle)


def build_taxonomy(pos: str, synsets: dict[str, Synset]) -> Taxonomy:
    """Validate edges and acyclicity, then assemble the indexed value."""
    if not synsets:
        raise ParseError("taxonomy has no synsets")
    for sid, syn in synsets.items():
        for hid in syn.hypernym_ids:
            if hid not in synsets:
                raise DanglingEdgeError(sid, hid)
    _check_acyclic(synsets)
    lemma_index, children = _build_indexes(synsets)
    return Taxonomy(pos=pos, synsets=synsets, lemma_index=lemma_index,
                    children=children)


def load_taxonomy(path) -> Taxonomy:
    synsets: dict[str, Synset] = {}
    pos = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line=lineno)
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", line=lineno)
            try:
                sid = obj["id"]
                syn_pos = obj["pos"]
                words = obj["words"]
                hypernyms = obj["hypernyms"]
            except KeyError as exc:
                raise ParseError(f"missing field {exc.args[0]!r}", line=lineno)
            if syn_pos not in ("n", "v"):
                raise ParseError(f"bad pos {syn_pos!r}", line=lineno)
            if pos is None:
                pos = syn_pos
            elif syn_pos != pos:
                raise ParseError(
                    f"pos {syn_pos!r} differs from file pos {pos!r}",
                    line=lineno)
            if sid in synsets:
                raise ParseError(f"duplicate synset id {sid!r}", line=lineno)
            try:
                synsets[sid] = Synset(
                    id=sid, pos=syn_pos,
                    words=tuple(normalize_lemma(w) for w in words),
                    hypernym_ids=tuple(hypernyms))
            except ParseError as exc:
                raise ParseError(str(exc), line=lineno)
    if pos is None:
        raise ParseError("empty taxonomy file")
    return build_taxonomy(pos, synsets)


def save_taxonomy(t: Taxonomy, path) -> None:
    """Write JSON Lines sorted by synset id (the canonical on-disk order)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_taxonomy(t))


def dump_taxonomy(t: Taxonomy) -> str:
    lines = []
    for sid in t.sorted_ids():
        syn = t.synsets[sid]
        lines.append(json.dumps(
            {"id": syn.id, "pos": syn.pos, "words": list(syn.words),
             "hypernyms": list(syn.hypernym_ids)},
            ensure_ascii=False, sort_keys=False))
    return "\n".join(lines) + "\n"


def hypernyms(t: Taxonomy, synset_id: str, max_order: int) -> dict[str, int]:
    """BFS upward; maps each reachable ancestor to its minimum order.

    Order 1 is a direct hypernym, order 2 a grandparent, and so on.  The
    query synset itself is excluded even if reachable through a cycle-free
    diamond.
    """
    t.require(synset_id)
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    orders: dict[str, int] = {}
    frontier = [synset_id]
    for order in range(1, max_order + 1):
        nxt = []
        for sid in frontier:
            for hid in t.synsets[sid].hypernym_ids:
                if hid != synset_id and hid not in orders:
                    orders[hid] = order
                    nxt.append(hid)
        if not nxt:
            break
        frontier = nxt
    return orders


def hyponyms(t: Taxonomy, synset_id: str) -> list[str]:
    """Direct children, sorted by id."""
    t.require(synset_id)
    return list(t.children.get(synset_id, ()))


def connected_components(t: Taxonomy, ids) -> list[set[str]]:
    """Components of the subgraph induced on ``ids``, edges undirected."""
    ids = set(ids)
    for sid in ids:
        t.require(sid)
    unvisited = set(ids)
    components = []
    for start in sorted(ids):
        if start not in unvisited:
            continue
        comp = set()
        stack = [start]
        unvisited.discard(start)
        while stack:
            sid = stack.pop()
            comp.add(sid)
            syn = t.synsets[sid]
            neighbors = list(syn.hypernym_ids) + list(t.children.get(sid, ()))
            for nid in neighbors:
                if nid in unvisited:
                    unvisited.discard(nid)
                    stack.append(nid)
        components.append(comp)
    return components


def fresh_synset_id(t: Taxonomy) -> str:
    """Next id of the form new-<counter> not present in the taxonomy."""
    counter = 1
    for sid in t.synsets:
        m = re.fullmatch(r"new-(\d+)", sid)
        if m:
            counter = max(counter, int(m.group(1)) + 1)
    return f"new-{counter}"


def attach(t: Taxonomy, lemma: str, hypernym_ids) -> tuple[Taxonomy, str]:
    """Add a single-word leaf synset under the given parents.

    Returns the new taxonomy and the fresh synset id.  Copy-on-write: the
    input taxonomy is left untouched.
    """
    lemma = normalize_lemma(lemma)
    if not lemma:
        raise ValueError("lemma must be non-empty")
    hypernym_ids = list(hypernym_ids)
    if not hypernym_ids:
        raise ValueError("at least one hypernym id is required")
    for hid in hypernym_ids:
        t.require(hid)
    new_id = fresh_synset_id(t)
    synsets = dict(t.synsets)
    synsets[new_id] = Synset(id=new_id, pos=t.pos, words=(lemma,),
                             hypernym_ids=tuple(sorted(set(hypernym_ids))))
    return build_taxonomy(t.pos, synsets), new_id
