"""Diff two taxonomy versions into a query/gold evaluation dataset.

A query word is a lemma present only in the newer version.  Its gold
synsets are the direct hypernyms of its new synsets plus their direct
hypernyms (order 2), all resolved into the older version's id space.
Words whose direct hypernyms do not all resolve in the old version are
dropped; unresolvable order-2 hypernyms are merely omitted.
"""

from dataclasses import dataclass, field

from .errors import EmptyDatasetError, ParseError, PosMismatchError
from .taxonomy import Taxonomy, hypernyms


@dataclass(frozen=True)
class QueryEntry:
    word: str
    gold_ids: frozenset[str]


@dataclass(frozen=True)
class QueryDataset:
    pos: str
    entries: list[QueryEntry]
    provenance: tuple[str, str] = ("old", "new")


@dataclass(frozen=True)
class FilterConfig:
    min_length: int = 0
    substring_of_hypernym: bool = False
    multiword: bool = False


def diff_versions(old: Taxonomy, new: Taxonomy,
                  filters: FilterConfig = FilterConfig(),
                  id_map: dict[str, str] | None = None,
                  provenance: tuple[str, str] = ("old", "new")) -> QueryDataset:
    """Build the dataset of (new lemma, gold synsets in the old taxonomy).

    ``id_map`` optionally maps old ids to new ids for releases whose id
    spaces drifted; ids missing from the map are matched verbatim.
    """
    if old.pos != new.pos:
        raise PosMismatchError(
            f"old pos {old.pos!r} != new pos {new.pos!r}")
    new_to_old = {}
    if id_map:
        new_to_old = {nid: oid for oid, nid in id_map.items()}

    def resolve(new_id: str) -> str | None:
        oid = new_to_old.get(new_id, new_id)
        return oid if oid in old.synsets else None

    entries = []
    for lemma in sorted(new.lemma_index):
        if lemma in old.lemma_index:
            continue
        direct_new: set[str] = set()
        second_new: set[str] = set()
        for sid in new.lemma_index[lemma]:
            ancestry = hypernyms(new, sid, 2)
            direct_new.update(h for h, o in ancestry.items() if o == 1)
            second_new.update(h for h, o in ancestry.items() if o == 2)
        if not direct_new:
            continue
        direct_old = [resolve(h) for h in direct_new]
        if any(h is None for h in direct_old):
            continue
        gold = set(direct_old)
        for h in second_new:
            oid = resolve(h)
            if oid is not None:
                gold.add(oid)
        entries.append(QueryEntry(word=lemma, gold_ids=frozenset(gold)))

    entries = apply_filters(entries, filters, old)
    if not entries:
        raise EmptyDatasetError(
            "no query words survive the version diff and filters")
    return QueryDataset(pos=old.pos, entries=entries, provenance=provenance)


def apply_filters(entries: list[QueryEntry], filters: FilterConfig,
                  old: Taxonomy) -> list[QueryEntry]:
    """Drop entries per the enabled mechanical filters."""
    kept = []
    for entry in entries:
        if filters.min_length and len(entry.word) < filters.min_length:
            continue
        if filters.multiword and " " in entry.word:
            continue
        if filters.substring_of_hypernym and _contains_gold_lemma(entry, old):
            continue
        kept.append(entry)
    return kept


def _contains_gold_lemma(entry: QueryEntry, old: Taxonomy) -> bool:
    for sid in entry.gold_ids:
        for lemma in old.synsets[sid].words:
            if lemma and lemma in entry.word:
                return True
    return False


def save_dataset(ds: QueryDataset, path) -> None:
    """TSV: word TAB comma-separated gold synset ids, sorted by word."""
    with open(path, "w", encoding="utf-8") as fh:
        for entry in sorted(ds.entries, key=lambda e: e.word):
            fh.write(f"{entry.word}\t{','.join(sorted(entry.gold_ids))}\n")


def load_dataset(path, pos: str = "n") -> QueryDataset:
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'word<TAB>gold ids'", line=lineno)
            word, gold = parts
            if word in seen:
                raise ParseError(f"duplicate word {word!r}", line=lineno)
            seen.add(word)
            gold_ids = frozenset(g for g in gold.split(",") if g)
            if not gold_ids:
                raise ParseError(f"word {word!r} has no gold ids", line=lineno)
            entries.append(QueryEntry(word=word, gold_ids=gold_ids))
    if not entries:
        raise EmptyDatasetError(f"no entries in {path}")
    return QueryDataset(pos=pos, entries=entries)


def load_id_map(path) -> dict[str, str]:
    """TSV old_id TAB new_id."""
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'old_id<TAB>new_id'", line=lineno)
            mapping[parts[0]] = parts[1]
    return mapping
