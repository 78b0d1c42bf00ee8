"""Document store: per-document grammatical-item sets, difficulty, and faceted search."""

from __future__ import annotations

import json
import threading
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .corpus import CEFR_LEVELS, LevelSet
from .profiler import Prediction, Profiler, prediction_from_dict, sentence_gi_set

INDEX_FORMAT = "gramprof-index"
INDEX_VERSION = 1


class DocumentIndexError(ValueError):
    """Base class for document-index failures."""


class DuplicateDocumentError(DocumentIndexError):
    pass


class UnknownLevelError(DocumentIndexError):
    pass


class IndexFormatError(DocumentIndexError):
    """Raised when a persisted index file is malformed or inconsistent."""


def document_gi_set(predictions: Sequence[Prediction]) -> set[str]:
    """Union of the per-sentence tag sets."""
    out: set[str] = set()
    for p in predictions:
        out |= sentence_gi_set(p)
    return out


def document_level(predictions: Sequence[Prediction], levels: LevelSet) -> str:
    """Most common sentence level; ties break toward the lowest ordinal."""
    names = [p.level[0] for p in predictions if p.level is not None]
    if not names:
        raise DocumentIndexError("no sentence levels to aggregate")
    counts = Counter(names)
    return min(counts, key=lambda n: (-counts[n], levels.ordinal(n)))


@dataclass
class DocumentRecord:
    id: str
    lang: str
    text: str
    sentences: list[Prediction]
    gi: list[str]  # sorted union of sentence tag sets
    difficulty: str
    indexed_at: str

    def snippet(self, limit: int = 200) -> str:
        return self.text[:limit]

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "lang": self.lang,
            "text": self.text,
            "sentences": [p.as_dict() for p in self.sentences],
            "gi": self.gi,
            "difficulty": self.difficulty,
            "indexed_at": self.indexed_at,
        }

    def summary(self) -> dict:
        return {
            "id": self.id,
            "lang": self.lang,
            "difficulty": self.difficulty,
            "gi": self.gi,
            "n_sentences": len(self.sentences),
            "snippet": self.snippet(),
        }


def index_document(profiler: Profiler, doc_id: str, text: str, lang: str) -> DocumentRecord:
    """Profile a document and aggregate its sentence results.

    Requires a model with a difficulty head, since a document's difficulty is
    the mode of its sentence levels.
    """
    if not profiler.multitask:
        raise DocumentIndexError("indexing requires a checkpoint with a difficulty head")
    predictions = profiler.profile_text(text, lang)
    if not predictions:
        raise DocumentIndexError(f"document {doc_id!r}: no sentences")
    gi = sorted(document_gi_set(predictions))
    difficulty = document_level(predictions, profiler.levels)
    return DocumentRecord(
        id=doc_id,
        lang=lang,
        text=text,
        sentences=predictions,
        gi=gi,
        difficulty=difficulty,
        indexed_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


class DocumentIndex:
    """In-memory collection with inverted tag/level/lang maps.

    Records are the source of truth; the inverted maps are derived and
    rebuilt on load. Writes take an exclusive lock; reads snapshot under the
    same lock so no partially indexed document is ever visible.
    """

    def __init__(self, levels: LevelSet = CEFR_LEVELS):
        self.levels = levels
        self._docs: dict[str, DocumentRecord] = {}
        self._by_tag: defaultdict[str, set[str]] = defaultdict(set)
        self._by_level: defaultdict[str, set[str]] = defaultdict(set)
        self._by_lang: defaultdict[str, set[str]] = defaultdict(set)
        self._lock = threading.RLock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._docs)

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._docs)

    def get(self, doc_id: str) -> DocumentRecord | None:
        with self._lock:
            return self._docs.get(doc_id)

    def add(self, record: DocumentRecord, overwrite: bool = False) -> None:
        if record.difficulty not in self.levels:
            raise UnknownLevelError(f"document {record.id!r} has unknown level {record.difficulty!r}")
        with self._lock:
            if record.id in self._docs and not overwrite:
                raise DuplicateDocumentError(f"document id {record.id!r} already indexed")
            if record.id in self._docs:
                self._unlink(self._docs[record.id])
            self._docs[record.id] = record
            for tag in record.gi:
                self._by_tag[tag].add(record.id)
            self._by_level[record.difficulty].add(record.id)
            self._by_lang[record.lang].add(record.id)

    def remove(self, doc_id: str) -> None:
        with self._lock:
            rec = self._docs.pop(doc_id, None)
            if rec is None:
                raise DocumentIndexError(f"no document with id {doc_id!r}")
            self._unlink(rec)

    def _unlink(self, rec: DocumentRecord) -> None:
        for tag in rec.gi:
            self._by_tag[tag].discard(rec.id)
        self._by_level[rec.difficulty].discard(rec.id)
        self._by_lang[rec.lang].discard(rec.id)

    def search(
        self,
        gi: str | Sequence[str] | None = None,
        level: str | None = None,
        lang: str | None = None,
    ) -> list[DocumentRecord]:
        """Conjunction of the provided filters.

        A tag no document carries yields an empty result; an unknown level
        name is an error (levels form a closed scale). Results are ordered by
        (difficulty ordinal, id).
        """
        tags = [gi] if isinstance(gi, str) else list(gi or [])
        if level is not None and level not in self.levels:
            raise UnknownLevelError(f"unknown level {level!r} (expected one of {self.levels.names})")
        with self._lock:
            candidates = set(self._docs)
            for tag in tags:
                candidates &= self._by_tag.get(tag, set())
            if level is not None:
                candidates &= self._by_level.get(level, set())
            if lang is not None:
                candidates &= self._by_lang.get(lang, set())
            hits = [self._docs[i] for i in candidates]
        hits.sort(key=lambda r: (self.levels.ordinal(r.difficulty), r.id))
        return hits

    def all_tags(self) -> list[str]:
        """Tags carried by at least one document."""
        with self._lock:
            return sorted(t for t, ids in self._by_tag.items() if ids)

    # -- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        with self._lock:
            records = [self._docs[i] for i in sorted(self._docs)]
            header = {"format": INDEX_FORMAT, "version": INDEX_VERSION, "levels": self.levels.names}
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(header, ensure_ascii=False) + "\n")
                for rec in records:
                    fh.write(json.dumps(rec.as_dict(), ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path, levels: LevelSet | None = None) -> "DocumentIndex":
        """Read a persisted index, re-validating every record.

        Each record's stored tag union and difficulty must agree with values
        recomputed from its sentences; mismatches, duplicate ids, and
        malformed lines fail with the offending line number.
        """
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
            try:
                header = json.loads(first)
            except json.JSONDecodeError as e:
                raise IndexFormatError(f"{path}:1: malformed header: {e.msg}") from e
            if not isinstance(header, dict) or header.get("format") != INDEX_FORMAT:
                raise IndexFormatError(f"{path}:1: not a document index file")
            if header.get("version") != INDEX_VERSION:
                raise IndexFormatError(f"{path}:1: unsupported index version {header.get('version')!r}")
            if levels is None:
                levels = LevelSet.from_names(header.get("levels", CEFR_LEVELS.names))
            idx = cls(levels)
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                    rec = DocumentRecord(
                        id=str(raw["id"]),
                        lang=str(raw["lang"]),
                        text=str(raw["text"]),
                        sentences=[prediction_from_dict(p) for p in raw["sentences"]],
                        gi=[str(t) for t in raw["gi"]],
                        difficulty=str(raw["difficulty"]),
                        indexed_at=str(raw["indexed_at"]),
                    )
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
                    raise IndexFormatError(f"{path}:{lineno}: malformed record: {e}") from e
                if set(rec.gi) != document_gi_set(rec.sentences):
                    raise IndexFormatError(
                        f"{path}:{lineno}: inconsistent record {rec.id!r}: stored tag set "
                        "does not match its sentences"
                    )
                if rec.difficulty != document_level(rec.sentences, levels):
                    raise IndexFormatError(
                        f"{path}:{lineno}: inconsistent record {rec.id!r}: stored difficulty "
                        "does not match its sentences"
                    )
                try:
                    idx.add(rec)
                except DuplicateDocumentError as e:
                    raise IndexFormatError(f"{path}:{lineno}: {e}") from e
        return idx
