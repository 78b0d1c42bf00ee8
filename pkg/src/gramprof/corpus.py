"""Tokenization, annotated-corpus I/O, and tag/token inventories."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

EMPTY_TAG = "∅"  # reserved class for spans that carry no grammatical item
UNK_TAG = "UNK"  # reserved class for collapsed low-frequency tags

DEFAULT_MAX_LEN = 128

# Main CJK ideograph blocks; characters in these ranges always tokenize
# one codepoint per token in "auto" mode.
_CJK_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
)


class CorpusError(ValueError):
    """Raised for malformed corpus files or invalid annotations."""


@dataclass(frozen=True)
class Token:
    text: str
    char_start: int
    char_end: int  # exclusive


@dataclass(frozen=True)
class SpanAnnotation:
    start: int  # token index
    end: int  # token index, inclusive
    tag: str


@dataclass(frozen=True)
class Level:
    ordinal: int
    name: str


@dataclass(frozen=True)
class LevelSet:
    """Ordered difficulty scale; ordinals are contiguous from 0."""

    levels: tuple[Level, ...]

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "LevelSet":
        if len(set(names)) != len(names):
            raise ValueError("level names must be distinct")
        return cls(tuple(Level(i, n) for i, n in enumerate(names)))

    @property
    def names(self) -> list[str]:
        return [lv.name for lv in self.levels]

    def __len__(self) -> int:
        return len(self.levels)

    def __contains__(self, name: str) -> bool:
        return any(lv.name == name for lv in self.levels)

    def ordinal(self, name: str) -> int:
        for lv in self.levels:
            if lv.name == name:
                return lv.ordinal
        raise KeyError(f"unknown level name: {name!r}")

    def name(self, ordinal: int) -> str:
        return self.levels[ordinal].name


CEFR_LEVELS = LevelSet.from_names(["A1", "A2", "B1", "B2", "C1", "C2"])


@dataclass
class Sentence:
    id: str
    lang: str
    text: str
    tokens: list[Token]
    gold_spans: list[SpanAnnotation]
    level: str | None = None

    def __len__(self) -> int:
        return len(self.tokens)

    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def tokenize(text: str, lang_mode: str = "auto") -> list[Token]:
    """Split text into offset-bearing tokens.

    Modes:
      - ``segmental``: contiguous runs of letters/digits form one token,
        every other non-whitespace codepoint is its own token.
      - ``cjk-char``: every non-whitespace codepoint is its own token.
      - ``auto``: like segmental, except CJK ideographs are always emitted
        one codepoint per token.

    Whitespace never appears in any token; offsets index the input string.
    """
    if lang_mode not in ("segmental", "cjk-char", "auto"):
        raise ValueError(f"unknown tokenizer mode: {lang_mode!r}")
    tokens: list[Token] = []
    run_start: int | None = None

    def flush(end: int) -> None:
        nonlocal run_start
        if run_start is not None:
            tokens.append(Token(text[run_start:end], run_start, end))
            run_start = None

    for i, ch in enumerate(text):
        if ch.isspace():
            flush(i)
            continue
        if lang_mode == "cjk-char" or (lang_mode == "auto" and _is_cjk(ch)):
            flush(i)
            tokens.append(Token(ch, i, i + 1))
            continue
        if ch.isalpha() or ch.isdigit():
            if run_start is None:
                run_start = i
            continue
        # punctuation / symbols: one token per codepoint
        flush(i)
        tokens.append(Token(ch, i, i + 1))
    flush(len(text))
    return tokens


def _align_tokens(text: str, token_texts: Sequence[str], sid: str) -> list[Token]:
    """Recover char offsets for explicitly listed tokens by greedy left-to-right matching."""
    tokens = []
    cursor = 0
    for t in token_texts:
        if not t or t.isspace():
            raise CorpusError(f"sentence {sid!r}: blank token in token list")
        idx = text.find(t, cursor)
        if idx < 0:
            raise CorpusError(f"sentence {sid!r}: token {t!r} not found in text after offset {cursor}")
        tokens.append(Token(t, idx, idx + len(t)))
        cursor = idx + len(t)
    return tokens


def _validate_spans(raw_spans: list, n_tokens: int, sid: str) -> list[SpanAnnotation]:
    spans: list[SpanAnnotation] = []
    seen: dict[tuple[int, int], str] = {}
    for s in raw_spans:
        try:
            start, end, tag = int(s["start"]), int(s["end"]), str(s["tag"])
        except (KeyError, TypeError, ValueError) as e:
            raise CorpusError(f"sentence {sid!r}: malformed span {s!r}") from e
        if start > end:
            raise CorpusError(f"sentence {sid!r}: inverted span ({start}, {end})")
        if start < 0 or end >= n_tokens:
            raise CorpusError(f"sentence {sid!r}: span ({start}, {end}) outside 0..{n_tokens - 1}")
        if not tag or tag == EMPTY_TAG:
            raise CorpusError(f"sentence {sid!r}: span ({start}, {end}) has empty or reserved tag")
        if (start, end) in seen:
            prev = seen[(start, end)]
            kind = "conflicting tags" if prev != tag else "repeated annotation"
            raise CorpusError(f"sentence {sid!r}: duplicate span ({start}, {end}): {kind} ({prev!r}, {tag!r})")
        seen[(start, end)] = tag
        spans.append(SpanAnnotation(start, end, tag))
    return spans


def sentence_from_record(
    record: dict,
    max_len: int = DEFAULT_MAX_LEN,
    levels: LevelSet = CEFR_LEVELS,
) -> Sentence:
    """Build one validated ``Sentence`` from a parsed JSON record."""
    try:
        sid = str(record["id"])
        lang = str(record["lang"])
        text = str(record["text"])
    except KeyError as e:
        raise CorpusError(f"record missing required field {e.args[0]!r}") from e
    if "tokens" in record and record["tokens"] is not None:
        tokens = _align_tokens(text, record["tokens"], sid)
    else:
        tokens = tokenize(text, "auto")
    spans = _validate_spans(record.get("spans", []), len(tokens), sid)
    if len(tokens) > max_len:
        tokens = tokens[:max_len]
        spans = [s for s in spans if s.end < max_len]
    level = record.get("level")
    if level is not None:
        level = str(level)
        if level not in levels:
            raise CorpusError(f"sentence {sid!r}: unknown level {level!r} (expected one of {levels.names})")
    return Sentence(id=sid, lang=lang, text=text, tokens=tokens, gold_spans=spans, level=level)


def load_corpus(
    path: str | Path,
    max_len: int = DEFAULT_MAX_LEN,
    levels: LevelSet = CEFR_LEVELS,
) -> list[Sentence]:
    """Read a JSONL corpus, one sentence per line.

    Sentences longer than ``max_len`` tokens are truncated and gold spans
    extending past the cut are dropped.
    """
    sentences = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"{path}:{lineno}: malformed JSON: {e.msg}") from e
            try:
                sent = sentence_from_record(record, max_len=max_len, levels=levels)
            except CorpusError as e:
                raise CorpusError(f"{path}:{lineno}: {e}") from e
            if sent.id in seen_ids:
                raise CorpusError(f"{path}:{lineno}: duplicate sentence id {sent.id!r}")
            seen_ids.add(sent.id)
            sentences.append(sent)
    return sentences


def sentence_to_record(sent: Sentence) -> dict:
    record = {
        "id": sent.id,
        "lang": sent.lang,
        "text": sent.text,
        "tokens": sent.token_texts(),
        "spans": [{"start": s.start, "end": s.end, "tag": s.tag} for s in sent.gold_spans],
    }
    if sent.level is not None:
        record["level"] = sent.level
    return record


def save_corpus(sentences: Iterable[Sentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in sentences:
            fh.write(json.dumps(sentence_to_record(sent), ensure_ascii=False) + "\n")


class TagInventory:
    """Bidirectional tag/id map with reserved empty and UNK classes.

    Class ids: 0 is the empty tag, 1 is UNK, and known tags follow in
    lexicographic order. ``num_classes`` is the softmax width ``K``.
    """

    def __init__(self, tags: Sequence[str], min_freq: int = 2):
        tags = list(tags)
        if len(set(tags)) != len(tags):
            raise ValueError("inventory tags must be distinct")
        if EMPTY_TAG in tags or UNK_TAG in tags:
            raise ValueError("reserved tags cannot appear in the tag list")
        self.tags = tags
        self.min_freq = min_freq
        self._tag_to_id = {EMPTY_TAG: 0, UNK_TAG: 1}
        for i, t in enumerate(tags):
            self._tag_to_id[t] = i + 2
        self._id_to_tag = [EMPTY_TAG, UNK_TAG] + tags

    @property
    def num_classes(self) -> int:
        return len(self._id_to_tag)

    def id_of(self, tag: str) -> int:
        """Map a tag to its class id; unknown tags collapse to UNK."""
        return self._tag_to_id.get(tag, 1)

    def tag_of(self, class_id: int) -> str:
        return self._id_to_tag[class_id]

    def resolve(self, tag: str) -> str:
        """Collapse a raw tag to the string the model can actually predict."""
        return tag if tag in self._tag_to_id else UNK_TAG

    def __contains__(self, tag: str) -> bool:
        return tag in self._tag_to_id

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TagInventory)
            and self.tags == other.tags
            and self.min_freq == other.min_freq
        )


def build_tag_inventory(sentences: Sequence[Sentence], min_freq: int = 2) -> TagInventory:
    """Collect gold tags; tags seen fewer than ``min_freq`` times collapse to UNK."""
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    if not sentences:
        raise CorpusError("cannot build a tag inventory from an empty corpus")
    counts: Counter[str] = Counter(s.tag for sent in sentences for s in sent.gold_spans)
    kept = sorted(t for t, c in counts.items() if c >= min_freq)
    return TagInventory(kept, min_freq=min_freq)


class Vocab:
    """Token-text/id map for the encoder; id 0 is the unknown-token entry."""

    UNK = "<unk>"

    def __init__(self, tokens: Sequence[str]):
        tokens = list(tokens)
        if len(set(tokens)) != len(tokens):
            raise ValueError("vocab entries must be distinct")
        if self.UNK in tokens:
            raise ValueError("reserved entry cannot appear in the token list")
        self.tokens = tokens
        self._to_id = {self.UNK: 0}
        for i, t in enumerate(tokens):
            self._to_id[t] = i + 1

    def __len__(self) -> int:
        return len(self.tokens) + 1

    def id_of(self, token_text: str) -> int:
        return self._to_id.get(token_text, 0)

    def encode(self, sent: Sentence) -> list[int]:
        return [self.id_of(t) for t in sent.token_texts()]

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.tokens == other.tokens


def build_vocab(sentences: Sequence[Sentence]) -> Vocab:
    if not sentences:
        raise CorpusError("cannot build a vocabulary from an empty corpus")
    seen = sorted({t for sent in sentences for t in sent.token_texts()})
    return Vocab(seen)


def namespace_tags(sentences: Sequence[Sentence]) -> list[Sentence]:
    """Prefix every gold tag with the sentence's language code (``en:TAG``).

    Makes tag unions well defined when corpora in different languages use
    colliding tag names.
    """
    out = []
    for sent in sentences:
        spans = [SpanAnnotation(s.start, s.end, f"{sent.lang}:{s.tag}") for s in sent.gold_spans]
        out.append(
            Sentence(
                id=sent.id,
                lang=sent.lang,
                text=sent.text,
                tokens=list(sent.tokens),
                gold_spans=spans,
                level=sent.level,
            )
        )
    return out
