"""End-to-end inference: raw text to per-sentence grammatical spans and difficulty."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import LevelSet, TagInventory, Token, Vocab, tokenize
from .span_model import GrammarProfilerModel
from .trainer import Checkpoint, checkpoint_checksum, load_checkpoint

_TERMINATORS = set(".!?。！？")


class ProfilerError(ValueError):
    """Raised for inference requests the loaded model cannot serve."""


class UnsupportedLanguageError(ProfilerError):
    """The checkpoint was not trained on the requested language."""


def split_sentences(text: str) -> list[tuple[str, int]]:
    """Cut text after terminator runs (``.!?。！？``) and newline runs.

    Returns (sentence text, char offset into the input) pairs with outer
    whitespace trimmed; whitespace-only segments are dropped and a trailing
    unterminated fragment is kept.
    """
    cuts: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and text[j] in _TERMINATORS:
                j += 1
            cuts.append((start, j))
            start = i = j
        elif ch == "\n":
            cuts.append((start, i))
            j = i + 1
            while j < n and text[j] == "\n":
                j += 1
            start = i = j
        else:
            i += 1
    if start < n:
        cuts.append((start, n))
    out = []
    for s, e in cuts:
        seg = text[s:e]
        stripped = seg.lstrip()
        lead = len(seg) - len(stripped)
        stripped = stripped.rstrip()
        if stripped:
            out.append((stripped, s + lead))
    return out


@dataclass(frozen=True)
class PredictedSpan:
    """One decoded grammatical item; token indices plus absolute char offsets."""

    start: int  # token index
    end: int  # token index, inclusive
    tag: str
    prob: float
    char_start: int
    char_end: int

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "tag": self.tag,
            "prob": self.prob,
            "char_start": self.char_start,
            "char_end": self.char_end,
        }


@dataclass
class Prediction:
    """Profile of one sentence; all char offsets index the originally submitted text."""

    id: str
    text: str
    offset: int
    tokens: list[Token]
    spans: list[PredictedSpan]
    level: tuple[str, float] | None = None

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "offset": self.offset,
            "tokens": [{"text": t.text, "start": t.char_start, "end": t.char_end} for t in self.tokens],
            "spans": [s.as_dict() for s in self.spans],
            "level": {"name": self.level[0], "prob": self.level[1]} if self.level is not None else None,
        }


def sentence_gi_set(prediction: Prediction) -> set[str]:
    """Deduplicated tags present in one sentence."""
    return {s.tag for s in prediction.spans}


def sentence_level(prediction: Prediction) -> tuple[str, float]:
    if prediction.level is None:
        raise ProfilerError("model has no difficulty head")
    return prediction.level


class Profiler:
    """Frozen-checkpoint inference wrapper, safe for concurrent calls."""

    def __init__(self, checkpoint: Checkpoint, checksum: str | None = None):
        self.checkpoint = checkpoint
        self.model: GrammarProfilerModel = checkpoint.build_model()
        self.vocab: Vocab = checkpoint.vocab
        self.inventory: TagInventory = checkpoint.inventory
        self.levels: LevelSet | None = checkpoint.levels
        self.languages: tuple[str, ...] = checkpoint.languages
        self.max_len = checkpoint.config.max_len
        self.checksum = checksum or "unsaved"

    @classmethod
    def from_dir(cls, directory: str | Path) -> "Profiler":
        ckpt = load_checkpoint(directory)
        return cls(ckpt, checksum=checkpoint_checksum(directory))

    @property
    def multitask(self) -> bool:
        return self.model.multitask

    def profile_text(self, text: str, lang: str, threshold: float = 0.0) -> list[Prediction]:
        """Split, tokenize, and decode every sentence of ``text``.

        Sentences longer than the model's window are truncated. Empty text
        yields an empty list; a language the checkpoint was not trained on is
        an error.
        """
        if lang not in self.languages:
            raise UnsupportedLanguageError(
                f"unsupported language {lang!r}; this model handles: {', '.join(self.languages)}"
            )
        predictions = []
        for k, (sent_text, offset) in enumerate(split_sentences(text)):
            tokens = tokenize(sent_text, "auto")[: self.max_len]
            if not tokens:
                continue
            abs_tokens = [Token(t.text, t.char_start + offset, t.char_end + offset) for t in tokens]
            ids = [self.vocab.id_of(t.text) for t in tokens]
            decoded, level = self.model.predict(ids, threshold=threshold)
            spans = [
                PredictedSpan(
                    start=d.i,
                    end=d.j,
                    tag=d.tag,
                    prob=d.prob,
                    char_start=abs_tokens[d.i].char_start,
                    char_end=abs_tokens[d.j].char_end,
                )
                for d in decoded
            ]
            predictions.append(
                Prediction(
                    id=f"s{len(predictions)}",
                    text=sent_text,
                    offset=offset,
                    tokens=abs_tokens,
                    spans=spans,
                    level=level,
                )
            )
        return predictions


def prediction_from_dict(d: dict) -> Prediction:
    """Inverse of ``Prediction.as_dict`` (used when reloading stored documents)."""
    level = d.get("level")
    return Prediction(
        id=str(d["id"]),
        text=str(d["text"]),
        offset=int(d["offset"]),
        tokens=[Token(t["text"], int(t["start"]), int(t["end"])) for t in d["tokens"]],
        spans=[
            PredictedSpan(
                start=int(s["start"]),
                end=int(s["end"]),
                tag=str(s["tag"]),
                prob=float(s["prob"]),
                char_start=int(s["char_start"]),
                char_end=int(s["char_end"]),
            )
            for s in d["spans"]
        ],
        level=(str(level["name"]), float(level["prob"])) if level is not None else None,
    )
