"""Synthetic rule-annotated corpora for desk-scale training and demos.

Every grammatical item here is defined by a surface rule over tokens, so a
small encoder can both memorize a training split and generalize to fresh
draws from the same templates. Each sentence carries a level determined by a
dedicated marker word, which makes difficulty prediction learnable too.
"""

from __future__ import annotations

import numpy as np

from .corpus import CEFR_LEVELS, Sentence, SpanAnnotation, save_corpus, tokenize

EN_PRONOUNS = ["i", "you", "we", "they", "he", "she"]
EN_ING_VERBS = ["walking", "running", "eating", "reading", "playing", "writing"]
EN_PAST_VERBS = ["walked", "jumped", "cooked", "smiled", "waited", "studied"]
EN_NOUNS = ["dog", "cat", "book", "park", "garden", "teacher"]
EN_PREPS = ["in", "on", "near"]
# one adverb per difficulty level, always present exactly once
EN_LEVEL_MARKERS = ["now", "today", "often", "rarely", "certainly", "presumably"]

ZH_PRONOUNS = "我你他她"
ZH_VERBS = "吃看写读"
ZH_NOUNS = "饭书水茶"
ZH_PLACES = "家店园校"
ZH_LEVEL_MARKERS = "一二三四五六"

EN_TAGS = ["PRON", "V.PROG", "V.PAST", "NP.DEF", "PP", "ADV"]
ZH_TAGS = ["PRON", "DE.POSS", "V.LE", "ZAI.PP", "N.OBJ", "ADV"]


def _aux_for(pronoun: str) -> str:
    if pronoun == "i":
        return "am"
    if pronoun in ("he", "she"):
        return "is"
    return "are"


def _en_sentence(rng: np.random.Generator, level_ordinal: int) -> tuple[list[str], list[tuple[int, int, str]]]:
    words: list[str] = []
    spans: list[tuple[int, int, str]] = []

    pron = EN_PRONOUNS[rng.integers(len(EN_PRONOUNS))]
    spans.append((len(words), len(words), "PRON"))
    words.append(pron)

    if rng.random() < 0.5:
        aux = _aux_for(pron)
        verb = EN_ING_VERBS[rng.integers(len(EN_ING_VERBS))]
        spans.append((len(words), len(words) + 1, "V.PROG"))
        words += [aux, verb]
    else:
        verb = EN_PAST_VERBS[rng.integers(len(EN_PAST_VERBS))]
        spans.append((len(words), len(words), "V.PAST"))
        words.append(verb)

    if rng.random() < 0.45:
        # prepositional phrase with a nested definite noun phrase
        prep = EN_PREPS[rng.integers(len(EN_PREPS))]
        noun = EN_NOUNS[rng.integers(len(EN_NOUNS))]
        start = len(words)
        spans.append((start, start + 2, "PP"))
        spans.append((start + 1, start + 2, "NP.DEF"))
        words += [prep, "the", noun]
    elif rng.random() < 0.8:
        noun = EN_NOUNS[rng.integers(len(EN_NOUNS))]
        spans.append((len(words), len(words) + 1, "NP.DEF"))
        words += ["the", noun]

    spans.append((len(words), len(words), "ADV"))
    words.append(EN_LEVEL_MARKERS[level_ordinal])
    words.append(".")
    return words, spans


def _zh_sentence(rng: np.random.Generator, level_ordinal: int) -> tuple[list[str], list[tuple[int, int, str]]]:
    chars: list[str] = []
    spans: list[tuple[int, int, str]] = []

    pron = ZH_PRONOUNS[rng.integers(len(ZH_PRONOUNS))]
    spans.append((len(chars), len(chars), "PRON"))
    chars.append(pron)

    if rng.random() < 0.4:
        # possessive phrase nests the pronoun span
        noun = ZH_NOUNS[rng.integers(len(ZH_NOUNS))]
        spans.append((len(chars) - 1, len(chars) + 1, "DE.POSS"))
        chars += ["的", noun]

    if rng.random() < 0.5:
        place = ZH_PLACES[rng.integers(len(ZH_PLACES))]
        spans.append((len(chars), len(chars) + 1, "ZAI.PP"))
        chars += ["在", place]

    verb = ZH_VERBS[rng.integers(len(ZH_VERBS))]
    if rng.random() < 0.6:
        spans.append((len(chars), len(chars) + 1, "V.LE"))
        chars += [verb, "了"]
    else:
        chars.append(verb)

    obj = ZH_NOUNS[rng.integers(len(ZH_NOUNS))]
    spans.append((len(chars), len(chars), "N.OBJ"))
    chars.append(obj)

    spans.append((len(chars), len(chars), "ADV"))
    chars.append(ZH_LEVEL_MARKERS[level_ordinal])
    chars.append("。")
    return chars, spans


def generate_fixture_corpus(
    n: int,
    lang: str = "en",
    seed: int = 0,
    id_prefix: str | None = None,
) -> list[Sentence]:
    """Generate ``n`` rule-annotated sentences with levels cycling over all six."""
    if lang not in ("en", "zh"):
        raise ValueError(f"no fixture templates for language {lang!r}")
    rng = np.random.default_rng(seed)
    prefix = id_prefix if id_prefix is not None else f"{lang}-{seed}"
    sentences = []
    for k in range(n):
        level_ordinal = k % len(CEFR_LEVELS)
        if lang == "en":
            words, raw_spans = _en_sentence(rng, level_ordinal)
            text = " ".join(words)
        else:
            words, raw_spans = _zh_sentence(rng, level_ordinal)
            text = "".join(words)
        tokens = tokenize(text, "auto")
        assert [t.text for t in tokens] == words
        spans = sorted(
            (SpanAnnotation(i, j, tag) for i, j, tag in raw_spans),
            key=lambda s: (s.start, s.end, s.tag),
        )
        sentences.append(
            Sentence(
                id=f"{prefix}-{k:04d}",
                lang=lang,
                text=text,
                tokens=tokens,
                gold_spans=spans,
                level=CEFR_LEVELS.name(level_ordinal),
            )
        )
    return sentences


def generate_fixture_documents(
    n: int,
    seed: int = 0,
    lang: str = "en",
    min_sentences: int = 1,
    max_sentences: int = 5,
) -> list[tuple[str, str, str]]:
    """Multi-sentence fixture documents as (doc_id, text, lang) triples."""
    rng = np.random.default_rng(seed)
    docs = []
    joiner = " " if lang == "en" else ""
    for k in range(n):
        n_sents = int(rng.integers(min_sentences, max_sentences + 1))
        parts = []
        for s in range(n_sents):
            level = int(rng.integers(len(CEFR_LEVELS)))
            words, _ = _en_sentence(rng, level) if lang == "en" else _zh_sentence(rng, level)
            parts.append(" ".join(words) if lang == "en" else "".join(words))
        docs.append((f"doc-{lang}-{seed}-{k:04d}", joiner.join(parts), lang))
    return docs


def write_fixture_corpus(path, n: int, lang: str = "en", seed: int = 0) -> list[Sentence]:
    sentences = generate_fixture_corpus(n, lang=lang, seed=seed)
    save_corpus(sentences, path)
    return sentences
