"""Tokenization, annotated sentences, and the JSONL corpus format."""

from pathlib import Path

from gramprof.corpus import (
    build_tag_inventory,
    build_vocab,
    load_corpus,
    save_corpus,
    tokenize,
)
from gramprof.fixtures import generate_fixture_corpus

# whitespace languages split on runs of spaces, CJK text splits per character
for text in ["She was reading in the park.", "我在公园看书。"]:
    toks = tokenize(text, "auto")
    print(text)
    for t in toks:
        print(f"  [{t.char_start:2d},{t.char_end:2d})  {t.text!r}")
    print()

# a rule-annotated corpus: every sentence carries gold spans and a difficulty level
sentences = generate_fixture_corpus(12, lang="en", seed=0)
s = sentences[0]
print(f"{s.id}  level={s.level}  {s.text}")
for g in s.gold_spans:
    surface = " ".join(tok.text for tok in s.tokens[g.start : g.end + 1])
    print(f"  ({g.start},{g.end}) {g.tag:<8} {surface!r}")
print()

# round-trip through the on-disk format
path = Path("/tmp/demo_corpus.jsonl")
save_corpus(sentences, path)
again = load_corpus(path)
print(f"saved and reloaded {len(again)} sentences, identical: {again == sentences}")

# tag inventory: reserved ids 0 (no item) and 1 (unknown), then tags a-z
inventory = build_tag_inventory(sentences, min_freq=2)
print(f"inventory ({inventory.num_classes} classes): {inventory.tags}")
vocab = build_vocab(sentences)
print(f"vocab size {len(vocab)}, first tokens: {vocab.tokens[:8]}")
