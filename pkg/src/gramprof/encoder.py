"""Trainable transformer contextualizer and the precomputed-embedding adapter.

Produces one contextual vector per input token plus a pooled sentence vector
taken from an internally prepended sequence-start marker. The marker never
shifts span indices: position ``i`` in the output always refers to content
token ``i``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .nn import (
    DEFAULT_DTYPE,
    Dropout,
    Embedding,
    FeedForward,
    LayerNorm,
    MultiHeadAttention,
    Parameter,
)

EMBEDDING_FILE_MAGIC = b"GPEMB1"


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    d: int = 64
    n_layers: int = 2
    n_heads: int = 4
    d_ffn: int = 256
    max_len: int = 128
    dropout: float = 0.1
    activation: str = "gelu"

    def __post_init__(self):
        if self.d % self.n_heads != 0:
            raise ValueError(f"d={self.d} must be divisible by n_heads={self.n_heads}")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if self.activation not in ("gelu", "relu"):
            raise ValueError(f"unknown activation: {self.activation!r}")


@dataclass
class EncoderOutput:
    hidden: np.ndarray  # (L, d), one row per content token
    pooled: np.ndarray  # (d,), final-layer state of the sequence-start marker
    all_states: np.ndarray | None = field(default=None, repr=False)  # debug: (L+1, d) incl. marker row


class TransformerLayer:
    """Post-norm residual block: attention then feed-forward."""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator, name: str, dtype=DEFAULT_DTYPE):
        self.attn = MultiHeadAttention(cfg.d, cfg.n_heads, cfg.dropout, rng, f"{name}.attn", dtype)
        self.ln_attn = LayerNorm(cfg.d, f"{name}.ln_attn", dtype)
        self.ffn = FeedForward(cfg.d, cfg.d_ffn, rng, f"{name}.ffn", dtype, cfg.activation)
        self.ln_ffn = LayerNorm(cfg.d, f"{name}.ln_ffn", dtype)
        self.drop_attn = Dropout(cfg.dropout)
        self.drop_ffn = Dropout(cfg.dropout)

    def forward(self, x: np.ndarray, rng: np.random.Generator | None, train: bool) -> np.ndarray:
        a = self.drop_attn.forward(self.attn.forward(x, rng, train), rng, train)
        x = self.ln_attn.forward(x + a, train)
        f = self.drop_ffn.forward(self.ffn.forward(x, train), rng, train)
        return self.ln_ffn.forward(x + f, train)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        d2 = self.ln_ffn.backward(dy)
        dx = d2 + self.ffn.backward(self.drop_ffn.backward(d2))
        d1 = self.ln_attn.backward(dx)
        return d1 + self.attn.backward(self.drop_attn.backward(d1))

    def parameters(self) -> list[Parameter]:
        return (
            self.attn.parameters()
            + self.ln_attn.parameters()
            + self.ffn.parameters()
            + self.ln_ffn.parameters()
        )


class Encoder:
    """Token + learned-position embeddings followed by transformer layers."""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator, dtype=DEFAULT_DTYPE):
        self.cfg = cfg
        self.dtype = dtype
        # one extra embedding row for the internal sequence-start marker
        self.marker_id = cfg.vocab_size
        self.tok_emb = Embedding(cfg.vocab_size + 1, cfg.d, rng, "encoder.tok", dtype)
        self.pos_emb = Embedding(cfg.max_len + 1, cfg.d, rng, "encoder.pos", dtype)
        self.ln_emb = LayerNorm(cfg.d, "encoder.ln_emb", dtype)
        self.drop_emb = Dropout(cfg.dropout)
        self.layers = [
            TransformerLayer(cfg, rng, f"encoder.layer{i}", dtype) for i in range(cfg.n_layers)
        ]

    def forward(
        self,
        token_ids,
        rng: np.random.Generator | None = None,
        train: bool = False,
        debug: bool = False,
    ) -> EncoderOutput:
        ids = np.asarray(token_ids, dtype=np.int64)
        if ids.ndim != 1 or ids.size == 0:
            raise ValueError("encoder input must be a non-empty 1-D id sequence")
        if ids.size > self.cfg.max_len:
            raise ValueError(f"sequence length {ids.size} exceeds max_len {self.cfg.max_len}")
        if ids.min() < 0 or ids.max() >= self.cfg.vocab_size:
            raise ValueError(f"token id out of range 0..{self.cfg.vocab_size - 1}")
        full_ids = np.concatenate([[self.marker_id], ids])
        positions = np.arange(full_ids.size)
        x = self.tok_emb.forward(full_ids, train) + self.pos_emb.forward(positions, train)
        x = self.drop_emb.forward(self.ln_emb.forward(x, train), rng, train)
        for layer in self.layers:
            x = layer.forward(x, rng, train)
        return EncoderOutput(hidden=x[1:], pooled=x[0], all_states=x if debug else None)

    def backward(self, dhidden: np.ndarray, dpooled: np.ndarray) -> None:
        """Propagate output gradients back into all encoder parameters."""
        dx = np.concatenate([dpooled[None, :], dhidden], axis=0)
        for layer in reversed(self.layers):
            dx = layer.backward(dx)
        dx = self.ln_emb.backward(self.drop_emb.backward(dx))
        self.tok_emb.backward(dx)
        self.pos_emb.backward(dx)

    def parameters(self) -> list[Parameter]:
        params = self.tok_emb.parameters() + self.pos_emb.parameters() + self.ln_emb.parameters()
        for layer in self.layers:
            params += layer.parameters()
        return params


# ---------------------------------------------------------------------------
# precomputed-embedding adapter
# ---------------------------------------------------------------------------


class EmbeddingFileError(ValueError):
    """Raised for malformed embedding-provider files or failed lookups."""


def write_embedding_file(path: str | Path, d: int, records: dict[str, tuple[np.ndarray, np.ndarray]]) -> None:
    """Write an embedding-provider file.

    ``records`` maps sentence ids to ``(hidden, pooled)`` where hidden is
    (L, d) and pooled is (d,). Layout: magic, u32 d, then per record a u16
    id length, the UTF-8 id, u32 L, and (L+1) x d float32 rows (pooled row
    first). All integers and floats are little-endian.
    """
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_FILE_MAGIC)
        fh.write(struct.pack("<I", d))
        for sid, (hidden, pooled) in records.items():
            hidden = np.asarray(hidden, dtype="<f4")
            pooled = np.asarray(pooled, dtype="<f4")
            if hidden.ndim != 2 or hidden.shape[1] != d or pooled.shape != (d,):
                raise EmbeddingFileError(f"record {sid!r}: shapes {hidden.shape}/{pooled.shape} do not match d={d}")
            sid_bytes = sid.encode("utf-8")
            fh.write(struct.pack("<H", len(sid_bytes)))
            fh.write(sid_bytes)
            fh.write(struct.pack("<I", hidden.shape[0]))
            fh.write(pooled.tobytes())
            fh.write(hidden.tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise EmbeddingFileError(f"truncated embedding file while reading {what}")
    return buf


def load_precomputed(path: str | Path, sentence_id: str, expected_d: int | None = None) -> EncoderOutput:
    """Fetch the stored hidden states and pooled vector for one sentence.

    Bypasses the trainable encoder entirely. Raises when the id is absent or
    when the stored width disagrees with ``expected_d``.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(EMBEDDING_FILE_MAGIC))
        if magic != EMBEDDING_FILE_MAGIC:
            raise EmbeddingFileError(f"{path}: not an embedding-provider file")
        (d,) = struct.unpack("<I", _read_exact(fh, 4, "width"))
        if expected_d is not None and d != expected_d:
            raise EmbeddingFileError(f"{path}: embedding width {d} does not match model width {expected_d}")
        while True:
            head = fh.read(2)
            if not head:
                break
            (id_len,) = struct.unpack("<H", head)
            sid = _read_exact(fh, id_len, "id").decode("utf-8")
            (length,) = struct.unpack("<I", _read_exact(fh, 4, "length"))
            n_bytes = (length + 1) * d * 4
            if sid == sentence_id:
                data = np.frombuffer(_read_exact(fh, n_bytes, "rows"), dtype="<f4")
                rows = data.reshape(length + 1, d)
                return EncoderOutput(hidden=rows[1:].copy(), pooled=rows[0].copy())
            fh.seek(n_bytes, 1)
    raise EmbeddingFileError(f"{path}: no record for sentence id {sentence_id!r}")
