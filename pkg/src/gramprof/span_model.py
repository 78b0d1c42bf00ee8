"""Span enumeration, span classification, level classification, and decoding.

Every contiguous token span up to a width cap is a classification instance:
spans matching a gold annotation target their tag's class, every other span
targets the reserved empty class. Decoded outputs may nest and overlap; no
structure constraint is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .corpus import LevelSet, SpanAnnotation, TagInventory
from .encoder import Encoder, EncoderConfig, EncoderOutput
from .nn import (
    DEFAULT_DTYPE,
    Linear,
    Parameter,
    concat,
    concat_backward,
    rng_stream,
    softmax,
    softmax_cross_entropy,
    subtract,
    subtract_backward,
)

DEFAULT_MAX_SPAN_WIDTH = 30


@dataclass(frozen=True)
class SpanIndex:
    i: int  # start token index
    j: int  # end token index, inclusive


@dataclass(frozen=True)
class DecodedSpan:
    i: int
    j: int
    tag: str  # never the empty tag
    prob: float


@lru_cache(maxsize=512)
def _cached_spans(length: int, max_width: int) -> tuple[SpanIndex, ...]:
    return tuple(
        SpanIndex(i, j)
        for i in range(length)
        for j in range(i, min(i + max_width, length))
    )


def enumerate_spans(length: int, max_width: int = DEFAULT_MAX_SPAN_WIDTH) -> list[SpanIndex]:
    """All (i, j) with i <= j and width <= max_width, ordered by (i, j)."""
    if length < 1:
        raise ValueError("sentence length must be >= 1")
    if max_width < 1:
        raise ValueError("max_width must be >= 1")
    return list(_cached_spans(length, max_width))


@lru_cache(maxsize=512)
def _cached_span_arrays(length: int, max_width: int) -> tuple[np.ndarray, np.ndarray]:
    spans = _cached_spans(length, max_width)
    starts = np.fromiter((s.i for s in spans), dtype=np.int64, count=len(spans))
    ends = np.fromiter((s.j for s in spans), dtype=np.int64, count=len(spans))
    starts.setflags(write=False)
    ends.setflags(write=False)
    return starts, ends


def span_index_arrays(spans: Sequence[SpanIndex]) -> tuple[np.ndarray, np.ndarray]:
    starts = np.fromiter((s.i for s in spans), dtype=np.int64, count=len(spans))
    ends = np.fromiter((s.j for s in spans), dtype=np.int64, count=len(spans))
    return starts, ends


def span_representation(hidden: np.ndarray, spans: Sequence[SpanIndex]) -> np.ndarray:
    """Stack [h_i ; h_j ; h_i - h_j] for each span; output is (n_spans, 3d)."""
    starts, ends = span_index_arrays(spans)
    hi = hidden[starts]
    hj = hidden[ends]
    return concat([hi, hj, subtract(hi, hj)], axis=-1)


def span_representation_backward(
    dvec: np.ndarray, hidden_shape: tuple[int, int], spans: Sequence[SpanIndex]
) -> np.ndarray:
    """Scatter span-representation gradients back onto the hidden states."""
    d = hidden_shape[1]
    starts, ends = span_index_arrays(spans)
    d_hi, d_hj, d_diff = concat_backward(dvec, [d, d, d], axis=-1)
    dd_hi, dd_hj = subtract_backward(d_diff)
    dhidden = np.zeros(hidden_shape, dtype=dvec.dtype)
    np.add.at(dhidden, starts, d_hi + dd_hi)
    np.add.at(dhidden, ends, d_hj + dd_hj)
    return dhidden


def span_targets(
    length: int,
    max_width: int,
    gold: Sequence[SpanAnnotation],
    inventory: TagInventory,
) -> tuple[list[SpanIndex], np.ndarray, int]:
    """Per-span class targets: gold tags where annotated, the empty class elsewhere.

    Gold spans wider than ``max_width`` cannot be enumerated; they are skipped
    and counted in the returned unlearnable tally.
    """
    spans = enumerate_spans(length, max_width)
    index = {(s.i, s.j): k for k, s in enumerate(spans)}
    targets = np.zeros(len(spans), dtype=np.int64)
    unlearnable = 0
    for g in gold:
        key = (g.start, g.end)
        if key in index:
            targets[index[key]] = inventory.id_of(g.tag)
        else:
            unlearnable += 1
    return spans, targets, unlearnable


def span_loss(
    probs: np.ndarray,
    spans: Sequence[SpanIndex],
    gold: Sequence[SpanAnnotation],
    inventory: TagInventory,
) -> float:
    """Summed cross entropy over every enumerated span of one sentence."""
    gold_by_pos = {(g.start, g.end): inventory.id_of(g.tag) for g in gold}
    total = 0.0
    for k, s in enumerate(spans):
        target = gold_by_pos.get((s.i, s.j), 0)
        total -= float(np.log(probs[k, target]))
    return total


def joint_loss(span_loss_value: float, level_loss_value: float, alpha: float) -> float:
    """Weighted sum of the two objectives; the span term is never scaled."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return span_loss_value + alpha * level_loss_value


def decode(
    probs: np.ndarray,
    spans: Sequence[SpanIndex],
    inventory: TagInventory,
    threshold: float = 0.0,
) -> list[DecodedSpan]:
    """Per-span argmax with empty-class drop.

    Ties break toward the lowest class id, so uniform rows decode to nothing
    (the empty class wins). Spans whose winning probability falls below
    ``threshold`` are dropped. Outputs may nest and overlap freely.
    """
    out = []
    winners = np.argmax(probs, axis=1)  # first max = lowest class id on ties
    for k, cls in enumerate(winners):
        if cls == 0:
            continue
        p = float(probs[k, cls])
        if p < threshold:
            continue
        out.append(DecodedSpan(spans[k].i, spans[k].j, inventory.tag_of(int(cls)), p))
    return out


class GrammarProfilerModel:
    """Encoder plus span head, optionally plus a difficulty head.

    Parameter groups draw from independent RNG streams named ``encoder``,
    ``span_head``, and ``level_head``, so configuring the difficulty head on
    or off never perturbs the other groups' initialization.
    """

    def __init__(
        self,
        encoder_cfg: EncoderConfig,
        inventory: TagInventory,
        levels: LevelSet | None = None,
        max_span_width: int = DEFAULT_MAX_SPAN_WIDTH,
        seed: int = 0,
        dtype=DEFAULT_DTYPE,
    ):
        self.encoder_cfg = encoder_cfg
        self.inventory = inventory
        self.levels = levels
        self.max_span_width = max_span_width
        self.seed = seed
        self.dtype = dtype
        self.encoder = Encoder(encoder_cfg, rng_stream(seed, "encoder"), dtype)
        self.span_head = Linear(
            3 * encoder_cfg.d, inventory.num_classes, rng_stream(seed, "span_head"), "span_head", dtype
        )
        self.level_head: Linear | None = None
        if levels is not None:
            self.level_head = Linear(
                encoder_cfg.d, len(levels), rng_stream(seed, "level_head"), "level_head", dtype
            )

    @property
    def multitask(self) -> bool:
        return self.level_head is not None

    def parameters(self) -> list[Parameter]:
        params = self.encoder.parameters() + self.span_head.parameters()
        if self.level_head is not None:
            params += self.level_head.parameters()
        return params

    def encode(self, token_ids, rng=None, train: bool = False, debug: bool = False) -> EncoderOutput:
        return self.encoder.forward(token_ids, rng=rng, train=train, debug=debug)

    def score_spans(self, hidden: np.ndarray, spans: Sequence[SpanIndex]) -> np.ndarray:
        """Class distributions for the given spans; rows sum to one."""
        reprs = span_representation(hidden, spans)
        return softmax(self.span_head.forward(reprs), axis=-1)

    def level_probs(self, pooled: np.ndarray) -> np.ndarray:
        if self.level_head is None:
            raise ValueError("model has no difficulty head")
        logits = self.level_head.forward(pooled[None, :])
        return softmax(logits, axis=-1)[0]

    # -- training path ------------------------------------------------------

    def loss_and_grads(
        self,
        token_ids: Sequence[int],
        targets: np.ndarray,
        level_ordinal: int | None,
        alpha: float,
        scale: float,
        rng: np.random.Generator,
    ) -> tuple[float, float]:
        """One train-mode forward/backward; gradients accumulate, scaled by ``scale``.

        ``targets`` is the per-enumerated-span class vector from
        ``span_targets``. Returns the unscaled span-loss sum and the unscaled
        level loss (0 when no gold level or no head). The level backward is
        skipped entirely when its weight is zero, so a zero-weight run touches
        exactly the tensors a span-only run touches.
        """
        out = self.encoder.forward(token_ids, rng=rng, train=True)
        starts, ends = _cached_span_arrays(len(token_ids), self.max_span_width)
        hi, hj = out.hidden[starts], out.hidden[ends]
        reprs = np.concatenate([hi, hj, hi - hj], axis=-1)
        logits = self.span_head.forward(reprs, train=True)
        losses, dlogits = softmax_cross_entropy(logits, targets)
        span_loss_value = float(losses.sum())
        dreprs = self.span_head.backward((dlogits * scale).astype(self.dtype, copy=False))
        d = out.hidden.shape[1]
        dhidden = np.zeros_like(out.hidden)
        np.add.at(dhidden, starts, dreprs[:, :d] + dreprs[:, 2 * d :])
        np.add.at(dhidden, ends, dreprs[:, d : 2 * d] - dreprs[:, 2 * d :])
        dpooled = np.zeros_like(out.pooled)

        level_loss_value = 0.0
        if self.level_head is not None and level_ordinal is not None:
            lv_logits = self.level_head.forward(out.pooled[None, :], train=True)
            lv_losses, lv_dlogits = softmax_cross_entropy(lv_logits, np.array([level_ordinal]))
            level_loss_value = float(lv_losses[0])
            if alpha > 0.0:
                dlv = (lv_dlogits * (alpha * scale)).astype(self.dtype, copy=False)
                dpooled += self.level_head.backward(dlv)[0]

        self.encoder.backward(dhidden, dpooled)
        return span_loss_value, level_loss_value

    def loss_for_gold(
        self,
        token_ids: Sequence[int],
        gold: Sequence[SpanAnnotation],
        level_ordinal: int | None,
        alpha: float,
        scale: float,
        rng: np.random.Generator,
    ) -> tuple[float, float, int]:
        """Convenience wrapper building the span targets from gold annotations."""
        _, targets, unlearnable = span_targets(
            len(token_ids), self.max_span_width, gold, self.inventory
        )
        span_l, level_l = self.loss_and_grads(token_ids, targets, level_ordinal, alpha, scale, rng)
        return span_l, level_l, unlearnable

    # -- inference path -----------------------------------------------------

    def predict_spans(self, token_ids, threshold: float = 0.0) -> list[DecodedSpan]:
        out = self.encoder.forward(token_ids)
        spans = enumerate_spans(len(token_ids), self.max_span_width)
        probs = self.score_spans(out.hidden, spans)
        return decode(probs, spans, self.inventory, threshold)

    def predict(self, token_ids, threshold: float = 0.0):
        """Decoded spans plus (level name, probability) when the model has a head."""
        out = self.encoder.forward(token_ids)
        spans = enumerate_spans(len(token_ids), self.max_span_width)
        probs = self.score_spans(out.hidden, spans)
        decoded = decode(probs, spans, self.inventory, threshold)
        level = None
        if self.level_head is not None:
            lv = self.level_probs(out.pooled)
            best = int(np.argmax(lv))
            level = (self.levels.name(best), float(lv[best]))
        return decoded, level
