"""Training loop, model selection, cross-validation, alpha search, checkpoints."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import (
    CEFR_LEVELS,
    LevelSet,
    Sentence,
    TagInventory,
    Vocab,
    build_tag_inventory,
    build_vocab,
    namespace_tags,
)
from .encoder import EncoderConfig
from .metrics import MetricsReport, mean_reports, report_from_sets
from .nn import Adam, clip_gradients, rng_stream
from .span_model import GrammarProfilerModel, span_targets

logger = logging.getLogger("gramprof.trainer")

CHECKPOINT_FORMAT = "gramprof-checkpoint"
CHECKPOINT_VERSION = 1


class TrainingError(ValueError):
    """Raised for unusable training inputs or configurations."""


@dataclass(frozen=True)
class TrainConfig:
    # optimization
    batch_size: int = 50
    epochs: int = 100
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    grad_clip: float = 5.0
    # encoder
    d: int = 64
    n_layers: int = 2
    n_heads: int = 4
    d_ffn: int = 256
    dropout: float = 0.1
    activation: str = "gelu"
    # task
    max_span_width: int = 30
    max_len: int = 128
    min_tag_freq: int = 2
    multitask: bool = False
    alpha: float = 1.0
    alpha_grid: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0)
    level_names: tuple[str, ...] = tuple(CEFR_LEVELS.names)
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise TrainingError("batch_size must be >= 1")
        if self.epochs < 1:
            raise TrainingError("epochs must be >= 1")
        if self.alpha < 0:
            raise TrainingError("alpha must be >= 0")
        if self.min_tag_freq < 1:
            raise TrainingError("min_tag_freq must be >= 1")

    def encoder_config(self, vocab_size: int) -> EncoderConfig:
        return EncoderConfig(
            vocab_size=vocab_size,
            d=self.d,
            n_layers=self.n_layers,
            n_heads=self.n_heads,
            d_ffn=self.d_ffn,
            max_len=self.max_len,
            dropout=self.dropout,
            activation=self.activation,
        )

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["alpha_grid"] = list(self.alpha_grid)
        d["level_names"] = list(self.level_names)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        kwargs = dict(d)
        if "alpha_grid" in kwargs:
            kwargs["alpha_grid"] = tuple(kwargs["alpha_grid"])
        if "level_names" in kwargs:
            kwargs["level_names"] = tuple(kwargs["level_names"])
        return cls(**kwargs)


@dataclass
class Checkpoint:
    """Everything needed to rebuild a trained model byte for byte."""

    config: TrainConfig
    vocab: Vocab
    inventory: TagInventory
    levels: LevelSet | None
    languages: tuple[str, ...]
    params: dict[str, np.ndarray]
    provenance: dict = field(default_factory=dict)

    def build_model(self) -> GrammarProfilerModel:
        dtype = next(iter(self.params.values())).dtype
        model = GrammarProfilerModel(
            self.config.encoder_config(len(self.vocab)),
            self.inventory,
            levels=self.levels,
            max_span_width=self.config.max_span_width,
            seed=self.config.seed,
            dtype=dtype,
        )
        model_params = {p.name: p for p in model.parameters()}
        if set(model_params) != set(self.params):
            raise TrainingError("checkpoint tensors do not match the model architecture")
        for name, value in self.params.items():
            p = model_params[name]
            if p.value.shape != value.shape:
                raise TrainingError(f"tensor {name} has shape {value.shape}, expected {p.value.shape}")
            p.value[...] = value
        return model

    @classmethod
    def from_model(
        cls,
        model: GrammarProfilerModel,
        config: TrainConfig,
        vocab: Vocab,
        languages: Sequence[str],
        provenance: dict,
    ) -> "Checkpoint":
        params = {p.name: p.value.copy() for p in model.parameters()}
        return cls(
            config=config,
            vocab=vocab,
            inventory=model.inventory,
            levels=model.levels,
            languages=tuple(languages),
            params=params,
            provenance=dict(provenance),
        )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate(
    model: GrammarProfilerModel,
    vocab: Vocab,
    sentences: Sequence[Sentence],
    threshold: float = 0.0,
) -> MetricsReport:
    """Corpus-pooled metrics: spans keyed by (sentence id, i, j, tag).

    Gold tags are resolved through the model's inventory first, so tags the
    model cannot express compare as UNK, mirroring how they were trained.
    """
    gold_items = set()
    pred_items = set()
    gold_levels: list[str] = []
    pred_levels: list[str] = []
    for sent in sentences:
        for g in sent.gold_spans:
            gold_items.add((sent.id, g.start, g.end, model.inventory.resolve(g.tag)))
        decoded, level = model.predict(vocab.encode(sent), threshold=threshold)
        for d in decoded:
            pred_items.add((sent.id, d.i, d.j, d.tag))
        if model.multitask and sent.level is not None:
            gold_levels.append(sent.level)
            pred_levels.append(level[0])
    return report_from_sets(gold_items, pred_items, gold_levels or None, pred_levels or None)


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


@dataclass
class _Item:
    ids: np.ndarray
    targets: np.ndarray
    level_ordinal: int | None
    length: int


def _prepare_items(
    sentences: Sequence[Sentence],
    vocab: Vocab,
    inventory: TagInventory,
    levels: LevelSet | None,
    max_span_width: int,
) -> tuple[list[_Item], int]:
    items = []
    unlearnable = 0
    for sent in sentences:
        if len(sent) == 0:
            raise TrainingError(f"sentence {sent.id!r} has no tokens")
        ids = np.asarray(vocab.encode(sent), dtype=np.int64)
        _, targets, skipped = span_targets(len(sent), max_span_width, sent.gold_spans, inventory)
        unlearnable += skipped
        ordinal = None
        if levels is not None and sent.level is not None:
            ordinal = levels.ordinal(sent.level)
        items.append(_Item(ids=ids, targets=targets, level_ordinal=ordinal, length=len(sent)))
    return items, unlearnable


EpochHook = Callable[[int, GrammarProfilerModel, MetricsReport], None]


def train(
    config: TrainConfig,
    train_sentences: Sequence[Sentence],
    val_sentences: Sequence[Sentence],
    epoch_hook: EpochHook | None = None,
) -> Checkpoint:
    """Train a profiler and return the epoch snapshot with the best validation labeled F1.

    Deterministic given (config, data): initialization, shuffling, and dropout
    all derive from named streams of ``config.seed``. Ties on the validation
    score keep the earliest epoch.
    """
    if not train_sentences:
        raise TrainingError("empty training set")
    if not val_sentences:
        raise TrainingError("empty validation set")
    if not any(sent.gold_spans for sent in train_sentences):
        raise TrainingError("nothing to learn: no gold spans in the training set")

    inventory = build_tag_inventory(train_sentences, config.min_tag_freq)
    vocab = build_vocab(train_sentences)
    levels = LevelSet.from_names(config.level_names) if config.multitask else None
    languages = tuple(sorted({s.lang for s in train_sentences}))

    model = GrammarProfilerModel(
        config.encoder_config(len(vocab)),
        inventory,
        levels=levels,
        max_span_width=config.max_span_width,
        seed=config.seed,
    )
    params = model.parameters()
    optimizer = Adam(params, lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)
    train_rng = rng_stream(config.seed, "train")

    items, unlearnable = _prepare_items(train_sentences, vocab, inventory, levels, config.max_span_width)
    if unlearnable:
        logger.warning("%d gold spans exceed max_span_width=%d and cannot be learned",
                       unlearnable, config.max_span_width)

    best_f1 = -1.0
    best_epoch = 0
    best_params: dict[str, np.ndarray] = {}
    for epoch in range(1, config.epochs + 1):
        perm = train_rng.permutation(len(items))
        lengths = np.array([items[i].length for i in perm])
        bucketed = perm[np.argsort(lengths, kind="stable")]
        epoch_loss = 0.0
        for lo in range(0, len(bucketed), config.batch_size):
            batch = bucketed[lo : lo + config.batch_size]
            scale = 1.0 / len(batch)
            for i in batch:
                it = items[i]
                span_l, level_l = model.loss_and_grads(
                    it.ids, it.targets, it.level_ordinal, config.alpha, scale, train_rng
                )
                epoch_loss += span_l + config.alpha * level_l
            clip_gradients(params, config.grad_clip)
            optimizer.step()
        report = evaluate(model, vocab, val_sentences)
        f1 = report.labeled.f1
        if f1 > best_f1:
            best_f1 = f1
            best_epoch = epoch
            best_params = {p.name: p.value.copy() for p in params}
        if epoch_hook is not None:
            epoch_hook(epoch, model, report)
        logger.info("epoch %d: mean train loss %.4f, val labeled F1 %.4f",
                    epoch, epoch_loss / len(items), f1)

    provenance = {
        "best_epoch": best_epoch,
        "val_labeled_f1": best_f1,
        "epochs_run": config.epochs,
        "train_sentences": len(train_sentences),
        "unlearnable_gold_spans": unlearnable,
    }
    if config.multitask:
        provenance["alpha"] = config.alpha
    ckpt = Checkpoint(
        config=config,
        vocab=vocab,
        inventory=inventory,
        levels=levels,
        languages=languages,
        params=best_params,
        provenance=provenance,
    )
    return ckpt


def assign_folds(ids: Sequence[str], folds: int) -> dict[str, int]:
    """Balanced fold assignment from a stable content hash of the ids.

    Ids are ranked by their SHA-256 digest and dealt round-robin, so the
    assignment is independent of input order and fold sizes differ by at
    most one.
    """
    ranked = sorted(ids, key=lambda i: (hashlib.sha256(i.encode("utf-8")).hexdigest(), i))
    return {sid: rank % folds for rank, sid in enumerate(ranked)}


def cross_validate(
    config: TrainConfig,
    sentences: Sequence[Sentence],
    folds: int = 10,
) -> tuple[MetricsReport, list[MetricsReport], dict[str, int]]:
    """Rotating-fold protocol: fold k tests, fold k+1 validates, the rest train.

    Returns the arithmetic mean of the per-fold test reports, the per-fold
    reports, and the fold assignment.
    """
    if folds < 3:
        raise TrainingError("cross-validation needs at least 3 folds")
    if len(sentences) < folds:
        raise TrainingError(f"need at least {folds} sentences for {folds} folds")
    assignment = assign_folds([s.id for s in sentences], folds)
    reports = []
    for k in range(folds):
        val_fold = (k + 1) % folds
        test = [s for s in sentences if assignment[s.id] == k]
        val = [s for s in sentences if assignment[s.id] == val_fold]
        train_set = [s for s in sentences if assignment[s.id] not in (k, val_fold)]
        ckpt = train(config, train_set, val)
        model = ckpt.build_model()
        reports.append(evaluate(model, ckpt.vocab, test))
        logger.info("fold %d: test labeled F1 %.4f", k, reports[-1].labeled.f1)
    return mean_reports(reports), reports, assignment


def grid_search_alpha(
    config: TrainConfig,
    train_sentences: Sequence[Sentence],
    val_sentences: Sequence[Sentence],
) -> tuple[float, dict[float, MetricsReport], Checkpoint]:
    """Train once per candidate weight; pick the best validation labeled F1.

    Ties go to the smaller weight. The winning checkpoint records the chosen
    value in its provenance.
    """
    if not config.multitask:
        raise TrainingError("alpha grid search requires a multitask configuration")
    if not any(s.level is not None for s in train_sentences):
        raise TrainingError("no difficulty levels in the training data")
    reports: dict[float, MetricsReport] = {}
    best_alpha = None
    best_ckpt = None
    best_f1 = -1.0
    for alpha in sorted(set(config.alpha_grid)):
        ckpt = train(replace(config, alpha=alpha), train_sentences, val_sentences)
        report = evaluate(ckpt.build_model(), ckpt.vocab, val_sentences)
        reports[alpha] = report
        if report.labeled.f1 > best_f1:
            best_f1 = report.labeled.f1
            best_alpha = alpha
            best_ckpt = ckpt
    best_ckpt.provenance["alpha"] = best_alpha
    best_ckpt.provenance["alpha_grid"] = sorted(set(config.alpha_grid))
    return best_alpha, reports, best_ckpt


def train_multilingual(
    config: TrainConfig,
    train_corpora: Mapping[str, Sequence[Sentence]],
    val_corpora: Mapping[str, Sequence[Sentence]] | None = None,
) -> tuple[Checkpoint, dict[str, MetricsReport], MetricsReport]:
    """Joint training over several languages with a namespaced tag union.

    Tags become ``<lang>:<tag>`` before the inventory is built, then one
    shared model trains on the concatenation. Returns the checkpoint plus
    per-language and pooled reports on the validation corpora (the training
    corpora when none are given).
    """
    if len(train_corpora) < 2:
        raise TrainingError("multilingual training needs at least two corpora")
    for lang, sents in train_corpora.items():
        mismatched = [s.id for s in sents if s.lang != lang]
        if mismatched:
            raise TrainingError(
                f"language code collision: corpus {lang!r} contains sentences of another language: {mismatched[:3]}"
            )
    langs = sorted(train_corpora)
    ns_train = namespace_tags([s for lang in langs for s in train_corpora[lang]])
    seen_ids = set()
    for s in ns_train:
        if s.id in seen_ids:
            raise TrainingError(f"duplicate sentence id across corpora: {s.id!r}")
        seen_ids.add(s.id)
    if val_corpora is None:
        val_corpora = train_corpora
    ns_val = namespace_tags([s for lang in sorted(val_corpora) for s in val_corpora[lang]])

    ckpt = train(config, ns_train, ns_val)
    model = ckpt.build_model()
    per_lang = {
        lang: evaluate(model, ckpt.vocab, [s for s in ns_val if s.lang == lang]) for lang in sorted(val_corpora)
    }
    pooled = evaluate(model, ckpt.vocab, ns_val)
    return ckpt, per_lang, pooled


# ---------------------------------------------------------------------------
# checkpoint persistence
# ---------------------------------------------------------------------------

_DTYPE_NAMES = {"float32": "<f4", "float64": "<f8"}


def save_checkpoint(ckpt: Checkpoint, directory: str | Path) -> None:
    """Write ``manifest.json`` plus ``params.bin`` (concatenated little-endian tensors)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dtype_name = str(next(iter(ckpt.params.values())).dtype)
    if dtype_name not in _DTYPE_NAMES:
        raise TrainingError(f"unsupported checkpoint dtype {dtype_name}")
    wire = _DTYPE_NAMES[dtype_name]
    tensors = []
    blob = bytearray()
    for name, value in ckpt.params.items():
        data = np.ascontiguousarray(value, dtype=wire).tobytes()
        tensors.append({"name": name, "shape": list(value.shape), "offset": len(blob), "size": len(data)})
        blob.extend(data)
    manifest = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": ckpt.config.as_dict(),
        "inventory": {"tags": ckpt.inventory.tags, "min_freq": ckpt.inventory.min_freq},
        "vocab": ckpt.vocab.tokens,
        "levels": ckpt.levels.names if ckpt.levels is not None else None,
        "languages": list(ckpt.languages),
        "provenance": ckpt.provenance,
        "dtype": dtype_name,
        "params_sha256": hashlib.sha256(bytes(blob)).hexdigest(),
        "tensors": tensors,
    }
    (directory / "params.bin").write_bytes(bytes(blob))
    (directory / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_checkpoint(directory: str | Path) -> Checkpoint:
    directory = Path(directory)
    try:
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise TrainingError(f"{directory}: not a checkpoint directory (missing manifest.json)")
    if manifest.get("format") != CHECKPOINT_FORMAT:
        raise TrainingError(f"{directory}: unrecognized checkpoint format")
    blob = (directory / "params.bin").read_bytes()
    digest = hashlib.sha256(blob).hexdigest()
    if digest != manifest["params_sha256"]:
        raise TrainingError(f"{directory}: parameter file does not match its manifest checksum")
    wire = _DTYPE_NAMES[manifest["dtype"]]
    params = {}
    for t in manifest["tensors"]:
        arr = np.frombuffer(blob, dtype=wire, count=int(np.prod(t["shape"], dtype=np.int64)), offset=t["offset"])
        params[t["name"]] = arr.reshape(t["shape"]).astype(manifest["dtype"], copy=True)
    levels = LevelSet.from_names(manifest["levels"]) if manifest["levels"] is not None else None
    return Checkpoint(
        config=TrainConfig.from_dict(manifest["config"]),
        vocab=Vocab(manifest["vocab"]),
        inventory=TagInventory(manifest["inventory"]["tags"], manifest["inventory"]["min_freq"]),
        levels=levels,
        languages=tuple(manifest["languages"]),
        params=params,
        provenance=manifest["provenance"],
    )


def checkpoint_checksum(directory: str | Path) -> str:
    """Hex digest identifying the stored parameters."""
    manifest = json.loads((Path(directory) / "manifest.json").read_text(encoding="utf-8"))
    return manifest["params_sha256"]
