"""Shared fixtures; the overfit model is trained once per session and reused."""

import time
from dataclasses import dataclass

import pytest

from gramprof import fixtures, trainer
from gramprof.metrics import MetricsReport
from gramprof.profiler import Profiler


@dataclass
class OverfitRun:
    config: trainer.TrainConfig
    train_sentences: list
    held_sentences: list
    checkpoint: trainer.Checkpoint
    history: list[tuple[int, float, float | None]]  # (epoch, labeled F1, level acc)
    seconds: float


@pytest.fixture(scope="session")
def overfit_run() -> OverfitRun:
    """Train the 50-sentence overfit model used by several suites.

    Validation is the training set itself (the point is memorization);
    held-out sentences come from the same generator under a different seed.
    """
    train_sents = fixtures.generate_fixture_corpus(50, lang="en", seed=42)
    held = fixtures.generate_fixture_corpus(20, lang="en", seed=43, id_prefix="held")
    config = trainer.TrainConfig(
        batch_size=5, epochs=100, lr=1e-3, multitask=True, alpha=1.0, seed=0
    )
    history: list[tuple[int, float, float | None]] = []

    def hook(epoch: int, model, report: MetricsReport) -> None:
        history.append((epoch, report.labeled.f1, report.level_accuracy))

    t0 = time.time()
    ckpt = trainer.train(config, train_sents, train_sents, epoch_hook=hook)
    seconds = time.time() - t0
    return OverfitRun(
        config=config,
        train_sentences=train_sents,
        held_sentences=held,
        checkpoint=ckpt,
        history=history,
        seconds=seconds,
    )


@pytest.fixture(scope="session")
def overfit_dir(overfit_run, tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "overfit"
    trainer.save_checkpoint(overfit_run.checkpoint, path)
    return path


@pytest.fixture(scope="session")
def overfit_profiler(overfit_dir) -> Profiler:
    return Profiler.from_dir(overfit_dir)


@pytest.fixture(scope="session")
def tiny_config() -> trainer.TrainConfig:
    """Fast architecture for tests that only need the mechanics, not accuracy."""
    return trainer.TrainConfig(
        batch_size=5,
        epochs=3,
        lr=1e-3,
        d=16,
        n_layers=1,
        n_heads=2,
        d_ffn=32,
        max_len=32,
        max_span_width=8,
        min_tag_freq=1,
        seed=0,
    )
