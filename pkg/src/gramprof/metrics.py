"""Set-based precision/recall/F1 for span prediction, plus level accuracy.

Span items are tuples whose last element is the tag, e.g. ``(i, j, tag)`` for
one sentence or ``(sentence_id, i, j, tag)`` for corpus-level pooling. All
ratios use the convention that an empty denominator yields 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

SpanItem = tuple


@dataclass(frozen=True)
class PRF:
    p: float
    r: float
    f1: float

    def as_dict(self) -> dict:
        return {"p": self.p, "r": self.r, "f1": self.f1}


def f1_score(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _prf_from_sets(gold: set, pred: set) -> PRF:
    inter = len(gold & pred)
    p = inter / len(pred) if pred else 0.0
    r = inter / len(gold) if gold else 0.0
    return PRF(p, r, f1_score(p, r))


def labeled_prf(gold: Iterable[SpanItem], pred: Iterable[SpanItem]) -> PRF:
    """Exact-match precision/recall/F1 over (position, tag) items."""
    return _prf_from_sets(set(gold), set(pred))


def unlabeled_prf(gold: Iterable[SpanItem], pred: Iterable[SpanItem]) -> PRF:
    """Position-only precision/recall/F1: the trailing tag is projected away."""
    return _prf_from_sets({g[:-1] for g in gold}, {p[:-1] for p in pred})


def macro_prf(gold: Iterable[SpanItem], pred: Iterable[SpanItem]) -> tuple[PRF, dict[str, dict]]:
    """Uniform average over the tags occurring in gold or pred.

    The macro F1 is the mean of per-tag F1 values rather than the harmonic
    mean of the macro precision and recall. Also returns the per-tag table.
    """
    gold, pred = set(gold), set(pred)
    tags = sorted({g[-1] for g in gold} | {p[-1] for p in pred})
    per_tag: dict[str, dict] = {}
    for t in tags:
        g_t = {g for g in gold if g[-1] == t}
        p_t = {p for p in pred if p[-1] == t}
        prf = _prf_from_sets(g_t, p_t)
        per_tag[t] = {
            "p": prf.p,
            "r": prf.r,
            "f1": prf.f1,
            "gold_count": len(g_t),
            "pred_count": len(p_t),
        }
    if not tags:
        return PRF(0.0, 0.0, 0.0), per_tag
    n = len(tags)
    macro = PRF(
        sum(e["p"] for e in per_tag.values()) / n,
        sum(e["r"] for e in per_tag.values()) / n,
        sum(e["f1"] for e in per_tag.values()) / n,
    )
    return macro, per_tag


def level_accuracy(gold_levels: Sequence[Hashable], pred_levels: Sequence[Hashable]) -> float:
    if len(gold_levels) != len(pred_levels):
        raise ValueError(f"length mismatch: {len(gold_levels)} gold vs {len(pred_levels)} predicted")
    if not gold_levels:
        raise ValueError("empty evaluation")
    hits = sum(1 for g, p in zip(gold_levels, pred_levels) if g == p)
    return hits / len(gold_levels)


@dataclass
class MetricsReport:
    labeled: PRF
    unlabeled: PRF
    macro: PRF
    per_tag: dict[str, dict] = field(default_factory=dict)
    level_accuracy: float | None = None

    def as_dict(self) -> dict:
        return {
            "labeled": self.labeled.as_dict(),
            "unlabeled": self.unlabeled.as_dict(),
            "macro": self.macro.as_dict(),
            "per_tag": self.per_tag,
            "level_accuracy": self.level_accuracy,
        }


def report_from_sets(
    gold: Iterable[SpanItem],
    pred: Iterable[SpanItem],
    gold_levels: Sequence | None = None,
    pred_levels: Sequence | None = None,
) -> MetricsReport:
    gold, pred = set(gold), set(pred)
    macro, per_tag = macro_prf(gold, pred)
    acc = None
    if gold_levels is not None and pred_levels is not None and len(gold_levels) > 0:
        acc = level_accuracy(gold_levels, pred_levels)
    return MetricsReport(
        labeled=labeled_prf(gold, pred),
        unlabeled=unlabeled_prf(gold, pred),
        macro=macro,
        per_tag=per_tag,
        level_accuracy=acc,
    )


def mean_reports(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Arithmetic mean across reports, e.g. over cross-validation folds.

    Per-tag rows average over all reports with absent tags counted as zero;
    level accuracy averages only when present in every report.
    """
    if not reports:
        raise ValueError("no reports to average")
    n = len(reports)

    def mean_prf(get) -> PRF:
        return PRF(
            sum(get(r).p for r in reports) / n,
            sum(get(r).r for r in reports) / n,
            sum(get(r).f1 for r in reports) / n,
        )

    all_tags = sorted({t for r in reports for t in r.per_tag})
    zero = {"p": 0.0, "r": 0.0, "f1": 0.0, "gold_count": 0, "pred_count": 0}
    per_tag = {
        t: {
            k: sum(r.per_tag.get(t, zero)[k] for r in reports) / n
            for k in ("p", "r", "f1", "gold_count", "pred_count")
        }
        for t in all_tags
    }
    accs = [r.level_accuracy for r in reports]
    acc = sum(accs) / n if all(a is not None for a in accs) else None
    return MetricsReport(
        labeled=mean_prf(lambda r: r.labeled),
        unlabeled=mean_prf(lambda r: r.unlabeled),
        macro=mean_prf(lambda r: r.macro),
        per_tag=per_tag,
        level_accuracy=acc,
    )
