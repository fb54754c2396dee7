"""Segmentation and recognition evaluation statistics.

Conventions that the formulas leave open are pinned here: Dice of two
empty masks is 1.0 (perfect agreement on absence) and one empty mask
against a non-empty one is 0.0; identification precision/recall/F1 are
micro-averaged over (image, object type) decisions, with per-image macro
averages available separately; AUROC uses midranks, so heavy ties pull
the score toward 0.5.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grids import as_mask, check_same_shape


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if p + r else 0.0


def dice(a, b) -> float:
    ma, mb = as_mask(a), as_mask(b)
    check_same_shape(ma, mb)
    total = int(ma.sum()) + int(mb.sum())
    if total == 0:
        return 1.0
    return 2.0 * int((ma & mb).sum()) / total


def weighted_dice(pairs) -> float:
    """Gold-area weighted mean Dice; empty-gold pairs carry no weight."""
    if not pairs:
        raise DomainError("need at least one (pred, gold) pair")
    num = 0.0
    total_weight = 0
    for pred, gold in pairs:
        g = as_mask(gold)
        w = int(g.sum())
        if w == 0:
            continue
        num += w * dice(pred, g)
        total_weight += w
    if total_weight == 0:
        raise DomainError("all gold masks are empty")
    return num / total_weight


def identification_counts(predicted_types, gold_types) -> ConfusionCounts:
    """Pooled (image, type) confusion counts over aligned per-image sets."""
    if len(predicted_types) != len(gold_types):
        raise DomainError("prediction and gold lists must be aligned")
    tp = fp = fn = 0
    for pred, gold in zip(predicted_types, gold_types):
        pred, gold = set(pred), set(gold)
        tp += len(pred & gold)
        fp += len(pred - gold)
        fn += len(gold - pred)
    return ConfusionCounts(tp, fp, fn)


def identification_prf(predicted_types, gold_types):
    """Micro-averaged (precision, recall, f1) over (image, type) decisions."""
    c = identification_counts(predicted_types, gold_types)
    return c.precision, c.recall, c.f1


def identification_prf_macro(predicted_types, gold_types):
    """Per-image (precision, recall, f1), averaged with equal image weight."""
    if len(predicted_types) != len(gold_types):
        raise DomainError("prediction and gold lists must be aligned")
    if not predicted_types:
        raise DomainError("need at least one image")
    rows = [
        identification_counts([p], [g]) for p, g in zip(predicted_types, gold_types)
    ]
    p = sum(c.precision for c in rows) / len(rows)
    r = sum(c.recall for c in rows) / len(rows)
    f = sum(c.f1 for c in rows) / len(rows)
    return p, r, f


def _midranks(values):
    """Ranks 1..n with tied values sharing the average of their positions."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auroc(scores, labels) -> float:
    """Area under the ROC curve, Mann-Whitney midrank formulation."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=bool)
    if s.shape != y.shape or s.ndim != 1:
        raise DomainError("scores and labels must be aligned 1-D lists")
    if not np.all(np.isfinite(s)):
        raise DomainError("scores must be finite")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DomainError("AUROC needs both a positive and a negative label")
    ranks = _midranks(s)
    pos_rank_sum = float(ranks[y].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _signed_rank_decomposition(before, after):
    """Doubled midranks of nonzero |differences| and the observed statistic."""
    x = np.asarray(before, dtype=np.float64)
    y = np.asarray(after, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) == 0:
        raise DomainError("paired samples must be aligned non-empty 1-D lists")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("paired samples must be finite")
    d = x - y
    d = d[d != 0.0]
    if len(d) == 0:
        raise DomainError("all paired differences are zero")
    # doubling midranks keeps every quantity integral for exact counting
    doubled = np.rint(2.0 * _midranks(np.abs(d))).astype(np.int64)
    w2 = int(doubled[d > 0].sum())
    return doubled, w2


def _exact_signed_rank_tail(doubled, w2) -> float:
    total = int(doubled.sum())
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        r = int(r)
        for s in range(total, r - 1, -1):
            if counts[s - r]:
                counts[s] += counts[s - r]
    # the distribution is symmetric about half the total rank sum; count
    # outcomes at least as far from the center as observed
    dev = abs(2 * w2 - total)
    hits = sum(c for s, c in enumerate(counts) if abs(2 * s - total) >= dev)
    return hits / float(2 ** len(doubled))


def wilcoxon_signed_rank(before, after) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired scores.

    Zero differences are dropped and tied magnitudes take midranks. Up to
    20 nonzero pairs the null distribution is enumerated exactly; beyond
    that a normal approximation with tie-corrected variance and a 0.5
    continuity correction is used.
    """
    doubled, w2 = _signed_rank_decomposition(before, after)
    n = len(doubled)
    if n <= 20:
        return _exact_signed_rank_tail(doubled, w2)
    w = w2 / 2.0
    mu = float(doubled.sum()) / 4.0
    ranks = doubled / 2.0
    sigma = math.sqrt(float((ranks * ranks).sum()) / 4.0)
    z = (abs(w - mu) - 0.5) / sigma
    if z < 0.0:
        z = 0.0
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def silhouette(points, labels) -> float:
    """Mean silhouette coefficient under Euclidean distance.

    Points in singleton clusters score 0, and so do points whose intra-
    and inter-cluster mean distances are both zero (coincident clusters).
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or len(x) == 0:
        raise DomainError("points must form a non-empty n-by-d matrix")
    if not np.all(np.isfinite(x)):
        raise DomainError("points must be finite")
    labels = list(labels)
    if len(labels) != len(x):
        raise DomainError("labels must align with points")
    unique = sorted(set(labels), key=lambda v: str(v))
    if len(unique) < 2:
        raise DomainError("silhouette needs at least two clusters")
    members = {lab: np.flatnonzero([l == lab for l in labels]) for lab in unique}
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    scores = np.zeros(len(x))
    for i, lab in enumerate(labels):
        own = members[lab]
        if len(own) == 1:
            continue
        a = dist[i, own].sum() / (len(own) - 1)
        b = min(
            dist[i, members[other]].mean() for other in unique if other != lab
        )
        top = max(a, b)
        scores[i] = (b - a) / top if top > 0 else 0.0
    return float(scores.mean())


def summarize(values) -> dict:
    """Median/mean/count block used by batch evaluation reports."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) == 0:
        raise DomainError("need at least one value to summarize")
    return {"median": float(np.median(v)), "mean": float(v.mean()), "n": int(len(v))}
