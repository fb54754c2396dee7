"""Two-stage multi-target recognition and the box-suppression baseline.

Stage one assigns every pixel provisionally to the target whose map is
maximal among those strictly above 0.5 there, then keeps the targets
whose assigned area exceeds a fraction lambda of their standalone area.
Stage two repeats the per-pixel assignment over the kept targets only.
Argmax ties go to the lowest target index; both rules are strict
inequalities.

Label grids use 0 for blank and i + 1 for the i-th target in input
order, matching the indexed-PNG serialization where 0 is reserved.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import BoundingBox
from .grids import as_pmap, binarize

DEFAULT_LAMBDA = 0.5
_ASSIGN_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class TargetMaps:
    targets: tuple
    maps: np.ndarray = field(repr=False)

    def __init__(self, targets, maps):
        targets = tuple(str(t) for t in targets)
        if len(targets) == 0:
            raise DomainError("need at least one target")
        if len(set(targets)) != len(targets):
            raise DomainError("target identifiers must be unique")
        stacked = [as_pmap(m) for m in maps]
        if len(stacked) != len(targets):
            raise DomainError("one probability map per target required")
        shape = stacked[0].shape
        if any(m.shape != shape for m in stacked):
            raise DomainError("all probability maps must share dimensions")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "maps", np.stack(stacked))

    @property
    def shape(self):
        return self.maps.shape[1:]


@dataclass(frozen=True, eq=False)
class RecognitionResult:
    selected: frozenset
    original_areas: dict
    final_areas: dict
    labels: np.ndarray = field(repr=False)


def _provisional_assignment(maps):
    """Per-pixel winner index among maps strictly above 0.5, else -1."""
    above = maps > _ASSIGN_THRESHOLD
    contenders = np.where(above, maps, -1.0)
    winner = contenders.argmax(axis=0)
    return np.where(above.any(axis=0), winner, -1)


def select_targets(inputs: TargetMaps, lam: float = DEFAULT_LAMBDA):
    """Stage one: areas before and after competition, and the survivors.

    A target survives when its competitively assigned area is strictly
    greater than lam times its standalone thresholded area; empty targets
    never survive.
    """
    if not (math.isfinite(lam) and lam >= 0.0):
        raise DomainError(f"lambda must be finite and non-negative, got {lam}")
    original = {
        t: int(binarize(inputs.maps[i], _ASSIGN_THRESHOLD).sum())
        for i, t in enumerate(inputs.targets)
    }
    assignment = _provisional_assignment(inputs.maps)
    final = {
        t: int((assignment == i).sum()) for i, t in enumerate(inputs.targets)
    }
    # strictness alone excludes empty targets: A = 0 forces the assigned
    # area to 0, and 0 > lam * 0 never holds
    selected = frozenset(
        t for t in inputs.targets if final[t] > lam * original[t]
    )
    return selected, original, final


def aggregate_labels(inputs: TargetMaps, selected) -> np.ndarray:
    """Stage two: label grid over the selected targets only."""
    selected = frozenset(selected)
    unknown = selected - set(inputs.targets)
    if unknown:
        raise DomainError(f"selected targets not in inputs: {sorted(unknown)}")
    labels = np.zeros(inputs.shape, dtype=np.int32)
    indices = [i for i, t in enumerate(inputs.targets) if t in selected]
    if not indices:
        return labels
    sub = inputs.maps[indices]
    above = sub > _ASSIGN_THRESHOLD
    contenders = np.where(above, sub, -1.0)
    winner = contenders.argmax(axis=0)
    index_map = np.asarray(indices, dtype=np.int32)
    any_above = above.any(axis=0)
    labels[any_above] = index_map[winner[any_above]] + 1
    return labels


def recognize(inputs: TargetMaps, lam: float = DEFAULT_LAMBDA) -> RecognitionResult:
    selected, original, final = select_targets(inputs, lam)
    labels = aggregate_labels(inputs, selected)
    return RecognitionResult(selected, original, final, labels)


@dataclass(frozen=True)
class ScoredBox:
    box: BoundingBox
    score: float
    target: str

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise DomainError(f"box score must be finite, got {self.score}")


def box_iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union with inclusive pixel counting."""
    rows = min(a.max_row, b.max_row) - max(a.min_row, b.min_row) + 1
    cols = min(a.max_col, b.max_col) - max(a.min_col, b.min_col) + 1
    if rows <= 0 or cols <= 0:
        return 0.0
    inter = rows * cols
    return inter / (a.area + b.area - inter)


def nms(boxes, iou_threshold: float):
    """Greedy non-maximum suppression, highest score first.

    Score ties keep earlier input order. A surviving box suppresses every
    later box overlapping it with IoU strictly above the threshold.
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise DomainError(f"IoU threshold must be in [0, 1], got {iou_threshold}")
    order = sorted(range(len(boxes)), key=lambda i: (-boxes[i].score, i))
    kept = []
    for i in order:
        if all(box_iou(boxes[i].box, k.box) <= iou_threshold for k in kept):
            kept.append(boxes[i])
    return kept
