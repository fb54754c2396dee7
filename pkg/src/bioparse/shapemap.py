"""Canonical shape maps by cross-correlation alignment.

Per-object-type probability maps are folded into one average shape: each
incoming map is translated to the integer offset that maximizes its raw
cross-correlation with the running accumulator, added, and the final sum
divided by the number of maps. Volumetric data is averaged slice-wise
first (no alignment within a volume) and the per-volume means are then
aligned across volumes.

Shifting is zero-filled at the frame edges, which makes realignment lossy
for support touching the border; callers who need exact recovery must
keep a margin at least as large as the largest shift.
"""

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .errors import DomainError
from .grids import as_grid, as_pmap


@dataclass(frozen=True)
class Shift:
    d_row: int
    d_col: int


def cross_correlate_argmax(reference, candidate) -> Shift:
    """Integer shift of the candidate maximizing overlap with the reference.

    Maximizes sum over x of reference(x) * candidate(x - s) with zeros
    outside the frame, over all |d_row| < H and |d_col| < W. Ties resolve
    to the smallest Euclidean norm, then lexicographic (d_row, d_col);
    in particular an all-zero grid on either side yields the zero shift.
    """
    ref = as_grid(reference)
    cand = as_grid(candidate)
    if ref.shape != cand.shape:
        raise DomainError(f"grid dimensions differ: {ref.shape} vs {cand.shape}")
    if not ref.any() or not cand.any():
        return Shift(0, 0)
    # direct evaluation keeps exactly tied correlation values exactly tied,
    # which the deterministic tie rule depends on
    corr = scipy.signal.correlate(ref, cand, mode="full", method="direct")
    h, w = ref.shape
    best = corr.max()
    rows, cols = np.nonzero(corr == best)
    d_rows = rows.astype(np.int64) - (h - 1)
    d_cols = cols.astype(np.int64) - (w - 1)
    order = np.lexsort((d_cols, d_rows, d_rows * d_rows + d_cols * d_cols))
    pick = order[0]
    return Shift(int(d_rows[pick]), int(d_cols[pick]))


def shift_map(grid, s: Shift) -> np.ndarray:
    """Translate by (d_row, d_col), zero-filling vacated pixels.

    The content moves by the shift: output(x) equals input(x - s), so a
    positive d_row carries values toward higher row indices.
    """
    g = as_grid(grid)
    h, w = g.shape
    if abs(s.d_row) >= h or abs(s.d_col) >= w:
        raise DomainError(f"shift {s} moves every pixel out of a {h}x{w} frame")
    out = np.zeros_like(g)
    dr, dc = s.d_row, s.d_col
    out[max(dr, 0) : h + min(dr, 0), max(dc, 0) : w + min(dc, 0)] = g[
        max(-dr, 0) : h + min(-dr, 0), max(-dc, 0) : w + min(-dc, 0)
    ]
    return out


class ShapeAccumulator:
    """Running aligned sum of maps; normalized() yields the mean shape."""

    def __init__(self, first):
        self.sum = as_pmap(first).copy()
        self.count = 1

    def add(self, grid) -> Shift:
        g = as_pmap(grid)
        if g.shape != self.sum.shape:
            raise DomainError(
                f"grid dimensions differ: {g.shape} vs {self.sum.shape}"
            )
        s = cross_correlate_argmax(self.sum, g)
        self.sum += shift_map(g, s)
        self.count += 1
        return s

    def normalized(self) -> np.ndarray:
        return self.sum / self.count


def ensemble_shapes(maps) -> np.ndarray:
    """Sequential aligned mean of the maps, in input order."""
    maps = list(maps)
    if not maps:
        raise DomainError("need at least one map")
    acc = ShapeAccumulator(maps[0])
    for g in maps[1:]:
        acc.add(g)
    return acc.normalized()


def ensemble_volume(slices) -> np.ndarray:
    """Plain elementwise mean of a volume's slices, with no alignment."""
    slices = [as_pmap(s) for s in slices]
    if not slices:
        raise DomainError("need at least one slice")
    shape = slices[0].shape
    if any(s.shape != shape for s in slices):
        raise DomainError("all slices must share dimensions")
    return np.mean(slices, axis=0)
