"""Core grid types and the two operations every other module builds on.

Grids are plain numpy arrays in (row, col) order, row 0 at the top:

* binary mask      -- 2-D bool array
* probability map  -- 2-D float array, every value finite in [0, 1]
* RGB image        -- 3-D uint8 array of shape (H, W, 3)
* label map        -- 2-D int32 array, 0 means blank, k >= 1 indexes a target

All grids are treated as immutable after construction; nothing in this
package mutates its inputs.
"""

import numpy as np

from .errors import DomainError

# values this far outside [0, 1] are clamped instead of rejected
VALUE_TOLERANCE = 1e-9


def as_mask(a) -> np.ndarray:
    """Coerce to a 2-D boolean mask."""
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DomainError(f"mask must be a non-empty 2-D grid, got shape {m.shape}")
    return m.astype(bool, copy=False)


def as_pmap(a) -> np.ndarray:
    """Coerce to a 2-D float64 probability map, clamping values within 1e-9 of [0, 1]."""
    p = np.asarray(a, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
        raise DomainError(f"probability map must be a non-empty 2-D grid, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError("probability map contains non-finite values")
    lo, hi = float(p.min()), float(p.max())
    if lo < -VALUE_TOLERANCE or hi > 1.0 + VALUE_TOLERANCE:
        raise DomainError(f"probability values outside [0, 1]: min={lo}, max={hi}")
    if lo < 0.0 or hi > 1.0:
        p = np.clip(p, 0.0, 1.0)
    return p


def as_grid(a) -> np.ndarray:
    """Coerce to a 2-D grid of finite reals, with no range constraint.

    Accumulated shape sums exceed 1, so they travel as plain grids rather
    than probability maps.
    """
    g = np.asarray(a, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise DomainError(f"grid must be a non-empty 2-D array, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise DomainError("grid contains non-finite values")
    return g


def as_rgb(a) -> np.ndarray:
    """Coerce to an (H, W, 3) uint8 image."""
    img = np.asarray(a)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise DomainError(f"RGB image must have shape (H, W, 3), got {img.shape}")
    if img.dtype != np.uint8:
        if img.min() < 0 or img.max() > 255:
            raise DomainError("RGB channel values must be in [0, 255]")
        img = img.astype(np.uint8)
    return img


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[:2] != b.shape[:2]:
        raise DomainError(f"grid dimensions differ: {a.shape[:2]} vs {b.shape[:2]}")


def binarize(pmap, threshold: float) -> np.ndarray:
    """Pixels with probability strictly greater than `threshold`.

    The inequality is strict: a pixel exactly at the threshold stays off.
    """
    p = as_pmap(pmap)
    if not 0.0 <= threshold <= 1.0:
        raise DomainError(f"threshold must be in [0, 1], got {threshold}")
    return p > threshold


def mask_area(mask) -> int:
    return int(np.count_nonzero(as_mask(mask)))


def mask_mean(pmap, mask) -> float:
    """Arithmetic mean of map values over the true pixels of `mask`."""
    p = as_pmap(pmap)
    m = as_mask(mask)
    check_same_shape(p, m)
    n = np.count_nonzero(m)
    if n == 0:
        raise DomainError("empty region")
    return float(p[m].sum(dtype=np.float64) / n)
