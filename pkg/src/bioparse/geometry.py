"""Shape-regularity metrics on binary masks.

Three scores, each in (0, 1] and equal to 1 for the "most regular" shape
of its kind:

* box ratio     -- pixel count over tight bounding-box area; 1 for a
                   filled rectangle
* convex ratio  -- pixel count over convex-hull area; 1 for convex shapes
* iri           -- inverse rotational inertia, pixel count squared over
                   2*pi times the second moment about the centroid; 1 for
                   a disk, small for elongated or scattered shapes

A mask pixel is modelled as the closed unit square [r, r+1] x [c, c+1].
The hull is taken over the corner points of those squares, so a 1xN strip
still spans positive area, and the rotational inertia carries the exact
second moment of each unit square (1/12 per axis, 1/6 total) on top of
the point-mass term. Under this model the disk bound IRI <= 1 is exact
for every mask, including a single pixel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grids import as_mask

# second moment of a unit square about its own center, both axes combined
_SQUARE_MOMENT = 1.0 / 6.0


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel-index extents of a mask."""

    min_row: int
    min_col: int
    max_row: int
    max_col: int

    @property
    def height(self) -> int:
        return self.max_row - self.min_row + 1

    @property
    def width(self) -> int:
        return self.max_col - self.min_col + 1

    @property
    def area(self) -> int:
        return self.height * self.width


@dataclass(frozen=True)
class ShapeMetrics:
    box_ratio: float
    convex_ratio: float
    iri: float


def _nonempty(mask) -> np.ndarray:
    m = as_mask(mask)
    if not m.any():
        raise DomainError("empty mask")
    return m


def tight_bbox(mask) -> BoundingBox:
    """Minimal axis-aligned box covering every true pixel."""
    m = _nonempty(mask)
    rows = np.flatnonzero(m.any(axis=1))
    cols = np.flatnonzero(m.any(axis=0))
    return BoundingBox(int(rows[0]), int(cols[0]), int(rows[-1]), int(cols[-1]))


def box_ratio(mask) -> float:
    m = _nonempty(mask)
    return float(np.count_nonzero(m) / tight_bbox(m).area)


def _hull_points(points: np.ndarray) -> np.ndarray:
    """Monotone-chain convex hull; points is an (n, 2) integer array."""
    pts = np.unique(points, axis=0)  # sorts lexicographically
    if len(pts) <= 2:
        return pts

    def half(iterable):
        chain = []
        for p in iterable:
            while len(chain) >= 2:
                # cross product of (chain[-1]-chain[-2]) x (p-chain[-2])
                ax, ay = chain[-1][0] - chain[-2][0], chain[-1][1] - chain[-2][1]
                bx, by = p[0] - chain[-2][0], p[1] - chain[-2][1]
                if ax * by - ay * bx <= 0:
                    chain.pop()
                else:
                    break
            chain.append((int(p[0]), int(p[1])))
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1], dtype=np.int64)


def _corner_candidates(m: np.ndarray) -> np.ndarray:
    """Pixel-square corners that can appear on the hull.

    Within one row, only the leftmost and rightmost pixels contribute hull
    vertices; every other corner lies on the segment between them. This
    keeps the candidate set at most 4 points per occupied row.
    """
    occupied = m.any(axis=1)
    rows = np.flatnonzero(occupied)
    first = m[rows].argmax(axis=1)
    last = m.shape[1] - 1 - m[rows, ::-1].argmax(axis=1)
    corners = np.empty((4 * len(rows), 2), dtype=np.int64)
    corners[0::4, 0], corners[0::4, 1] = rows, first
    corners[1::4, 0], corners[1::4, 1] = rows, last + 1
    corners[2::4, 0], corners[2::4, 1] = rows + 1, first
    corners[3::4, 0], corners[3::4, 1] = rows + 1, last + 1
    return corners


def convex_hull_area(mask) -> float:
    """Area of the convex hull of the union of pixel squares, in pixel^2."""
    m = _nonempty(mask)
    hull = _hull_points(_corner_candidates(m))
    if len(hull) < 3:
        return 0.0  # unreachable: squares always span area
    x = hull[:, 0]
    y = hull[:, 1]
    # shoelace; hull coordinates are integers so the products are exact
    s = np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))
    return float(abs(s)) / 2.0


def convex_ratio(mask) -> float:
    m = _nonempty(mask)
    return float(np.count_nonzero(m)) / convex_hull_area(m)


def iri(mask) -> float:
    """Inverse rotational inertia of the mask area about its centroid."""
    m = _nonempty(mask)
    rr, cc = np.nonzero(m)
    n = len(rr)
    r_mean = rr.mean()
    c_mean = cc.mean()
    inertia = float(((rr - r_mean) ** 2).sum() + ((cc - c_mean) ** 2).sum())
    inertia += n * _SQUARE_MOMENT
    return n * n / (2.0 * np.pi * inertia)


def shape_metrics(mask) -> ShapeMetrics:
    """All three regularity scores in one pass."""
    m = _nonempty(mask)
    return ShapeMetrics(box_ratio(m), convex_ratio(m), iri(m))
