#!/usr/bin/env python3
# Shape irregularity on binary masks.
#
# Three ratios describe how "blobby" a foreground region is. All of them
# live in (0, 1] and equal 1 only for the most compact shapes:
#
#   box_ratio     area / bounding box area
#   convex_ratio  area / convex hull area
#   iri           isoperimetric-style index from radial deviation moments
#
# A disk maxes out the IRI, a thin strip crushes it toward zero.

import numpy as np

from bioparse import box_ratio, convex_ratio, iri, shape_metrics


def disk(radius, pad=2):
    n = 2 * (radius + pad)
    c = np.arange(n) - (radius + pad) + 0.5
    return c[:, None] ** 2 + c[None, :] ** 2 <= radius * radius


# A large disk: box_ratio approaches pi/4 because the disk fills that
# fraction of its bounding square, while IRI approaches 1.
d = disk(64)
print("disk, radius 64")
print("  box_ratio    %.4f   (pi/4 = %.4f)" % (box_ratio(d), np.pi / 4))
print("  convex_ratio %.4f" % convex_ratio(d))
print("  iri          %.4f" % iri(d))

# A one-pixel-tall strip has the closed form iri = 6N / (pi (N^2 + 1)),
# so it decays like 1/N as the strip stretches.
print("\n1xN strips")
for n in (1, 5, 20, 50):
    strip = np.ones((1, n), dtype=bool)
    expected = 6.0 * n / (np.pi * (n * n + 1))
    print("  N=%2d  iri=%.6f  closed form %.6f" % (n, iri(strip), expected))

# A random blob sits somewhere in between. shape_metrics bundles all
# three numbers in one call.
rng = np.random.default_rng(7)
blob = rng.random((48, 48)) < 0.35
m = shape_metrics(blob)
print("\nrandom blob: box=%.4f convex=%.4f iri=%.4f"
      % (m.box_ratio, m.convex_ratio, m.iri))

# The hull can never be smaller than the bounding box is large, so
# convex_ratio >= box_ratio always holds.
assert m.convex_ratio >= m.box_ratio
print("convex_ratio >= box_ratio holds, as it must")
