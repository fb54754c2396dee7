#!/usr/bin/env python3
# The evaluation metrics, one by one, on small synthetic data.

import numpy as np

from bioparse import (
    auroc,
    dice,
    identification_prf,
    identification_prf_macro,
    silhouette,
    weighted_dice,
    wilcoxon_signed_rank,
)

rng = np.random.default_rng(42)

# --- overlap ---------------------------------------------------------------
# Dice rewards overlap relative to total foreground. Two empty masks
# count as a perfect match by convention.
a = np.zeros((8, 8), dtype=bool)
a[2:6, 2:6] = True
b = np.zeros((8, 8), dtype=bool)
b[3:7, 3:7] = True
print("dice of two offset squares: %.4f" % dice(a, b))
print("dice of two empty masks:  %.1f" % dice(a & ~a, b & ~b))

# weighted_dice pools per-image scores with gold-area weights, so a big
# organ counts for more than a speck.
pairs = [(a, b), (a[:4, :4], a[:4, :4])]
print("weighted dice over two images: %.4f" % weighted_dice(pairs))

# --- identification ----------------------------------------------------------
# Did the system claim the right object types per image? Micro pools
# the counts, macro averages per-image F1.
predicted = [{"liver", "kidney"}, {"liver"}]
gold = [{"liver"}, {"liver", "spleen"}]
micro = identification_prf(predicted, gold)
macro = identification_prf_macro(predicted, gold)
print("\nidentification micro P/R/F1: %.3f %.3f %.3f" % micro)
print("identification macro F1: %.3f" % macro[2])

# --- ranking -----------------------------------------------------------------
# AUROC from scores and binary labels, midranks for ties.
scores = np.concatenate([rng.normal(0.6, 0.2, 50), rng.normal(0.4, 0.2, 50)])
labels = np.concatenate([np.ones(50, bool), np.zeros(50, bool)])
print("\nauroc for separated score clouds: %.4f" % auroc(scores, labels))
print("auroc with flipped labels:        %.4f" % auroc(scores, ~labels))

# --- paired comparison -------------------------------------------------------
# Wilcoxon signed-rank on before/after scores; exact for small n.
before = np.array([0.61, 0.58, 0.70, 0.64, 0.66, 0.59, 0.72, 0.63])
after = before + rng.normal(0.04, 0.02, size=8)
print("\nwilcoxon p for a consistent improvement: %.4f"
      % wilcoxon_signed_rank(before, after))
print("wilcoxon p against itself shifted randomly: %.4f"
      % wilcoxon_signed_rank(before, np.roll(before, 3)))

# --- clustering --------------------------------------------------------------
# Silhouette: how much closer is each point to its own cluster than to
# the nearest other one.
pts = np.concatenate([rng.normal(0, 0.3, (30, 2)),
                      rng.normal(3, 0.3, (30, 2))])
lab = [0] * 30 + [1] * 30
print("\nsilhouette of two tight clusters: %.3f" % silhouette(pts, lab))
shuffled = list(lab)
rng.shuffle(shuffled)
print("silhouette with shuffled labels:  %.3f" % silhouette(pts, shuffled))
