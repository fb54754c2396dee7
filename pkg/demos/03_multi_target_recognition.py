#!/usr/bin/env python3
# Turning per-target probability maps into one label map.
#
# Recognition runs in two passes. First every pixel is provisionally
# assigned to the highest-probability target above 0.5, which shrinks
# targets that lose their pixels to stronger competitors. A target
# survives only if it keeps more than lambda of its original area.
# Second, pixels are re-assigned among the survivors alone, so area
# freed up by dropped targets flows back to whoever wanted it next.

import numpy as np

from bioparse import ScoredBox, TargetMaps, BoundingBox, box_iou, nms, recognize

# Two 6x6 candidate maps. "tumor" is confident over a 3x3 block;
# "edema" overlaps it weakly and holds one extra pixel of its own.
tumor = np.zeros((6, 6))
tumor[1:4, 1:4] = 0.9
edema = np.zeros((6, 6))
edema[2:5, 2:5] = 0.6
edema[5, 5] = 0.7

inputs = TargetMaps(("tumor", "edema"), [tumor, edema])
result = recognize(inputs, lam=0.5)

print("original areas:", result.original_areas)
print("surviving areas:", result.final_areas)
print("selected:", sorted(result.selected))
print("label map (0 = background, 1 = tumor, 2 = edema):")
print(result.labels)

# Lowering lambda keeps weaker targets alive: at 0.1 the edema region
# only needs to hold a tenth of its area to survive.
relaxed = recognize(inputs, lam=0.1)
print("\nwith lambda = 0.1, selected:", sorted(relaxed.selected))
print(relaxed.labels)

# ---------------------------------------------------------------------------
# Box-level suppression for detection-style outputs. Boxes are kept
# greedily by score; a kept box suppresses later ones whose IoU with it
# exceeds the threshold.

boxes = [
    ScoredBox(BoundingBox(0, 0, 4, 4), 0.9, "lesion"),
    ScoredBox(BoundingBox(1, 1, 5, 5), 0.8, "lesion"),
    ScoredBox(BoundingBox(10, 10, 12, 12), 0.7, "lesion"),
]
print("\npairwise IoU of the first two boxes: %.3f"
      % box_iou(boxes[0].box, boxes[1].box))
kept = nms(boxes, 0.3)
print("kept after NMS at 0.3:", [(b.score, b.box) for b in kept])
