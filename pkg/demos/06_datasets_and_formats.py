#!/usr/bin/env python3
# Dataset manifests, grouped splits, and the on-disk formats.

import json
import tempfile
from pathlib import Path

import numpy as np

from bioparse import (
    ManifestEntry,
    assign_entries,
    read_manifest,
    read_pmap,
    split_grouped,
    write_manifest,
    write_pmap,
)

workdir = Path(tempfile.mkdtemp())

# ---------------------------------------------------------------------------
# A manifest is a JSONL file, one entry per image/mask pair. group_id
# ties slices of the same volume together so a split can never leak a
# volume across train and test.

entries = []
for vol in range(7):
    for z in range(3):
        entries.append(ManifestEntry(
            image_path=f"vol{vol}/slice{z}.png",
            mask_path=f"vol{vol}/slice{z}_mask.png",
            object_type="liver",
            group_id=f"vol{vol}",
            modality="ct",
        ))

manifest = workdir / "dataset.jsonl"
write_manifest(manifest, entries)
print("wrote %d entries, first line:" % len(entries))
print(" ", manifest.read_text().splitlines()[0])
assert read_manifest(manifest) == entries

# ---------------------------------------------------------------------------
# Split by group with a counter-based generator, so the same seed gives
# the same split on any machine. With 7 groups at ratio 0.8 the train
# side gets ceil(5.6) = 6 groups.

split = split_grouped(entries, ratio=0.8, seed=17)
trains = sorted(g for g, side in split.assignment.items() if side == "train")
print("\ntrain groups (seed 17):", trains)
print("test groups:           ",
      sorted(set(split.assignment) - set(trains)))

labeled = assign_entries(entries, split)
print("entries carry their split now:", labeled[0].split)

# ---------------------------------------------------------------------------
# Probability maps travel as a tiny binary format: 4-byte magic "PMAP",
# a version byte, two little-endian u32 dimensions, then row-major
# float32 values in [0, 1]. Writing and reading is bit-stable.

pmap = np.random.default_rng(3).random((4, 5)).astype(np.float32)
path = workdir / "pred.pmap"
write_pmap(path, pmap)
raw = path.read_bytes()
print("\npmap header bytes:", raw[:13].hex(" "))
back = read_pmap(path)
assert np.array_equal(back.astype(np.float32), pmap)
print("round trip exact, shape %s, %d bytes total" % (back.shape, len(raw)))

# The smallest possible map, a single 0.5, is 17 bytes:
write_pmap(workdir / "tiny.pmap", [[0.5]])
print("1x1 map of 0.5:", (workdir / "tiny.pmap").read_bytes().hex(" "))
