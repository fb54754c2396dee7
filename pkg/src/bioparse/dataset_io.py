"""Manifest schema, grouped train/test splitting, and file formats.

Storage is 2-D only: volumes arrive as per-slice entries sharing a
group_id, and the split assigns whole groups so slices of one volume
never straddle train and test.

Probability maps use a little-endian binary format (PMAP): 4-byte magic
"PMAP", a version byte 0x01, height and width as unsigned 32-bit
little-endian integers, then height*width IEEE-754 32-bit floats in
row-major order. Masks are 8-bit grayscale PNG, foreground written as
255 and any nonzero byte read as foreground. Manifests are JSON Lines.
"""

import json
import math
import os
import struct
from dataclasses import dataclass, field, replace

import numpy as np
from PIL import Image

from .errors import DomainError, FormatError
from .grids import as_mask, as_pmap

PMAP_MAGIC = b"PMAP"
PMAP_VERSION = 1

_MANIFEST_FIELDS = ("image_path", "mask_path", "object_type", "modality",
                    "site", "description", "group_id", "split")
_REQUIRED_FIELDS = ("image_path", "mask_path", "object_type", "group_id")


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    mask_path: str
    object_type: str
    group_id: str
    modality: str | None = None
    site: str | None = None
    description: str = ""
    split: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.image_path or not self.mask_path:
            raise FormatError("manifest entry paths must be non-empty")
        if self.split not in (None, "train", "test"):
            raise FormatError(f"split must be train or test, got {self.split!r}")


@dataclass(frozen=True)
class SplitAssignment:
    assignment: dict  # group_id -> "train" | "test"
    seed: int
    ratio: float

    def split_of(self, group_id) -> str:
        try:
            return self.assignment[group_id]
        except KeyError:
            raise DomainError(f"group {group_id!r} was not part of the split") from None


class SplitMix64:
    """Deterministic 64-bit stream (SplitMix finalizer over a counter).

    Fully specified so assignments reproduce across platforms: the state
    advances by the golden-gamma constant and each output is the xor-shift
    multiply finalizer of the new state, everything modulo 2**64.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self._MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates using modulo draws from the stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next() % (i + 1)
            items[i], items[j] = items[j], items[i]


def split_grouped(entries, ratio: float, seed: int) -> SplitAssignment:
    """Shuffle distinct groups with a seeded stream, first ceil(ratio*G) train.

    Groups are collected in first-appearance order before shuffling, so
    the assignment depends only on (group list, ratio, seed). The ceiling
    is taken with a 1e-9 slack so binary ratios like 0.8 do not round a
    whole extra group into train.
    """
    if not 0.0 < ratio < 1.0:
        raise DomainError(f"ratio must be in (0, 1), got {ratio}")
    groups = []
    seen = set()
    for e in entries:
        if e.group_id not in seen:
            seen.add(e.group_id)
            groups.append(e.group_id)
    if not groups:
        raise DomainError("split requires at least one group")
    SplitMix64(seed).shuffle(groups)
    n_train = math.ceil(ratio * len(groups) - 1e-9)
    assignment = {g: ("train" if i < n_train else "test")
                  for i, g in enumerate(groups)}
    return SplitAssignment(assignment, int(seed), float(ratio))


def assign_entries(entries, assignment: SplitAssignment) -> list:
    """Entries with their group's split label filled in."""
    return [replace(e, split=assignment.split_of(e.group_id)) for e in entries]


def _atomic_write(path, data: bytes) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as f:
        f.write(data)
    os.replace(tmp, path)


def write_pmap(path, pmap) -> None:
    p = as_pmap(pmap)
    h, w = p.shape
    if h >= 1 << 32 or w >= 1 << 32:
        raise FormatError(f"{path}: dimensions {h}x{w} overflow the PMAP header")
    header = PMAP_MAGIC + bytes([PMAP_VERSION]) + struct.pack("<II", h, w)
    payload = p.astype("<f4").tobytes(order="C")
    _atomic_write(path, header + payload)


def read_pmap(path) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 13:
        raise FormatError(f"{path}: truncated PMAP header")
    if data[:4] != PMAP_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}, expected b'PMAP'")
    if data[4] != PMAP_VERSION:
        raise FormatError(f"{path}: unsupported PMAP version {data[4]}")
    h, w = struct.unpack("<II", data[5:13])
    if h < 1 or w < 1:
        raise FormatError(f"{path}: degenerate dimensions {h}x{w}")
    expected = 13 + 4 * h * w
    if len(data) < expected:
        raise FormatError(f"{path}: truncated payload, {len(data)} of {expected} bytes")
    if len(data) > expected:
        raise FormatError(f"{path}: {len(data) - expected} trailing bytes")
    values = np.frombuffer(data, dtype="<f4", offset=13).reshape(h, w)
    lo, hi = float(values.min()), float(values.max())
    if lo < -1e-9 or hi > 1 + 1e-9:
        raise FormatError(f"{path}: values outside [0, 1] (range {lo}..{hi})")
    return as_pmap(values)


def write_mask(path, mask) -> None:
    m = as_mask(mask)
    img = Image.fromarray(np.where(m, 255, 0).astype(np.uint8), mode="L")
    img.save(path, format="PNG")


def _open_png(path, modes):
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise
    except OSError as e:
        raise FormatError(f"{path}: not a readable PNG ({e})") from None
    if img.mode not in modes:
        raise FormatError(
            f"{path}: expected {' or '.join(modes)} PNG, got mode {img.mode}")
    return img


def read_mask(path) -> np.ndarray:
    img = _open_png(path, ("L",))
    return np.asarray(img, dtype=np.uint8) != 0


def read_rgb(path) -> np.ndarray:
    img = _open_png(path, ("RGB",))
    return np.asarray(img, dtype=np.uint8)


def write_rgb(path, image) -> None:
    arr = np.asarray(image, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DomainError(f"RGB image must be HxWx3, got shape {arr.shape}")
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def write_labels(path, labels) -> None:
    """Label image as 8-bit grayscale PNG (0 = blank)."""
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise DomainError(f"label image must be 2-D, got shape {arr.shape}")
    if arr.min() < 0 or arr.max() > 255:
        raise DomainError("label values must fit in one byte")
    Image.fromarray(arr.astype(np.uint8), mode="L").save(path, format="PNG")


def read_labels(path) -> np.ndarray:
    img = _open_png(path, ("L",))
    return np.asarray(img, dtype=np.uint8).astype(np.int32)


def write_pmap_png(path, pmap) -> None:
    """Grayscale rendering of a probability map: value*255, half rounds up."""
    p = as_pmap(pmap)
    scaled = np.floor(p * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(scaled, mode="L").save(path, format="PNG")


def entry_to_dict(entry: ManifestEntry) -> dict:
    doc = {}
    for name in _MANIFEST_FIELDS:
        value = getattr(entry, name)
        if name in _REQUIRED_FIELDS or value not in (None, ""):
            doc[name] = value
    doc.update(entry.extra)
    return doc


def entry_from_dict(doc: dict) -> ManifestEntry:
    missing = [k for k in _REQUIRED_FIELDS if k not in doc]
    if missing:
        raise FormatError(f"missing field {missing[0]!r}")
    known = {k: doc[k] for k in _MANIFEST_FIELDS if k in doc}
    extra = {k: v for k, v in doc.items() if k not in _MANIFEST_FIELDS}
    known.setdefault("description", "")
    return ManifestEntry(extra=extra, **known)


def read_manifest(path) -> list:
    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                if not isinstance(doc, dict):
                    raise FormatError("entry is not a JSON object")
                entries.append(entry_from_dict(doc))
            except (json.JSONDecodeError, FormatError) as e:
                raise FormatError(f"{path} line {lineno}: {e}") from None
    return entries


def write_manifest(path, entries) -> None:
    lines = [json.dumps(entry_to_dict(e), ensure_ascii=False) for e in entries]
    _atomic_write(path, ("".join(line + "\n" for line in lines)).encode("utf-8"))


def validate_manifest(entries, ontology) -> None:
    """Check every object_type against a loaded ontology."""
    for i, e in enumerate(entries):
        if not ontology.is_object_type(e.object_type):
            raise FormatError(
                f"manifest entry {i}: unknown object type {e.object_type!r}")
