"""Tests for manifests, grouped splitting, and the binary map formats."""

import json
import math

import numpy as np
import pytest

from bioparse.dataset_io import (
    ManifestEntry,
    SplitMix64,
    assign_entries,
    entry_to_dict,
    read_labels,
    read_manifest,
    read_mask,
    read_pmap,
    read_rgb,
    split_grouped,
    validate_manifest,
    write_labels,
    write_manifest,
    write_mask,
    write_pmap,
    write_pmap_png,
    write_rgb,
)
from bioparse.errors import DomainError, FormatError


def reference_shuffle(items, seed):
    """Literal re-transcription of the documented stream and swap order."""
    mask = (1 << 64) - 1
    state = seed & mask

    def nxt():
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        return z ^ (z >> 31)

    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = nxt() % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def entries_for(groups):
    return [
        ManifestEntry(image_path=f"img/{g}_{k}.png", mask_path=f"msk/{g}_{k}.png",
                      object_type="liver", group_id=g)
        for g in groups for k in range(2)
    ]


class TestSplitMix64:
    def test_published_stream_for_zero_seed(self):
        # first three outputs of the SplitMix64 reference stream, seed 0
        gen = SplitMix64(0)
        assert gen.next() == 0xE220A8397B1DCDAF
        assert gen.next() == 0x6E789E6AA1B965F4
        assert gen.next() == 0x06C45D188009454F

    def test_shuffle_matches_reference(self):
        for seed in (0, 17, 999, 2**63):
            items = list(range(40))
            gen = SplitMix64(seed)
            gen.shuffle(items)
            assert items == reference_shuffle(range(40), seed)

    def test_shuffle_is_a_permutation(self):
        items = list(range(100))
        SplitMix64(5)
        gen = SplitMix64(5)
        gen.shuffle(items)
        assert sorted(items) == list(range(100))


class TestSplitGrouped:
    def test_single_group_goes_to_train(self):
        a = split_grouped(entries_for(["v1"]), 0.8, 17)
        assert a.assignment == {"v1": "train"}

    def test_five_groups_ratio_point_eight(self):
        a = split_grouped(entries_for(["v1", "v2", "v3", "v4", "v5"]), 0.8, 17)
        labels = list(a.assignment.values())
        assert labels.count("train") == 4 and labels.count("test") == 1

    def test_matches_seeded_shuffle_oracle(self):
        groups = [f"vol{i}" for i in range(13)]
        for seed in (3, 17, 20240229):
            a = split_grouped(entries_for(groups), 0.8, seed)
            order = reference_shuffle(groups, seed)
            n_train = math.ceil(0.8 * 13 - 1e-9)
            expected = {g: ("train" if i < n_train else "test")
                        for i, g in enumerate(order)}
            assert a.assignment == expected

    def test_group_integrity(self):
        entries = entries_for(["a", "b", "c"])
        labeled = assign_entries(entries, split_grouped(entries, 0.5, 9))
        by_group = {}
        for e in labeled:
            by_group.setdefault(e.group_id, set()).add(e.split)
        assert all(len(s) == 1 for s in by_group.values())

    def test_partition_properties_over_seeds(self):
        groups = [f"g{i}" for i in range(23)]
        entries = entries_for(groups)
        n_train = math.ceil(0.8 * 23 - 1e-9)
        for seed in range(100):
            a = split_grouped(entries, 0.8, seed)
            assert set(a.assignment) == set(groups)
            trains = [g for g, s in a.assignment.items() if s == "train"]
            assert len(trains) == n_train

    def test_deterministic_across_runs(self):
        entries = entries_for([f"g{i}" for i in range(10)])
        a = split_grouped(entries, 0.7, 123)
        b = split_grouped(entries, 0.7, 123)
        assert a.assignment == b.assignment

    def test_binary_ratio_does_not_leak_an_extra_group(self):
        # 0.8 * 5 rounds up past 4.0 in binary floats; the slack keeps 4/1
        for G in (5, 10, 15, 20, 25):
            a = split_grouped(entries_for([f"g{i}" for i in range(G)]), 0.8, 1)
            trains = sum(1 for s in a.assignment.values() if s == "train")
            assert trains == round(0.8 * G)

    def test_ratio_validation(self):
        entries = entries_for(["a"])
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(DomainError):
                split_grouped(entries, bad, 1)

    def test_no_groups(self):
        with pytest.raises(DomainError):
            split_grouped([], 0.8, 1)

    def test_unknown_group_lookup(self):
        a = split_grouped(entries_for(["a"]), 0.8, 1)
        with pytest.raises(DomainError):
            a.split_of("zzz")


class TestPmapFormat:
    def test_documented_byte_vector(self, tmp_path):
        path = tmp_path / "half.pmap"
        write_pmap(path, [[0.5]])
        expected = bytes([0x50, 0x4D, 0x41, 0x50, 0x01,
                          0x01, 0x00, 0x00, 0x00,
                          0x01, 0x00, 0x00, 0x00,
                          0x00, 0x00, 0x00, 0x3F])
        assert path.read_bytes() == expected

    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(20240612)
        for i in range(20):
            h, w = rng.integers(1, 40, size=2)
            p = rng.random((h, w)).astype(np.float32)
            path = tmp_path / f"m{i}.pmap"
            write_pmap(path, p)
            first = path.read_bytes()
            again = read_pmap(path)
            write_pmap(path, again)
            assert path.read_bytes() == first
            np.testing.assert_array_equal(again, p.astype(np.float64))

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.pmap"
        write_pmap(path, [[0.5]])
        data = bytearray(path.read_bytes())
        data[0:4] = b"XMAP"
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="magic"):
            read_pmap(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "x.pmap"
        write_pmap(path, [[0.5]])
        data = bytearray(path.read_bytes())
        data[4] = 2
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="version"):
            read_pmap(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "x.pmap"
        write_pmap(path, [[0.25, 0.75]])
        path.write_bytes(path.read_bytes()[:-2])
        with pytest.raises(FormatError, match="truncated"):
            read_pmap(path)

    def test_trailing_garbage(self, tmp_path):
        path = tmp_path / "x.pmap"
        write_pmap(path, [[0.25]])
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(FormatError, match="trailing"):
            read_pmap(path)

    def test_out_of_range_value(self, tmp_path):
        path = tmp_path / "x.pmap"
        header = b"PMAP\x01" + (1).to_bytes(4, "little") * 2
        path.write_bytes(header + np.float32(1.5).tobytes())
        with pytest.raises(FormatError, match="outside"):
            read_pmap(path)

    def test_zero_dimension(self, tmp_path):
        path = tmp_path / "x.pmap"
        header = b"PMAP\x01" + (0).to_bytes(4, "little") + (1).to_bytes(4, "little")
        path.write_bytes(header)
        with pytest.raises(FormatError, match="dimensions"):
            read_pmap(path)

    def test_reads_produce_float64(self, tmp_path):
        path = tmp_path / "x.pmap"
        write_pmap(path, [[0.1, 0.9]])
        assert read_pmap(path).dtype == np.float64


class TestMaskPng:
    def test_round_trip_random_masks(self, tmp_path):
        rng = np.random.default_rng(77)
        for i in range(10):
            m = rng.random((rng.integers(1, 30), rng.integers(1, 30))) > 0.5
            path = tmp_path / f"m{i}.png"
            write_mask(path, m)
            np.testing.assert_array_equal(read_mask(path), m)

    def test_any_nonzero_is_foreground(self, tmp_path):
        from PIL import Image

        path = tmp_path / "one.png"
        Image.fromarray(np.array([[0, 1], [2, 255]], dtype=np.uint8), "L").save(path)
        np.testing.assert_array_equal(
            read_mask(path), [[False, True], [True, True]])

    def test_written_foreground_is_255(self, tmp_path):
        from PIL import Image

        path = tmp_path / "m.png"
        write_mask(path, [[True, False]])
        raw = np.asarray(Image.open(path))
        np.testing.assert_array_equal(raw, [[255, 0]])

    def test_rgb_input_rejected_as_mask(self, tmp_path):
        path = tmp_path / "rgb.png"
        write_rgb(path, np.zeros((2, 2, 3), dtype=np.uint8))
        with pytest.raises(FormatError, match="mode"):
            read_mask(path)

    def test_rgb_round_trip(self, tmp_path):
        rng = np.random.default_rng(78)
        img = rng.integers(0, 256, size=(9, 7, 3), dtype=np.uint8)
        path = tmp_path / "img.png"
        write_rgb(path, img)
        np.testing.assert_array_equal(read_rgb(path), img)

    def test_grayscale_rejected_as_rgb(self, tmp_path):
        path = tmp_path / "g.png"
        write_mask(path, [[True]])
        with pytest.raises(FormatError, match="RGB"):
            read_rgb(path)

    def test_not_a_png(self, tmp_path):
        path = tmp_path / "junk.png"
        path.write_bytes(b"definitely not a png")
        with pytest.raises(FormatError, match="readable"):
            read_mask(path)


class TestLabelAndRenderPng:
    def test_label_round_trip(self, tmp_path):
        labels = np.array([[0, 1, 2], [3, 0, 1]], dtype=np.int32)
        path = tmp_path / "labels.png"
        write_labels(path, labels)
        got = read_labels(path)
        assert got.dtype == np.int32
        np.testing.assert_array_equal(got, labels)

    def test_labels_must_fit_a_byte(self, tmp_path):
        with pytest.raises(DomainError):
            write_labels(tmp_path / "x.png", np.full((2, 2), 300))

    def test_pmap_render_rounds_half_up(self, tmp_path):
        from PIL import Image

        path = tmp_path / "r.png"
        # 0.5*255 + 0.5 = 128.0 exactly; 1/510 scales to exactly 0.5 -> 1
        write_pmap_png(path, [[0.0, 0.5, 1.0, 1.0 / 510.0]])
        raw = np.asarray(Image.open(path))
        np.testing.assert_array_equal(raw, [[0, 128, 255, 1]])


class TestManifest:
    def entry(self, **kw):
        base = dict(image_path="i.png", mask_path="m.png",
                    object_type="liver", group_id="v1")
        base.update(kw)
        return ManifestEntry(**base)

    def test_round_trip_order_and_content(self, tmp_path):
        entries = [
            self.entry(group_id="v1", modality="ct", site="abdomen",
                       description="slice 4"),
            self.entry(image_path="j.png", group_id="v2", split="train"),
            self.entry(image_path="k.png", group_id="v1",
                       extra={"source": "set9", "z": 3}),
        ]
        path = tmp_path / "m.jsonl"
        write_manifest(path, entries)
        assert read_manifest(path) == entries

    def test_unknown_fields_preserved(self, tmp_path):
        path = tmp_path / "m.jsonl"
        doc = {"image_path": "i.png", "mask_path": "m.png",
               "object_type": "liver", "group_id": "v1", "custom": [1, 2]}
        path.write_text(json.dumps(doc) + "\n")
        entries = read_manifest(path)
        assert entries[0].extra == {"custom": [1, 2]}
        write_manifest(path, entries)
        assert json.loads(path.read_text()) == doc

    def test_empty_file(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text("")
        assert read_manifest(path) == []

    def test_missing_field_names_line(self, tmp_path):
        path = tmp_path / "m.jsonl"
        good = json.dumps(entry_to_dict(self.entry()))
        bad = json.dumps({"image_path": "i.png", "object_type": "x",
                          "group_id": "v"})
        path.write_text(good + "\n" + bad + "\n")
        with pytest.raises(FormatError, match="line 2.*mask_path"):
            read_manifest(path)

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text("{broken\n")
        with pytest.raises(FormatError, match="line 1"):
            read_manifest(path)

    def test_empty_path_rejected(self):
        with pytest.raises(FormatError, match="non-empty"):
            self.entry(mask_path="")

    def test_bad_split_value(self):
        with pytest.raises(FormatError, match="split"):
            self.entry(split="validation")

    def test_validate_against_ontology(self):
        from bioparse.ontology import load_default_ontology

        ont = load_default_ontology()
        validate_manifest([self.entry(object_type="liver")], ont)
        with pytest.raises(FormatError, match="entry 0"):
            validate_manifest([self.entry(object_type="gizmo")], ont)
