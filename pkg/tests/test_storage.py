"""Dataset persistence: bit-exact round-trips and tamper detection."""

import json

import numpy as np
import pytest

from touchdream.data import STREAM_NAMES
from touchdream.schema import SchemaError
from touchdream.storage import StorageError, read_dataset, write_dataset


def _dir_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_round_trip_is_bit_exact(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    loaded = read_dataset(out)

    assert loaded.schema == tiny_dataset.schema
    assert loaded.action_schema == tiny_dataset.action_schema
    assert len(loaded.episodes) == len(tiny_dataset.episodes)
    for a, b in zip(tiny_dataset.episodes, loaded.episodes):
        assert a.meta == b.meta
        for name in STREAM_NAMES:
            ba, bb = a.stream(name).tobytes(), b.stream(name).tobytes()
            assert ba == bb, name

    # second write of the loaded dataset reproduces identical files
    out2 = tmp_path / "ds2"
    write_dataset(loaded, out2)
    assert _dir_bytes(out) == _dir_bytes(out2)


def test_manifest_carries_layout_and_stats(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["format_version"] == 1
    assert tuple(manifest["stream_order"]) == STREAM_NAMES
    assert "region_layout" in manifest
    assert "normalization" in manifest
    region_names = [r["name"] for r in manifest["region_layout"]["regions"]]
    assert region_names == ["thumb", "index", "middle", "ring", "pinky", "palm"]


def test_declared_shape_tamper_detected(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    path = out / "manifest.json"
    manifest = json.loads(path.read_text())
    manifest["stream_shapes"]["tactile"] = [2, 1000]
    path.write_text(json.dumps(manifest))
    with pytest.raises(SchemaError):
        read_dataset(out)


def test_unknown_format_version_rejected(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    path = out / "manifest.json"
    manifest = json.loads(path.read_text())
    manifest["format_version"] = 99
    path.write_text(json.dumps(manifest))
    with pytest.raises(StorageError):
        read_dataset(out)


def test_truncated_blob_rejected(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    blob = out / "ep_0000.bin"
    blob.write_bytes(blob.read_bytes()[:-8])
    with pytest.raises(StorageError):
        read_dataset(out)


def test_missing_blob_rejected(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    (out / "ep_0001.bin").unlink()
    with pytest.raises(StorageError):
        read_dataset(out)


def test_stats_survive_round_trip(tiny_dataset, tmp_path):
    out = tmp_path / "ds"
    write_dataset(tiny_dataset, out)
    loaded = read_dataset(out)
    assert loaded.stats is not None
    for name in loaded.stats.mean:
        assert np.array_equal(loaded.stats.mean[name], tiny_dataset.stats.mean[name])
        assert np.array_equal(loaded.stats.std[name], tiny_dataset.stats.std[name])
