"""Dataset persistence: one JSON manifest plus per-episode float32 blobs.

A blob is the episode's streams concatenated in the manifest's stream_order,
each raveled in C order and stored as little-endian 32-bit floats. The
manifest records the format version, modality and action schemas, stream
shapes, normalization stats, and the episode index, so a read can verify blob
lengths before reshaping. Round trips are bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .data import Dataset, Episode, EpisodeMeta, NormalizationStats, STREAM_NAMES
from .schema import ActionSchema, ModalitySchema, SchemaError
from .tactile import RegionLayout, default_region_layout

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"

FLOAT_DTYPE = np.dtype("<f4")


class StorageError(RuntimeError):
    """Unreadable or inconsistent on-disk artifact."""


def pack_arrays(arrays: list[np.ndarray]) -> bytes:
    return b"".join(np.ascontiguousarray(a, dtype=FLOAT_DTYPE).tobytes() for a in arrays)


def unpack_arrays(buf: bytes, shapes: list[tuple[int, ...]], source: str) -> list[np.ndarray]:
    expected = sum(int(np.prod(s, dtype=np.int64)) for s in shapes)
    flat = np.frombuffer(buf, dtype=FLOAT_DTYPE)
    if flat.size != expected:
        raise StorageError(f"{source}: expected {expected} floats, found {flat.size}")
    out = []
    offset = 0
    for shape in shapes:
        n = int(np.prod(shape, dtype=np.int64))
        out.append(flat[offset : offset + n].reshape(shape).astype(np.float32))
        offset += n
    return out


def _stream_shapes(schema: ModalitySchema, action_schema: ActionSchema) -> dict[str, tuple[int, ...]]:
    shapes = dict(schema.stream_shapes())
    shapes["actions"] = (action_schema.total_dim,)
    shapes["phase_ids"] = ()
    return shapes


def write_dataset(dataset: Dataset, directory: str | Path) -> Path:
    """Write manifest + blobs; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dataset.validate()
    if dataset.stats is None and dataset.episodes:
        dataset = dataset.with_stats()

    shapes = _stream_shapes(dataset.schema, dataset.action_schema)
    episode_entries = []
    for k, ep in enumerate(dataset.episodes):
        fname = f"ep_{k:04d}.bin"
        arrays = [ep.stream(name) for name in STREAM_NAMES]
        blob = pack_arrays(arrays)
        (directory / fname).write_bytes(blob)
        episode_entries.append(
            {
                "file": fname,
                "meta": ep.meta.to_dict(),
                "num_floats": len(blob) // FLOAT_DTYPE.itemsize,
            }
        )

    manifest = {
        "format_version": FORMAT_VERSION,
        "modality_schema": dataset.schema.to_dict(),
        "action_schema": dataset.action_schema.to_dict(),
        "region_layout": default_region_layout().to_dict(),
        "stream_order": list(STREAM_NAMES),
        "stream_shapes": {k: list(v) for k, v in shapes.items()},
        "normalization": dataset.stats.to_dict() if dataset.stats is not None else None,
        "episodes": episode_entries,
    }
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_dataset(directory: str | Path) -> Dataset:
    directory = Path(directory)
    path = directory / MANIFEST_NAME
    if not path.exists():
        raise StorageError(f"no {MANIFEST_NAME} in {directory}")
    manifest = json.loads(path.read_text())

    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise StorageError(f"unsupported format_version {version}, expected {FORMAT_VERSION}")

    schema = ModalitySchema.from_dict(manifest["modality_schema"])
    action_schema = ActionSchema.from_dict(manifest["action_schema"])
    order = manifest["stream_order"]
    if tuple(order) != STREAM_NAMES:
        raise SchemaError(f"unexpected stream_order {order}")
    declared = {k: tuple(v) for k, v in manifest["stream_shapes"].items()}
    expected = _stream_shapes(schema, action_schema)
    if declared != expected:
        raise SchemaError(
            f"manifest stream_shapes {declared} do not match schema-derived shapes {expected}"
        )
    # validates patch coverage of the 1062-taxel layout as a side effect
    RegionLayout.from_dict(manifest["region_layout"])

    episodes = []
    for entry in manifest["episodes"]:
        meta = EpisodeMeta.from_dict(entry["meta"])
        T = meta.length
        shapes = [(T, *expected[name]) for name in STREAM_NAMES]
        blob_path = directory / entry["file"]
        if not blob_path.exists():
            raise StorageError(f"missing blob {entry['file']}")
        buf = blob_path.read_bytes()
        if len(buf) != int(entry["num_floats"]) * FLOAT_DTYPE.itemsize:
            raise StorageError(
                f"{entry['file']}: size {len(buf)} bytes does not match manifest "
                f"({entry['num_floats']} floats)"
            )
        arrays = unpack_arrays(buf, shapes, entry["file"])
        episodes.append(Episode(meta, *arrays))

    stats = manifest.get("normalization")
    dataset = Dataset(
        schema=schema,
        action_schema=action_schema,
        episodes=episodes,
        stats=NormalizationStats.from_dict(stats) if stats is not None else None,
    )
    dataset.validate()
    return dataset
