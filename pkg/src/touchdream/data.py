"""Demonstration episodes, normalization, and training-batch sampling.

An episode is a set of equal-length streams: multi-view images, body and hand
proprioception, per-joint hand forces, two-hand tactile frames, executed
actions, and the scripted phase id of each step. A training sample pairs the
observation at step t with strictly-future targets: the action chunk
a_{t+1..t+h}, forces f_{t+1..t+tau}, and tactile frames s_{t+1..t+tau}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from .schema import ActionSchema, ModalitySchema, SchemaError, TACTILE_DIM

# Stream storage order inside episode blobs. phase_ids is float32 like the
# rest so a blob is one homogeneous array.
STREAM_NAMES = ("images", "body_q", "hand_q", "hand_force", "tactile", "actions", "phase_ids")

# Streams that get per-channel normalization (images stay unit-interval).
NORMALIZED_STREAMS = ("body_q", "hand_q", "hand_force", "tactile", "actions")

PHASE_NAMES = ("approach", "contact", "grasp", "transport", "release")
CONTACT_PHASES = frozenset({1, 2, 3})  # contact, grasp, transport

STD_FLOOR = 1e-6


@dataclass(frozen=True)
class EpisodeMeta:
    episode_id: str
    scenario: str
    seed: int
    length: int
    phase_bounds: dict[str, tuple[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "episode_id": self.episode_id,
            "scenario": self.scenario,
            "seed": self.seed,
            "length": self.length,
            "phase_bounds": {k: [int(a), int(b)] for k, (a, b) in self.phase_bounds.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EpisodeMeta":
        return cls(
            episode_id=str(d["episode_id"]),
            scenario=str(d["scenario"]),
            seed=int(d["seed"]),
            length=int(d["length"]),
            phase_bounds={k: (int(v[0]), int(v[1])) for k, v in d.get("phase_bounds", {}).items()},
        )


@dataclass
class Episode:
    """One demonstration. All streams share leading length T."""

    meta: EpisodeMeta
    images: np.ndarray      # (T, 4, H, W, 3) float32, values in [0, 1]
    body_q: np.ndarray      # (T, body_dim) float32
    hand_q: np.ndarray      # (T, 2*J_h) float32
    hand_force: np.ndarray  # (T, 2*J_h) float32
    tactile: np.ndarray     # (T, 2, 1062) float32
    actions: np.ndarray     # (T, action_dim) float32
    phase_ids: np.ndarray   # (T,) float32 with integer values indexing PHASE_NAMES

    @property
    def length(self) -> int:
        return self.images.shape[0]

    def stream(self, name: str) -> np.ndarray:
        if name not in STREAM_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def contact_mask(self) -> np.ndarray:
        """Boolean per-step flag: True while any scripted contact phase is active."""
        ids = self.phase_ids.astype(np.int64)
        return np.isin(ids, list(CONTACT_PHASES))

    def validate(self, schema: ModalitySchema, action_schema: ActionSchema) -> None:
        T = self.length
        if self.meta.length != T:
            raise SchemaError(f"meta length {self.meta.length} != stream length {T}")
        expected = dict(schema.stream_shapes())
        expected["actions"] = (action_schema.total_dim,)
        expected["phase_ids"] = ()
        for name in STREAM_NAMES:
            arr = self.stream(name)
            if arr.shape != (T, *expected[name]):
                raise SchemaError(
                    f"stream {name}: expected shape {(T, *expected[name])}, got {arr.shape}"
                )
            if arr.dtype != np.float32:
                raise SchemaError(f"stream {name}: expected float32, got {arr.dtype}")
        if self.tactile.shape[-1] != TACTILE_DIM:
            raise SchemaError(f"tactile last dim must be {TACTILE_DIM}")


@dataclass
class Dataset:
    schema: ModalitySchema
    action_schema: ActionSchema
    episodes: list[Episode]
    stats: "NormalizationStats | None" = None

    def validate(self) -> None:
        for ep in self.episodes:
            ep.validate(self.schema, self.action_schema)

    def with_stats(self) -> "Dataset":
        if self.stats is None:
            self.stats = NormalizationStats.from_episodes(self.episodes)
        return self


class NormalizationStats:
    """Per-channel mean/std for the non-image streams.

    Tactile statistics are pooled across hands so each taxel has one (mean,
    std) pair and the shared hand encoder sees hand-agnostic inputs. Stds are
    floored at 1e-6 at computation time, before any division.
    """

    def __init__(self, mean: dict[str, np.ndarray], std: dict[str, np.ndarray]):
        if set(mean) != set(NORMALIZED_STREAMS) or set(std) != set(NORMALIZED_STREAMS):
            raise SchemaError(f"stats must cover exactly {NORMALIZED_STREAMS}")
        self.mean = {k: np.asarray(v, dtype=np.float32) for k, v in mean.items()}
        self.std = {k: np.asarray(v, dtype=np.float32) for k, v in std.items()}
        for k in NORMALIZED_STREAMS:
            if self.mean[k].shape != self.std[k].shape:
                raise SchemaError(f"stats {k}: mean/std shape mismatch")
            if np.any(self.std[k] < STD_FLOOR):
                raise SchemaError(f"stats {k}: std below floor {STD_FLOOR}")

    @classmethod
    def from_episodes(cls, episodes: list[Episode]) -> "NormalizationStats":
        if not episodes:
            raise SchemaError("cannot compute stats from an empty episode list")
        mean: dict[str, np.ndarray] = {}
        std: dict[str, np.ndarray] = {}
        for name in NORMALIZED_STREAMS:
            stacked = np.concatenate([ep.stream(name) for ep in episodes], axis=0)
            if name == "tactile":
                stacked = stacked.reshape(-1, TACTILE_DIM)
            stacked = stacked.astype(np.float64)
            mean[name] = stacked.mean(axis=0).astype(np.float32)
            std[name] = np.maximum(stacked.std(axis=0), STD_FLOOR).astype(np.float32)
        return cls(mean, std)

    def normalize(self, name: str, x: np.ndarray) -> np.ndarray:
        return ((np.asarray(x) - self.mean[name]) / self.std[name]).astype(np.float32)

    def denormalize(self, name: str, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x) * self.std[name] + self.mean[name]).astype(np.float32)

    def to_dict(self) -> dict:
        return {
            "mean": {k: v.tolist() for k, v in self.mean.items()},
            "std": {k: v.tolist() for k, v in self.std.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationStats":
        return cls(
            mean={k: np.asarray(v, dtype=np.float32) for k, v in d["mean"].items()},
            std={k: np.asarray(v, dtype=np.float32) for k, v in d["std"].items()},
        )


def valid_start_indices(length: int, h: int, tau: int) -> np.ndarray:
    """Start steps t (0-indexed) whose futures t+1 .. t+max(h, tau) all exist."""
    horizon = max(h, tau)
    if length <= horizon:
        return np.empty(0, dtype=np.int64)
    return np.arange(0, length - horizon, dtype=np.int64)


def sample_training_batch(
    dataset: Dataset,
    batch_size: int,
    h: int,
    tau: int,
    rng: np.random.Generator,
) -> dict[str, torch.Tensor]:
    """Draw a batch uniformly over all valid (episode, t) pairs.

    Returns normalized torch tensors: the observation streams at step t plus
    targets action_chunk (B, h, A), future_force (B, tau, 2*J_h) and
    future_tactile (B, tau, 2, 1062).
    """
    stats = dataset.with_stats().stats
    assert stats is not None
    per_ep = [valid_start_indices(ep.length, h, tau) for ep in dataset.episodes]
    counts = np.array([len(v) for v in per_ep], dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        raise SchemaError(f"no valid start index for h={h}, tau={tau} in any episode")
    flat = rng.integers(0, total, size=batch_size)
    offsets = np.concatenate([[0], np.cumsum(counts)])

    out: dict[str, list[np.ndarray]] = {
        "images": [], "body_q": [], "hand_q": [], "hand_force": [], "tactile": [],
        "action_chunk": [], "future_force": [], "future_tactile": [],
    }
    for idx in flat:
        ep_idx = int(np.searchsorted(offsets, idx, side="right") - 1)
        ep = dataset.episodes[ep_idx]
        t = int(per_ep[ep_idx][idx - offsets[ep_idx]])
        out["images"].append(ep.images[t])
        out["body_q"].append(stats.normalize("body_q", ep.body_q[t]))
        out["hand_q"].append(stats.normalize("hand_q", ep.hand_q[t]))
        out["hand_force"].append(stats.normalize("hand_force", ep.hand_force[t]))
        out["tactile"].append(stats.normalize("tactile", ep.tactile[t]))
        out["action_chunk"].append(stats.normalize("actions", ep.actions[t + 1 : t + 1 + h]))
        out["future_force"].append(stats.normalize("hand_force", ep.hand_force[t + 1 : t + 1 + tau]))
        out["future_tactile"].append(stats.normalize("tactile", ep.tactile[t + 1 : t + 1 + tau]))
    return {k: torch.from_numpy(np.stack(v)) for k, v in out.items()}
