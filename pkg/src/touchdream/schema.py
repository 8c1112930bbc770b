"""Observation and action schemas shared by the dataset, policy, and storage layers."""

from __future__ import annotations

from dataclasses import dataclass

# Each hand reports a fixed 1062-dimensional tactile frame; this is a sensor
# property, not a tunable.
TACTILE_DIM = 1062

IMAGE_VIEWS = ("head_left", "head_right", "wrist_left", "wrist_right")

ACTION_MODALITIES = ("end_effector", "torso", "velocity", "hand")

# Per-wrist pose target: 3 position + 6 continuous rotation (two matrix columns).
WRIST_POSE_DIM = 9
TORSO_DIM = 4      # roll, pitch, yaw, height
VELOCITY_DIM = 3   # v_x, v_y, omega_z


class SchemaError(ValueError):
    """An observation, action, or stored artifact violates its declared schema."""


@dataclass(frozen=True)
class ModalitySchema:
    """Shapes of every observation stream.

    Images are H x W x 3 rasters with unit-interval intensities; the four views
    share one resolution. Proprioceptive and force streams are flat vectors,
    tactile is one 1062-vector per hand.
    """

    image_size: int = 64
    body_dim: int = 29
    hand_joints: int = 6

    def __post_init__(self):
        if self.image_size < 8:
            raise SchemaError(f"image_size must be >= 8, got {self.image_size}")
        if self.body_dim < 1 or self.hand_joints < 1:
            raise SchemaError("body_dim and hand_joints must be positive")

    @property
    def image_shape(self) -> tuple[int, int, int]:
        return (self.image_size, self.image_size, 3)

    @property
    def hand_dim(self) -> int:
        """Joint count over both hands."""
        return 2 * self.hand_joints

    @property
    def tactile_dim(self) -> int:
        return TACTILE_DIM

    def stream_shapes(self) -> dict[str, tuple[int, ...]]:
        """Per-timestep shape of every stored stream, in storage order."""
        return {
            "images": (len(IMAGE_VIEWS),) + self.image_shape,
            "body_q": (self.body_dim,),
            "hand_q": (self.hand_dim,),
            "hand_force": (self.hand_dim,),
            "tactile": (2, TACTILE_DIM),
        }

    def to_dict(self) -> dict:
        return {
            "image_size": self.image_size,
            "body_dim": self.body_dim,
            "hand_joints": self.hand_joints,
            "tactile_dim": TACTILE_DIM,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModalitySchema":
        if d.get("tactile_dim", TACTILE_DIM) != TACTILE_DIM:
            raise SchemaError(
                f"tactile_dim is fixed at {TACTILE_DIM}, manifest declares {d.get('tactile_dim')}"
            )
        return cls(
            image_size=int(d["image_size"]),
            body_dim=int(d["body_dim"]),
            hand_joints=int(d["hand_joints"]),
        )


@dataclass(frozen=True)
class ActionSchema:
    """Layout of the flat action vector and the prediction horizons.

    The action vector concatenates, in order: end-effector pose targets for
    both wrists, torso pose targets, base velocity commands, and per-joint
    hand actions. Each group is decoded by its own expert head.
    """

    hand_joints: int = 6
    chunk_horizon: int = 8
    dream_horizon: int = 8

    def __post_init__(self):
        if self.chunk_horizon < 1 or self.dream_horizon < 1:
            raise SchemaError("chunk_horizon and dream_horizon must be >= 1")
        if self.hand_joints < 1:
            raise SchemaError("hand_joints must be positive")

    @property
    def end_effector_dim(self) -> int:
        return 2 * WRIST_POSE_DIM

    @property
    def torso_dim(self) -> int:
        return TORSO_DIM

    @property
    def velocity_dim(self) -> int:
        return VELOCITY_DIM

    @property
    def hand_dim(self) -> int:
        return 2 * self.hand_joints

    def modality_dims(self) -> dict[str, int]:
        return {
            "end_effector": self.end_effector_dim,
            "torso": self.torso_dim,
            "velocity": self.velocity_dim,
            "hand": self.hand_dim,
        }

    def modality_slices(self) -> dict[str, slice]:
        slices = {}
        start = 0
        for name in ACTION_MODALITIES:
            dim = self.modality_dims()[name]
            slices[name] = slice(start, start + dim)
            start += dim
        return slices

    @property
    def total_dim(self) -> int:
        return sum(self.modality_dims().values())

    def to_dict(self) -> dict:
        return {
            "hand_joints": self.hand_joints,
            "chunk_horizon": self.chunk_horizon,
            "dream_horizon": self.dream_horizon,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ActionSchema":
        return cls(
            hand_joints=int(d["hand_joints"]),
            chunk_horizon=int(d["chunk_horizon"]),
            dream_horizon=int(d["dream_horizon"]),
        )
