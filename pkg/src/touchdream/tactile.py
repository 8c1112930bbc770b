"""Per-region tactile encoding.

Each hand's 1062-vector decomposes into six anatomical regions -- thumb, four
fingers, palm -- covering 17 rectangular sensor patches in total. A region is
encoded by per-patch CNN branches (depth chosen by patch size), adaptive 2x2
pooling, and an MLP fusing the pooled features into one latent vector. The
same encoder architecture doubles as the slowly-updated target encoder that
supplies stop-gradient latents for future-touch supervision.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn

from .schema import TACTILE_DIM, SchemaError

REGION_ORDER = ("thumb", "index", "middle", "ring", "pinky", "palm")
NUM_REGIONS = len(REGION_ORDER)

# Patches with at most this many taxels go through a single conv layer,
# larger ones through a two-layer block.
SMALL_PATCH_MAX_ELEMS = 50


@dataclass(frozen=True)
class PatchSpec:
    """One rectangular sensor patch: its grid shape and slice into the raw vector."""

    name: str
    rows: int
    cols: int
    offset: int

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def stop(self) -> int:
        return self.offset + self.size

    def to_dict(self) -> dict:
        return {"name": self.name, "rows": self.rows, "cols": self.cols, "offset": self.offset}


@dataclass(frozen=True)
class RegionSpec:
    name: str
    patches: tuple[PatchSpec, ...]

    @property
    def size(self) -> int:
        return sum(p.size for p in self.patches)


@dataclass(frozen=True)
class RegionLayout:
    """Ordered region/patch decomposition of one hand's 1062 taxels.

    Regions appear in REGION_ORDER and their patches cover [0, 1062)
    contiguously and disjointly.
    """

    regions: tuple[RegionSpec, ...]

    def __post_init__(self):
        names = tuple(r.name for r in self.regions)
        if names != REGION_ORDER:
            raise SchemaError(f"regions must be ordered {REGION_ORDER}, got {names}")
        patches = self.all_patches()
        covered = 0
        for p in patches:
            if p.offset != covered:
                raise SchemaError(f"patch {p.name} starts at {p.offset}, expected {covered}")
            covered = p.stop
        if covered != TACTILE_DIM:
            raise SchemaError(f"patches cover {covered} taxels, expected {TACTILE_DIM}")

    def all_patches(self) -> tuple[PatchSpec, ...]:
        return tuple(p for r in self.regions for p in r.patches)

    @property
    def patch_count(self) -> int:
        return len(self.all_patches())

    def region(self, name: str) -> RegionSpec:
        for r in self.regions:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "regions": [
                {"name": r.name, "patches": [p.to_dict() for p in r.patches]}
                for r in self.regions
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegionLayout":
        regions = tuple(
            RegionSpec(
                name=r["name"],
                patches=tuple(
                    PatchSpec(
                        name=p["name"],
                        rows=int(p["rows"]),
                        cols=int(p["cols"]),
                        offset=int(p["offset"]),
                    )
                    for p in r["patches"]
                ),
            )
            for d_r in [d["regions"]]
            for r in d_r
        )
        return cls(regions=regions)


def default_region_layout() -> RegionLayout:
    """The default per-hand layout.

    Regular fingers carry 185 taxels in three patches (tip 5x7, top 5x10,
    palm-facing 10x10), the thumb carries 210 in four (extra 5x5 mid patch),
    and the palm is a single 8x14 patch of 112. Totals: 4x185 + 210 + 112 =
    1062 over 17 patches.
    """
    finger_patches = (("tip", 5, 7), ("top", 5, 10), ("palm_facing", 10, 10))
    thumb_patches = (("tip", 5, 7), ("top", 5, 10), ("mid", 5, 5), ("palm_facing", 10, 10))
    palm_patches = (("surface", 8, 14),)

    regions = []
    offset = 0
    for region_name in REGION_ORDER:
        if region_name == "thumb":
            shapes = thumb_patches
        elif region_name == "palm":
            shapes = palm_patches
        else:
            shapes = finger_patches
        patches = []
        for patch_name, rows, cols in shapes:
            patches.append(
                PatchSpec(name=f"{region_name}.{patch_name}", rows=rows, cols=cols, offset=offset)
            )
            offset += rows * cols
        regions.append(RegionSpec(name=region_name, patches=tuple(patches)))
    return RegionLayout(regions=tuple(regions))


def decompose_hand_tactile(raw: np.ndarray, layout: RegionLayout) -> dict[str, list[np.ndarray]]:
    """Split one hand's raw tactile vector into per-region lists of 2-D patch maps."""
    raw = np.asarray(raw)
    if raw.shape != (TACTILE_DIM,):
        raise SchemaError(f"raw tactile must have shape ({TACTILE_DIM},), got {raw.shape}")
    out: dict[str, list[np.ndarray]] = {}
    for region in layout.regions:
        out[region.name] = [
            raw[p.offset : p.stop].reshape(p.rows, p.cols) for p in region.patches
        ]
    return out


def reassemble_hand_tactile(patches: dict[str, list[np.ndarray]], layout: RegionLayout) -> np.ndarray:
    """Inverse of decompose_hand_tactile; exact for matching layouts."""
    raw = np.empty(TACTILE_DIM, dtype=np.result_type(*[p.dtype for ps in patches.values() for p in ps]))
    for region in layout.regions:
        maps = patches[region.name]
        if len(maps) != len(region.patches):
            raise SchemaError(f"region {region.name}: expected {len(region.patches)} patches")
        for spec, patch in zip(region.patches, maps):
            if patch.shape != (spec.rows, spec.cols):
                raise SchemaError(
                    f"patch {spec.name}: expected shape {(spec.rows, spec.cols)}, got {patch.shape}"
                )
            raw[spec.offset : spec.stop] = np.asarray(patch).reshape(-1)
    return raw


class PatchBranch(nn.Module):
    """CNN branch for one patch: 1 conv layer for small patches, 2 for large."""

    def __init__(self, spec: PatchSpec, channels: int):
        super().__init__()
        self.spec = spec
        layers = [nn.Conv2d(1, channels, kernel_size=3, padding=1), nn.ReLU()]
        if spec.size > SMALL_PATCH_MAX_ELEMS:
            layers += [nn.Conv2d(channels, channels, kernel_size=3, padding=1), nn.ReLU()]
        layers.append(nn.AdaptiveAvgPool2d((2, 2)))
        self.net = nn.Sequential(*layers)
        self.out_dim = channels * 4

    def forward(self, patch: torch.Tensor) -> torch.Tensor:
        # patch: (B, rows, cols) -> (B, channels*4)
        if patch.shape[1:] != (self.spec.rows, self.spec.cols):
            raise SchemaError(
                f"patch {self.spec.name}: expected {(self.spec.rows, self.spec.cols)}, "
                f"got {tuple(patch.shape[1:])}"
            )
        feat = self.net(patch.unsqueeze(1))
        return feat.flatten(1)


class RegionEncoder(nn.Module):
    """Encodes one region's patches into a single latent vector."""

    def __init__(self, region: RegionSpec, latent_dim: int, channels: int, fusion_hidden: int):
        super().__init__()
        self.region = region
        self.branches = nn.ModuleList(PatchBranch(p, channels) for p in region.patches)
        fused_in = sum(b.out_dim for b in self.branches)
        self.fusion = nn.Sequential(
            nn.Linear(fused_in, fusion_hidden),
            nn.ReLU(),
            nn.Linear(fusion_hidden, latent_dim),
        )

    def forward(self, patches: list[torch.Tensor]) -> torch.Tensor:
        if len(patches) != len(self.branches):
            raise SchemaError(
                f"region {self.region.name}: expected {len(self.branches)} patches, got {len(patches)}"
            )
        feats = [branch(p) for branch, p in zip(self.branches, patches)]
        return self.fusion(torch.cat(feats, dim=-1))


class TactileEncoder(nn.Module):
    """Maps one hand's raw 1062-vector to six per-region latent vectors.

    Region latents come out in REGION_ORDER. The encoder is shared between
    hands; callers apply it to each hand's vector separately.
    """

    def __init__(
        self,
        layout: RegionLayout | None = None,
        latent_dim: int = 64,
        channels: int = 8,
        fusion_hidden: int = 128,
    ):
        super().__init__()
        self.layout = layout if layout is not None else default_region_layout()
        self.latent_dim = latent_dim
        self.regions = nn.ModuleList(
            RegionEncoder(r, latent_dim, channels, fusion_hidden) for r in self.layout.regions
        )

    def split_patches(self, raw: torch.Tensor) -> list[list[torch.Tensor]]:
        """Batched equivalent of decompose_hand_tactile: per-region lists of (B, r, c) maps."""
        if raw.shape[-1] != TACTILE_DIM:
            raise SchemaError(f"raw tactile must have last dim {TACTILE_DIM}, got {raw.shape[-1]}")
        out = []
        for region in self.layout.regions:
            out.append(
                [
                    raw[..., p.offset : p.stop].reshape(*raw.shape[:-1], p.rows, p.cols)
                    for p in region.patches
                ]
            )
        return out

    def forward(self, raw: torch.Tensor) -> torch.Tensor:
        # raw: (B, 1062) -> (B, 6, latent_dim)
        per_region = self.split_patches(raw)
        latents = [enc(patches) for enc, patches in zip(self.regions, per_region)]
        return torch.stack(latents, dim=1)

    def encode_region(self, name: str, patches: list[torch.Tensor]) -> torch.Tensor:
        idx = REGION_ORDER.index(name)
        return self.regions[idx](patches)


def make_teacher(student: TactileEncoder) -> TactileEncoder:
    """A frozen copy of the student encoder, initialized parameter-equal."""
    teacher = copy.deepcopy(student)
    for p in teacher.parameters():
        p.requires_grad_(False)
    teacher.eval()
    return teacher


def teacher_encode(teacher: TactileEncoder, raw: torch.Tensor) -> torch.Tensor:
    """Encode with the target network; the result carries no gradient graph."""
    with torch.no_grad():
        return teacher(raw)


def ema_update(teacher: nn.Module, student: nn.Module, decay: float) -> None:
    """In-place teacher <- decay * teacher + (1 - decay) * student, elementwise.

    Both multiplications happen explicitly before the add so tests can
    reproduce the arithmetic bit-for-bit.
    """
    if not 0.0 < decay < 1.0:
        raise ValueError(f"decay must lie in (0, 1), got {decay}")
    t_params = dict(teacher.named_parameters())
    s_params = dict(student.named_parameters())
    if t_params.keys() != s_params.keys():
        raise ValueError("teacher and student parameter sets do not match")
    with torch.no_grad():
        for name, t in t_params.items():
            s = s_params[name]
            if t.shape != s.shape:
                raise ValueError(f"shape mismatch for {name}: {t.shape} vs {s.shape}")
            t.copy_(decay * t + (1.0 - decay) * s)
