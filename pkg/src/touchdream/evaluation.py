"""Offline evaluation of trained policies.

Dream traces replay a recorded episode open-loop: every `stride` steps the
policy sees the recorded observation and dreams tau future force and tactile
steps, which are aligned against the recorded futures (most recent chunk wins
where dreams overlap). Force errors are reported in raw (denormalized) units.
Latent similarity uses 1/(1 + L2 distance), bounded in (0, 1] and equal to 1
only for identical latents.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .data import Dataset, Episode, NormalizationStats
from .schema import SchemaError
from .tactile import NUM_REGIONS, REGION_ORDER, TactileEncoder

HANDS = ("left", "right")


@dataclass
class DreamTrace:
    """Aligned dreamed-vs-recorded series over one episode.

    All arrays share leading length N = number of covered timesteps; `steps`
    holds the absolute episode timestep of each row. Latent rows hold 12
    region vectors, hand-major (left thumb..palm, then right).
    """

    steps: np.ndarray            # (N,) absolute timesteps
    pred_force: np.ndarray       # (N, 2*J_h), raw units
    true_force: np.ndarray       # (N, 2*J_h), raw units
    pred_latents: np.ndarray     # (N, 12, d_z)
    teacher_latents: np.ndarray  # (N, 12, d_z)
    force_mae_per_hand: dict[str, float]
    similarity: np.ndarray       # (N, 12) per-region latent similarity

    def region_index(self, selector: str) -> int:
        """Map 'left.index'-style selectors to a latent row index."""
        try:
            hand, region = selector.split(".")
            return HANDS.index(hand) * NUM_REGIONS + REGION_ORDER.index(region)
        except (ValueError, IndexError):
            raise SchemaError(
                f"bad region selector {selector!r}; expected '<hand>.<region>' with "
                f"hand in {HANDS} and region in {REGION_ORDER}"
            ) from None


def force_mae(pred: np.ndarray, target: np.ndarray) -> dict[str, float]:
    """Mean absolute error per hand over (N, 2*J_h) series."""
    pred, target = np.asarray(pred), np.asarray(target)
    if pred.shape != target.shape:
        raise SchemaError(f"force shapes differ: {pred.shape} vs {target.shape}")
    J = pred.shape[-1] // 2
    err = np.abs(pred - target)
    return {"left": float(err[..., :J].mean()), "right": float(err[..., J:].mean())}


def latent_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """1 / (1 + ||a - b||_2); 1 iff identical, decreasing in distance."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise SchemaError(f"latent shapes differ: {a.shape} vs {b.shape}")
    return float(1.0 / (1.0 + np.linalg.norm(a - b)))


def _observation_at(episode: Episode, t: int, stats: NormalizationStats) -> dict[str, torch.Tensor]:
    return {
        "images": torch.from_numpy(episode.images[t][None]),
        "body_q": torch.from_numpy(stats.normalize("body_q", episode.body_q[t])[None]),
        "hand_q": torch.from_numpy(stats.normalize("hand_q", episode.hand_q[t])[None]),
        "hand_force": torch.from_numpy(stats.normalize("hand_force", episode.hand_force[t])[None]),
        "tactile": torch.from_numpy(stats.normalize("tactile", episode.tactile[t])[None]),
    }


def encode_episode_latents(
    encoder: TactileEncoder,
    episode: Episode,
    stats: NormalizationStats,
    steps: np.ndarray,
) -> np.ndarray:
    """Teacher/student latents for the given steps -> (N, 12, d_z), hand-major."""
    frames = stats.normalize("tactile", episode.tactile[steps])  # (N, 2, 1062)
    flat = torch.from_numpy(frames.reshape(-1, frames.shape[-1]))
    with torch.no_grad():
        lat = encoder(flat)  # (N*2, 6, d_z)
    return lat.reshape(len(steps), 2 * NUM_REGIONS, -1).numpy()


def rollout_dream_trace(
    policy,
    teacher: TactileEncoder,
    episode: Episode,
    stats: NormalizationStats,
    stride: int = 1,
) -> DreamTrace:
    """Open-loop dreamed force/latent series against the recorded episode."""
    tau = policy.config.tau
    T = episode.length
    if T <= tau:
        raise SchemaError(f"episode length {T} too short for dream horizon {tau}")
    if stride < 1:
        raise SchemaError("stride must be >= 1")

    d_z = policy.config.latent_dim
    hand_dim = episode.hand_force.shape[-1]
    pred_force_full = np.zeros((T, hand_dim), dtype=np.float64)
    pred_lat_full = np.zeros((T, 2 * NUM_REGIONS, d_z), dtype=np.float64)
    covered = np.zeros(T, dtype=bool)

    with torch.no_grad():
        for t in range(0, T - tau, stride):
            obs = _observation_at(episode, t, stats)
            out = policy.forward(obs, with_dreams=True)
            if out.force is None or out.tactile_latents is None:
                raise SchemaError("policy produced no dream outputs; need dream_mode='latent'")
            force = stats.denormalize("hand_force", out.force[0].numpy())
            future = np.arange(t + 1, t + 1 + tau)
            pred_force_full[future] = force
            pred_lat_full[future] = out.tactile_latents[0].numpy()
            covered[future] = True

    steps = np.flatnonzero(covered)
    pred_force = pred_force_full[steps]
    true_force = episode.hand_force[steps].astype(np.float64)
    pred_lat = pred_lat_full[steps]
    teach_lat = encode_episode_latents(teacher, episode, stats, steps).astype(np.float64)

    diff = np.linalg.norm(pred_lat - teach_lat, axis=-1)  # (N, 12)
    similarity = 1.0 / (1.0 + diff)
    return DreamTrace(
        steps=steps,
        pred_force=pred_force,
        true_force=true_force,
        pred_latents=pred_lat,
        teacher_latents=teach_lat,
        force_mae_per_hand=force_mae(pred_force, true_force),
        similarity=similarity,
    )


def write_trace_csv(trace: DreamTrace, path: str | Path) -> Path:
    """Per-step force and similarity series in one delimited file."""
    path = Path(path)
    hand_dim = trace.pred_force.shape[-1]
    header = (
        ["step"]
        + [f"pred_force_{i}" for i in range(hand_dim)]
        + [f"true_force_{i}" for i in range(hand_dim)]
        + [f"similarity_{h}.{r}" for h in HANDS for r in REGION_ORDER]
    )
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i, step in enumerate(trace.steps):
            row = [int(step)]
            row += [f"{v:.9g}" for v in trace.pred_force[i]]
            row += [f"{v:.9g}" for v in trace.true_force[i]]
            row += [f"{v:.9g}" for v in trace.similarity[i]]
            writer.writerow(row)
    return path


def export_latent_heatmap(
    latent: np.ndarray,
    path_base: str | Path,
    grid: tuple[int, int] | None = None,
    scale: int = 32,
) -> tuple[Path, Path]:
    """Write one latent as a min-max-normalized raster (PNG) plus a raw-value CSV.

    A constant latent has no range to normalize over and renders mid-gray.
    Returns (png_path, csv_path).
    """
    latent = np.asarray(latent, dtype=np.float32).ravel()
    if grid is None:
        # most-square exact factorization, so any latent size renders
        rows = int(np.sqrt(latent.size))
        while rows > 1 and latent.size % rows != 0:
            rows -= 1
        grid = (rows, latent.size // rows)
    rows, cols = grid
    if rows * cols != latent.size:
        raise SchemaError(f"latent of size {latent.size} does not fill a {rows}x{cols} grid")
    values = latent.reshape(rows, cols)

    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        norm = (values - lo) / (hi - lo)
    else:
        norm = np.full_like(values, 0.5)
    raster = np.kron(norm, np.ones((scale, scale)))
    img = Image.fromarray((raster * 255.0).round().astype(np.uint8), mode="L")

    base = Path(path_base)
    # suffixes are appended, not substituted: selector-style base names
    # ("dream_left.index_00004") contain dots that are not file extensions
    png_path = base.parent / (base.name + ".png")
    csv_path = base.parent / (base.name + ".csv")
    img.save(png_path)
    np.savetxt(csv_path, values, delimiter=",", fmt="%.9g")
    return png_path, csv_path


def contact_latent_separation(
    encoder: TactileEncoder,
    dataset: Dataset,
    max_steps_per_episode: int | None = None,
) -> float:
    """Contact-vs-no-contact separation of latents, averaged over regions.

    For every step we encode both hands (12 region latents) and split steps by
    the episode's scripted contact flag; the metric is the mean over regions
    of the squared distance between the two group means. Collapsed encoders
    score near zero.
    """
    stats = dataset.with_stats().stats
    assert stats is not None
    contact_groups: list[np.ndarray] = []
    flags: list[np.ndarray] = []
    for ep in dataset.episodes:
        steps = np.arange(ep.length)
        if max_steps_per_episode is not None and ep.length > max_steps_per_episode:
            steps = np.linspace(0, ep.length - 1, max_steps_per_episode).astype(int)
        contact_groups.append(encode_episode_latents(encoder, ep, stats, steps))
        flags.append(ep.contact_mask()[steps])
    latents = np.concatenate(contact_groups, axis=0)  # (N, 12, d_z)
    mask = np.concatenate(flags)
    if not mask.any() or mask.all():
        raise SchemaError("dataset must contain both contact and no-contact steps")
    mean_contact = latents[mask].mean(axis=0)     # (12, d_z)
    mean_free = latents[~mask].mean(axis=0)
    per_region = np.sum((mean_contact - mean_free) ** 2, axis=-1)
    return float(per_region.mean())


REPORT_COLUMNS = (
    "variant", "final_total", "final_bc", "final_force", "final_tactile",
    "force_mae_left", "force_mae_right", "similarity_mean", "similarity_min",
    "collapse_separation",
)


def ablation_report(runs: dict[str, dict[str, float]], expected: tuple[str, ...] = ()) -> str:
    """Tab-delimited comparison table over training-variant summaries.

    `runs` maps variant name to a flat dict of scalars (missing scalars render
    as empty cells). Expected-but-missing variants are listed in a trailing
    note instead of failing.
    """
    lines = ["\t".join(REPORT_COLUMNS)]
    for name in sorted(runs):
        row = [name]
        for col in REPORT_COLUMNS[1:]:
            val = runs[name].get(col)
            row.append("" if val is None else f"{val:.6g}")
        lines.append("\t".join(row))
    missing = [v for v in expected if v not in runs]
    if missing:
        lines.append(f"# missing variants: {', '.join(missing)}")
    return "\n".join(lines) + "\n"
