"""Loss kernels for behavioral cloning with touch dreaming.

All regression terms share one smooth-L1 (Huber) kernel with transition
point delta: quadratic r^2/(2*delta) for |r| <= delta, linear |r| - delta/2
beyond. The tactile dream loss compares region-level latent vectors with a
cosine direction term plus a Huber norm-matching term weighted by beta; the
norm matching keeps predictions from collapsing onto a fixed-magnitude
sphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .schema import SchemaError

NORM_EPS = 1e-8


def _check_shapes(pred: torch.Tensor, target: torch.Tensor, what: str) -> None:
    if pred.shape != target.shape:
        raise SchemaError(f"{what}: prediction shape {tuple(pred.shape)} != target {tuple(target.shape)}")


def huber(residual: torch.Tensor, delta: float) -> torch.Tensor:
    """Elementwise smooth L1 with transition delta."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    abs_r = residual.abs()
    return torch.where(abs_r <= delta, residual * residual / (2.0 * delta), abs_r - delta / 2.0)


def bc_loss(pred: torch.Tensor, target: torch.Tensor, delta: float = 1.0) -> torch.Tensor:
    """Mean smooth L1 over a (B, h, dim) action chunk for one modality."""
    _check_shapes(pred, target, "bc_loss")
    return huber(pred - target, delta).mean()


def force_loss(pred: torch.Tensor, target: torch.Tensor, delta: float = 1.0) -> torch.Tensor:
    """Mean smooth L1 over a (B, tau, 2*J_h) dreamed-force sequence."""
    _check_shapes(pred, target, "force_loss")
    return huber(pred - target, delta).mean()


def tactile_dream_loss(
    pred: torch.Tensor,
    target: torch.Tensor,
    beta: float = 0.5,
    delta: float = 1.0,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Latent dream loss over (..., d_z) region latents.

    Returns (total, direction, magnitude) where
    total = mean(1 - cos) + beta * mean(huber(|pred| - |target|)), the means
    running over every region latent (samples x steps x regions). A small
    epsilon is added to both norms in the cosine so near-zero latents stay
    finite.
    """
    _check_shapes(pred, target, "tactile_dream_loss")
    if pred.shape[-1] < 1:
        raise SchemaError("latents must have a nonempty last dimension")
    dot = (pred * target).sum(dim=-1)
    pred_norm = torch.linalg.vector_norm(pred, dim=-1)
    target_norm = torch.linalg.vector_norm(target, dim=-1)
    cos = dot / ((pred_norm + NORM_EPS) * (target_norm + NORM_EPS))
    direction = (1.0 - cos).mean()
    magnitude = huber(pred_norm - target_norm, delta).mean()
    return direction + beta * magnitude, direction, magnitude


@dataclass
class LossBreakdown:
    """All loss terms of one batch; `total` is the term used for backward."""

    action: dict[str, torch.Tensor]   # per action modality
    bc_total: torch.Tensor
    force: torch.Tensor
    tactile: torch.Tensor
    tactile_direction: torch.Tensor
    tactile_magnitude: torch.Tensor
    total: torch.Tensor
    lambda_force: float
    lambda_tactile: float

    def scalars(self) -> dict[str, float]:
        def f(t: torch.Tensor) -> float:
            return float(t.detach())

        out = {f"action.{k}": f(v) for k, v in self.action.items()}
        out["bc_total"] = f(self.bc_total)
        out["force"] = f(self.force)
        out["tactile"] = f(self.tactile)
        out["tactile_direction"] = f(self.tactile_direction)
        out["tactile_magnitude"] = f(self.tactile_magnitude)
        out["total"] = f(self.total)
        return out

    def is_finite(self) -> bool:
        return all(
            torch.isfinite(t).all()
            for t in (*self.action.values(), self.force, self.tactile, self.total)
        )
