"""Single-stage behavioral cloning with touch dreaming.

One training step follows a fixed order: draw a batch, encode future tactile
frames with the teacher (stop-gradient), roll the policy forward, assemble the
weighted loss, take the student optimizer step, then move the teacher by EMA.
Checkpoints use the same manifest-plus-float32-blob container as datasets and
restore training bit-exactly: parameters, optimizer state, step counter, and
sampler RNG state all round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import torch

from .data import Dataset, sample_training_batch
from .losses import LossBreakdown, bc_loss, force_loss, huber, tactile_dream_loss
from .policy import PolicyConfig, TouchDreamPolicy
from .schema import SchemaError
from .storage import FORMAT_VERSION, pack_arrays, unpack_arrays, StorageError
from .tactile import TactileEncoder, ema_update, make_teacher

TEACHER_MODES = ("ema", "live")

METRIC_COLUMNS = (
    "step",
    "action.end_effector", "action.torso", "action.velocity", "action.hand",
    "bc_total", "force", "tactile", "tactile_direction", "tactile_magnitude",
    "total", "grad_norm",
)


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    policy: PolicyConfig = PolicyConfig()
    steps: int = 2000
    batch_size: int = 8
    learning_rate: float = 1e-4
    grad_clip: float = 1.0
    seed: int = 0
    teacher_mode: str = "ema"
    log_every: int = 50
    checkpoint_every: int = 0  # 0: only the final checkpoint

    def __post_init__(self):
        if self.teacher_mode not in TEACHER_MODES:
            raise SchemaError(f"teacher_mode must be one of {TEACHER_MODES}")
        if self.steps < 1 or self.batch_size < 1:
            raise SchemaError("steps and batch_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "policy": self.policy.to_dict(),
            "steps": self.steps,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "grad_clip": self.grad_clip,
            "seed": self.seed,
            "teacher_mode": self.teacher_mode,
            "log_every": self.log_every,
            "checkpoint_every": self.checkpoint_every,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingConfig":
        kwargs = dict(d)
        kwargs["policy"] = PolicyConfig.from_dict(d["policy"])
        return cls(**kwargs)


def _parse_scalar(text: str):
    text = text.strip()
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_config_overrides(text: str) -> dict[str, object]:
    """Parse a plain-text config: one `key = value` per line, `#` comments.

    Keys may be dotted (`policy.d_model = 64`) to reach nested fields.
    """
    out: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise TrainingError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = _parse_scalar(value)
    return out


def apply_config_overrides(config: TrainingConfig, overrides: dict[str, object]) -> TrainingConfig:
    policy_kwargs: dict[str, object] = {}
    train_kwargs: dict[str, object] = {}
    for key, value in overrides.items():
        if key.startswith("policy."):
            policy_kwargs[key[len("policy."):]] = value
        else:
            train_kwargs[key] = value
    policy = config.policy
    if policy_kwargs:
        unknown = [k for k in policy_kwargs if not hasattr(policy, k)]
        if unknown:
            raise TrainingError(f"unknown policy config keys: {unknown}")
        policy = replace(policy, **policy_kwargs)
    unknown = [k for k in train_kwargs if not hasattr(config, k) or k == "policy"]
    if unknown:
        raise TrainingError(f"unknown training config keys: {unknown}")
    return replace(config, policy=policy, **train_kwargs)


@dataclass
class TrainState:
    config: TrainingConfig
    policy: TouchDreamPolicy
    teacher: TactileEncoder | None
    optimizer: torch.optim.Optimizer
    rng: np.random.Generator
    step: int = 0
    history: list[dict[str, float]] = field(default_factory=list)


def init_train_state(config: TrainingConfig) -> TrainState:
    torch.manual_seed(config.seed)
    policy = TouchDreamPolicy(config.policy)
    teacher = None
    if config.policy.dream_mode == "latent" and config.teacher_mode == "ema":
        teacher = make_teacher(policy.tactile_encoder)
    optimizer = torch.optim.Adam(policy.parameters(), lr=config.learning_rate)
    rng = np.random.default_rng(config.seed)
    return TrainState(config=config, policy=policy, teacher=teacher, optimizer=optimizer, rng=rng)


def _teacher_targets(state: TrainState, future_tactile: torch.Tensor) -> torch.Tensor:
    """Region latents for (B, tau, 2, 1062) future tactile -> (B, tau, 12, d_z).

    Per-step arrangement is hand-major: the left hand's six regions in layout
    order, then the right hand's. Under teacher_mode='ema' the targets come
    from the frozen teacher and carry no gradient; under 'live' they come from
    the student's own encoder with gradient attached (the collapse-prone
    ablation).
    """
    B, tau = future_tactile.shape[0], future_tactile.shape[1]
    flat = future_tactile.reshape(B * tau * 2, -1)
    if state.teacher is not None:
        with torch.no_grad():
            latents = state.teacher(flat)
    else:
        latents = state.policy.tactile_encoder(flat)
    d_z = latents.shape[-1]
    return latents.reshape(B, tau, 2 * latents.shape[1], d_z)


def total_loss(state: TrainState, batch: dict[str, torch.Tensor]) -> LossBreakdown:
    cfg = state.config.policy
    delta = cfg.huber_delta
    lam_f, lam_z = cfg.lambda_force, cfg.lambda_tactile
    need_dreams = cfg.dream_mode != "none" and (lam_f != 0.0 or lam_z != 0.0)

    targets = None
    if need_dreams and cfg.dream_mode == "latent":
        targets = _teacher_targets(state, batch["future_tactile"])

    out = state.policy.forward(batch, with_dreams=need_dreams)

    action_losses: dict[str, torch.Tensor] = {}
    chunk = batch["action_chunk"]
    for name, sl in cfg.action_schema.modality_slices().items():
        action_losses[name] = bc_loss(out.actions[name], chunk[..., sl], delta)
    bc_total = sum(action_losses.values())

    zero = torch.zeros((), dtype=bc_total.dtype)
    force_term, tact_term = zero, zero
    direction, magnitude = zero, zero
    if need_dreams:
        force_term = force_loss(out.force, batch["future_force"], delta)
        if cfg.dream_mode == "latent":
            tact_term, direction, magnitude = tactile_dream_loss(
                out.tactile_latents, targets, cfg.beta, delta
            )
        else:
            tact_term = huber(out.tactile_raw - batch["future_tactile"], delta).mean()

    total = bc_total
    if need_dreams:
        total = total + lam_f * force_term + lam_z * tact_term
    return LossBreakdown(
        action=action_losses,
        bc_total=bc_total,
        force=force_term,
        tactile=tact_term,
        tactile_direction=direction,
        tactile_magnitude=magnitude,
        total=total,
        lambda_force=lam_f,
        lambda_tactile=lam_z,
    )


def train_step(state: TrainState, batch: dict[str, torch.Tensor]) -> tuple[LossBreakdown, float]:
    """One full update; returns the loss breakdown and the pre-clip grad norm."""
    breakdown = total_loss(state, batch)
    if not breakdown.is_finite():
        raise TrainingError(f"non-finite loss at step {state.step}: {breakdown.scalars()}")
    state.optimizer.zero_grad(set_to_none=True)
    breakdown.total.backward()
    grad_norm = float(
        torch.nn.utils.clip_grad_norm_(state.policy.parameters(), state.config.grad_clip)
    )
    state.optimizer.step()
    if state.teacher is not None:
        ema_update(state.teacher, state.policy.tactile_encoder, state.config.policy.ema_decay)
    state.step += 1
    return breakdown, grad_norm


def train(
    config: TrainingConfig,
    dataset: Dataset,
    out_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> TrainState:
    h, tau = config.policy.h, config.policy.tau
    for ep in dataset.episodes:
        if ep.length <= h + tau:
            raise SchemaError(
                f"episode {ep.meta.episode_id} has length {ep.length}; training requires "
                f"length > h + tau = {h + tau}"
            )
    dataset.with_stats()

    state = load_checkpoint(resume_from) if resume_from is not None else init_train_state(config)
    config = state.config  # a resumed run continues under the checkpoint's config

    out_path = Path(out_dir) if out_dir is not None else None
    metrics_file = None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        metrics_path = out_path / "metrics.csv"
        new_file = not metrics_path.exists()
        metrics_file = metrics_path.open("a")
        if new_file:
            metrics_file.write(",".join(METRIC_COLUMNS) + "\n")

    try:
        while state.step < config.steps:
            batch = sample_training_batch(dataset, config.batch_size, h, tau, state.rng)
            breakdown, grad_norm = train_step(state, batch)
            if state.step == 1 or state.step % config.log_every == 0 or state.step == config.steps:
                row = breakdown.scalars()
                row["step"] = state.step
                row["grad_norm"] = grad_norm
                state.history.append(row)
                if metrics_file is not None:
                    metrics_file.write(
                        ",".join(f"{row.get(c, float('nan')):.10g}" for c in METRIC_COLUMNS) + "\n"
                    )
                    metrics_file.flush()
            if (
                out_path is not None
                and config.checkpoint_every > 0
                and state.step % config.checkpoint_every == 0
                and state.step < config.steps
            ):
                save_checkpoint(state, out_path / f"checkpoint_{state.step:06d}")
    finally:
        if metrics_file is not None:
            metrics_file.close()

    if out_path is not None:
        save_checkpoint(state, out_path / "checkpoint_final")
        summary = {
            "config": config.to_dict(),
            "steps": state.step,
            "final": state.history[-1] if state.history else None,
            "first": state.history[0] if state.history else None,
        }
        (out_path / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return state


# --- checkpoint container -------------------------------------------------

def _state_tensors(state: TrainState) -> list[tuple[str, torch.Tensor]]:
    entries = [(f"policy.{k}", v) for k, v in state.policy.state_dict().items()]
    if state.teacher is not None:
        entries += [(f"teacher.{k}", v) for k, v in state.teacher.state_dict().items()]
    return entries


def save_checkpoint(state: TrainState, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    entries = _state_tensors(state)
    opt_sd = state.optimizer.state_dict()
    opt_steps: dict[str, float] = {}
    # numeric key order keeps save -> load -> save byte-identical
    for idx in sorted(opt_sd["state"]):
        st = opt_sd["state"][idx]
        opt_steps[str(idx)] = float(st["step"])
        entries.append((f"optimizer.{idx}.exp_avg", st["exp_avg"]))
        entries.append((f"optimizer.{idx}.exp_avg_sq", st["exp_avg_sq"]))

    registry = []
    offset = 0
    arrays = []
    for name, tensor in entries:
        arr = tensor.detach().cpu().numpy().astype(np.float32)
        registry.append({"name": name, "shape": list(arr.shape), "offset": offset})
        offset += arr.size
        arrays.append(arr)
    (directory / "params.bin").write_bytes(pack_arrays(arrays))

    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": "checkpoint",
        "config": state.config.to_dict(),
        "step": state.step,
        "rng_state": state.rng.bit_generator.state,
        "optimizer": {"param_groups": opt_sd["param_groups"], "steps": opt_steps},
        "params": registry,
        "num_floats": offset,
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_checkpoint_manifest(directory: str | Path) -> dict:
    path = Path(directory) / "manifest.json"
    if not path.exists():
        raise StorageError(f"no manifest.json in {directory}")
    manifest = json.loads(path.read_text())
    if manifest.get("kind") != "checkpoint":
        raise StorageError(f"{path} is not a checkpoint manifest")
    if manifest.get("format_version") != FORMAT_VERSION:
        raise StorageError(f"unsupported checkpoint format_version {manifest.get('format_version')}")
    return manifest


def load_checkpoint(directory: str | Path) -> TrainState:
    directory = Path(directory)
    manifest = read_checkpoint_manifest(directory)
    config = TrainingConfig.from_dict(manifest["config"])

    registry = manifest["params"]
    shapes = [tuple(e["shape"]) for e in registry]
    buf = (directory / "params.bin").read_bytes()
    arrays = unpack_arrays(buf, shapes, "params.bin")
    tensors = {e["name"]: torch.from_numpy(a.copy()) for e, a in zip(registry, arrays)}

    state = init_train_state(config)
    policy_sd = {k[len("policy."):]: v for k, v in tensors.items() if k.startswith("policy.")}
    state.policy.load_state_dict(policy_sd, strict=True)
    if state.teacher is not None:
        teacher_sd = {k[len("teacher."):]: v for k, v in tensors.items() if k.startswith("teacher.")}
        if not teacher_sd:
            raise StorageError("checkpoint lacks teacher parameters required by its config")
        state.teacher.load_state_dict(teacher_sd, strict=True)

    opt_meta = manifest["optimizer"]
    opt_state: dict[int, dict[str, torch.Tensor]] = {}
    for key, step_val in opt_meta["steps"].items():
        idx = int(key)
        opt_state[idx] = {
            "step": torch.tensor(float(step_val)),
            "exp_avg": tensors[f"optimizer.{idx}.exp_avg"],
            "exp_avg_sq": tensors[f"optimizer.{idx}.exp_avg_sq"],
        }
    state.optimizer.load_state_dict({"state": opt_state, "param_groups": opt_meta["param_groups"]})

    state.rng = np.random.default_rng()
    state.rng.bit_generator.state = manifest["rng_state"]
    state.step = int(manifest["step"])
    return state
