"""Deterministic synthetic contact-scenario generator.

Stands in for teleoperated demonstrations. Every episode follows the phase
script approach -> contact -> grasp -> transport -> release. Tactile frames
carry analytic Gaussian bumps on the contacting hand's finger and palm
patches, scaled by a contact-intensity profile that is exactly zero outside
contact phases; everything else is low-amplitude noise. Forces and hand
closure track the same intensity, actions are the scripted targets one step
ahead, and images are cheap rasters marking object and hand positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, Episode, EpisodeMeta, PHASE_NAMES
from .schema import ActionSchema, ModalitySchema, SchemaError, TACTILE_DIM
from .rotations import euler_xyz_to_matrix, matrix_to_rotation_6d
from .tactile import RegionLayout, default_region_layout

SCENARIO_HANDS = {"left_grasp": (0,), "right_grasp": (1,), "bimanual": (0, 1)}
DEFAULT_SCENARIO_MIX = {"left_grasp": 1.0, "right_grasp": 1.0, "bimanual": 1.0}

MIN_EPISODE_LENGTH = 10


@dataclass(frozen=True)
class SyntheticConfig:
    schema: ModalitySchema = ModalitySchema()
    action_schema: ActionSchema = ActionSchema()
    episode_length: int = 120
    contact_peak: float = 0.8
    tactile_noise: float = 0.02
    force_noise: float = 0.01


def validate_scenario_mix(mix: dict[str, float]) -> dict[str, float]:
    """Normalize scenario weights to probabilities; reject invalid mixes."""
    if not mix:
        raise SchemaError("scenario mix is empty")
    unknown = set(mix) - set(SCENARIO_HANDS)
    if unknown:
        raise SchemaError(f"unknown scenarios: {sorted(unknown)}")
    for name, w in mix.items():
        if w < 0:
            raise SchemaError(f"scenario {name} has negative weight {w}")
    total = float(sum(mix.values()))
    if total <= 0:
        raise SchemaError("scenario weights sum to zero")
    return {k: float(v) / total for k, v in mix.items()}


def _phase_bounds(length: int, rng: np.random.Generator) -> dict[str, tuple[int, int]]:
    fracs = np.array([0.22, 0.14, 0.22, 0.24, 0.18])
    fracs = np.maximum(fracs + rng.uniform(-0.03, 0.03, size=5), 0.06)
    fracs = fracs / fracs.sum()
    edges = np.round(np.cumsum(fracs) * length).astype(int)
    edges[-1] = length
    # keep every phase at least one step long
    for i in range(4):
        lo = int(edges[i - 1]) + 1 if i > 0 else 1
        edges[i] = int(np.clip(edges[i], lo, length - (4 - i)))
    starts = np.concatenate([[0], edges[:-1]])
    return {name: (int(a), int(b)) for name, a, b in zip(PHASE_NAMES, starts, edges)}


def _contact_intensity(length: int, bounds: dict[str, tuple[int, int]]) -> np.ndarray:
    """Per-step grip intensity: 0 outside contact phases, ramping to 1 inside."""
    intensity = np.zeros(length)
    c0, c1 = bounds["contact"]
    n = max(c1 - c0, 1)
    intensity[c0:c1] = np.arange(1, c1 - c0 + 1) / n
    g0, g1 = bounds["grasp"]
    intensity[g0:g1] = 1.0
    t0, t1 = bounds["transport"]
    local = np.arange(t1 - t0) / max(t1 - t0, 1)
    intensity[t0:t1] = 0.9 + 0.1 * np.cos(2.0 * np.pi * local)
    return intensity


def _bump_map(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    r0 = rng.uniform(0.25, 0.75) * (rows - 1)
    c0 = rng.uniform(0.25, 0.75) * (cols - 1)
    sig_r = rng.uniform(0.15, 0.35) * max(rows, 2)
    sig_c = rng.uniform(0.15, 0.35) * max(cols, 2)
    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    g = np.exp(-0.5 * (((rr - r0) / sig_r) ** 2 + ((cc - c0) / sig_c) ** 2))
    return rng.uniform(0.7, 1.0) * g


def _hand_bump_vector(layout: RegionLayout, rng: np.random.Generator) -> np.ndarray:
    """Static per-hand bump pattern over the regions designated in contact."""
    fingers = ["index", "middle", "ring", "pinky"]
    k = int(rng.integers(2, 5))
    picked = list(rng.choice(fingers, size=k, replace=False))
    regions = ["thumb"] + picked + ["palm"]
    vec = np.zeros(TACTILE_DIM)
    for name in regions:
        for patch in layout.region(name).patches:
            vec[patch.offset : patch.stop] = _bump_map(patch.rows, patch.cols, rng).ravel()
    return vec


def _phase_progress(length: int, bounds: tuple[int, int]) -> np.ndarray:
    """0 before the phase, linear 0->1 across it, 1 after."""
    a, b = bounds
    t = np.arange(length, dtype=np.float64)
    return np.clip((t - a) / max(b - a, 1), 0.0, 1.0)


def _paint_square(img: np.ndarray, cx: float, cy: float, half: int, color: tuple) -> None:
    h, w, _ = img.shape
    x = int(round(cx * (w - 1)))
    y = int(round(cy * (h - 1)))
    x0, x1 = max(x - half, 0), min(x + half + 1, w)
    y0, y1 = max(y - half, 0), min(y + half + 1, h)
    if x0 < x1 and y0 < y1:
        img[y0:y1, x0:x1] = color


def _render_images(
    schema: ModalitySchema,
    length: int,
    bounds: dict[str, tuple[int, int]],
    intensity: np.ndarray,
) -> np.ndarray:
    h = w = schema.image_size
    views = schema.stream_shapes()["images"][0]
    approach = _phase_progress(length, bounds["approach"])
    transport = _phase_progress(length, bounds["transport"])
    release = _phase_progress(length, bounds["release"])

    obj_start, obj_end = np.array([0.30, 0.62]), np.array([0.72, 0.38])
    hand_home = np.array([0.10, 0.12])

    grad = np.linspace(0.0, 0.2, w)[None, :, None] * np.ones((h, 1, 3))
    out = np.zeros((length, views, h, w, 3), dtype=np.float32)
    for t in range(length):
        obj = obj_start + (obj_end - obj_start) * transport[t]
        hand = hand_home + (obj - hand_home) * approach[t]
        hand = hand + (hand_home - hand) * release[t]
        for v in range(views):
            img = grad + 0.05 * v
            shift = 0.03 * v
            _paint_square(img, obj[0] + shift, obj[1], 3, (0.9, 0.3 + 0.5 * intensity[t], 0.2))
            _paint_square(img, hand[0] + shift, hand[1], 2, (0.2, 0.5, 0.9))
            out[t, v] = np.clip(img, 0.0, 1.0)
    return out


def _sinusoid_bank(length: int, dim: int, rng: np.random.Generator, amp_range=(0.1, 0.5)) -> np.ndarray:
    t = np.arange(length)[:, None] / max(length, 1)
    amp = rng.uniform(*amp_range, size=dim)
    freq = rng.integers(1, 4, size=dim)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=dim)
    return amp * np.sin(2.0 * np.pi * freq * t + phase)


def generate_episode(
    config: SyntheticConfig,
    scenario: str,
    rng: np.random.Generator,
    seed: int,
    episode_id: str,
    layout: RegionLayout,
) -> Episode:
    T = config.episode_length
    if T < MIN_EPISODE_LENGTH:
        raise SchemaError(f"episode_length must be at least {MIN_EPISODE_LENGTH}, got {T}")
    schema, action_schema = config.schema, config.action_schema
    hands = SCENARIO_HANDS[scenario]

    bounds = _phase_bounds(T, rng)
    intensity = _contact_intensity(T, bounds)
    phase_ids = np.zeros(T)
    for pid, name in enumerate(PHASE_NAMES):
        a, b = bounds[name]
        phase_ids[a:b] = pid

    # tactile: static bump pattern per contacting hand, scaled by intensity,
    # plus a uniform noise floor everywhere
    tactile = np.zeros((T, 2, TACTILE_DIM))
    for hand in hands:
        bump = _hand_bump_vector(layout, rng)
        tactile[:, hand, :] = config.contact_peak * intensity[:, None] * bump[None, :]
    tactile += rng.uniform(0.0, config.tactile_noise, size=tactile.shape)
    tactile = np.clip(tactile, 0.0, 1.0)

    # hand force and closure track the same intensity on contacting hands
    J = schema.hand_joints
    hand_force = rng.uniform(0.0, config.force_noise, size=(T, 2 * J))
    hand_q = 0.05 * np.sin(
        2.0 * np.pi * np.arange(T)[:, None] / T + rng.uniform(0, 2 * np.pi, size=2 * J)
    )
    for hand in hands:
        grip = rng.uniform(0.4, 1.2, size=J)
        close = rng.uniform(0.6, 1.2, size=J)
        sl = slice(hand * J, (hand + 1) * J)
        hand_force[:, sl] += intensity[:, None] * grip[None, :]
        hand_q[:, sl] += intensity[:, None] * close[None, :]

    body_q = _sinusoid_bank(T, schema.body_dim, rng)

    # scripted targets: wrist poses, torso pose, base velocity, hand closure
    wrist_pos = {h: np.array([0.35, 0.25 - 0.5 * h, 0.9]) + _sinusoid_bank(T, 3, rng, (0.05, 0.15)) for h in (0, 1)}
    wrist_eul = {h: _sinusoid_bank(T, 3, rng, (0.1, 0.4)) for h in (0, 1)}
    torso = np.concatenate(
        [_sinusoid_bank(T, 3, rng, (0.05, 0.2)), 0.6 + _sinusoid_bank(T, 1, rng, (0.05, 0.1))],
        axis=1,
    )
    t0, t1 = bounds["transport"]
    vel = np.zeros((T, 3))
    vmax = rng.uniform(-0.4, 0.4, size=3)
    local = _phase_progress(T, (t0, t1))
    window = np.sin(np.pi * local) * ((np.arange(T) >= t0) & (np.arange(T) < t1))
    vel = vmax[None, :] * window[:, None]

    ee = np.zeros((T, action_schema.end_effector_dim))
    for h in (0, 1):
        for t in range(T):
            R = euler_xyz_to_matrix(*wrist_eul[h][t])
            ee[t, h * 9 : h * 9 + 3] = wrist_pos[h][t]
            ee[t, h * 9 + 3 : h * 9 + 9] = matrix_to_rotation_6d(R)

    targets = np.concatenate([ee, torso, vel, hand_q], axis=1)
    nxt = np.minimum(np.arange(T) + 1, T - 1)
    actions = targets[nxt]

    images = _render_images(schema, T, bounds, intensity)

    meta = EpisodeMeta(
        episode_id=episode_id,
        scenario=scenario,
        seed=seed,
        length=T,
        phase_bounds=bounds,
    )
    return Episode(
        meta=meta,
        images=images.astype(np.float32),
        body_q=body_q.astype(np.float32),
        hand_q=hand_q.astype(np.float32),
        hand_force=hand_force.astype(np.float32),
        tactile=tactile.astype(np.float32),
        actions=actions.astype(np.float32),
        phase_ids=phase_ids.astype(np.float32),
    )


def generate_synthetic_dataset(
    num_episodes: int,
    seed: int,
    scenario_mix: dict[str, float] | None = None,
    config: SyntheticConfig | None = None,
) -> Dataset:
    """Generate a dataset deterministically from (seed, config, mix)."""
    if num_episodes < 1:
        raise SchemaError(f"num_episodes must be >= 1, got {num_episodes}")
    config = config if config is not None else SyntheticConfig()
    mix = validate_scenario_mix(scenario_mix if scenario_mix is not None else DEFAULT_SCENARIO_MIX)
    names = sorted(mix)
    probs = np.array([mix[n] for n in names])
    layout = default_region_layout()

    episodes = []
    for k in range(num_episodes):
        rng = np.random.default_rng((seed, k))
        scenario = str(rng.choice(names, p=probs))
        episodes.append(
            generate_episode(config, scenario, rng, seed, f"ep_{k:04d}", layout)
        )
    return Dataset(schema=config.schema, action_schema=config.action_schema, episodes=episodes)
