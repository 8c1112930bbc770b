"""Pure-function kernels for the lower-body controller.

Covers deployable proprioceptive observation assembly, student history
stacking, the DAgger distillation loss, every term of the locomotion reward,
uniform command and domain-randomization sampling, and the six tracking-error
metrics. Everything here is stateless numpy: no simulator, no training loop.

Joint order for all 15-dim vectors: left leg (6), right leg (6), waist (3).
Base linear velocity carries yaw-aligned planar x/y components and the world
vertical component. Quaternions are scalar-first (w, x, y, z); angles use the
intrinsic X-Y-Z Euler convention throughout.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .rotations import euler_xyz_to_quat, matrix_to_euler_xyz, quat_to_matrix, wrap_angle

NUM_LOWER_JOINTS = 15
LEG_SLICE = slice(0, 12)
WAIST_SLICE = slice(12, 15)
PROPRIO_DIM = 51          # [ang vel 3, gravity 3, q 15, qd 15, prev action 15]
COMMAND_DIM = 7
STUDENT_OBS_DIM = 3 * PROPRIO_DIM + COMMAND_DIM
UNIT_TOL = 1e-6

# Published reference measurements, shipped for report rendering only; they
# come from hardware/simulation rollouts this library does not perform.
REFERENCE_TRACKING_EV = (0.1420, 0.0568)   # mean, std of the velocity error
REFERENCE_STABLE_HEIGHT = (0.33, 0.80)     # maximum stable height command range


class LBCError(ValueError):
    pass


def _vec(x, n: int, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (n,):
        raise LBCError(f"{name} must have shape ({n},), got {arr.shape}")
    return arr


def _require_unit(v: np.ndarray, name: str) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > UNIT_TOL:
        raise LBCError(f"{name} must be unit-norm (got |{name}| = {norm:.8f})")
    return v


@dataclass
class FootState:
    contact: bool = False
    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity_xy: np.ndarray = field(default_factory=lambda: np.zeros(2))
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    air_time: float = 0.0


@dataclass
class RobotState:
    base_lin_vel: np.ndarray
    base_ang_vel: np.ndarray
    projected_gravity: np.ndarray
    q: np.ndarray
    qd: np.ndarray
    qdd: np.ndarray
    torques: np.ndarray
    action: np.ndarray
    prev_action: np.ndarray
    base_height: float
    torso_quat: np.ndarray
    pelvis_quat: np.ndarray
    feet: tuple[FootState, FootState]
    q_default: np.ndarray
    undesired_force_norms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    terminated: bool = False

    def validate(self) -> "RobotState":
        _vec(self.base_lin_vel, 3, "base_lin_vel")
        _vec(self.base_ang_vel, 3, "base_ang_vel")
        _require_unit(_vec(self.projected_gravity, 3, "projected_gravity"), "projected_gravity")
        for name in ("q", "qd", "qdd", "torques", "action", "prev_action", "q_default"):
            _vec(getattr(self, name), NUM_LOWER_JOINTS, name)
        _require_unit(_vec(self.torso_quat, 4, "torso_quat"), "torso_quat")
        _require_unit(_vec(self.pelvis_quat, 4, "pelvis_quat"), "pelvis_quat")
        if len(self.feet) != 2:
            raise LBCError(f"exactly 2 feet required, got {len(self.feet)}")
        return self


def default_robot_state() -> RobotState:
    """Nominal double-support stance: upright, static, at the default posture."""
    zeros15 = np.zeros(NUM_LOWER_JOINTS)
    return RobotState(
        base_lin_vel=np.zeros(3),
        base_ang_vel=np.zeros(3),
        projected_gravity=np.array([0.0, 0.0, -1.0]),
        q=zeros15.copy(),
        qd=zeros15.copy(),
        qdd=zeros15.copy(),
        torques=zeros15.copy(),
        action=zeros15.copy(),
        prev_action=zeros15.copy(),
        base_height=0.72,
        torso_quat=np.array([1.0, 0.0, 0.0, 0.0]),
        pelvis_quat=np.array([1.0, 0.0, 0.0, 0.0]),
        feet=(
            FootState(contact=True, position=np.array([0.0, 0.12, 0.0])),
            FootState(contact=True, position=np.array([0.0, -0.12, 0.0])),
        ),
        q_default=zeros15.copy(),
    )


@dataclass(frozen=True)
class Command:
    vx: float = 0.0
    vy: float = 0.0
    wz: float = 0.0
    height: float = 0.72
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def to_vector(self) -> np.ndarray:
        return np.array(
            [self.vx, self.vy, self.wz, self.height, self.roll, self.pitch, self.yaw]
        )

    @property
    def active(self) -> bool:
        return bool(np.hypot(self.vx, self.vy) + abs(self.wz) > 0.1)


COMMAND_FIELDS = ("vx", "vy", "wz", "height", "roll", "pitch", "yaw")


@dataclass(frozen=True)
class CommandRanges:
    vx: tuple[float, float] = (-0.5, 0.5)
    vy: tuple[float, float] = (-0.5, 0.5)
    wz: tuple[float, float] = (-1.57, 1.57)
    height: tuple[float, float] = (0.35, 0.8)
    roll: tuple[float, float] = (-0.7, 0.7)
    pitch: tuple[float, float] = (-0.52, 1.57)
    yaw: tuple[float, float] = (-1.57, 1.57)


@dataclass(frozen=True)
class DomainRandRanges:
    ang_vel_noise: tuple[float, float] = (-0.2, 0.2)
    gravity_noise: tuple[float, float] = (-0.05, 0.05)
    joint_pos_noise: tuple[float, float] = (-0.01, 0.01)
    joint_vel_noise: tuple[float, float] = (-1.5, 1.5)
    static_friction: tuple[float, float] = (0.6, 1.0)
    dynamic_friction: tuple[float, float] = (0.4, 0.8)
    restitution: tuple[float, float] = (0.0, 0.005)
    base_mass_delta: tuple[float, float] = (-5.0, 5.0)


@dataclass(frozen=True)
class DomainRandomization:
    ang_vel_noise: np.ndarray       # (3,)
    gravity_noise: np.ndarray       # (3,)
    joint_pos_noise: np.ndarray     # (15,)
    joint_vel_noise: np.ndarray     # (15,)
    static_friction: float
    dynamic_friction: float
    restitution: float
    base_mass_delta: float


@dataclass(frozen=True)
class RewardConfig:
    # exponential-tracking sharpness
    sigma_v: float = 0.25
    sigma_w: float = 0.25
    sigma_h: float = 0.1
    sigma_roll: float = 0.25
    sigma_pitch: float = 0.25
    sigma_yaw: float = 0.25
    # term weights
    w_track_lin_vel: float = 1.0
    w_track_ang_vel: float = 1.0
    w_track_height: float = 1.0
    w_track_torso_roll: float = 1.0
    w_track_torso_pitch: float = 1.0
    w_track_torso_yaw: float = 1.0
    w_energy: float = -0.001
    w_action_rate: float = -0.01
    w_joint_acc: float = -2.5e-7
    w_lin_vel_z: float = -1.0
    w_ang_vel_xy: float = -0.15
    w_undesired_contacts: float = -1.0
    w_feet_slide: float = -0.25
    w_flying: float = -1.0
    w_feet_force: float = -0.003
    w_feet_air_time: float = 0.15
    w_feet_stumble: float = -2.0
    w_torso_orientation: float = -2.0
    w_joint_limits: float = -2.0
    w_flat_orientation: float = -1.0
    w_feet_distance: float = -2.0
    w_joint_deviation_legs: float = -0.02
    w_joint_deviation_waist: float = -0.2
    w_termination: float = -200.0
    # thresholds
    force_excess_onset: float = 500.0
    force_excess_cap: float = 400.0
    stumble_ratio: float = 5.0
    air_time_cap: float = 0.4
    contact_force_threshold: float = 1.0
    feet_distance_threshold: float = 0.18
    joint_limit_lower: tuple[float, ...] = (-1.57,) * NUM_LOWER_JOINTS
    joint_limit_upper: tuple[float, ...] = (1.57,) * NUM_LOWER_JOINTS

    def __post_init__(self):
        for name in ("sigma_v", "sigma_w", "sigma_h", "sigma_roll", "sigma_pitch", "sigma_yaw"):
            if getattr(self, name) <= 0:
                raise LBCError(f"{name} must be positive")
        for name in (
            "w_track_lin_vel", "w_track_ang_vel", "w_track_height",
            "w_track_torso_roll", "w_track_torso_pitch", "w_track_torso_yaw",
        ):
            if getattr(self, name) <= 0:
                raise LBCError(f"tracking weight {name} must be positive")
        if self.w_feet_air_time < 0:
            raise LBCError("bonus weight w_feet_air_time must be >= 0")
        penalties = (
            "w_energy", "w_action_rate", "w_joint_acc", "w_lin_vel_z", "w_ang_vel_xy",
            "w_undesired_contacts", "w_feet_slide", "w_flying", "w_feet_force",
            "w_feet_stumble", "w_torso_orientation", "w_joint_limits",
            "w_flat_orientation", "w_feet_distance", "w_joint_deviation_legs",
            "w_joint_deviation_waist", "w_termination",
        )
        for name in penalties:
            if getattr(self, name) > 0:
                raise LBCError(f"penalty weight {name} must be <= 0")


# --- observation assembly and distillation ---------------------------------

def assemble_proprio(state: RobotState) -> np.ndarray:
    """Deployable proprioceptive observation: [ang vel, gravity, q, qd, prev action]."""
    state.validate()
    obs = np.concatenate(
        [state.base_ang_vel, state.projected_gravity, state.q, state.qd, state.prev_action]
    )
    assert obs.shape == (PROPRIO_DIM,)
    return obs


def assemble_student_obs(
    history: tuple[np.ndarray, np.ndarray] | list[np.ndarray],
    current: np.ndarray,
    command: Command,
) -> np.ndarray:
    """[s_{t-2}, s_{t-1}, s_t, command] -> 3*51 + 7 = 160 entries."""
    if len(history) != 2:
        raise LBCError(f"history must hold exactly 2 frames, got {len(history)}")
    frames = [_vec(f, PROPRIO_DIM, "history frame") for f in history]
    frames.append(_vec(current, PROPRIO_DIM, "current frame"))
    obs = np.concatenate(frames + [command.to_vector()])
    assert obs.shape == (STUDENT_OBS_DIM,)
    return obs


def dagger_loss(student_action: np.ndarray, teacher_action: np.ndarray) -> float:
    """Squared L2 distance between 15-dim student and teacher joint targets."""
    s = _vec(student_action, NUM_LOWER_JOINTS, "student_action")
    t = _vec(teacher_action, NUM_LOWER_JOINTS, "teacher_action")
    return float(np.sum((s - t) ** 2))


# --- reward -----------------------------------------------------------------

@dataclass(frozen=True)
class TermResult:
    value: float
    weight: float

    @property
    def contribution(self) -> float:
        return self.weight * self.value


@dataclass(frozen=True)
class RewardBreakdown:
    terms: dict[str, TermResult]
    total: float


def _torso_pelvis_angles(state: RobotState) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    torso = matrix_to_euler_xyz(quat_to_matrix(state.torso_quat))
    pelvis = matrix_to_euler_xyz(quat_to_matrix(state.pelvis_quat))
    return torso, pelvis


def _gravity_in_frame(quat: np.ndarray) -> np.ndarray:
    return quat_to_matrix(quat).T @ np.array([0.0, 0.0, -1.0])


def reward_breakdown(
    state: RobotState, command: Command, config: RewardConfig | None = None
) -> RewardBreakdown:
    """Every reward term's raw value, weight, and the weighted total."""
    config = config if config is not None else RewardConfig()
    state.validate()
    terms: dict[str, TermResult] = {}

    def add(name: str, value: float, weight: float) -> None:
        terms[name] = TermResult(value=float(value), weight=float(weight))

    (t_roll, t_pitch, t_yaw), (p_roll, _p_pitch, p_yaw) = _torso_pelvis_angles(state)

    # tracking
    v_err_sq = float(np.sum((state.base_lin_vel[:2] - [command.vx, command.vy]) ** 2))
    add("track_lin_vel", np.exp(-v_err_sq / config.sigma_v**2), config.w_track_lin_vel)
    w_err = float(state.base_ang_vel[2] - command.wz)
    add("track_ang_vel", np.exp(-(w_err**2) / config.sigma_w**2), config.w_track_ang_vel)
    h_err = float(state.base_height - command.height)
    add("track_height", np.exp(-(h_err**2) / config.sigma_h**2), config.w_track_height)
    roll_err = float(wrap_angle((t_roll - p_roll) - command.roll))
    add("track_torso_roll", np.exp(-(roll_err**2) / config.sigma_roll**2), config.w_track_torso_roll)
    pitch_err = float(wrap_angle(t_pitch - command.pitch))
    add("track_torso_pitch", np.exp(-(pitch_err**2) / config.sigma_pitch**2), config.w_track_torso_pitch)
    yaw_err = float(wrap_angle((t_yaw - p_yaw) - command.yaw))
    add("track_torso_yaw", np.exp(-(yaw_err**2) / config.sigma_yaw**2), config.w_track_torso_yaw)

    # regularization
    add("energy", np.linalg.norm(np.abs(state.torques * state.qd)), config.w_energy)
    add("action_rate", np.sum((state.action - state.prev_action) ** 2), config.w_action_rate)
    add("joint_acc", np.sum(state.qdd**2), config.w_joint_acc)
    add("lin_vel_z", state.base_lin_vel[2] ** 2, config.w_lin_vel_z)
    add("ang_vel_xy", state.base_ang_vel[0] ** 2 + state.base_ang_vel[1] ** 2, config.w_ang_vel_xy)

    # contact and gait
    undesired = bool(np.any(np.asarray(state.undesired_force_norms) > config.contact_force_threshold))
    add("undesired_contacts", 1.0 if undesired else 0.0, config.w_undesired_contacts)
    slide = sum(
        float(np.linalg.norm(f.velocity_xy)) for f in state.feet if f.contact
    )
    add("feet_slide", slide, config.w_feet_slide)
    contacts = [f.contact for f in state.feet]
    add("flying", 0.0 if any(contacts) else 1.0, config.w_flying)
    excess = sum(
        float(np.clip(max(abs(float(f.force[2])) - config.force_excess_onset, 0.0), 0.0, config.force_excess_cap))
        for f in state.feet
    )
    add("feet_force", excess, config.w_feet_force)
    air_time = 0.0
    if sum(contacts) == 1 and command.active:
        swing = state.feet[0] if contacts[1] else state.feet[1]
        air_time = min(float(swing.air_time), config.air_time_cap)
    add("feet_air_time", air_time, config.w_feet_air_time)
    stumble = any(
        float(np.linalg.norm(f.force[:2])) > config.stumble_ratio * abs(float(f.force[2]))
        for f in state.feet
    )
    add("feet_stumble", 1.0 if stumble else 0.0, config.w_feet_stumble)

    # stability
    g_torso = _gravity_in_frame(state.torso_quat)
    add("torso_orientation", float(np.sum(g_torso[:2] ** 2)), config.w_torso_orientation)
    lower = np.asarray(config.joint_limit_lower)
    upper = np.asarray(config.joint_limit_upper)
    overshoot = np.maximum(state.q - upper, 0.0) + np.maximum(lower - state.q, 0.0)
    add("joint_limits", float(np.sum(overshoot)), config.w_joint_limits)
    add("flat_orientation", float(np.sum(state.projected_gravity[:2] ** 2)), config.w_flat_orientation)
    feet_dist = float(np.linalg.norm(state.feet[0].position - state.feet[1].position))
    add("feet_distance", max(config.feet_distance_threshold - feet_dist, 0.0), config.w_feet_distance)

    # posture and termination
    dev = np.abs(state.q - state.q_default)
    add("joint_deviation_legs", float(np.sum(dev[LEG_SLICE])), config.w_joint_deviation_legs)
    add("joint_deviation_waist", float(np.sum(dev[WAIST_SLICE])), config.w_joint_deviation_waist)
    add("termination", 1.0 if state.terminated else 0.0, config.w_termination)

    total = float(sum(t.contribution for t in terms.values()))
    return RewardBreakdown(terms=terms, total=total)


# --- sampling ----------------------------------------------------------------

def _uniform(rng: np.random.Generator, bounds: tuple[float, float], size=None):
    lo, hi = bounds
    if lo > hi:
        raise LBCError(f"inverted range ({lo}, {hi})")
    return rng.uniform(lo, hi, size=size)


def sample_command(rng: np.random.Generator, ranges: CommandRanges | None = None) -> Command:
    ranges = ranges if ranges is not None else CommandRanges()
    return Command(**{name: float(_uniform(rng, getattr(ranges, name))) for name in COMMAND_FIELDS})


def sample_domain_randomization(
    rng: np.random.Generator, ranges: DomainRandRanges | None = None
) -> DomainRandomization:
    ranges = ranges if ranges is not None else DomainRandRanges()
    return DomainRandomization(
        ang_vel_noise=_uniform(rng, ranges.ang_vel_noise, size=3),
        gravity_noise=_uniform(rng, ranges.gravity_noise, size=3),
        joint_pos_noise=_uniform(rng, ranges.joint_pos_noise, size=NUM_LOWER_JOINTS),
        joint_vel_noise=_uniform(rng, ranges.joint_vel_noise, size=NUM_LOWER_JOINTS),
        static_friction=float(_uniform(rng, ranges.static_friction)),
        dynamic_friction=float(_uniform(rng, ranges.dynamic_friction)),
        restitution=float(_uniform(rng, ranges.restitution)),
        base_mass_delta=float(_uniform(rng, ranges.base_mass_delta)),
    )


# --- tracking metrics --------------------------------------------------------

METRIC_NAMES = ("E_v", "E_w", "E_h", "E_y", "E_p", "E_r")


def tracking_errors(
    states: list[RobotState], commands: list[Command]
) -> dict[str, float]:
    """Per-timestep command-tracking errors averaged over a trajectory."""
    if not states:
        raise LBCError("empty trajectory")
    if len(states) != len(commands):
        raise LBCError("states and commands must have equal length")
    acc = {name: 0.0 for name in METRIC_NAMES}
    for state, cmd in zip(states, commands):
        state.validate()
        (t_roll, t_pitch, t_yaw), (p_roll, _p, p_yaw) = _torso_pelvis_angles(state)
        acc["E_v"] += float(np.linalg.norm(state.base_lin_vel[:2] - [cmd.vx, cmd.vy]))
        acc["E_w"] += abs(float(state.base_ang_vel[2]) - cmd.wz)
        acc["E_h"] += abs(state.base_height - cmd.height)
        acc["E_y"] += abs(float(wrap_angle((t_yaw - p_yaw) - cmd.yaw)))
        acc["E_p"] += abs(float(wrap_angle(t_pitch - cmd.pitch)))
        acc["E_r"] += abs(float(wrap_angle((t_roll - p_roll) - cmd.roll)))
    n = len(states)
    return {name: val / n for name, val in acc.items()}


# --- case-file runner ----------------------------------------------------------

@dataclass
class CaseResult:
    name: str
    passed: bool
    detail: str


def apply_state_overrides(state: RobotState, overrides: dict) -> RobotState:
    """Sparse overrides onto a RobotState.

    Values may be scalars, full lists, or {index: value} dicts for sparse
    vector edits; 'torso_euler'/'pelvis_euler' accept [roll, pitch, yaw] and
    set the corresponding quaternion; 'feet' takes a list of two per-foot
    override dicts.
    """
    updates: dict[str, object] = {}
    for key, value in overrides.items():
        if key in ("torso_euler", "pelvis_euler"):
            quat = euler_xyz_to_quat(*value)
            updates["torso_quat" if key == "torso_euler" else "pelvis_quat"] = quat
        elif key == "feet":
            feet = []
            for foot, over in zip(state.feet, value):
                foot_updates = {
                    k: (np.asarray(v, dtype=np.float64) if isinstance(v, list) else v)
                    for k, v in over.items()
                }
                feet.append(dataclasses.replace(foot, **foot_updates))
            updates["feet"] = tuple(feet)
        elif isinstance(value, dict):
            base = np.array(getattr(state, key), dtype=np.float64)
            for idx, v in value.items():
                base[int(idx)] = v
            updates[key] = base
        elif isinstance(value, list):
            updates[key] = np.asarray(value, dtype=np.float64)
        else:
            updates[key] = value
    return dataclasses.replace(state, **updates)


def _state_from_case(spec: dict | None) -> RobotState:
    return apply_state_overrides(default_robot_state(), spec or {})


def _command_from_case(spec: dict | None) -> Command:
    return Command(**(spec or {}))


def run_case(case: dict) -> CaseResult:
    name = case.get("name", "<unnamed>")
    kind = case.get("kind")
    tol = float(case.get("tol", 1e-9))
    failures: list[str] = []

    if kind == "reward":
        state = _state_from_case(case.get("state"))
        command = _command_from_case(case.get("command"))
        config = RewardConfig(**case.get("config", {}))
        result = reward_breakdown(state, command, config)
        for term, expected in case.get("expected_terms", {}).items():
            if term not in result.terms:
                failures.append(f"missing term {term}")
                continue
            got = result.terms[term].value
            if abs(got - expected) > tol:
                failures.append(f"term {term}: got {got!r}, expected {expected!r}")
        if "expected_total" in case:
            if abs(result.total - case["expected_total"]) > tol:
                failures.append(
                    f"total: got {result.total!r}, expected {case['expected_total']!r}"
                )
    elif kind == "tracking":
        states = [_state_from_case(s) for s in case["states"]]
        commands = [_command_from_case(c) for c in case["commands"]]
        metrics = tracking_errors(states, commands)
        for metric, expected in case["expected"].items():
            got = metrics[metric]
            if abs(got - expected) > tol:
                failures.append(f"{metric}: got {got!r}, expected {expected!r}")
    elif kind == "dagger":
        got = dagger_loss(np.asarray(case["student"]), np.asarray(case["teacher"]))
        if abs(got - case["expected"]) > tol:
            failures.append(f"dagger: got {got!r}, expected {case['expected']!r}")
    elif kind == "proprio":
        state = _state_from_case(case.get("state"))
        got = assemble_proprio(state)
        expected = np.asarray(case["expected"], dtype=np.float64)
        if got.shape != expected.shape or np.max(np.abs(got - expected)) > tol:
            failures.append(f"proprio mismatch (max err {np.max(np.abs(got - expected))!r})")
    else:
        failures.append(f"unknown case kind {kind!r}")

    if failures:
        return CaseResult(name=name, passed=False, detail="; ".join(failures))
    return CaseResult(name=name, passed=True, detail="ok")


def run_case_file(cases: list[dict]) -> list[CaseResult]:
    if not cases:
        raise LBCError("case file holds no cases")
    return [run_case(c) for c in cases]


def check_sampler_bounds(draws: int = 100_000, seed: int = 0) -> list[CaseResult]:
    """Empirical range checks for both uniform samplers."""
    rng = np.random.default_rng(seed)
    results = []
    cmd_ranges = CommandRanges()
    cmds = [sample_command(rng, cmd_ranges) for _ in range(draws)]
    for name in COMMAND_FIELDS:
        lo, hi = getattr(cmd_ranges, name)
        vals = np.array([getattr(c, name) for c in cmds])
        ok = bool(np.all(vals >= lo) and np.all(vals <= hi))
        results.append(
            CaseResult(
                name=f"command.{name} in [{lo}, {hi}]",
                passed=ok,
                detail=f"observed [{vals.min():.6g}, {vals.max():.6g}] over {draws} draws",
            )
        )
    dr_ranges = DomainRandRanges()
    records = [sample_domain_randomization(rng, dr_ranges) for _ in range(draws // 10)]
    for fname in (
        "ang_vel_noise", "gravity_noise", "joint_pos_noise", "joint_vel_noise",
        "static_friction", "dynamic_friction", "restitution", "base_mass_delta",
    ):
        lo, hi = getattr(dr_ranges, fname)
        vals = np.concatenate([np.atleast_1d(getattr(r, fname)) for r in records])
        ok = bool(np.all(vals >= lo) and np.all(vals <= hi))
        results.append(
            CaseResult(
                name=f"domain_rand.{fname} in [{lo}, {hi}]",
                passed=ok,
                detail=f"observed [{vals.min():.6g}, {vals.max():.6g}] over {vals.size} draws",
            )
        )
    return results
