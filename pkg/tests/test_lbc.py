"""Locomotion kernels: observations, rewards, samplers, case runner."""

import dataclasses
import math

import numpy as np
import pytest

from touchdream.lbc import (
    COMMAND_FIELDS,
    PROPRIO_DIM,
    STUDENT_OBS_DIM,
    Command,
    CommandRanges,
    LBCError,
    RewardConfig,
    apply_state_overrides,
    assemble_proprio,
    assemble_student_obs,
    check_sampler_bounds,
    dagger_loss,
    default_robot_state,
    reward_breakdown,
    run_case,
    run_case_file,
    sample_command,
    sample_domain_randomization,
    tracking_errors,
)
from touchdream.rotations import euler_xyz_to_quat


def test_proprio_layout_segments():
    state = default_robot_state()
    state.base_ang_vel[:] = [1, 2, 3]
    state.q[:] = np.arange(15) + 10
    state.qd[:] = np.arange(15) + 40
    state.prev_action[:] = np.arange(15) + 70
    obs = assemble_proprio(state)
    assert obs.shape == (PROPRIO_DIM,) == (51,)
    assert obs[:3].tolist() == [1, 2, 3]
    assert obs[3:6].tolist() == [0, 0, -1]
    assert np.array_equal(obs[6:21], state.q)
    assert np.array_equal(obs[21:36], state.qd)
    assert np.array_equal(obs[36:51], state.prev_action)


def test_student_obs_layout():
    older = np.full(51, 1.0)
    newer = np.full(51, 2.0)
    current = np.full(51, 3.0)
    cmd = Command(vx=0.5, height=0.6, yaw=-0.3)
    obs = assemble_student_obs((older, newer), current, cmd)
    assert obs.shape == (STUDENT_OBS_DIM,) == (160,)
    assert np.all(obs[:51] == 1.0)
    assert np.all(obs[51:102] == 2.0)
    assert np.all(obs[102:153] == 3.0)
    assert obs[153:].tolist() == [0.5, 0.0, 0.0, 0.6, 0.0, 0.0, -0.3]
    with pytest.raises(LBCError):
        assemble_student_obs((older,), current, cmd)


def test_dagger_loss_values():
    z = np.zeros(15)
    assert dagger_loss(z, z) == 0.0
    one = z.copy()
    one[4] = 1.0
    assert dagger_loss(one, z) == 1.0
    sq = z.copy()
    sq[0], sq[1] = 3.0, 4.0
    assert dagger_loss(sq, z) == 25.0
    with pytest.raises(LBCError):
        dagger_loss(np.zeros(14), z)


def test_perfect_stance_rewards():
    result = reward_breakdown(default_robot_state(), Command())
    assert result.total == pytest.approx(6.0, abs=1e-12)
    for name in (
        "track_lin_vel", "track_ang_vel", "track_height",
        "track_torso_roll", "track_torso_pitch", "track_torso_yaw",
    ):
        assert result.terms[name].value == pytest.approx(1.0, abs=1e-12)
    nonzero = {n for n, t in result.terms.items() if t.value != 0.0}
    assert nonzero == {
        "track_lin_vel", "track_ang_vel", "track_height",
        "track_torso_roll", "track_torso_pitch", "track_torso_yaw",
    }
    assert len(result.terms) == 24
    for term in result.terms.values():
        assert term.contribution == term.weight * term.value


def test_feet_force_cap_and_contribution():
    state = default_robot_state()
    state.feet[1].force[:] = [0.0, 0.0, 950.0]
    result = reward_breakdown(state, Command())
    assert result.terms["feet_force"].value == pytest.approx(400.0, abs=1e-12)
    assert result.terms["feet_force"].contribution == pytest.approx(-1.2, abs=1e-12)
    assert result.total == pytest.approx(4.8, abs=1e-12)


def test_relative_yaw_wraps():
    state = default_robot_state()
    state.torso_quat[:] = euler_xyz_to_quat(0.0, 0.0, 3.0)
    state.pelvis_quat[:] = euler_xyz_to_quat(0.0, 0.0, -3.0)
    result = reward_breakdown(state, Command())
    wrapped = 6.0 - 2 * math.pi
    expected = math.exp(-(wrapped**2) / 0.0625)
    assert result.terms["track_torso_yaw"].value == pytest.approx(expected, rel=1e-9)


def test_air_time_needs_single_stance_and_active_command():
    state = default_robot_state()
    state.feet[1].contact = False
    state.feet[1].air_time = 0.6
    active = reward_breakdown(state, Command(vx=0.3))
    assert active.terms["feet_air_time"].value == pytest.approx(0.4)  # capped
    assert active.terms["flying"].value == 0.0

    idle = reward_breakdown(state, Command(vx=0.05))
    assert idle.terms["feet_air_time"].value == 0.0

    both_down = reward_breakdown(default_robot_state(), Command(vx=0.3))
    assert both_down.terms["feet_air_time"].value == 0.0


def test_reward_config_sign_validation():
    with pytest.raises(LBCError):
        RewardConfig(w_termination=200.0)
    with pytest.raises(LBCError):
        RewardConfig(w_track_lin_vel=-1.0)
    with pytest.raises(LBCError):
        RewardConfig(w_feet_air_time=-0.15)


def test_state_validation_catches_bad_inputs():
    state = default_robot_state()
    state.torso_quat[:] = [1.0, 1.0, 0.0, 0.0]  # not unit
    with pytest.raises(LBCError):
        reward_breakdown(state, Command())

    state = default_robot_state()
    state.q = np.zeros(14)
    with pytest.raises(LBCError):
        assemble_proprio(state)


def test_apply_state_overrides_euler_and_sparse():
    state = apply_state_overrides(
        default_robot_state(),
        {
            "torso_euler": [0.0, 0.2, 0.0],
            "q": {"3": 2.0},
            "base_height": 0.6,
            "feet": [{}, {"force": [0.0, 0.0, 10.0]}],
        },
    )
    assert np.allclose(state.torso_quat, euler_xyz_to_quat(0.0, 0.2, 0.0))
    assert state.q[3] == 2.0 and state.q[0] == 0.0
    assert state.base_height == 0.6
    assert state.feet[1].force[2] == 10.0
    assert state.feet[0].contact is True


def test_tracking_errors_planar_and_relative():
    states, commands = [], []
    s1 = default_robot_state()
    s1.base_lin_vel[:] = [0.3, 0.0, 0.0]
    states.append(s1)
    commands.append(Command(vx=0.5))
    s2 = default_robot_state()
    s2.base_lin_vel[:] = [0.1, 0.2, 0.0]
    states.append(s2)
    commands.append(Command(vx=0.1))
    m = tracking_errors(states, commands)
    assert m["E_v"] == pytest.approx(0.2, abs=1e-12)
    assert m["E_h"] == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(LBCError):
        tracking_errors(states, commands[:1])
    with pytest.raises(LBCError):
        tracking_errors([], [])


def test_samplers_respect_ranges():
    rng = np.random.default_rng(0)
    ranges = CommandRanges()
    for _ in range(500):
        cmd = sample_command(rng, ranges)
        for field in COMMAND_FIELDS:
            lo, hi = getattr(ranges, field)
            assert lo <= getattr(cmd, field) <= hi
    rand = sample_domain_randomization(rng)
    assert 0.6 <= rand.static_friction <= 1.0

    bad = dataclasses.replace(ranges, vx=(0.5, -0.5))
    with pytest.raises(LBCError):
        sample_command(rng, bad)


def test_check_sampler_bounds_small():
    results = check_sampler_bounds(draws=2000, seed=1)
    assert all(r.passed for r in results)
    assert len(results) == 15  # 7 command fields + 8 randomization fields


def test_run_case_detects_corruption():
    good = {
        "kind": "reward",
        "name": "stance",
        "state": {},
        "command": {},
        "expected_total": 6.0,
    }
    assert run_case(good).passed
    bad = dict(good, expected_total=5.5, name="corrupted")
    res = run_case(bad)
    assert not res.passed
    assert "total" in res.detail

    unknown = {"kind": "mystery", "name": "x"}
    assert not run_case(unknown).passed

    with pytest.raises(LBCError):
        run_case_file([])
