"""Synthetic demonstration generator: determinism, phases, contact structure."""

import numpy as np
import pytest

from touchdream.schema import ActionSchema, ModalitySchema, SchemaError
from touchdream.synthetic import (
    SCENARIO_HANDS,
    SyntheticConfig,
    generate_synthetic_dataset,
    validate_scenario_mix,
)

CONFIG = SyntheticConfig(
    schema=ModalitySchema(image_size=16),
    action_schema=ActionSchema(chunk_horizon=3, dream_horizon=2),
    episode_length=40,
)


def test_generation_is_deterministic():
    a = generate_synthetic_dataset(3, seed=11, config=CONFIG)
    b = generate_synthetic_dataset(3, seed=11, config=CONFIG)
    for ea, eb in zip(a.episodes, b.episodes):
        assert ea.meta == eb.meta
        for name in ("images", "body_q", "hand_q", "hand_force", "tactile", "actions"):
            assert np.array_equal(ea.stream(name), eb.stream(name)), name


def test_seeds_differ():
    a = generate_synthetic_dataset(1, seed=0, config=CONFIG)
    b = generate_synthetic_dataset(1, seed=1, config=CONFIG)
    assert not np.array_equal(a.episodes[0].tactile, b.episodes[0].tactile)


def test_episodes_validate_against_schema():
    ds = generate_synthetic_dataset(2, seed=5, config=CONFIG)
    ds.validate()
    for ep in ds.episodes:
        assert ep.length == CONFIG.episode_length
        assert float(ep.images.min()) >= 0.0 and float(ep.images.max()) <= 1.0


def test_phase_bounds_partition_episode():
    ds = generate_synthetic_dataset(4, seed=2, config=CONFIG)
    for ep in ds.episodes:
        ids = ep.phase_ids.astype(int)
        assert ids.min() == 0 and ids.max() == 4
        # phases appear in order and each at least once
        changes = np.flatnonzero(np.diff(ids))
        assert np.all(np.diff(ids)[changes] == 1)
        assert set(np.unique(ids)) == {0, 1, 2, 3, 4}


def test_contact_drives_tactile_and_force():
    ds = generate_synthetic_dataset(4, seed=3, config=CONFIG)
    for ep in ds.episodes:
        mask = ep.contact_mask()
        active = list(SCENARIO_HANDS[ep.meta.scenario])
        tact = ep.tactile[:, active, :].mean(axis=(1, 2))
        assert tact[mask].mean() > 5 * tact[~mask].mean()
        force = np.abs(ep.hand_force).reshape(ep.length, 2, -1)
        assert force[mask][:, active].mean() > 3 * force[~mask][:, active].mean()


def test_inactive_hand_stays_quiet():
    ds = generate_synthetic_dataset(6, seed=4, config=CONFIG)
    for ep in ds.episodes:
        active = set(SCENARIO_HANDS[ep.meta.scenario])
        idle = [h for h in (0, 1) if h not in active]
        if not idle:
            continue
        force = np.abs(ep.hand_force).reshape(ep.length, 2, -1)
        assert force[:, idle].max() < 0.1
        assert ep.tactile[:, idle, :].max() < 0.1


def test_actions_lead_targets():
    # stored action at step t is the scripted target for step t+1; the final
    # step has no successor, so the last two action rows coincide exactly
    ds = generate_synthetic_dataset(2, seed=6, config=CONFIG)
    for ep in ds.episodes:
        assert np.array_equal(ep.actions[-1], ep.actions[-2])
        assert not np.array_equal(ep.actions[0], ep.actions[1])


def test_mix_validation():
    assert validate_scenario_mix({"bimanual": 2.0}) == {"bimanual": 1.0}
    normalized = validate_scenario_mix({"left_grasp": 1.0, "right_grasp": 3.0})
    assert normalized["right_grasp"] == pytest.approx(0.75)
    with pytest.raises(SchemaError):
        validate_scenario_mix({})
    with pytest.raises(SchemaError):
        validate_scenario_mix({"nope": 1.0})
    with pytest.raises(SchemaError):
        validate_scenario_mix({"bimanual": -1.0})
    with pytest.raises(SchemaError):
        validate_scenario_mix({"bimanual": 0.0})


def test_mix_controls_scenarios():
    ds = generate_synthetic_dataset(5, seed=9, scenario_mix={"bimanual": 1.0}, config=CONFIG)
    assert all(ep.meta.scenario == "bimanual" for ep in ds.episodes)


def test_bad_episode_count_rejected():
    with pytest.raises(SchemaError):
        generate_synthetic_dataset(0, seed=0, config=CONFIG)
