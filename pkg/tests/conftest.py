"""Shared fixtures: deliberately tiny shapes so the unit suite stays fast."""

import pytest

from touchdream.policy import PolicyConfig
from touchdream.schema import ActionSchema, ModalitySchema
from touchdream.synthetic import SyntheticConfig, generate_synthetic_dataset


@pytest.fixture(scope="session")
def small_schema():
    return ModalitySchema(image_size=16)


@pytest.fixture(scope="session")
def small_action_schema():
    return ActionSchema(chunk_horizon=3, dream_horizon=2)


@pytest.fixture(scope="session")
def tiny_config(small_schema, small_action_schema):
    return PolicyConfig(
        schema=small_schema,
        action_schema=small_action_schema,
        d_model=32,
        encoder_layers=1,
        decoder_layers=1,
        heads=2,
        image_tokens=2,
        state_tokens=1,
        tactile_tokens=2,
        ee_tokens=2,
        torso_tokens=1,
        velocity_tokens=1,
        hand_tokens=2,
        latent_dim=8,
        tactile_channels=2,
        tactile_fusion_hidden=16,
        feature_dim=16,
    )


@pytest.fixture(scope="session")
def tiny_dataset(small_schema, small_action_schema):
    config = SyntheticConfig(
        schema=small_schema, action_schema=small_action_schema, episode_length=30
    )
    return generate_synthetic_dataset(2, seed=0, config=config).with_stats()
