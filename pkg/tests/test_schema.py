"""Schema contracts: stream shapes, action spans, serialization."""

import pytest

from touchdream.schema import (
    ACTION_MODALITIES,
    IMAGE_VIEWS,
    TACTILE_DIM,
    ActionSchema,
    ModalitySchema,
    SchemaError,
)


def test_default_stream_shapes():
    shapes = ModalitySchema().stream_shapes()
    assert shapes == {
        "images": (4, 64, 64, 3),
        "body_q": (29,),
        "hand_q": (12,),
        "hand_force": (12,),
        "tactile": (2, TACTILE_DIM),
    }
    assert TACTILE_DIM == 1062
    assert len(IMAGE_VIEWS) == 4


def test_schema_round_trip():
    schema = ModalitySchema(image_size=32, body_dim=20, hand_joints=5)
    assert ModalitySchema.from_dict(schema.to_dict()) == schema


def test_tactile_dim_is_pinned():
    d = ModalitySchema().to_dict()
    d["tactile_dim"] = 1000
    with pytest.raises(SchemaError):
        ModalitySchema.from_dict(d)


def test_action_modality_dims_and_slices():
    schema = ActionSchema()
    dims = schema.modality_dims()
    assert dims == {"end_effector": 18, "torso": 4, "velocity": 3, "hand": 12}
    assert tuple(dims) == ACTION_MODALITIES
    assert schema.total_dim == 37

    covered = 0
    for name, sl in schema.modality_slices().items():
        assert sl.start == covered
        assert sl.stop - sl.start == dims[name]
        covered = sl.stop
    assert covered == schema.total_dim


def test_action_schema_round_trip_and_horizons():
    schema = ActionSchema(hand_joints=4, chunk_horizon=5, dream_horizon=3)
    assert ActionSchema.from_dict(schema.to_dict()) == schema
    assert schema.hand_dim == 8


def test_invalid_dimensions_rejected():
    with pytest.raises(SchemaError):
        ModalitySchema(image_size=0)
    with pytest.raises(SchemaError):
        ActionSchema(chunk_horizon=0)
