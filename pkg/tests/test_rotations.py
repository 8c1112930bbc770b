"""Rotation kernels against scipy's Rotation as an independent oracle.

scipy quaternions are (x, y, z, w); ours are (w, x, y, z). 'XYZ' in
scipy.spatial.transform denotes intrinsic rotations about x, then y, then z,
matching our euler convention.
"""

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from touchdream.rotations import (
    euler_xyz_to_matrix,
    euler_xyz_to_quat,
    matrix_to_euler_xyz,
    matrix_to_rotation_6d,
    quat_rotate_inverse,
    quat_to_matrix,
    wrap_angle,
)


def _random_quats(n, seed):
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def test_wrap_angle_range_and_values():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(6.0) == pytest.approx(6.0 - 2 * math.pi)
    angles = np.linspace(-12.0, 12.0, 1001)
    wrapped = np.array([wrap_angle(a) for a in angles])
    assert np.all(wrapped > -math.pi - 1e-12)
    assert np.all(wrapped <= math.pi + 1e-12)
    assert np.allclose(np.cos(wrapped), np.cos(angles), atol=1e-12)
    assert np.allclose(np.sin(wrapped), np.sin(angles), atol=1e-12)


def test_quat_to_matrix_matches_scipy():
    for q in _random_quats(200, 0):
        ours = quat_to_matrix(q)
        theirs = Rotation.from_quat([q[1], q[2], q[3], q[0]]).as_matrix()
        assert np.allclose(ours, theirs, atol=1e-12)


def test_matrix_to_euler_xyz_matches_scipy():
    for q in _random_quats(200, 1):
        rot = Rotation.from_quat([q[1], q[2], q[3], q[0]])
        ours = matrix_to_euler_xyz(rot.as_matrix())
        theirs = rot.as_euler("XYZ")
        assert np.allclose(ours, theirs, atol=1e-9)


def test_euler_to_quat_matches_scipy():
    rng = np.random.default_rng(2)
    for _ in range(200):
        roll, yaw = rng.uniform(-math.pi, math.pi, size=2)
        pitch = rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
        ours = euler_xyz_to_quat(roll, pitch, yaw)
        theirs = Rotation.from_euler("XYZ", [roll, pitch, yaw]).as_quat()
        theirs = np.array([theirs[3], theirs[0], theirs[1], theirs[2]])
        if np.dot(ours, theirs) < 0:  # q and -q encode the same rotation
            theirs = -theirs
        assert np.allclose(ours, theirs, atol=1e-12)


def test_euler_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(200):
        roll, yaw = rng.uniform(-math.pi, math.pi, size=2)
        pitch = rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
        back = matrix_to_euler_xyz(euler_xyz_to_matrix(roll, pitch, yaw))
        assert np.allclose(back, [roll, pitch, yaw], atol=1e-9)


def test_gimbal_lock_recomposes():
    # pitch at +-pi/2 has no unique (roll, yaw); the extracted angles must
    # still rebuild the same matrix
    for pitch in (math.pi / 2, -math.pi / 2):
        m = euler_xyz_to_matrix(0.4, pitch, -0.7)
        r, p, y = matrix_to_euler_xyz(m)
        assert np.allclose(euler_xyz_to_matrix(r, p, y), m, atol=1e-9)


def test_quat_rotate_inverse_matches_scipy():
    rng = np.random.default_rng(4)
    for q in _random_quats(100, 5):
        v = rng.normal(size=3)
        ours = quat_rotate_inverse(q, v)
        theirs = Rotation.from_quat([q[1], q[2], q[3], q[0]]).inv().apply(v)
        assert np.allclose(ours, theirs, atol=1e-12)


def test_rotation_6d_is_first_two_columns():
    m = euler_xyz_to_matrix(0.3, -0.2, 1.1)
    six = matrix_to_rotation_6d(m)
    assert six.shape == (6,)
    assert np.allclose(six, np.concatenate([m[:, 0], m[:, 1]]))
