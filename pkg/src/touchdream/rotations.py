"""Small rotation helpers shared by the data generator and locomotion kernels.

Quaternions use scalar-first (w, x, y, z) order. Euler angles follow the
intrinsic X-Y-Z convention: R = Rx(roll) @ Ry(pitch) @ Rz(yaw).
"""

from __future__ import annotations

import numpy as np


def wrap_angle(a: np.ndarray | float) -> np.ndarray | float:
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a), 2.0 * np.pi)


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    n = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(n == 0.0):
        raise ValueError("zero-norm quaternion")
    return q / n


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_rotate_inverse(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate world-frame vector v into the body frame of orientation q."""
    return quat_to_matrix(q).T @ np.asarray(v, dtype=np.float64)


def euler_xyz_to_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    ca, sa = np.cos(roll), np.sin(roll)
    cb, sb = np.cos(pitch), np.sin(pitch)
    cc, sc = np.cos(yaw), np.sin(yaw)
    rx = np.array([[1, 0, 0], [0, ca, -sa], [0, sa, ca]])
    ry = np.array([[cb, 0, sb], [0, 1, 0], [-sb, 0, cb]])
    rz = np.array([[cc, -sc, 0], [sc, cc, 0], [0, 0, 1]])
    return rx @ ry @ rz


def matrix_to_euler_xyz(R: np.ndarray) -> tuple[float, float, float]:
    """Inverse of euler_xyz_to_matrix for pitch in [-pi/2, pi/2].

    At gimbal lock (|R[0,2]| = 1) roll and yaw are not separable; yaw is
    reported as 0 and roll absorbs the remaining rotation.
    """
    R = np.asarray(R, dtype=np.float64)
    s = np.clip(R[0, 2], -1.0, 1.0)
    pitch = float(np.arcsin(s))
    if abs(s) < 1.0 - 1e-12:
        roll = float(np.arctan2(-R[1, 2], R[2, 2]))
        yaw = float(np.arctan2(-R[0, 1], R[0, 0]))
    else:
        roll = float(np.arctan2(R[2, 1], R[1, 1]))
        yaw = 0.0
    return roll, pitch, yaw


def euler_xyz_to_quat(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Scalar-first quaternion for the intrinsic X-Y-Z rotation."""
    hr, hp, hy = 0.5 * roll, 0.5 * pitch, 0.5 * yaw
    qx = np.array([np.cos(hr), np.sin(hr), 0.0, 0.0])
    qy = np.array([np.cos(hp), 0.0, np.sin(hp), 0.0])
    qz = np.array([np.cos(hy), 0.0, 0.0, np.sin(hy)])
    return quat_multiply(quat_multiply(qx, qy), qz)


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def matrix_to_rotation_6d(R: np.ndarray) -> np.ndarray:
    """Continuous 6-D rotation encoding: the first two basis columns, stacked."""
    R = np.asarray(R, dtype=np.float64)
    return np.concatenate([R[:, 0], R[:, 1]])
