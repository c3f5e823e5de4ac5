"""Coordinate frames, Euler rotations and reflection-side feasibility for the IRS.

The IRS lies in the local x'-y' plane with its reflecting face pointing along
local -z'.  Orientation uses the intrinsic Z-Y-X composition
``Q = Rz(gamma_z) @ Ry(gamma_y) @ Rx(gamma_x)``; ``Q`` maps local coordinates
to global ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi
LOCAL_NORMAL = np.array([0.0, 0.0, -1.0])


class CoincidentNodesError(ValueError):
    """Two nodes share a location, so a direction is undefined."""


def wrap_angles(gamma):
    """Map angles into [0, 2*pi)."""
    g = np.mod(np.asarray(gamma, dtype=float), TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    return np.where(g >= TWO_PI, 0.0, g)


@dataclass(frozen=True)
class Region:
    """Axis-aligned horizontal box the UAV may occupy at fixed altitude ``H``."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    H: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"empty region: {self}")
        if self.H <= 0:
            raise ValueError(f"altitude must be positive, got {self.H}")

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2, self.H])

    def contains(self, p, atol=1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(
            self.x_min - atol <= p[0] <= self.x_max + atol
            and self.y_min - atol <= p[1] <= self.y_max + atol
            and abs(p[2] - self.H) <= atol
        )

    @classmethod
    def point(cls, p) -> "Region":
        """Degenerate region pinning the location to ``p``."""
        return cls(p[0], p[0], p[1], p[1], p[2])


@dataclass(frozen=True)
class Pose6D:
    """IRS reference-element location ``p_R`` (m) and Euler angles ``gamma`` (rad)."""

    p_R: np.ndarray
    gamma: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        p = np.array(self.p_R, dtype=float).reshape(3)
        g = wrap_angles(np.array(self.gamma, dtype=float).reshape(3))
        p.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "p_R", p)
        object.__setattr__(self, "gamma", g)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p_R, self.gamma])

    @classmethod
    def from_vector(cls, g) -> "Pose6D":
        g = np.asarray(g, dtype=float)
        return cls(g[:3], g[3:])

    def __eq__(self, other):
        if not isinstance(other, Pose6D):
            return NotImplemented
        return np.array_equal(self.p_R, other.p_R) and np.array_equal(self.gamma, other.gamma)

    def __hash__(self):
        return hash((self.p_R.tobytes(), self.gamma.tobytes()))


def _rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_matrix(gamma) -> np.ndarray:
    """Local-to-global rotation ``Rz(gz) @ Ry(gy) @ Rx(gx)``."""
    gx, gy, gz = np.asarray(gamma, dtype=float)
    return _rz(gz) @ _ry(gy) @ _rx(gx)


def rotation_matrices(gammas) -> np.ndarray:
    """Vectorised :func:`rotation_matrix` for an ``(M, 3)`` array of angles."""
    g = np.asarray(gammas, dtype=float)
    cx, sx = np.cos(g[:, 0]), np.sin(g[:, 0])
    cy, sy = np.cos(g[:, 1]), np.sin(g[:, 1])
    cz, sz = np.cos(g[:, 2]), np.sin(g[:, 2])
    Q = np.empty((g.shape[0], 3, 3))
    Q[:, 0, 0] = cz * cy
    Q[:, 0, 1] = cz * sy * sx - sz * cx
    Q[:, 0, 2] = cz * sy * cx + sz * sx
    Q[:, 1, 0] = sz * cy
    Q[:, 1, 1] = sz * sy * sx + cz * cx
    Q[:, 1, 2] = sz * sy * cx - cz * sx
    Q[:, 2, 0] = -sy
    Q[:, 2, 1] = cy * sx
    Q[:, 2, 2] = cy * cx
    return Q


def to_local(p, pose: Pose6D) -> np.ndarray:
    return rotation_matrix(pose.gamma).T @ (np.asarray(p, dtype=float) - pose.p_R)


def to_global(p_local, pose: Pose6D) -> np.ndarray:
    return rotation_matrix(pose.gamma) @ np.asarray(p_local, dtype=float) + pose.p_R


def upa_angles(pose: Pose6D, p_from, p_to):
    """Elevation and azimuth of the link ``p_from -> p_to`` in the IRS frame.

    Elevation is measured from local +z' in [0, pi]; azimuth uses the
    four-quadrant arctangent and lies in (-pi, pi].
    """
    Q = rotation_matrix(pose.gamma)
    lp = Q.T @ (np.asarray(p_to, dtype=float) - np.asarray(p_from, dtype=float))
    d = np.linalg.norm(lp)
    if d == 0.0:
        raise CoincidentNodesError(f"coincident nodes at {p_from}")
    theta_e = float(np.arccos(np.clip(lp[2] / d, -1.0, 1.0)))
    theta_a = float(np.arctan2(lp[1], lp[0]))
    if theta_a == -np.pi:
        theta_a = np.pi
    return theta_e, theta_a


def normal_vector(pose: Pose6D) -> np.ndarray:
    """Global outward normal of the reflecting face."""
    return rotation_matrix(pose.gamma) @ LOCAL_NORMAL


def incidence_angle(pose: Pose6D, p_node) -> float:
    """Angle between the outward normal and the IRS-to-node direction, in [0, pi]."""
    diff = np.asarray(p_node, dtype=float) - pose.p_R
    d = np.linalg.norm(diff)
    if d == 0.0:
        raise CoincidentNodesError(f"node coincides with IRS at {pose.p_R}")
    return float(np.arccos(np.clip(normal_vector(pose) @ diff / d, -1.0, 1.0)))


def halfspace_feasible(pose: Pose6D, nodes) -> bool:
    """True when every node lies on the reflecting side (``n . (p_X - p_R) >= 0``)."""
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    if nodes.shape[0] == 0:
        raise ValueError("need at least one node")
    n = normal_vector(pose)
    return bool(np.all((nodes - pose.p_R) @ n >= 0.0))


def halfspace_violation(pose: Pose6D, nodes) -> np.ndarray:
    """Per-node ``max(0, -n . u_X)`` with ``u_X`` the unit IRS-to-node direction."""
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    diff = nodes - pose.p_R
    u = diff / np.linalg.norm(diff, axis=1, keepdims=True)
    return np.maximum(0.0, -(u @ normal_vector(pose)))
