"""Planar serial-chain geometry and forward kinematics.

All joints are revolute and all angles are degrees throughout: joint
vectors, pose orientation, and joint limits. Degrees are converted to
radians only inside the trigonometric evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEG2RAD = math.pi / 180.0


def mod_floor(alpha: float, beta: float) -> float:
    """Floored modulo ``alpha - beta*floor(alpha/beta)``, result in [0, beta).

    Computed via ``math.fmod``, which is exact in floating point; the naive
    floor-multiply-subtract form loses to rounding once ``alpha`` is large.
    """
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    result = math.fmod(alpha, beta)
    if result < 0.0:
        result += beta
    # adding beta to a tiny negative remainder can round up to exactly beta
    if result >= beta:
        result = 0.0
    return result


@dataclass(frozen=True)
class Pose:
    """Planar end-effector pose: position and orientation theta in [0, 360)."""

    x: float
    y: float
    theta_deg: float

    def __post_init__(self):
        for name in ("x", "y", "theta_deg"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"Pose.{name} must be finite, got {v}")
        if not 0.0 <= self.theta_deg < 360.0:
            raise ValueError(
                f"Pose.theta_deg must lie in [0, 360), got {self.theta_deg}"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta_deg])


@dataclass(frozen=True)
class ChainModel:
    """An n-link planar revolute chain anchored at the origin.

    ``link_lengths`` are positive (dimensionless length units); the joint
    count n equals the number of links. ``joint_limits``, when present, is a
    (q_min, q_max) pair of per-joint bounds in degrees.
    """

    link_lengths: tuple[float, ...]
    joint_limits: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.link_lengths)
        if len(lengths) < 1:
            raise ValueError("chain needs at least one link")
        if not all(math.isfinite(v) and v > 0 for v in lengths):
            raise ValueError(f"link lengths must be positive and finite: {lengths}")
        object.__setattr__(self, "link_lengths", lengths)
        if self.joint_limits is not None:
            q_min = tuple(float(v) for v in self.joint_limits[0])
            q_max = tuple(float(v) for v in self.joint_limits[1])
            if len(q_min) != len(lengths) or len(q_max) != len(lengths):
                raise ValueError("joint limits must have one entry per joint")
            if any(lo > hi for lo, hi in zip(q_min, q_max)):
                raise ValueError(f"ill-ordered joint limits: {q_min} vs {q_max}")
            object.__setattr__(self, "joint_limits", (q_min, q_max))

    @property
    def n(self) -> int:
        return len(self.link_lengths)

    @property
    def reach(self) -> float:
        return sum(self.link_lengths)

    @classmethod
    def unit_links(cls, n: int) -> "ChainModel":
        return cls(link_lengths=(1.0,) * n)


def _check_joint_vector(chain: ChainModel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.n,):
        raise ValueError(
            f"joint vector has shape {q.shape}, expected ({chain.n},)"
        )
    if not np.isfinite(q).all():
        raise ValueError(f"joint vector must be finite: {q}")
    return q


def forward_kinematics(chain: ChainModel, q) -> Pose:
    """End-effector pose for joint angles ``q`` (degrees).

    x = sum_p L_p cos(q_1 + ... + q_p), y likewise with sin, and the
    orientation is the floored-modulo remainder of the angle sum in [0, 360).
    """
    q = _check_joint_vector(chain, q)
    lengths = np.asarray(chain.link_lengths)
    angles = np.cumsum(q) * DEG2RAD
    x = float(np.cos(angles) @ lengths)
    y = float(np.sin(angles) @ lengths)
    theta = mod_floor(float(q.sum()), 360.0)
    return Pose(x, y, theta)


def joint_positions(chain: ChainModel, q) -> np.ndarray:
    """(n+1, 2) polyline of joint positions from the base at the origin."""
    q = _check_joint_vector(chain, q)
    lengths = np.asarray(chain.link_lengths)
    angles = np.cumsum(q) * DEG2RAD
    pts = np.zeros((chain.n + 1, 2))
    pts[1:, 0] = np.cumsum(lengths * np.cos(angles))
    pts[1:, 1] = np.cumsum(lengths * np.sin(angles))
    return pts


def pose_error(target: Pose, current: Pose) -> np.ndarray:
    """Raw componentwise error [x*-x, y*-y, theta*-theta].

    The orientation component is an unwrapped difference of degree values in
    [0, 360); the ~360 deg discontinuity near the 0/360 boundary is a known
    hazard of this convention.
    """
    return np.array(
        [
            target.x - current.x,
            target.y - current.y,
            target.theta_deg - current.theta_deg,
        ]
    )
