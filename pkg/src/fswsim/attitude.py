"""Attitude kinematics: unit quaternions (scalar-last) and constant-rate propagation.

Quaternions are stored as numpy arrays [x, y, z, w], body-to-inertial,
Hamilton product convention.  All functions that return a rotation
return a unit quaternion (renormalized, |1 - norm| < 1e-9).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-9

IDENTITY = np.array([0.0, 0.0, 0.0, 1.0])


def _check_finite(*arrays) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite input")


def normalize(q: np.ndarray) -> np.ndarray:
    _check_finite(q)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    return np.asarray(q, dtype=float) / n


def canonicalize(q: np.ndarray) -> np.ndarray:
    """Fix the double-cover sign so the scalar part is non-negative."""
    q = normalize(q)
    return -q if q[3] < 0 else q


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a*b (apply b's rotation in a's body frame)."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return np.array([
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
        aw * bw - ax * bx - ay * by - az * bz,
    ])


def from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    _check_finite(axis, angle)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise ValueError("zero rotation axis")
    half = 0.5 * angle
    return np.concatenate([np.sin(half) * axis / n, [np.cos(half)]])


def rotate_by(q: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Compose q with a body-frame rotation of `angle` about `axis`."""
    return normalize(multiply(normalize(q), from_axis_angle(axis, angle)))


def angular_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Rotation angle between two unit quaternions, in [0, pi]."""
    for q in (a, b):
        if abs(np.linalg.norm(q) - 1.0) > 1e-6:
            raise ValueError("non-unit quaternion")
    d = abs(float(np.dot(a, b)))
    return 2.0 * float(np.arccos(min(d, 1.0)))


@dataclass(frozen=True)
class AttitudeState:
    """Body-to-inertial quaternion, body rates (rad/s) and time (s)."""

    q: np.ndarray
    omega: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", normalize(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        _check_finite(self.q, self.omega, self.t)


MAX_RATE = 10.0  # rad/s, sanity bound on configured body rates


def propagate(state: AttitudeState, dt: float) -> AttitudeState:
    """Advance the attitude by the constant-rate closed form over dt seconds."""
    _check_finite(dt)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    rate = float(np.linalg.norm(state.omega))
    if rate > MAX_RATE:
        raise ValueError(f"body rate {rate} exceeds {MAX_RATE} rad/s")
    if rate == 0.0:
        q = state.q
    else:
        q = rotate_by(state.q, state.omega / rate, rate * dt)
    return AttitudeState(q=q, omega=state.omega, t=state.t + dt)


def attitude_at(initial: AttitudeState, t: float) -> AttitudeState:
    """Truth attitude at absolute time t, directly from the closed form."""
    if t < initial.t:
        raise ValueError("cannot propagate backwards from the initial state")
    if t == initial.t:
        return initial
    return propagate(initial, t - initial.t)


def small_angle_noise(q: np.ndarray, sigma_rad: float, rng: np.random.Generator) -> np.ndarray:
    """Perturb q by a random small rotation; sigma 0 returns q untouched."""
    if sigma_rad == 0.0:
        return q
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return rotate_by(q, axis, rng.normal(scale=sigma_rad))
