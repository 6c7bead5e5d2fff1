"""Constant-speed Dubins kinematics and vector-field curve following.

The tracker composes a convergence component toward the closest curve
point with the curve tangent, maps the resulting direction to a bounded
heading-rate command, and integrates the Dubins model with exact arcs so
the constant-speed invariant holds to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import NurbsCurve


def wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    r = a - 2.0 * math.pi * math.floor((a + math.pi) / (2.0 * math.pi))
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


@dataclass(frozen=True)
class UavState:
    """Planar pose at constant speed."""

    position: np.ndarray
    heading: float  # radians, (-pi, pi]
    speed: float  # m/s, fixed for the whole mission

    def __post_init__(self):
        if self.speed <= 0.0:
            raise ValueError("speed must be positive")
        object.__setattr__(self, "position",
                           np.asarray(self.position, dtype=float))


@dataclass(frozen=True)
class VehicleLimits:
    """Curvature bound and its derived turn limits."""

    kappa_max: float

    def __post_init__(self):
        if self.kappa_max <= 0.0:
            raise ValueError("kappa_max must be positive")

    @property
    def rho_min(self) -> float:
        return 1.0 / self.kappa_max

    def u_max(self, speed: float) -> float:
        """Maximum heading rate at the given speed."""
        return speed * self.kappa_max


@dataclass(frozen=True)
class FieldGains:
    beta: float = 1.0  # convergence sharpness, 1/m
    k_heading: float = 2.0  # heading-rate gain, 1/s

    def __post_init__(self):
        if self.beta <= 0.0 or self.k_heading <= 0.0:
            raise ValueError("field gains must be positive")


def vector_field(curve: NurbsCurve, p, gains: FieldGains,
                 hint: float | None = None) -> tuple[np.ndarray, float]:
    """Unit guidance direction toward and along the curve.

    Blends the normal toward the closest curve point (weight
    (2/pi) atan(beta * d)) with the unit tangent there; the two components
    are orthogonalized so the output norm is exactly one. Also returns the
    projection parameter so callers can reuse it as the next hint.
    """
    p = np.asarray(p, dtype=float)
    s_star, dist = curve.project(p, hint=hint)
    c0, c1 = curve.derivatives(np.array([s_star]), order=1)
    tangent = c1[0]
    t_norm = np.linalg.norm(tangent)
    if t_norm < 1e-12:
        # Degenerate tangent: head straight for the projection point.
        toward = c0[0] - p
        n = np.linalg.norm(toward)
        return (toward / n if n > 0 else np.array([1.0, 0.0])), s_star
    t_hat = tangent / t_norm
    toward = c0[0] - p
    normal = toward - (toward @ t_hat) * t_hat
    n_norm = np.linalg.norm(normal)
    if n_norm < 1e-12 or dist < 1e-12:
        return t_hat, s_star
    n_hat = normal / n_norm
    g = (2.0 / math.pi) * math.atan(gains.beta * dist)
    h = math.sqrt(max(1.0 - g * g, 0.0))
    return g * n_hat + h * t_hat, s_star


def heading_rate_command(state: UavState, desired_dir, limits: VehicleLimits,
                         gains: FieldGains) -> float:
    """Proportional heading-rate command, clamped to the turn limit."""
    desired_dir = np.asarray(desired_dir, dtype=float)
    err = wrap_angle(math.atan2(desired_dir[1], desired_dir[0]) - state.heading)
    u_max = limits.u_max(state.speed)
    return float(np.clip(gains.k_heading * err, -u_max, u_max))


def step_dubins(state: UavState, u: float, dt: float,
                limits: VehicleLimits) -> UavState:
    """Advance the Dubins model by dt with exact arc integration."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    u_max = limits.u_max(state.speed)
    u = float(np.clip(u, -u_max, u_max))
    v = state.speed
    gamma = state.heading
    if abs(u) < 1e-9:
        pos = state.position + v * dt * np.array([math.cos(gamma), math.sin(gamma)])
        new_heading = gamma
    else:
        radius = v / u
        new_heading = gamma + u * dt
        pos = state.position + radius * np.array(
            [math.sin(new_heading) - math.sin(gamma),
             -math.cos(new_heading) + math.cos(gamma)]
        )
    return UavState(position=pos, heading=wrap_angle(new_heading), speed=v)
