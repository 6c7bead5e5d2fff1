"""Truncated velocity-obstacle construction and the along-path VO constraint.

A velocity lies inside the truncated VO of an obstacle when, under constant
velocities, the combined-radius discs overlap within the horizon. The
constraint helper walks a candidate path at constant speed, propagates the
obstacles on the same clock, and accumulates violation depths so the
optimizer can rank infeasible candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import NurbsCurve


@dataclass(frozen=True)
class ObstacleState:
    """One sensed disc obstacle: position (m), velocity (m/s), radius (m)."""

    position: np.ndarray
    velocity: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("obstacle radius must be positive")
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))


@dataclass(frozen=True)
class VOCheck:
    """Membership result: inside flag, time to collision, violation depth."""

    in_vo: bool
    time_to_collision: float | None
    depth: float


def time_to_collision(rel_pos, rel_vel, radius: float) -> float | None:
    """Smallest t >= 0 with ||rel_pos - rel_vel * t|| = radius, else None.

    Returns 0 when the discs already overlap. rel_pos is obstacle minus
    agent, rel_vel is agent minus obstacle, so closure shrinks the gap.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    r = np.asarray(rel_pos, dtype=float)
    v = np.asarray(rel_vel, dtype=float)
    c = float(r @ r) - radius * radius
    if c < 0.0:
        return 0.0
    a = float(v @ v)
    if a == 0.0:
        return 0.0 if c <= 0.0 else None
    b = float(r @ v)
    disc = b * b - a * c
    if disc < 0.0:
        return None
    t_first = (b - np.sqrt(disc)) / a
    if t_first >= 0.0:
        return float(t_first)
    return None


def _ttc_array(rel_pos: np.ndarray, rel_vel: np.ndarray,
               radius: float) -> np.ndarray:
    """Vectorized time_to_collision; NaN where no collision occurs."""
    c = np.einsum("ij,ij->i", rel_pos, rel_pos) - radius * radius
    a = np.einsum("ij,ij->i", rel_vel, rel_vel)
    b = np.einsum("ij,ij->i", rel_pos, rel_vel)
    disc = b * b - a * c
    out = np.full(rel_pos.shape[0], np.nan)
    ok = (disc >= 0.0) & (a > 0.0)
    t = np.where(ok, (b - np.sqrt(np.where(ok, disc, 0.0))) / np.where(a > 0.0, a, 1.0), np.nan)
    out[ok & (t >= 0.0)] = t[ok & (t >= 0.0)]
    out[c < 0.0] = 0.0
    return out


def in_truncated_vo(v_u, p_u, obs: ObstacleState, r_u: float,
                    tau: float) -> VOCheck:
    """Check whether a velocity falls inside the obstacle's truncated VO."""
    if tau <= 0.0:
        raise ValueError("horizon tau must be positive")
    rel_pos = obs.position - np.asarray(p_u, dtype=float)
    rel_vel = np.asarray(v_u, dtype=float) - obs.velocity
    t_star = time_to_collision(rel_pos, rel_vel, obs.radius + r_u)
    if t_star is None or t_star > tau:
        return VOCheck(in_vo=False, time_to_collision=t_star, depth=0.0)
    return VOCheck(in_vo=True, time_to_collision=t_star,
                   depth=(tau - t_star) / tau)


def s_tau(curve: NurbsCurve, speed: float, tau: float) -> float:
    """Parameter reached after travelling speed * tau along the curve.

    Returns 1 when the whole path is shorter than the travelled distance.
    """
    if speed <= 0.0:
        raise ValueError("speed must be positive")
    target = speed * tau
    if target >= curve.total_length():
        return 1.0
    return float(curve.param_at_length(target))


def path_vo_violation(curve: NurbsCurve, speed: float, obstacles,
                      r_u: float, tau: float, n_samples: int = 20) -> float:
    """Total truncated-VO violation depth along the path up to s_tau.

    Samples are uniform in arc length; each sample j is an agent state at
    time t_j = arclen_j / speed, checked against every obstacle propagated
    to t_j with the horizon shrunk to tau - t_j. Zero iff the sampled
    constraint holds.
    """
    if n_samples < 2:
        raise ValueError("need at least two VO samples")
    obstacles = list(obstacles)
    if not obstacles:
        return 0.0
    arc_end = min(speed * tau, curve.total_length())
    arcs = np.linspace(0.0, arc_end, n_samples)
    # Grid-interpolated inversion: sampling positions need far less
    # precision than the obstacle radii they are compared against.
    s_vals = np.atleast_1d(curve.param_at_length(arcs, polish=False))
    times = arcs / speed
    c0, c1 = curve.derivatives(s_vals, order=1)
    speeds = np.maximum(np.sqrt(np.einsum("ij,ij->i", c1, c1)), 1e-12)
    vel = speed * c1 / speeds[:, None]
    horizons = tau - times
    active = horizons > 0.0
    total = 0.0
    for obs in obstacles:
        rel_pos = (obs.position[None, :] + times[:, None] * obs.velocity[None, :]) - c0
        rel_vel = vel - obs.velocity[None, :]
        t_star = _ttc_array(rel_pos, rel_vel, obs.radius + r_u)
        hit = active & ~np.isnan(t_star)
        hit[hit] &= t_star[hit] <= horizons[hit]
        if hit.any():
            total += float(np.sum((horizons[hit] - t_star[hit]) / horizons[hit]))
    return total
