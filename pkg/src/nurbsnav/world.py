"""Deterministic 2D world: static no-fly discs, constant-velocity dynamic
obstacles, range-limited sensing, and collision checking.

The world owns its clock; dynamic obstacle positions are derived from it,
so stepping by dt/2 twice equals stepping by dt exactly. Obstacles are
hazards, not agents: they pass through each other and through statics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .velocity_obstacle import ObstacleState


@dataclass(frozen=True)
class StaticObstacle:
    center: np.ndarray
    radius: float
    known: bool = True

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("static obstacle radius must be positive")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))


@dataclass(frozen=True)
class DynamicObstacle:
    position0: np.ndarray  # position at spawn time
    velocity: np.ndarray
    radius: float
    spawn_time: float = 0.0

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("dynamic obstacle radius must be positive")
        object.__setattr__(self, "position0", np.asarray(self.position0, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))

    def active(self, t: float) -> bool:
        return t >= self.spawn_time

    def position(self, t: float) -> np.ndarray:
        return self.position0 + self.velocity * max(t - self.spawn_time, 0.0)


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    obstacle_index: int
    dynamic: bool
    penetration: float


@dataclass
class World:
    statics: list = field(default_factory=list)
    dynamics: list = field(default_factory=list)
    clock: float = 0.0

    def step(self, dt: float) -> None:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.clock += dt

    def sense(self, uav_pos, r_view: float) -> list[ObstacleState]:
        """Exact states of active dynamic obstacles within sensing range."""
        if r_view <= 0.0:
            raise ValueError("sensing range must be positive")
        uav_pos = np.asarray(uav_pos, dtype=float)
        out = []
        for d in self.dynamics:
            if not d.active(self.clock):
                continue
            pos = d.position(self.clock)
            if np.linalg.norm(pos - uav_pos) <= r_view:
                out.append(ObstacleState(position=pos, velocity=d.velocity,
                                         radius=d.radius))
        return out

    def visible_statics(self, uav_pos, r_view: float) -> list[StaticObstacle]:
        """Known statics plus unknown ones inside the sensing range."""
        uav_pos = np.asarray(uav_pos, dtype=float)
        out = []
        for s in self.statics:
            if s.known or np.linalg.norm(s.center - uav_pos) <= r_view + s.radius:
                out.append(s)
        return out

    def check_collision(self, uav_pos, r_u: float,
                        r_safe: float) -> CollisionEvent | None:
        """Strict-inequality disc overlap against every active obstacle."""
        uav_pos = np.asarray(uav_pos, dtype=float)
        margin = r_safe + r_u
        for i, s in enumerate(self.statics):
            dist = float(np.linalg.norm(s.center - uav_pos))
            if dist < s.radius + margin:
                return CollisionEvent(time=self.clock, obstacle_index=i,
                                      dynamic=False,
                                      penetration=s.radius + margin - dist)
        for i, d in enumerate(self.dynamics):
            if not d.active(self.clock):
                continue
            dist = float(np.linalg.norm(d.position(self.clock) - uav_pos))
            if dist < d.radius + margin:
                return CollisionEvent(time=self.clock, obstacle_index=i,
                                      dynamic=True,
                                      penetration=d.radius + margin - dist)
        return None

    def min_clearance(self, uav_pos, r_u: float, r_safe: float) -> float:
        """Smallest signed clearance to any active obstacle (inf if none)."""
        uav_pos = np.asarray(uav_pos, dtype=float)
        margin = r_safe + r_u
        best = float("inf")
        for s in self.statics:
            best = min(best, float(np.linalg.norm(s.center - uav_pos))
                       - s.radius - margin)
        for d in self.dynamics:
            if d.active(self.clock):
                best = min(best, float(np.linalg.norm(d.position(self.clock) - uav_pos))
                           - d.radius - margin)
        return best


@dataclass
class SimLog:
    """Complete record of one mission run."""

    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    headings: list = field(default_factory=list)
    commands: list = field(default_factory=list)
    anchors: list = field(default_factory=list)  # projection parameter
    clearances: list = field(default_factory=list)
    replans: list = field(default_factory=list)  # dict summaries per cycle
    curves: list = field(default_factory=list)  # serialized activated curves
    collisions: list = field(default_factory=list)
    waypoint_times: list = field(default_factory=list)
    success: bool = False
    metrics: dict = field(default_factory=dict)
