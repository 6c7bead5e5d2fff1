"""Deliberative replanning: project, cut, optimize a path variation under
length/curvature/velocity-obstacle constraints, and orchestrate missions.

Each cycle cuts the active curve at the position the tracker is predicted
to reach one replanning interval ahead, then searches a box of variations
(interior control-point moves, weight shifts, endpoint spacing factors)
with the constrained differential-evolution solver. The tracker keeps
following the previous curve while the next one is computed; in tests the
two are interleaved on a fixed deterministic schedule.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .geometry import HeadingSpec, NurbsCurve
from .lshade import OptimizerConfig, ProblemDef, optimize
from .tracking import (FieldGains, UavState, VehicleLimits,
                       heading_rate_command, step_dubins, vector_field)
from .velocity_obstacle import path_vo_violation
from .world import SimLog, World

FEAS_EPS = 1e-12


class ReplanError(RuntimeError):
    """Optimization produced no evaluations; carries the previous curve."""

    def __init__(self, message: str, curve: NurbsCurve):
        super().__init__(message)
        self.curve = curve


@dataclass(frozen=True)
class Waypoint:
    position: np.ndarray
    heading: float

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if not np.all(np.isfinite(pos)) or not math.isfinite(self.heading):
            raise ValueError("waypoint fields must be finite")
        object.__setattr__(self, "position", pos)


@dataclass
class PlannerConfig:
    t_replan: float = 0.1  # seconds between replans
    tau: float = 3.0  # VO horizon, seconds
    kappa_max: float = 0.05  # 1/m
    r_u: float = 0.0  # vehicle radius, m
    r_safe: float = 5.0  # safety radius, m
    r_view: float = 80.0  # sensing range, m
    n_interior: int = 8
    n_curv_samples: int = 64
    n_vo_samples: int = 20
    n_obs_samples: int = 64
    waypoint_tolerance: float = 3.0
    budget_mode: bool = False  # True: deterministic, no wall deadline
    disable_vo: bool = False
    disable_curvature: bool = False
    initial_refine_budget: int = 0  # offline refinement evals, 0 = off
    gains: FieldGains = None  # defaults to beta matched to the turn radius
    optimizer: OptimizerConfig = field(
        default_factory=lambda: OptimizerConfig(budget=512, n_init=40))

    def __post_init__(self):
        if self.t_replan <= 0.0:
            raise ValueError("t_replan must be positive")
        if self.tau <= self.t_replan:
            raise ValueError("VO horizon tau must exceed t_replan")
        if min(self.r_safe, self.r_view) <= 0.0 or self.r_u < 0.0:
            raise ValueError("radii must be positive (r_u may be zero)")
        if self.n_interior < 1:
            raise ValueError("need at least one movable interior point")
        if self.gains is None:
            # The normal blend should saturate over the turning-radius
            # scale, not over one meter, or the tracker limit-cycles.
            self.gains = FieldGains(beta=self.kappa_max)

    @property
    def rho_min(self) -> float:
        return 1.0 / self.kappa_max


@dataclass
class ReplanResult:
    curve: NurbsCurve
    feasible: bool
    f: float  # path length of the returned curve, m
    violations: dict  # {"obstacle", "curvature", "vo"} at 4x density
    wall_time: float
    evals: int
    delta: np.ndarray | None = None
    anchor: float = 0.0  # projection parameter on the previous curve
    remaining_length: float = 0.0


def delta_bounds(curve: NurbsCurve, config: PlannerConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-cycle variation box: local point moves, small weight shifts,
    spacing factors within the turning-radius scale."""
    n_mov = geometry.movable_count(curve)
    rho = config.rho_min
    # Point moves are kept well inside the turning-radius scale: the box
    # bounds one cycle's change, and plans are re-optimized every t_replan,
    # so a small box still yields fast lateral authority while keeping
    # consecutive plans close enough for the warm start to converge.
    lower = np.concatenate([
        np.full(2 * n_mov, -0.5 * rho),
        np.full(n_mov, -0.5),
        [0.05 * rho, 0.05 * rho],
    ])
    upper = np.concatenate([
        np.full(2 * n_mov, 0.5 * rho),
        np.full(n_mov, 0.5),
        [2.0 * rho, 2.0 * rho],
    ])
    return lower, upper


def initial_path(wp_from: Waypoint, wp_to: Waypoint,
                 config: PlannerConfig) -> NurbsCurve:
    """Straight-chord heading path between two waypoints."""
    chord = float(np.linalg.norm(wp_to.position - wp_from.position))
    if chord == 0.0:
        raise ValueError("waypoints must be distinct")
    rho = config.rho_min
    # Keep the rigid collinear triples short: everything within 3 * lam0 of
    # an endpoint can only stretch along the heading, so a long spacing
    # would leave the near portion of the path unable to move sideways.
    lam0 = min(0.25 * rho, 0.1 * chord)
    lam0 = min(max(lam0, 0.05 * rho), 2.0 * rho)
    spec = HeadingSpec(gamma_init=wp_from.heading, gamma_goal=wp_to.heading,
                       lam1=lam0, lam2=lam0)
    return geometry.build_path_with_headings(wp_from.position, wp_to.position,
                                             spec, config.n_interior)


def refine_initial_path(curve: NurbsCurve, statics, config: PlannerConfig,
                        seed: int, budget: int) -> NurbsCurve:
    """Offline refinement against the known map with a larger budget."""
    lower, upper = delta_bounds(curve, config)
    cache = _CandidateCache(curve, lower, upper, statics, [], config,
                            speed=1.0)
    problem = ProblemDef(dimension=lower.size, lower=lower, upper=upper,
                         objective=cache.objective,
                         constraints=cache.constraints)
    opt_cfg = replace(config.optimizer, budget=budget, deadline=None,
                      seed=seed)
    best, _ = optimize(problem, opt_cfg,
                       warm_start=[geometry.neutral_delta(curve)])
    return cache.curve_for(best.x)


def cut_path_at_projection(curve: NurbsCurve, uav_state: UavState,
                           t_s: float, hint: float | None = None
                           ) -> tuple[NurbsCurve | None, float]:
    """Cut the curve at the tracker's predicted position t_s ahead.

    Returns (remaining curve, anchor parameter). The remaining curve is
    None when the advanced anchor reaches the end of the path, signalling
    the mission loop to switch waypoints.
    """
    s_star, _ = curve.project(uav_state.position, hint=hint)
    arc_anchor = float(curve.length_from_start(s_star))
    target = arc_anchor + uav_state.speed * t_s
    total = curve.total_length()
    if target >= total - 1e-9:
        return None, s_star
    s_split = float(curve.param_at_length(target))
    if s_split <= 1e-9:
        return curve, s_star
    if s_split >= 1.0 - 1e-9:
        return None, s_star
    _, right = curve.split(s_split)
    return right, s_star


def constraint_violations(candidate: NurbsCurve, statics, dynamics,
                          config: PlannerConfig, speed: float,
                          scale: int = 1) -> np.ndarray:
    """[static-obstacle, curvature, velocity-obstacle] violation magnitudes.

    All components are non-negative and zero iff the sampled constraint
    holds; `scale` multiplies every sampling density (used for the 4x
    post-check of accepted plans).
    """
    curv_grid = np.linspace(0.0, 1.0, config.n_curv_samples * scale)
    c0, kappa = candidate.positions_and_curvatures(curv_grid)

    v_obs = 0.0
    statics = list(statics)
    if statics:
        n_obs = config.n_obs_samples * scale
        # Reuse the curvature-grid positions when the densities coincide so
        # both families cost one curve evaluation.
        pts = c0 if n_obs == curv_grid.size \
            else candidate.point(np.linspace(0.0, 1.0, n_obs))
        for s in statics:
            d = np.linalg.norm(pts - s.center, axis=1)
            v_obs += float(np.sum(np.maximum(
                0.0, (s.radius + config.r_safe + config.r_u) - d)))

    v_curv = 0.0
    if not config.disable_curvature:
        # The tiny slack keeps a plan that rides the curvature bound from
        # flipping infeasible when it is re-sampled on the next cycle.
        v_curv = float(np.sum(np.maximum(0.0,
                                         kappa - config.kappa_max - 1e-9))
                       / (curv_grid.size - 1))

    v_vo = 0.0
    if not config.disable_vo and dynamics:
        v_vo = path_vo_violation(candidate, speed, dynamics,
                                 r_u=config.r_u + config.r_safe,
                                 tau=config.tau,
                                 n_samples=config.n_vo_samples * scale)
    return np.array([v_obs, v_curv, v_vo])


def _verify(candidate: NurbsCurve, statics, dynamics, config: PlannerConfig,
            speed: float) -> tuple[bool, dict]:
    """Re-check all constraint families at 4x sampling density."""
    v = constraint_violations(candidate, statics, dynamics, config, speed,
                              scale=4)
    if not config.disable_curvature:
        k_peak, _ = candidate.max_curvature(4 * config.n_curv_samples)
        v[1] = max(v[1], max(0.0, k_peak - config.kappa_max - 1e-9))
    violations = {"obstacle": float(v[0]), "curvature": float(v[1]),
                  "vo": float(v[2])}
    return bool(np.all(v <= FEAS_EPS)), violations


class _CandidateCache:
    """Shared objective/constraint evaluator memoizing apply_delta per x."""

    def __init__(self, base: NurbsCurve, lower, upper, statics, dynamics,
                 config: PlannerConfig, speed: float):
        self.base = base
        self.lower = lower
        self.upper = upper
        self.statics = list(statics)
        self.dynamics = list(dynamics)
        self.config = config
        self.speed = speed
        self._cache: dict[bytes, tuple] = {}

    def _entry(self, x: np.ndarray) -> tuple:
        key = np.asarray(x, dtype=float).tobytes()
        hit = self._cache.get(key)
        if hit is None:
            if len(self._cache) > 4096:
                self._cache.clear()
            curve = geometry.apply_delta(self.base, x, self.lower, self.upper)
            hit = [curve, None, None]
            self._cache[key] = hit
        return hit

    def curve_for(self, x: np.ndarray) -> NurbsCurve:
        return self._entry(x)[0]

    def objective(self, x: np.ndarray) -> float:
        entry = self._entry(x)
        if entry[1] is None:
            # total_length() shares the cached arc-length grid with the VO
            # constraint, so the length integral is computed once per x.
            entry[1] = entry[0].total_length()
        return entry[1]

    def constraints(self, x: np.ndarray) -> np.ndarray:
        entry = self._entry(x)
        if entry[2] is None:
            entry[2] = constraint_violations(entry[0], self.statics,
                                             self.dynamics, self.config,
                                             self.speed)
        return entry[2]


def _align_delta(old: np.ndarray, new_dim: int) -> np.ndarray:
    """Map a previous cycle's delta onto a (possibly shrunk) layout.

    Points are consumed from the front of the path, so blocks align on
    their trailing entries; new leading entries start at zero.
    """
    n_old = (old.size - 2) // 3
    n_new = (new_dim - 2) // 3
    out = np.zeros(new_dim)
    k = min(n_old, n_new)
    if k:
        out[2 * (n_new - k): 2 * n_new] = old[2 * (n_old - k): 2 * n_old]
        out[2 * n_new + (n_new - k): 3 * n_new] = \
            old[2 * n_old + (n_old - k): 3 * n_old]
    out[-2:] = old[-2:]
    return out


def replan_cycle(curve: NurbsCurve, uav_state: UavState, sensed, config:
                 PlannerConfig, seed: int, statics=(), warm_delta=None,
                 anchor_hint: float | None = None) -> ReplanResult | None:
    """One deliberative cycle: cut, optimize the variation, verify.

    Returns None when the path is exhausted (the caller switches to the
    next waypoint). An infeasible best is returned flagged infeasible; the
    tracker keeps following it and retries next cycle.
    """
    t0 = time.perf_counter()
    cut, anchor = cut_path_at_projection(curve, uav_state, config.t_replan,
                                         hint=anchor_hint)
    if cut is None:
        return None

    if geometry.movable_count(cut) < 1:
        feasible, violations = _verify(cut, statics, sensed, config,
                                       uav_state.speed)
        return ReplanResult(curve=cut, feasible=feasible,
                            f=cut.arc_length(rel_tol=1e-8),
                            violations=violations,
                            wall_time=time.perf_counter() - t0, evals=0,
                            delta=None, anchor=anchor,
                            remaining_length=cut.total_length())

    lower, upper = delta_bounds(cut, config)
    cache = _CandidateCache(cut, lower, upper, statics, sensed, config,
                            uav_state.speed)
    problem = ProblemDef(dimension=lower.size, lower=lower, upper=upper,
                         objective=cache.objective,
                         constraints=cache.constraints)
    deadline = None if config.budget_mode else 0.8 * config.t_replan
    opt_cfg = replace(config.optimizer, seed=seed, deadline=deadline)
    warm = [geometry.neutral_delta(cut)]
    if warm_delta is not None:
        warm.append(_align_delta(np.asarray(warm_delta, dtype=float),
                                 lower.size))
    try:
        best, stats = optimize(problem, opt_cfg, warm_start=warm)
    except RuntimeError as exc:
        raise ReplanError(str(exc), curve) from exc

    best_curve = cache.curve_for(best.x)
    feasible, violations = _verify(best_curve, statics, sensed, config,
                                   uav_state.speed)
    return ReplanResult(curve=best_curve, feasible=feasible, f=best.f,
                        violations=violations,
                        wall_time=time.perf_counter() - t0,
                        evals=stats.evaluations, delta=np.array(best.x),
                        anchor=anchor,
                        remaining_length=cut.total_length())


def mission_loop(waypoints: list, world: World, config: PlannerConfig,
                 seed: int, uav0: UavState | None = None,
                 dt_sim: float | None = None,
                 max_steps: int = 20000) -> SimLog:
    """Fly the waypoint sequence: track with the vector field at the
    simulation rate, replan every t_replan, stop on success, collision or
    the step cap."""
    if len(waypoints) < 2:
        raise ValueError("a mission needs at least two waypoints")
    dt = dt_sim if dt_sim is not None else config.t_replan / 10.0
    steps_per_replan = max(1, int(round(config.t_replan / dt)))
    limits = VehicleLimits(config.kappa_max)
    gains = config.gains

    if uav0 is None:
        uav0 = UavState(position=np.array(waypoints[0].position),
                        heading=waypoints[0].heading, speed=15.0)
    state = uav0
    log = SimLog()
    log.times.append(world.clock)
    log.positions.append(np.array(state.position))
    log.headings.append(state.heading)
    log.commands.append(0.0)
    log.anchors.append(0.0)
    log.clearances.append(world.min_clearance(state.position, config.r_u,
                                              config.r_safe))

    cycle = 0
    total_steps = 0
    for wp_idx in range(1, len(waypoints)):
        target = waypoints[wp_idx]
        leg_from = Waypoint(position=np.array(state.position),
                            heading=state.heading)
        active = initial_path(leg_from, target, config)
        if config.initial_refine_budget > 0 and world.statics:
            active = refine_initial_path(
                active, world.visible_statics(state.position, config.r_view),
                config, seed=seed * 7919 + wp_idx,
                budget=config.initial_refine_budget)
        log.curves.append({"t": world.clock, "leg": wp_idx,
                           "curve": active.to_dict()})
        pending: ReplanResult | None = None
        warm_delta = None
        anchor_hint: float | None = 0.0
        leg_steps = 0
        while True:
            dist_to_go = float(np.linalg.norm(state.position - target.position))
            if dist_to_go <= config.waypoint_tolerance:
                log.waypoint_times.append({"waypoint": wp_idx,
                                           "t": world.clock})
                break
            if total_steps >= max_steps:
                log.success = False
                _finalize(log, config)
                return log

            if leg_steps % steps_per_replan == 0:
                if pending is not None:
                    active = pending.curve
                    anchor_hint = 0.0
                    log.curves.append({"t": world.clock, "leg": wp_idx,
                                       "curve": active.to_dict()})
                sensed = world.sense(state.position, config.r_view)
                statics = world.visible_statics(state.position, config.r_view)
                try:
                    result = replan_cycle(active, state, sensed, config,
                                          seed=seed * 100003 + cycle,
                                          statics=statics,
                                          warm_delta=warm_delta,
                                          anchor_hint=anchor_hint)
                except ReplanError:
                    result = None
                cycle += 1
                pending = result
                if result is None and dist_to_go > config.waypoint_tolerance:
                    # The path is consumed but the waypoint was missed
                    # (tracking overshoot): start a fresh leg path from the
                    # current state so the field can steer back.
                    leg_from = Waypoint(position=np.array(state.position),
                                        heading=state.heading)
                    active = initial_path(leg_from, target, config)
                    log.curves.append({"t": world.clock, "leg": wp_idx,
                                       "curve": active.to_dict()})
                    warm_delta = None
                    anchor_hint = 0.0
                if result is not None:
                    warm_delta = result.delta
                    log.replans.append({
                        "t": world.clock, "leg": wp_idx,
                        "feasible": result.feasible, "f": result.f,
                        "violations": result.violations,
                        "wall_time": result.wall_time,
                        "evals": result.evals,
                        "remaining_length": result.remaining_length,
                    })

            direction, s_anchor = vector_field(active, state.position, gains,
                                               hint=anchor_hint)
            anchor_hint = s_anchor
            u = heading_rate_command(state, direction, limits, gains)
            state = step_dubins(state, u, dt, limits)
            world.step(dt)

            log.times.append(world.clock)
            log.positions.append(np.array(state.position))
            log.headings.append(state.heading)
            log.commands.append(u)
            log.anchors.append(s_anchor)
            log.clearances.append(world.min_clearance(state.position,
                                                      config.r_u,
                                                      config.r_safe))
            event = world.check_collision(state.position, config.r_u,
                                          config.r_safe)
            if event is not None:
                log.collisions.append(event)
                log.success = False
                _finalize(log, config)
                return log
            leg_steps += 1
            total_steps += 1

    log.success = True
    _finalize(log, config)
    return log


def _finalize(log: SimLog, config: PlannerConfig) -> None:
    pos = np.array(log.positions)
    length = float(np.sum(np.linalg.norm(np.diff(pos, axis=0), axis=1))) \
        if len(pos) > 1 else 0.0
    finite = [c for c in log.clearances if math.isfinite(c)]
    walls = sorted(r["wall_time"] for r in log.replans)
    stats = {}
    if walls:
        stats = {
            "median": walls[len(walls) // 2],
            "p95": walls[min(len(walls) - 1, int(math.ceil(0.95 * len(walls))) - 1)],
            "max": walls[-1],
        }
    log.metrics = {
        "success": log.success,
        "executed_path_length": length,
        "min_clearance": min(finite) if finite else None,
        "replan_wall_time": stats,
        "replan_count": len(log.replans),
        "total_evals": int(sum(r["evals"] for r in log.replans)),
        "collision_count": len(log.collisions),
        "sim_time": log.times[-1] - log.times[0] if log.times else 0.0,
    }
