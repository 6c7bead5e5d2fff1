"""End-to-end acceptance checks.

Each test covers one shipped guarantee, prints a single pass/fail line
(also echoed in the terminal summary), and asserts it. The mission-level
checks share the session-scoped runs from conftest.
"""

import math
import time

import numpy as np

from nurbsnav.cli import _bench_replan, write_trajectory_csv
from nurbsnav.geometry import NurbsCurve, _insert_knot
from nurbsnav.lshade import OptimizerConfig, ProblemDef, optimize
from nurbsnav.scenario import load_scenario, run_mission
from nurbsnav.velocity_obstacle import ObstacleState, in_truncated_vo

from conftest import ACCEPTANCE_LINES


def _record(number: int, name: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_1_replan_budget(scenario_dir):
    scenario = load_scenario(scenario_dir / "bench.json")
    metrics = _bench_replan(scenario, seed=0, n_replans=50,
                            disable_vo=False, disable_curvature=False)
    median = metrics["wall_time"]["median"]
    p95 = metrics["wall_time"]["p95"]
    ok = (metrics["sensed_obstacles"] == 5
          and metrics["decision_dimension"] <= 26
          and metrics["replans"] == 50
          and median <= 0.100 and p95 <= 0.150)
    assert _record(1, "replan wall-time budget", ok,
                   f"median {median * 1e3:.1f} ms, p95 {p95 * 1e3:.1f} ms, "
                   f"D={metrics['decision_dimension']}, "
                   f"{metrics['sensed_obstacles']} obstacles")


def test_criterion_2_geometry_oracles():
    t0 = time.perf_counter()
    quarter = NurbsCurve(
        degree=2,
        control_points=np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
        weights=np.array([1.0, math.sqrt(0.5), 1.0]),
        knots=np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
    )
    s = np.linspace(0.0, 1.0, 1000)
    pos_err = float(np.max(np.abs(
        np.linalg.norm(quarter.point(s), axis=1) - 1.0)))
    curv_err = float(np.max(np.abs(quarter.curvatures(s) - 1.0)))
    arc_err = abs(quarter.arc_length() - math.pi / 2.0)

    # Shape invariance under knot insertion, against the analytic circle.
    hom = np.column_stack([quarter.weights[:, None] * quarter.control_points,
                           quarter.weights])
    hom2, knots2 = _insert_knot(hom, quarter.knots, quarter.degree, 0.5)
    refined = NurbsCurve(degree=2, control_points=hom2[:, :2] / hom2[:, 2:],
                         weights=hom2[:, 2], knots=knots2)
    insert_err = float(np.max(np.linalg.norm(
        refined.point(s) - quarter.point(s), axis=1)))
    elapsed = time.perf_counter() - t0

    ok = (pos_err <= 1e-9 and curv_err <= 1e-6 and arc_err <= 1e-7
          and insert_err <= 1e-9 and elapsed < 1.0)
    assert _record(2, "quarter-circle geometry oracles", ok,
                   f"pos {pos_err:.2e}, curv {curv_err:.2e}, "
                   f"arc {arc_err:.2e}, insert {insert_err:.2e}, "
                   f"{elapsed:.2f} s")


def test_criterion_3_vo_brute_force_equivalence():
    rng = np.random.default_rng(12345)
    dt = 1e-3
    disagreements = 0
    for _ in range(1000):
        p_u = rng.uniform(-50.0, 50.0, 2)
        p_o = rng.uniform(-50.0, 50.0, 2)
        v_u = rng.uniform(-10.0, 10.0, 2)
        v_o = rng.uniform(-10.0, 10.0, 2)
        r_o = rng.uniform(0.5, 5.0)
        r_u = rng.uniform(0.0, 3.0)
        tau = rng.uniform(0.5, 5.0)
        obs = ObstacleState(position=p_o, velocity=v_o, radius=r_o)
        check = in_truncated_vo(v_u, p_u, obs, r_u, tau)

        times = np.arange(0.0, tau + dt, dt)
        rel = (p_o - p_u)[None, :] + times[:, None] * (v_o - v_u)[None, :]
        dists = np.linalg.norm(rel, axis=1)
        hits = np.nonzero(dists < r_o + r_u)[0]
        brute_in = hits.size > 0

        if check.in_vo == brute_in:
            continue
        band = 1e-3 * tau
        t_star = check.time_to_collision
        near_tau = t_star is not None and abs(t_star - tau) <= band
        if brute_in:
            near_tau = near_tau or abs(times[hits[0]] - tau) <= band
        if not near_tau:
            disagreements += 1
    ok = disagreements == 0
    assert _record(3, "truncated-VO brute-force equivalence", ok,
                   f"{disagreements} disagreements outside the boundary band")


def test_criterion_4_optimizer_convergence():
    toy = ProblemDef(
        dimension=2, lower=np.array([-5.0, -5.0]), upper=np.array([5.0, 5.0]),
        objective=lambda x: float(x @ x),
        constraints=lambda x: np.array([max(0.0, 1.0 - x[0] - x[1])]),
    )
    toy_ok = 0
    for seed in range(10):
        best, _ = optimize(toy, OptimizerConfig(budget=20_000, seed=seed))
        # 1e-12 slack: x = (0.5, 0.5) evaluates one ulp below 0.5.
        if 0.5 - 1e-12 <= best.f <= 0.501 and best.violation == 0.0:
            toy_ok += 1

    sphere = ProblemDef(
        dimension=5, lower=np.full(5, -5.0), upper=np.full(5, 5.0),
        objective=lambda x: float(x @ x),
    )
    sphere_ok = 0
    for seed in range(10):
        best, _ = optimize(sphere, OptimizerConfig(budget=10_000, seed=seed))
        if best.f <= 1e-6:
            sphere_ok += 1

    ok = toy_ok >= 9 and sphere_ok >= 9
    assert _record(4, "constrained optimizer convergence", ok,
                   f"toy {toy_ok}/10, sphere {sphere_ok}/10 seeds")


def test_criterion_5_kinematic_feasibility(empty_run, three_run, head_on_run):
    worst_curv = 0.0
    worst_turn = 0.0
    n_feasible = 0
    for scenario, log, results in (empty_run, three_run, head_on_run):
        kappa_max = scenario.planner.kappa_max
        n_samples = 4 * scenario.planner.n_curv_samples
        for result in results:
            if not result.feasible:
                continue
            n_feasible += 1
            k_peak, _ = result.curve.max_curvature(n_samples)
            worst_curv = max(worst_curv, k_peak - kappa_max)
        speed = scenario.uav_speed
        realized = max(abs(u) for u in log.commands) / speed
        worst_turn = max(worst_turn, realized - kappa_max)
    ok = n_feasible > 0 and worst_curv <= 1e-6 and worst_turn <= 0.0
    assert _record(5, "kinematic feasibility of accepted plans", ok,
                   f"{n_feasible} feasible plans, curvature excess "
                   f"{worst_curv:.2e}, turn-rate excess {worst_turn:.2e}")


def test_criterion_6_avoidance_ablation(head_on_run, head_on_no_vo_run):
    scenario, log_vo, _ = head_on_run
    _, log_no_vo, _ = head_on_no_vo_run
    clearance = log_vo.metrics["min_clearance"]
    ok = (scenario.planner.budget_mode and scenario.seed == 0
          and log_vo.success and clearance > 0.0
          and len(log_no_vo.collisions) >= 1)
    assert _record(6, "velocity-obstacle ablation", ok,
                   f"with VO: success={log_vo.success}, "
                   f"min clearance {clearance:.2f} m; without VO: "
                   f"{len(log_no_vo.collisions)} collision(s)")


def test_criterion_7_mission_sanity(empty_run, three_run):
    scenario, log, _ = empty_run
    chord = float(np.linalg.norm(
        scenario.waypoints[0].position - scenario.uav_start))
    length = log.metrics["executed_path_length"]
    empty_ok = log.success and abs(length - chord) <= 0.02 * chord

    _, log3, _ = three_run
    order = [w["waypoint"] for w in log3.waypoint_times]
    times = [w["t"] for w in log3.waypoint_times]
    three_ok = (log3.success and order == [1, 2, 3]
                and times == sorted(times))
    ok = empty_ok and three_ok
    assert _record(7, "mission-level sanity", ok,
                   f"empty-world length {length:.1f} m vs chord {chord:.1f} m"
                   f"; waypoint order {order}")


def test_criterion_8_deterministic_trajectories(empty_run, tmp_path):
    scenario, log_a, _ = empty_run
    log_b = run_mission(scenario)
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    write_trajectory_csv(log_a, path_a)
    write_trajectory_csv(log_b, path_b)
    ok = path_a.read_bytes() == path_b.read_bytes()
    assert _record(8, "byte-identical repeat runs", ok,
                   f"{len(path_a.read_bytes())} bytes compared")
