"""Benchmark suite: generated scenario set and Proposed vs Baseline comparison."""

from __future__ import annotations

import json
import math
import statistics
import zlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path as FsPath

import numpy as np

from ..follower import Variant
from .runner import FORMAT_VERSION, ScenarioReport, run_scenario
from .scenario import Scenario, load_scenario, save_scenario, scenario_from_dict

PRESET_NAMES = ("car", "tank", "hover")


def _hill(center, radius, grade, uphill_deg):
    return {"center": [float(center[0]), float(center[1])], "radius": float(radius), "grade": float(grade),
            "uphill_heading": math.radians(uphill_deg)}


def suite_paths(seed: int) -> list[dict]:
    """Ten test routes: open curves, sharp turns, steep hills and a narrow corridor."""
    rng = np.random.default_rng(seed)
    spline_seeds = [int(x) for x in rng.integers(0, 2**31 - 1, size=3)]
    return [
        {"name": "straight_hill", "path": {"generator": "straight", "length": 140.0},
         "env": {"slopes": [_hill((70, 0), 30, 0.22, 0)]}},
        {"name": "circle", "path": {"generator": "circle", "radius": 20.0, "sweep_deg": 330.0}},
        {"name": "s_curve", "path": {"generator": "s_curve", "amplitude": 12.0, "wavelength": 50.0}},
        {"name": "hairpin", "path": {"generator": "hairpin", "radius": 7.0, "leg_length": 40.0}},
        {"name": "hairpin_hill", "path": {"generator": "hairpin", "radius": 9.0, "leg_length": 40.0},
         "env": {"slopes": [_hill((20, 0), 14, 0.25, 0), _hill((48, 9), 9, 0.2, 90)]}},
        {"name": "zigzag_narrow", "path": {"generator": "zigzag", "leg_length": 20.0, "legs": 6},
         "corridor_half_width": 1.5},
        {"name": "s_curve_hill", "path": {"generator": "s_curve", "amplitude": 8.0, "wavelength": 40.0},
         "env": {"slopes": [_hill((60, 0), 25, 0.2, 0)]}},
        {"name": "spline_a", "path": {"generator": "random_spline", "seed": spline_seeds[0]}},
        {"name": "spline_b", "path": {"generator": "random_spline", "seed": spline_seeds[1], "max_turn_deg": 90.0},
         "corridor_half_width": 2.0},
        {"name": "spline_hill", "path": {"generator": "random_spline", "seed": spline_seeds[2]},
         "env": {"slopes": [_hill((50, 0), 40, 0.18, 0)]}},
    ]


def suite_scenario_dicts(seed: int) -> list[dict]:
    out = []
    for base in suite_paths(seed):
        for preset in PRESET_NAMES:
            d = {"format_version": FORMAT_VERSION, **base, "name": f"{base['name']}_{preset}",
                 "vehicle": {"preset": preset}, "time_limit": 150.0, "goal_radius": 2.0}
            out.append(d)
    return out


def generate_suite(seed: int) -> list[Scenario]:
    return [scenario_from_dict(d) for d in suite_scenario_dicts(seed)]


def write_suite(directory, seed: int) -> list[FsPath]:
    directory = FsPath(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for d in suite_scenario_dicts(seed):
        f = directory / f"{d['name']}.yaml"
        save_scenario(d, f)
        files.append(f)
    return files


def load_suite(directory) -> list[Scenario]:
    files = sorted(FsPath(directory).glob("*.yaml")) + sorted(FsPath(directory).glob("*.yml"))
    return [load_scenario(f) for f in files]


def trial_rng(seed: int, name: str, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode()), trial]))


def _run_one(args) -> ScenarioReport:
    scenario, variant, seed, trial, ticks_per_sec = args
    rng = trial_rng(seed, scenario.name, trial) if trial > 0 else None
    return run_scenario(scenario, ticks_per_sec, variant, rng)


def _summary(reports: list[ScenarioReport]) -> dict:
    def mean(xs):
        return statistics.fmean(xs) if xs else 0.0

    def std(xs):
        return statistics.pstdev(xs) if len(xs) > 1 else 0.0

    times = [r.total_time for r in reports]
    return {
        "runs": len(reports),
        "completed": sum(r.completed for r in reports),
        "total_stuck_events": sum(r.stuck_events for r in reports),
        "stuck_runs": sum(r.stuck_events > 0 for r in reports),
        "teleports": sum(r.teleports for r in reports),
        "cte_mean": mean([r.cte_mean for r in reports]),
        "inside_corridor_pct_mean": mean([r.inside_corridor_pct for r in reports]),
        "total_time_mean": mean(times),
        "total_time_std": std(times),
        "speed_mean": mean([r.speed_mean for r in reports]),
    }


def reduction_pct(proposed: float, baseline: float) -> float | None:
    """(1 - proposed / baseline) * 100; undefined when the baseline is zero."""
    if baseline == 0:
        return None
    return (1.0 - proposed / baseline) * 100.0


def run_suite(scenarios, variants=(Variant.PROPOSED, Variant.BASELINE), trials: int = 1, seed: int = 0,
              ticks_per_sec: float = 60.0, jobs: int = 1) -> dict:
    """Run every scenario under every variant ``trials`` times and aggregate.

    Trial 0 spawns exactly on the path; later trials jitter the spawn pose
    from a generator seeded by (seed, scenario name, trial). Output is
    independent of ``jobs`` and of the order of ``scenarios``.
    """
    scenarios = sorted(scenarios, key=lambda s: s.name)
    if not scenarios:
        raise ValueError("scenario set is empty")
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ValueError(f"trials must be an integer >= 1, got {trials!r}")
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ValueError("scenario names must be unique")
    variants = [Variant(v) for v in variants]
    if not variants:
        raise ValueError("no variants given")

    jobs_list = [(sc, v, seed, k, ticks_per_sec) for v in variants for sc in scenarios for k in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_one, jobs_list, chunksize=4))
    else:
        reports = [_run_one(j) for j in jobs_list]

    preset_of = {s.name: s.vehicle_preset or s.vehicle.kind.value for s in scenarios}
    out = {"format_version": FORMAT_VERSION, "seed": seed, "trials": trials, "ticks_per_sec": ticks_per_sec,
           "variants": {}, "scenarios": {}}
    by_variant: dict[str, list[ScenarioReport]] = {}
    for (sc, v, _, k, _), rep in zip(jobs_list, reports):
        by_variant.setdefault(v.value, []).append(rep)
        entry = out["scenarios"].setdefault(sc.name, {}).setdefault(v.value, [])
        d = rep.to_dict()
        d.pop("format_version")
        d["trial"] = k
        entry.append(d)
    for v, reps in by_variant.items():
        summary = _summary(reps)
        per_vehicle = {}
        for r in reps:
            per_vehicle.setdefault(preset_of[r.name], []).append(r)
        summary["per_vehicle"] = {k: _summary(vs) for k, vs in per_vehicle.items()}
        out["variants"][v] = summary
    if Variant.PROPOSED.value in out["variants"] and Variant.BASELINE.value in out["variants"]:
        p = out["variants"][Variant.PROPOSED.value]
        b = out["variants"][Variant.BASELINE.value]
        out["comparison"] = {
            "stuck_events_reduction_pct": reduction_pct(p["total_stuck_events"], b["total_stuck_events"]),
            "total_time_reduction_pct": reduction_pct(p["total_time_mean"], b["total_time_mean"]),
        }
    return out


def suite_to_json(result: dict) -> str:
    return json.dumps(result, sort_keys=True, indent=2) + "\n"
