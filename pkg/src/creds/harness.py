"""Monte-Carlo execution: seed derivation, world construction, batches, sweeps.

Seeds are derived with :class:`numpy.random.SeedSequence` spawn keys, so run
``k`` of master seed ``s`` sees the same streams whatever the worker count.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import ScenarioConfig, SweepSpec
from .fire import FireState, QuenchCapability
from .metrics import RunMetrics, aggregate, compute_run_metrics, write_csv, write_json
from .search import SearchParams
from .sim import SimParams, UavState, World, build_world, run

_CENTERS_KEY = 0
_RUNS_KEY = 1


def derived_seed(master_seed: int, run_id: int) -> int:
    """64-bit seed of run ``run_id``; the whole run is a function of it."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(_RUNS_KEY, run_id))
    return int(ss.generate_state(1, np.uint64)[0])


def fire_centers(cfg: ScenarioConfig, master_seed: int) -> tuple[tuple[float, float], ...]:
    """Centres shared by every run of a master seed (uniform over the area)."""
    if cfg.fire_centers is not None:
        return cfg.fire_centers
    rng = np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(_CENTERS_KEY,)))
    xy = rng.uniform((0.0, 0.0), cfg.area, size=(cfg.n_fires, 2))
    return tuple((float(x), float(y)) for x, y in xy)


def sim_params(cfg: ScenarioConfig) -> SimParams:
    return SimParams(dt=cfg.dt, horizon=cfg.horizon, cost=cfg.cost,
                     full_observability=cfg.observability == "full", consensus=cfg.consensus,
                     search=SearchParams(), popup_rate=cfg.popup_rate, popup_until=cfg.popup_until,
                     popup_radius=cfg.radius_range, popup_spread_rate=cfg.spread_rate,
                     infeasible_rule=cfg.infeasible_rule)


def build_run(cfg: ScenarioConfig, master_seed: int, run_id: int = 0,
              centers: Sequence[tuple[float, float]] | None = None) -> World:
    """Instantiate run ``run_id``: radii and start positions are drawn here."""
    centers = fire_centers(cfg, master_seed) if centers is None else centers
    scenario_ss, world_ss, agents_ss = np.random.SeedSequence(derived_seed(master_seed, run_id)).spawn(3)
    draw = np.random.default_rng(scenario_ss)
    if cfg.fire_radii is not None:
        radii = cfg.fire_radii
    else:
        radii = draw.uniform(*cfg.radius_range, size=cfg.n_fires)
    if cfg.agent_starts is not None:
        starts = cfg.agent_starts
    else:
        starts = draw.uniform((0.0, 0.0), cfg.area, size=(cfg.n_agents, 2))
    spreads = cfg.spread_rates or (cfg.spread_rate,) * cfg.n_fires
    fires = []
    for j, (c, r, s) in enumerate(zip(centers, radii, spreads), start=1):
        a0 = math.pi * float(r) ** 2
        fires.append(FireState(j, (float(c[0]), float(c[1])), a0, a0, float(s)))
    uavs = []
    for i, ((v, q), p, ss) in enumerate(zip(cfg.capabilities(), starts, agents_ss.spawn(cfg.n_agents)), start=1):
        uavs.append(UavState(i, (float(p[0]), float(p[1])), QuenchCapability(q, v), cfg.sensing_radius,
                             np.random.default_rng(ss)))
    return build_world(fires, uavs, tuple(cfg.area), sim_params(cfg), np.random.default_rng(world_ss))


@dataclass
class RunResult:
    metrics: RunMetrics
    events: list[dict] | None = None
    rounds: list[dict] | None = None


def simulate(cfg: ScenarioConfig, master_seed: int, run_id: int = 0, keep_events: bool = False,
             trace_rounds: bool = False, centers=None) -> RunResult:
    world = build_run(cfg, master_seed, run_id, centers)
    if trace_rounds:
        world.round_trace = []
    run(world)
    m = compute_run_metrics(world.events, run_id=run_id, seed=derived_seed(master_seed, run_id))
    return RunResult(m, world.events if keep_events else None, world.round_trace)


def _run_task(task: tuple[ScenarioConfig, int, int]) -> RunMetrics:
    cfg, master_seed, run_id = task
    return simulate(cfg, master_seed, run_id).metrics


def _map(tasks: list, jobs: int) -> list[RunMetrics]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def run_batch(cfg: ScenarioConfig, n_runs: int, jobs: int = 1, master_seed: int | None = None,
              out_dir: str | Path | None = None, prefix: str = "batch") -> tuple[str, dict]:
    """``n_runs`` independent runs; returns (CSV text, summary) and writes both if ``out_dir``."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    seed = cfg.seed if master_seed is None else master_seed
    results = sorted(_map([(cfg, seed, k) for k in range(n_runs)], jobs), key=lambda r: r.run_id)
    csv_text = write_csv(results)
    summary = aggregate(results)
    summary.update({"scenario": cfg.name, "master_seed": seed, "cost": cfg.cost,
                    "observability": cfg.observability})
    if out_dir is not None:
        out = Path(out_dir)
        atomic_write(out / f"{prefix}.csv", csv_text)
        atomic_write(out / f"{prefix}.json", write_json(summary))
    return csv_text, summary


SWEEP_COLUMNS = ("sweep", "axis", "value", "ratio", "n_fires", "n_runs", "success_rate", "failure_rate")


def run_sweep(spec: SweepSpec, n_runs: int, jobs: int = 1, master_seed: int = 0, cost: str | None = None,
              observability: str | None = None, out_dir: str | Path | None = None) -> list[dict]:
    """Failure rate per (capability value, fire-to-agent ratio) cell."""
    cells = []
    tasks = []
    for value, ratio, cfg in spec.cells():
        if cost is not None:
            cfg = cfg.replace(cost=cost)
        if observability is not None:
            cfg = cfg.replace(observability=observability)
        cells.append((value, ratio, cfg))
        tasks.extend((cfg, master_seed, k) for k in range(n_runs))
    results = _map(tasks, jobs)
    rows = []
    for n, (value, ratio, cfg) in enumerate(cells):
        chunk = results[n * n_runs:(n + 1) * n_runs]
        ok = sum(r.success for r in chunk)
        rows.append({"sweep": spec.name, "axis": spec.axis, "value": value, "ratio": ratio,
                     "n_fires": cfg.n_fires, "n_runs": n_runs, "success_rate": 100.0 * ok / n_runs,
                     "failure_rate": 100.0 * (n_runs - ok) / n_runs})
    if out_dir is not None:
        lines = [",".join(SWEEP_COLUMNS)]
        lines += [",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in SWEEP_COLUMNS)
                  for r in rows]
        atomic_write(Path(out_dir) / f"{spec.name}.csv", "\n".join(lines) + "\n")
    return rows


def failure_knee(rows: Iterable[dict], value: float, level: float = 20.0) -> float:
    """Fire-to-agent ratio where the failure rate first reaches ``level`` (linear interpolation).

    Returns one step past the last ratio when the level is never reached.
    """
    pts = sorted((r["ratio"], r["failure_rate"]) for r in rows if r["value"] == value)
    prev = None
    for ratio, fail in pts:
        if fail >= level:
            if prev is None or prev[1] >= level:
                return float(ratio)
            r0, f0 = prev
            return r0 + (level - f0) * (ratio - r0) / (fail - f0)
        prev = (ratio, fail)
    step = pts[-1][0] - pts[-2][0] if len(pts) > 1 else 1
    return float(pts[-1][0] + step)


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc.strerror or exc}") from exc


def write_jsonl(path: Path, records: Iterable[dict]) -> None:
    atomic_write(path, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
