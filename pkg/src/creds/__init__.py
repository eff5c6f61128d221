"""Auction-based sequential assignment of growing fires to quenching UAVs."""

from .config import ScenarioConfig, load_config, preset, save_config
from .consensus import AssignmentOutcome, ConsensusConfig, run_rounds
from .fire import (INFEASIBLE, FireState, QuenchCapability, critical_area, deadline_time, evolve_under_quench, grow,
                   quench_time)
from .harness import run_batch, run_sweep, simulate
from .metrics import RunMetrics, aggregate, compute_run_metrics
from .schedule import AgentSnapshot, FireSnapshot, ScheduleModel

__all__ = [
    "INFEASIBLE", "AgentSnapshot", "AssignmentOutcome", "ConsensusConfig", "FireSnapshot", "FireState",
    "QuenchCapability", "RunMetrics", "ScenarioConfig", "ScheduleModel", "aggregate", "compute_run_metrics",
    "critical_area", "deadline_time", "evolve_under_quench", "grow", "load_config", "preset", "quench_time",
    "run_batch", "run_rounds", "run_sweep", "save_config", "simulate",
]
__version__ = "0.1.0"
