"""Downlink scheduling simulator and attack planners for mixed-priority
LEO Earth-observation constellations sharing ground stations.

The pipeline: a scenario (satellites, stations, captured data units) feeds
orbit propagation, which feeds per-slot antenna assignment, which yields the
target's transmissible and attackable slot sets. On top of those sit a
per-unit FIFO queue simulator, planners that delay a unit past a deadline or
force it to be dropped, and a Monte-Carlo harness that measures how those
plans survive estimation noise.
"""

from .attack import AttackContext, AttackStrategy, save_strategy, save_strategy_summary
from .errors import (AttackFail, BadChecksum, BadLayout, Infeasible, IoError,
                     OrbitSiegeError, OutOfHorizon, ParseError, StaleElements,
                     ValidationError)
from .evaluation import (AXES, KINDS, EvalConfig, NoiseModel, PointResult,
                         SweepResult, TrialRecord, derive_rng, extend_targets,
                         perturb, plan_attack, run_trial, save_aggregate,
                         save_report, sweep)
from .onboard import (QueueTrace, QueueWorld, evolve, evolve_aggregate,
                      per_slot_capacity, save_trace, save_trace_events)
from .orbit import (ContactWindow, compute_contact_windows, elevation_deg,
                    load_contact_windows, parse_tle, propagate,
                    save_contact_windows)
from .planner_delay import DelayPlanRequest, plan_delay, verify_delay
from .planner_overflow import OverflowPlanRequest, plan_overflow, verify_overflow
from .scenario import (AttackabilityRecord, ConstellationScenario, CostModel,
                       DataUnit, GroundStationSpec, SatelliteSpec, TargetSpec,
                       TimeGrid, TleElements, load_scenario, save_scenario,
                       scenario_from_dict, scenario_to_dict)
from .scheduler import (SlotSchedule, assign_slot, attackability,
                        attackability_for, build_schedule, hungarian,
                        save_attackability)
from .synth import build_constellation, build_s0, build_s0_ovf

__version__ = "0.1.0"

__all__ = [
    "AXES", "KINDS",
    "AttackContext", "AttackStrategy", "AttackFail", "AttackabilityRecord",
    "BadChecksum", "BadLayout", "ConstellationScenario", "ContactWindow",
    "CostModel", "DataUnit", "DelayPlanRequest", "EvalConfig",
    "GroundStationSpec", "Infeasible", "IoError", "NoiseModel",
    "OrbitSiegeError", "OutOfHorizon", "OverflowPlanRequest", "ParseError",
    "PointResult", "QueueTrace", "QueueWorld", "SatelliteSpec",
    "SlotSchedule", "StaleElements", "SweepResult", "TargetSpec", "TimeGrid",
    "TleElements", "TrialRecord", "ValidationError",
    "assign_slot", "attackability", "attackability_for", "build_constellation",
    "build_s0", "build_s0_ovf", "build_schedule", "compute_contact_windows",
    "derive_rng", "elevation_deg", "evolve", "evolve_aggregate",
    "extend_targets", "hungarian", "load_contact_windows", "load_scenario",
    "parse_tle", "per_slot_capacity", "perturb", "plan_attack", "plan_delay",
    "plan_overflow", "propagate", "run_trial", "save_aggregate",
    "save_attackability", "save_contact_windows", "save_report",
    "save_scenario", "save_strategy", "save_strategy_summary", "save_trace",
    "save_trace_events", "scenario_from_dict", "scenario_to_dict", "sweep",
    "verify_delay", "verify_overflow",
]
