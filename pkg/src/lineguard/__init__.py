"""Target guarding on a translating line segment: closed-form equilibrium,
Values, barrier, simulator and brute-force verifiers."""

from .equilibrium import Analysis, Region, Side, analyse, attacker_strategy, classify, solve_eta
from .model import (
    AttackerTooSlowError,
    Controls,
    DefenderTooSlowError,
    GameParams,
    ParamsError,
    RelativeState,
    TargetFrameState,
    dynamics,
    frame_transform,
    validate_params,
)
from .sim import Event, SimConfig, StrategySpec, Trajectory, simulate
from .value import Evaluation, barrier_curve, game_value, signed_value

__all__ = [
    "Analysis", "AttackerTooSlowError", "Controls", "DefenderTooSlowError", "Evaluation",
    "Event", "GameParams", "ParamsError", "Region", "RelativeState", "Side", "SimConfig",
    "StrategySpec", "TargetFrameState", "Trajectory", "analyse", "attacker_strategy",
    "barrier_curve", "classify", "dynamics", "frame_transform", "game_value",
    "signed_value", "simulate", "solve_eta", "validate_params",
]
