"""Numerical core: model, roots, solver, value function, verification, simulation, sweeps."""

from .model import JumpMix, ModelParams, sample_jump, sample_jumps, validate
from .roots import RootSet, char_eval, solve_roots
from .solver import BarrierSolution, identity_residuals, solve
from .value import Region, StatePoint, classify, directional_u, value
from .verify import HjbReport, run_hjb_suite
from .sim import PathConfig, SimEstimate, mc_barrier_sweep, mc_stopping, mc_value
from .sensitivity import SweepReport, sweep_bstar, sweep_roots, sweep_value

__all__ = [
    "JumpMix",
    "ModelParams",
    "sample_jump",
    "sample_jumps",
    "validate",
    "RootSet",
    "char_eval",
    "solve_roots",
    "BarrierSolution",
    "identity_residuals",
    "solve",
    "Region",
    "StatePoint",
    "classify",
    "directional_u",
    "value",
    "HjbReport",
    "run_hjb_suite",
    "PathConfig",
    "SimEstimate",
    "mc_barrier_sweep",
    "mc_stopping",
    "mc_value",
    "SweepReport",
    "sweep_bstar",
    "sweep_roots",
    "sweep_value",
]
