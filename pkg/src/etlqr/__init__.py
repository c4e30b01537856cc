"""Event-triggered LQR lateral motion control.

Builds the lateral error dynamics of a front-steered vehicle, synthesizes
an LQR gain with Lyapunov certificates, and simulates zero-order-hold
feedback whose update instants come from a clock-variable event trigger
with a designable minimum inter-event time.
"""
from ._backend import backend
from .errors import EtlqrError, SimulationDiverged, SynthesisError
from .etm import EtmState, Strategy, control_input, initial_state, omega, step_clock, varpi
from .model import (Equilibrium, ErrorState, PlantMatrices, TrajectoryPair,
                    VehicleParams, build_plant, equilibrium, reconstruct_trajectory)
from .sim import Disturbance, SimConfig, SimLog, disturbance_at, integrate_step, rhs, run
from .synthesis import (EtmDesign, LqrWeights, SynthesisResult, compute_sigma,
                        lqr_gain, min_iet, solve_care, solve_lyapunov,
                        spectral_norm, synthesize)

__version__ = "0.1.0"

__all__ = [
    "backend",
    "EtlqrError", "SimulationDiverged", "SynthesisError",
    "EtmState", "Strategy", "control_input", "initial_state", "omega",
    "step_clock", "varpi",
    "Equilibrium", "ErrorState", "PlantMatrices", "TrajectoryPair",
    "VehicleParams", "build_plant", "equilibrium", "reconstruct_trajectory",
    "Disturbance", "SimConfig", "SimLog", "disturbance_at", "integrate_step",
    "rhs", "run",
    "EtmDesign", "LqrWeights", "SynthesisResult", "compute_sigma", "lqr_gain",
    "min_iet", "solve_care", "solve_lyapunov", "spectral_norm", "synthesize",
    "__version__",
]
