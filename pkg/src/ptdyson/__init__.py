"""Time-dependent Dyson maps, energy operators and antilinear symmetries of a
non-Hermitian two-level system with exact closed-form solutions."""

__version__ = "0.1.0"

from .algebra2 import AntilinearOp, EigPair, PauliCoeffs, eig2  # noqa: E402
from .config import RunConfig, parse_config, serialize_config  # noqa: E402
from .dyson import DysonFrame, dyson_map, energy_operator  # noqa: E402
from .evolution import Trajectory, solve_trajectory  # noqa: E402
from .model import Constant, ModelParams, Regime, Sinusoidal, Tabulated  # noqa: E402
from .symmetry import PhaseReport, classify_phase, pt_static, pt_tilde  # noqa: E402

__all__ = [
    "AntilinearOp", "Constant", "DysonFrame", "EigPair", "ModelParams", "PauliCoeffs",
    "PhaseReport", "Regime", "RunConfig", "Sinusoidal", "Tabulated", "Trajectory",
    "classify_phase", "dyson_map", "eig2", "energy_operator", "parse_config",
    "pt_static", "pt_tilde", "serialize_config", "solve_trajectory",
]
