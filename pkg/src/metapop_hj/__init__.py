"""Equilibria of a two-habitat selection-mutation-migration model.

Three routes to the same object: the evolutionary stable strategy from
adaptive dynamics, the small-mutation Hamilton-Jacobi limit with its
eps-order correctors, and a direct finite-difference steady state.
"""

from .correctors import CorrectorSet, corrector_set, source_sink_correctors, v_gap_profile
from .errors import MetapopError, NumericalError, RegimeError
from .ess import Ess, SourceSinkEss, resident_equilibrium, solve_ess, source_sink_ess
from .fd import (GridSolution, epsilon_sweep_compare, extract_numeric_moments,
                 steady_state_solve, u_from_density)
from .hj import UProfile, UTaylor, u_profile, u_taylor
from .model import ModelParams, PopState, check_assumptions, effective_fitness
from .moments import MomentSummary, gaussian_central_moment, moment_summary

__version__ = "0.1.0"

__all__ = [
    "CorrectorSet", "Ess", "GridSolution", "MetapopError", "ModelParams", "MomentSummary",
    "NumericalError", "PopState", "RegimeError", "SourceSinkEss", "UProfile", "UTaylor",
    "check_assumptions", "corrector_set", "effective_fitness", "epsilon_sweep_compare",
    "extract_numeric_moments", "gaussian_central_moment", "moment_summary",
    "resident_equilibrium", "solve_ess", "source_sink_correctors", "source_sink_ess",
    "steady_state_solve", "u_from_density", "u_profile", "u_taylor", "v_gap_profile",
]
