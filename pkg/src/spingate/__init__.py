"""Cavity-dipole-cavity QED: steady-state scattering, pulse propagation and the spin-photon phase gate."""

from .model import CASE_IDS, ParameterError, SpinState, SystemParams, ValidatedParams, case_params, validate
from .steady_state import SingularSystemError, SteadyState, oracle_solve, solve_general, transmission_closed_form

__all__ = [
    "CASE_IDS",
    "ParameterError",
    "SingularSystemError",
    "SpinState",
    "SteadyState",
    "SystemParams",
    "ValidatedParams",
    "case_params",
    "oracle_solve",
    "solve_general",
    "transmission_closed_form",
    "validate",
]

__version__ = "0.1.0"
