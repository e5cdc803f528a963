"""Pseudospectral laboratory for the intermediate nonlinear Schrödinger equation.

    u_t + i u_xx = beta u (1 + i T_h) d/dx |u|^2 + i gamma |u|^2 u

on a periodic box, with depth ``h`` in ``(0, inf]`` (``h = inf`` is the
continuum Calogero-Moser equation).
"""

from .errors import (
    ConfigurationError,
    InlsLabError,
    NumericalError,
    OperatorError,
    SnapshotError,
    StateError,
)
from .integrator import IFRK4, StepperConfig, Trajectory, integrate, order_check, step
from .model import ModelParams, hardy_leak, pde_residual, rhs_direct, rhs_split
from .spectral_core import ComplexField, Grid, Symbol, make_grid

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "InlsLabError",
    "NumericalError",
    "OperatorError",
    "SnapshotError",
    "StateError",
    "IFRK4",
    "StepperConfig",
    "Trajectory",
    "integrate",
    "order_check",
    "step",
    "ModelParams",
    "hardy_leak",
    "pde_residual",
    "rhs_direct",
    "rhs_split",
    "ComplexField",
    "Grid",
    "Symbol",
    "make_grid",
]
