"""Power-series time integration of nonlinear Schroedinger equations.

The main entry points are :func:`evolve` / :func:`evolve_coupled` with a
:class:`SolverConfig`, the closed-form solutions in :mod:`.analytic`, the
stencil generator :func:`stencil_weights` and the split-step reference
solver in :mod:`.baseline`.
"""

from .analytic import CW, Bright, Dark, DarkBright, Peregrine, TwoBright, make_spec
from .engine import (
    ConfigError,
    DivergenceError,
    FieldState,
    Grid,
    PotentialSpec,
    SolverConfig,
    evolve,
    evolve_coupled,
    initial_state,
)
from .stencil import StencilTable, stencil_weights

__all__ = [
    "CW",
    "Bright",
    "Dark",
    "DarkBright",
    "Peregrine",
    "TwoBright",
    "make_spec",
    "ConfigError",
    "DivergenceError",
    "FieldState",
    "Grid",
    "PotentialSpec",
    "SolverConfig",
    "evolve",
    "evolve_coupled",
    "initial_state",
    "StencilTable",
    "stencil_weights",
]

__version__ = "0.1.0"
