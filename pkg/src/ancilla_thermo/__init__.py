"""Thermodynamics of a qubit embedded with an ancilla in a Markovian bath."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

from .core import partial_trace, qubit_state, relative_entropy, von_neumann_entropy
from .dynamics import evolve, evolve_product, make_grid, steady_state
from .model import ModelParams, apply_lindbladian, bath_beta, liouvillian_matrix

__all__ = [
    "ModelParams",
    "apply_lindbladian",
    "bath_beta",
    "evolve",
    "evolve_product",
    "liouvillian_matrix",
    "make_grid",
    "partial_trace",
    "qubit_state",
    "relative_entropy",
    "steady_state",
    "von_neumann_entropy",
]
