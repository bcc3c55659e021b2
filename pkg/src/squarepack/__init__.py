"""Exact computation and Monte Carlo toolkit for the 2x2 hard-square model."""

from . import coupling, exact, graphs, lattice, observables, render, sampler, sticks
from .lattice import Configuration, create_configuration, tile_parity_class

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "create_configuration",
    "tile_parity_class",
    "lattice",
    "exact",
    "sampler",
    "sticks",
    "graphs",
    "coupling",
    "observables",
    "render",
    "__version__",
]
