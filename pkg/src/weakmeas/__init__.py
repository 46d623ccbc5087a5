"""Von Neumann weak-measurement simulator and weak-value estimator."""

from . import entanglement, errors, estimator, pointer, qmath, scenario, vonneumann, weakvalues

__all__ = [
    "entanglement",
    "errors",
    "estimator",
    "pointer",
    "qmath",
    "scenario",
    "vonneumann",
    "weakvalues",
]

__version__ = "0.1.0"
