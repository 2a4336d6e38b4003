from src.estimation.estimator import (
    ModelEstimate,
    Observables,
    default_initializer,
    estimate,
    forward_observables,
    plug_in_initializer,
)
from src.estimation.psi import psi

__all__ = [
    "ModelEstimate",
    "Observables",
    "default_initializer",
    "estimate",
    "forward_observables",
    "plug_in_initializer",
    "psi",
]
