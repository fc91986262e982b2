"""Iron homeostasis model: simulation, STL monitoring and interval contraction."""

from ._ironspec import (
    DomainError,
    InfeasibleError,
    IronspecError,
    ParseError,
    contract,
    monitor,
    pin_parameters,
    propagate,
    reference_parameters,
    run_experiment,
    steady_state,
)

__all__ = [
    "DomainError",
    "InfeasibleError",
    "IronspecError",
    "ParseError",
    "contract",
    "monitor",
    "pin_parameters",
    "propagate",
    "reference_parameters",
    "run_experiment",
    "steady_state",
]
