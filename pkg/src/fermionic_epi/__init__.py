"""Numerical toolkit for fermionic quasi-free states, the fermionic beam splitter and entropy power."""

__version__ = "0.1.0"

from .channels import (
    CompositeSystem,
    apply_beam_splitter_channel,
    beam_splitter_unitary,
    semigroup_evolve,
)
from .clifford import CliffordAlgebra, majoranas, parity_operator
from .gaussian import GaussianState, covariance_of, gaussian_state_from_covariance, pfaffian, wick_moment
from .infotheory import entropy_power, fisher_info, relative_entropy, von_neumann_entropy
from .reports import ExperimentReport, emit_plot_data

__all__ = [
    "CliffordAlgebra",
    "CompositeSystem",
    "ExperimentReport",
    "GaussianState",
    "apply_beam_splitter_channel",
    "beam_splitter_unitary",
    "covariance_of",
    "emit_plot_data",
    "entropy_power",
    "fisher_info",
    "gaussian_state_from_covariance",
    "majoranas",
    "parity_operator",
    "pfaffian",
    "relative_entropy",
    "semigroup_evolve",
    "von_neumann_entropy",
    "wick_moment",
]
