"""Photon-added coherent and thermal states: Wigner functions and entanglement potential."""

from .entpot import EPResult, entanglement_potential, entanglement_potential_of
from .exceptions import (
    DimensionMismatch,
    DomainError,
    IndexOutOfSpace,
    NotHermitian,
    ParseError,
    ProblemTooLarge,
    TruncationWarning,
    UnsupportedClosedForm,
    ZeroTrace,
)
from .fock import DensityOp, FockSpace, Ket, TwoModeDensityOp
from .states import Kind, StateSpec, build_state
from .wigner import PhaseGrid, WignerField, evaluate_field

__version__ = "0.1.0"

__all__ = [
    "DensityOp", "DimensionMismatch", "DomainError", "EPResult", "FockSpace", "IndexOutOfSpace",
    "Ket", "Kind", "NotHermitian", "ParseError", "PhaseGrid", "ProblemTooLarge", "StateSpec",
    "TruncationWarning", "TwoModeDensityOp", "UnsupportedClosedForm", "WignerField", "ZeroTrace",
    "build_state", "entanglement_potential", "entanglement_potential_of", "evaluate_field",
]
