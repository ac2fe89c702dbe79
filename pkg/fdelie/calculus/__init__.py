"""Partial, functional, total and jet derivatives of expressions."""

from .derivatives import (DerivativeRequest, FunctionalDerivative, GeneratorAction,
                          PartialPhi, PartialTime, TotalField, TotalTime, derivative,
                          functional_derivative, partial_phi, partial_t, total_derivative)
from .jets import OFF_DIAGONAL, ON_DIAGONAL, check_polynomial, jet_derivative, jets_in

__all__ = [
    "DerivativeRequest", "FunctionalDerivative", "GeneratorAction", "PartialPhi",
    "PartialTime", "TotalField", "TotalTime", "derivative", "functional_derivative",
    "partial_phi", "partial_t", "total_derivative",
    "OFF_DIAGONAL", "ON_DIAGONAL", "check_polynomial", "jet_derivative", "jets_in",
]
