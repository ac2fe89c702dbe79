"""Characteristic systems, invariants and invariant solutions."""

from .invariants import (HEAT_INVARIANTS, Invariant, InvariantSet, PdeResidualHandle,
                         classical_constants, heat_invariants, load_invariants,
                         verify_invariant, verify_invariant_solution)
from .system import CharSystem, Ratio, characteristic_system

__all__ = [
    "HEAT_INVARIANTS", "Invariant", "InvariantSet", "PdeResidualHandle",
    "classical_constants", "heat_invariants", "load_invariants",
    "verify_invariant", "verify_invariant_solution",
    "CharSystem", "Ratio", "characteristic_system",
]
