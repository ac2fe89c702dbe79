"""Symmetry engine: problems, generators, prolongation, determining equations."""

from .determining import (DeterminingEquation, DeterminingSystem, equation_holds,
                          extract_determining, instantiate, split_classes)
from .engine import (VerificationReport, apply, determining_system,
                     on_solution_expression, restrict_on_solution, verify_candidate)
from .generator import Generator, generator_from_mapping, load_generators
from .problem import Domain, FdeProblem, collapse, load_declarations, load_problem, problem_from_mapping
from .prolongation import ProlongedGenerator, prolong, zeta_higher, zeta_t, zeta_u

__all__ = [
    "DeterminingEquation", "DeterminingSystem", "equation_holds", "extract_determining",
    "instantiate", "split_classes",
    "VerificationReport", "apply", "determining_system", "on_solution_expression",
    "restrict_on_solution", "verify_candidate",
    "Generator", "generator_from_mapping", "load_generators",
    "Domain", "FdeProblem", "collapse", "load_declarations", "load_problem", "problem_from_mapping",
    "ProlongedGenerator", "prolong", "zeta_higher", "zeta_t", "zeta_u",
]
