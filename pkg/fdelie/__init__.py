"""fdelie: Lie point symmetries of functional differential equations.

Symbolic engine for determining equations, symmetry verification and
invariants, plus a numeric bridge that cross-checks results on grids.
"""

from .core import parse, to_dsl
from .errors import FdeLieError
from .symmetry import Generator, determining_system, load_generators, load_problem, verify_candidate

__version__ = "0.1.0"

__all__ = ["parse", "to_dsl", "FdeLieError", "Generator", "determining_system",
           "load_generators", "load_problem", "verify_candidate", "__version__"]
