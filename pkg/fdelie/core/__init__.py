"""Expression core: nodes, canonical form, DSL parser and printer."""

from .canonical import (IndexTag, apply_tags, bound_symbol, canonicalize,
                        equal_canonical, is_zero, substitute, term_parts,
                        terms_of)
from .declarations import Declarations, FunctionalSpec, KernelSpec
from .nodes import (A, B, PHI, T, Dirac, Field, Functional, Index, Jet, Kernel,
                    Site, Zeta, as_index, index_symbol, param_symbol)
from .parser import parse
from .printer import to_dsl

__all__ = [
    "A", "B", "PHI", "T", "Dirac", "Field", "Functional", "Index", "Jet",
    "Kernel", "Site", "Zeta", "as_index", "index_symbol", "param_symbol",
    "Declarations", "FunctionalSpec", "KernelSpec",
    "IndexTag", "apply_tags", "bound_symbol", "canonicalize", "equal_canonical",
    "is_zero", "substitute", "term_parts", "terms_of",
    "parse", "to_dsl",
]
