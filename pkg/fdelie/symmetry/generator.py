# fdelie/symmetry/generator.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : symmetry engine | infinitesimal generators and generator files

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import sympy as sp

from ..core.canonical import canonicalize
from ..core.declarations import Declarations
from ..core.nodes import Functional, freshen, index_symbol, subs_free
from ..core.printer import to_dsl
from ..errors import EmptyGeneratorError, InvalidFixtureError, ScopeError

logger = logging.getLogger(__name__)

ANCHOR = index_symbol("x")


@dataclass(frozen=True)
class Generator:
    """X = eta d/dPhi + sum_j xi_t[j] d/dt_j + int xi_x(anchor) delta/delta u(anchor) danchor.

    xi_x is written in terms of its own index `anchor`; eta and xi_t must not
    contain it free.
    """
    eta: sp.Expr
    xi_t: tuple
    xi_x: sp.Expr
    anchor: sp.Symbol = ANCHOR
    name: str = ""

    def __post_init__(self):
        for part in (self.eta, *self.xi_t):
            if self.anchor in sp.sympify(part).free_symbols:
                raise ScopeError(f"{self.name or 'generator'}: eta and xi_t may not depend on {self.anchor}")

    def xi_at(self, component, point):
        """xi_{component, point}: the spatial infinitesimal moved to another index."""
        if component != 1:
            raise ScopeError("only one field component is supported")
        return subs_free(freshen(sp.sympify(self.xi_x)), {self.anchor: point})

    def is_zero(self):
        return all(canonicalize(p) == 0 for p in (self.eta, *self.xi_t, self.xi_x))

    def __add__(self, other):
        if len(self.xi_t) != len(other.xi_t):
            raise ValueError("generators over different time variables")
        xi_x = self.xi_x + other.xi_at(1, self.anchor)
        return Generator(canonicalize(self.eta + other.eta),
                         tuple(canonicalize(a + b) for a, b in zip(self.xi_t, other.xi_t)),
                         canonicalize(xi_x), self.anchor, f"{self.name}+{other.name}")

    def scale(self, factor):
        factor = sp.sympify(factor)
        return Generator(canonicalize(factor * self.eta),
                         tuple(canonicalize(factor * x) for x in self.xi_t),
                         canonicalize(factor * self.xi_x), self.anchor, f"{factor}*{self.name}")

    def __rmul__(self, factor):
        return self.scale(factor)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def renamed(self, name):
        return replace(self, name=name)

    def to_mapping(self):
        return {
            "name": self.name,
            "eta": to_dsl(self.eta),
            "xi_t": [to_dsl(x) for x in self.xi_t],
            "xi_x": to_dsl(self.xi_x),
        }

    @classmethod
    def generic(cls, problem, anchor=ANCHOR):
        """The unknown generator (eta, xi_t, xi(x)) as named functionals."""
        decl = problem.declarations

        def unknown(name, anchors=()):
            spec = decl.functional(name)
            depends = " ".join(spec.depends) if spec else "Phi t u"
            return Functional(name, anchors, depends)

        xi_t = tuple(unknown(f"xi{t}") for t in decl.times)
        return cls(unknown("eta"), xi_t, unknown("xi", (anchor,)), anchor, "generic")

    def require_nonzero(self):
        if self.is_zero():
            raise EmptyGeneratorError(f"generator {self.name or '?'} has no nonzero infinitesimal")
        return self


# ==============================================================================
#  GENERATOR FILES
# ==============================================================================

def generator_from_mapping(item, problem, anchor=ANCHOR, source="<mapping>"):
    try:
        name = item.get("name", "")
        eta = problem.parse(str(item.get("eta", "0")))
        times = problem.declarations.times
        xi_t_text = item.get("xi_t", ["0"] * len(times))
        if isinstance(xi_t_text, str):
            xi_t_text = [xi_t_text]
        if len(xi_t_text) != len(times):
            raise InvalidFixtureError(source, f"{name}: xi_t needs {len(times)} entries")
        xi_t = tuple(problem.parse(str(x)) for x in xi_t_text)
        xi_x = problem.parse(str(item.get("xi_x", "0")))
    except AttributeError as exc:
        raise InvalidFixtureError(source, f"generator entries must be objects ({exc})") from exc
    return Generator(eta, xi_t, xi_x, anchor, name)


def load_generators(path, problem):
    """Read a JSON generator file; expressions are parsed with the problem's names."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"generator file '{path}' not found")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidFixtureError(str(path), f"not valid JSON ({exc})") from exc
    anchor = index_symbol(data.get("anchor", "x"))
    decl = Declarations.from_mapping(data, str(path), base=problem.declarations)
    problem = replace(problem, declarations=decl)
    items = data.get("generators", [])
    if not items:
        raise EmptyGeneratorError(f"generator file '{path}' lists no generators")
    generators = [generator_from_mapping(item, problem, anchor, str(path)) for item in items]
    logger.info("loaded %d generators from %s", len(generators), path)
    return generators, problem
