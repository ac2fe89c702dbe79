# fdelie/symmetry/problem.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : symmetry engine | domains, FDE problems and problem files

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import sympy as sp

from ..core.canonical import canonicalize
from ..core.declarations import Declarations
from ..core.nodes import A, B, PHI, T, Jet, Site, subs_free
from ..core.parser import parse
from ..errors import InvalidFixtureError, ScopeError

logger = logging.getLogger(__name__)


# ==============================================================================
#  DOMAIN
# ==============================================================================

@dataclass(frozen=True)
class Domain:
    """Interval (lo, hi) of the continuum index, or n isolated sites.

    With sites the domain is Kronecker-only: integrals become sums over the
    sites and distinct sites never carry a Dirac delta.
    """
    lo: sp.Expr = A
    hi: sp.Expr = B
    sites: tuple = ()

    @property
    def is_discrete(self):
        return bool(self.sites)

    @classmethod
    def kronecker(cls, n):
        sites = tuple(Site(f"s{i}", real=True) for i in range(1, n + 1))
        return cls(sp.S.Zero, sp.Integer(n), sites)

    def integrate(self, var, body):
        if not self.sites:
            return sp.Integral(body, (var, self.lo, self.hi))
        return sp.Add(*[subs_free(body, {var: s}) for s in self.sites])

    def collapse(self, expr):
        """Replace every integral over the continuum by a sum over the sites."""
        if not self.sites:
            return expr
        expr = sp.sympify(expr)
        if isinstance(expr, sp.Integral):
            out = self.collapse(expr.function)
            for var, _, _ in expr.limits:
                out = self.integrate(var, out)
            return out
        if not expr.args or not expr.has(sp.Integral):
            return expr
        return expr.func(*[self.collapse(a) for a in expr.args])

    def bounds_map(self):
        return {A: self.lo, B: self.hi} if self.sites else {}


# ==============================================================================
#  PROBLEM
# ==============================================================================

@dataclass(frozen=True)
class FdeProblem:
    """lhs_jet = rhs, e.g. Phi_{,t} = int Phi_{,u(x)u(x)} dx."""
    name: str
    lhs: sp.Expr
    rhs: sp.Expr
    domain: Domain = field(default_factory=Domain)
    declarations: Declarations = field(default_factory=Declarations)
    source: str = "<memory>"

    def __post_init__(self):
        if not isinstance(self.lhs, Jet):
            raise InvalidFixtureError(self.source, f"lhs {self.lhs} is not a jet variable")
        if sp.sympify(self.rhs).has(self.lhs):
            raise InvalidFixtureError(self.source, f"rhs contains the eliminated jet {self.lhs}")

    @property
    def equation(self):
        return canonicalize(self.lhs - self.rhs)

    @property
    def times(self):
        return tuple(T if n == "t" else sp.Symbol(n, real=True) for n in self.declarations.times)

    def parse(self, text, free_indices=None):
        if free_indices is None:
            free_indices = tuple(self.declarations.free_indices) + self.domain.sites
        expr = parse(text, self.declarations, free_indices)
        if self.domain.is_discrete:
            expr = canonicalize(subs_free(self.domain.collapse(expr), self.domain.bounds_map()))
        return expr

    def order(self):
        jets = [n for n in sp.preorder_traversal(self.equation) if isinstance(n, Jet)]
        return max((j.order for j in jets), default=0)


def collapse(problem, n):
    """Classical counterpart of a continuum problem on n Kronecker sites."""
    if n < 1:
        raise ScopeError(f"a collapsed problem needs at least one site, got n={n}")
    domain = Domain.kronecker(n)
    bounds = domain.bounds_map()
    rhs = canonicalize(subs_free(domain.collapse(problem.rhs), bounds))
    return replace(problem, name=f"{problem.name}_n{n}", rhs=rhs, domain=domain)


# ==============================================================================
#  PROBLEM FILES
# ==============================================================================

def _read_json(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"problem file '{path}' not found")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidFixtureError(str(path), f"not valid JSON ({exc})") from exc


def problem_from_mapping(data, source="<mapping>"):
    for key in ("lhs", "rhs"):
        if key not in data:
            raise InvalidFixtureError(source, f"missing '{key}'")
    decl = Declarations.from_mapping(data, source)
    lo, hi = data.get("domain", ["a", "b"])
    domain = Domain(parse(str(lo), decl), parse(str(hi), decl))
    lhs = parse(data["lhs"], decl)
    if lhs == PHI:
        raise InvalidFixtureError(source, "lhs must be a derivative of Phi")
    problem = FdeProblem(data.get("name", Path(source).stem), lhs, parse(data["rhs"], decl),
                         domain, decl, source)
    sites = data.get("sites")
    if sites:
        problem = collapse(problem, int(sites))
    logger.info("loaded problem %s from %s", problem.name, source)
    return problem


def load_problem(path):
    """Read a JSON problem file (expressions in the DSL)."""
    return problem_from_mapping(_read_json(path), str(path))


def load_declarations(path):
    return Declarations.from_mapping(_read_json(path), str(path))
