# fdelie/symmetry/engine.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : symmetry engine | X^(2)F, restriction to solutions, verification

import logging
from dataclasses import dataclass, field

import sympy as sp

from ..calculus.derivatives import GeneratorAction
from ..core.canonical import canonicalize, is_zero
from ..core.nodes import PHI, Functional, Jet, Zeta, freshen
from ..core.printer import to_dsl
from .determining import extract_determining, split_classes
from .prolongation import ProlongedGenerator, prolong

logger = logging.getLogger(__name__)


def apply(pg, problem, expand=True):
    """X^(2) F for F = lhs - rhs of the problem.

    With expand=False jets are left as zeta(J) placeholders, which shows the
    structure zeta_{;t} - int zeta_{;u(x)u(x)} dx before any expansion.
    """
    if not isinstance(pg, ProlongedGenerator):
        pg = prolong(pg, problem)
    zetas = pg.zeta if expand else Zeta
    action = GeneratorAction(pg.base, problem.domain, zetas, problem.times)
    return canonicalize(action(problem.equation))


# ==============================================================================
#  RESTRICTION TO THE SOLUTION MANIFOLD
# ==============================================================================

def _on_solution_value(node, problem):
    """f_{,S} with S containing the eliminated slots, for f declared to solve the problem."""
    lhs = problem.lhs
    wanted = list(lhs.t_slots) + list(lhs.u_slots)
    remaining = list(node.slots)
    for slot in wanted:
        if slot not in remaining:
            return None
        remaining.remove(slot)
    base = node.base()

    def with_slots(slots):
        out = base
        for s in slots:
            out = out.derived(s)
        return out

    rhs = freshen(problem.rhs)
    return rhs.replace(lambda n: isinstance(n, Jet) or n == PHI,
                       lambda n: with_slots(remaining + (list(n.t_slots) + list(n.u_slots)
                                                         if isinstance(n, Jet) else [])))


def restrict_on_solution(expr, problem):
    """Replace the eliminated jet (and its twin in on-solution functionals) by the rhs."""
    on_solution = set(problem.declarations.on_solution_names())

    def walk(e):
        if e == problem.lhs:
            return freshen(problem.rhs)
        if isinstance(e, Zeta) or not e.args:
            return e
        if isinstance(e, Functional):
            if e.name in on_solution:
                value = _on_solution_value(e, problem)
                if value is not None:
                    return value
            return e
        args = [walk(a) for a in e.args]
        if all(x is y for x, y in zip(args, e.args)):
            return e
        return e.func(*args)

    return canonicalize(walk(sp.sympify(expr)))


# ==============================================================================
#  VERIFICATION
# ==============================================================================

@dataclass
class VerificationReport:
    candidate: str
    residual: sp.Expr
    residual_zero: bool
    failed_monomials: list = field(default_factory=list)
    determining_equations: list = field(default_factory=list)

    def to_mapping(self):
        return {
            "candidate": self.candidate,
            "residual": to_dsl(self.residual),
            "residual_zero": self.residual_zero,
            "failed_monomials": list(self.failed_monomials),
            "determining_equations": list(self.determining_equations),
        }


def on_solution_expression(generator, problem):
    pg = prolong(generator, problem)
    return restrict_on_solution(apply(pg, problem), problem)


def verify_candidate(generator, problem):
    """[X^(2)F] on F = 0 for a concrete generator; a zero residual certifies a symmetry."""
    residual = on_solution_expression(generator, problem)
    failed, equations = [], []
    for cls in split_classes(residual):
        if is_zero(cls.expr, cls.constraints()):
            continue
        failed.append(f"{to_dsl(cls.monomial)} [{cls.tag}]")
        equations.append(cls.to_mapping())
    ok = not failed
    logger.info("candidate %s: %s", generator.name, "symmetry" if ok else f"{len(failed)} failing classes")
    return VerificationReport(generator.name, sp.S.Zero if ok else residual, ok, failed, equations)


def determining_system(problem, reduce=True):
    """Determining equations of a problem, from its generic generator."""
    from .generator import Generator
    expr = on_solution_expression(Generator.generic(problem), problem)
    return extract_determining(expr, problem, reduce=reduce)
