# fdelie/simulation/classical.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : discrete bridge | classical counterparts on n variables
#
# A continuum expression collapsed onto n Kronecker sites becomes an ordinary
# sympy expression in u1..un:
#   u(s_i) -> u_i      a4(s_i) -> a4_i      C(s_i, s_j) -> Coff_i_j (i < j)
#   Phi_{,u(s_i)u(s_j)} -> d^2 Phi / du_i du_j
# Integral bounds a, b become 0 and n, so (b - a) reads as n.

import logging
from dataclasses import dataclass

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from ..config import RANDOM_SEED
from ..core.canonical import terms_of
from ..core.nodes import PHI, T, Dirac, Field, Functional, Jet, Kernel, Site, Zeta, param_symbol, subs_free
from ..errors import ScopeError
from ..symmetry.problem import Domain

logger = logging.getLogger(__name__)

# ==============================================================================
#  CONFIGURATION
# ==============================================================================

SYMBOLIC_SIZES = (2, 3)
NUMERIC_SIZE   = 64
LIMIT_TOLERANCE = 1e-10


# ==============================================================================
#  SYMBOLIC DISCRETIZATION
# ==============================================================================

def field_symbol(i):
    return sp.Symbol(f"u{i}", real=True)


def field_symbols(n):
    return tuple(field_symbol(i) for i in range(1, n + 1))


def _site_number(point):
    if not isinstance(point, Site):
        raise ScopeError(f"index {point} is not a site of the collapsed domain")
    return int(point.name[1:])


def _kernel_symbol(kernel):
    i, j = (_site_number(p) for p in kernel.points)
    sign = 1
    if i > j:
        i, j = j, i
        sign = -1 if kernel.parity == "antisymmetric" else 1
    return sign * sp.Symbol(f"{kernel.name}_{i}_{j}", real=True)


class _Classical:
    """Rewrites a collapsed expression in plain sympy symbols."""

    def __init__(self, n):
        self.u = field_symbols(n)
        self.phi = sp.Function("Phi", real=True)(T, *self.u)

    def variable(self, slot):
        if isinstance(slot, Field):
            return self.u[_site_number(slot.point) - 1]
        return slot

    def __call__(self, e):
        if isinstance(e, Field):
            if e.order:
                raise ScopeError(f"spatial derivative {e} has no classical counterpart")
            return self.variable(e)
        if isinstance(e, Jet):
            return sp.Derivative(self.phi, *[self.variable(s) for s in (*e.t_slots, *e.u_slots)])
        if isinstance(e, Kernel):
            return _kernel_symbol(e)
        if isinstance(e, Functional):
            args = []
            if "Phi" in e.depends:
                args.append(PHI)
            if "t" in e.depends:
                args.append(T)
            if "u" in e.depends:
                args.extend(self.u)
            f = sp.Function(e.name, real=True)(*args)
            slots = [self.variable(s) for s in e.slots]
            return sp.Derivative(f, *slots) if slots else f
        if isinstance(e, AppliedUndef) and e.args and all(isinstance(a, Site) for a in e.args):
            return sp.Symbol("_".join([e.func.__name__, *(str(_site_number(a)) for a in e.args)]), real=True)
        if isinstance(e, (Dirac, Zeta, sp.Integral)):
            raise ScopeError(f"{type(e).__name__} left after collapsing: {e}")
        if not e.args:
            return e
        return e.func(*[self(a) for a in e.args])


def discretize_symbolic(expr, n, points=None):
    """Collapse a continuum expression onto n sites and rewrite it in u1..un.

    points maps free index symbols to site numbers (1-based).
    """
    domain = Domain.kronecker(n)
    expr = sp.sympify(expr)
    if points:
        expr = subs_free(expr, {k: domain.sites[v - 1] for k, v in points.items()})
    expr = subs_free(domain.collapse(expr), domain.bounds_map())
    return sp.expand(_Classical(n)(expr))


@dataclass(frozen=True)
class ClassicalGenerator:
    """X = eta d/dPhi + xi_t d/dt + sum_i xi[i] d/du_i."""
    name: str
    eta: sp.Expr
    xi_t: sp.Expr
    xi: tuple

    @property
    def n(self):
        return len(self.xi)

    def components(self):
        return {"eta": self.eta, "xi_t": self.xi_t,
                **{f"xi_{i}": x for i, x in enumerate(self.xi, start=1)}}


def discretize_generator(generator, n):
    """The continuum generator with xi_x taken at each site and integrals summed."""
    if len(generator.xi_t) != 1:
        raise ScopeError("classical counterparts support a single time variable")
    eta = discretize_symbolic(generator.eta, n)
    xi_t = discretize_symbolic(generator.xi_t[0], n)
    xi = tuple(discretize_symbolic(generator.xi_x, n, {generator.anchor: i}) for i in range(1, n + 1))
    return ClassicalGenerator(generator.name, eta, xi_t, xi)


def classical_heat_family(n, kernel="Coff"):
    """The symmetry algebra of Phi_t = sum_i Phi_{u_i u_i} written directly in n variables.

    xi_t = a1 t^2 + a2 t + a3
    xi_i = (2 a1 t + a2)/2 u_i + sum_j C_ij u_j + a4_i t + a5_i,  C antisymmetric
    eta  = -(a1/4 sum_i u_i^2 + 1/2 sum_i a4_i u_i + n/2 a1 t + a6) Phi + f2(t, u)
    """
    a1, a2, a3, a6 = (param_symbol(p) for p in ("a1", "a2", "a3", "a6"))
    u = field_symbols(n)
    a4 = [sp.Symbol(f"a4_{i}", real=True) for i in range(1, n + 1)]
    a5 = [sp.Symbol(f"a5_{i}", real=True) for i in range(1, n + 1)]

    def c(i, j):
        if i == j:
            return sp.S.Zero
        if i < j:
            return sp.Symbol(f"{kernel}_{i}_{j}", real=True)
        return -sp.Symbol(f"{kernel}_{j}_{i}", real=True)

    xi_t = a1 * T**2 + a2 * T + a3
    xi = tuple(sp.expand((2 * a1 * T + a2) / 2 * u[i] + sum(c(i + 1, j + 1) * u[j] for j in range(n))
                         + a4[i] * T + a5[i])
               for i in range(n))
    f2 = sp.Function("f2", real=True)(T, *u)
    eta = sp.expand(-(a1 / 4 * sum(v**2 for v in u) + sp.Rational(1, 2) * sum(p * v for p, v in zip(a4, u))
                      + sp.Rational(n, 2) * a1 * T + a6) * PHI + f2)
    return ClassicalGenerator(f"heat_n{n}", eta, sp.expand(xi_t), xi)


# ==============================================================================
#  CLASSICAL COUNTERPART OF A PROBLEM
# ==============================================================================

def _scale_exponent(term):
    """Power of dx picked up by a term under int -> sum dx, delta -> I/dx, d/du(x_i) -> (1/dx) d/du_i."""
    power = 0
    for node in sp.preorder_traversal(term):
        if isinstance(node, sp.Integral):
            power += len(node.limits)
        elif isinstance(node, Jet):
            power -= len(node.u_slots)
        elif isinstance(node, Dirac):
            power -= 1
        elif isinstance(node, Functional):
            power -= sum(isinstance(s, Field) for s in node.slots)
    return power


@dataclass(frozen=True)
class ClassicalPde:
    name: str
    n: int
    dx: float
    lhs: sp.Expr
    rhs: sp.Expr
    unit_rhs: sp.Expr

    @property
    def kappa(self):
        return 1.0 / self.dx

    def text(self):
        return f"{sp.sstr(self.lhs)} = {sp.sstr(self.rhs)}"

    def unit_text(self):
        return f"{sp.sstr(self.lhs)} = {sp.sstr(self.unit_rhs)}"

    def to_mapping(self):
        return {
            "name": self.name,
            "n": self.n,
            "dx": self.dx,
            "kappa": self.kappa,
            "grid_normalization": self.text(),
            "unit_normalization": self.unit_text(),
            "time_rescaling": f"t -> {self.kappa:g} * t" if self.dx != 1 else "none",
        }


def classical_counterpart(problem, grid):
    """Phi_t = kappa sum_i d^2Phi/du_i^2 for the heat problem, with kappa = 1/dx.

    The unit normalization (dx = 1) is the textbook n-variable equation; both
    are related by rescaling time with kappa.
    """
    if isinstance(grid, int):
        n, dx = grid, 1.0
    else:
        n, dx = grid.n, grid.dx
    lhs = discretize_symbolic(problem.lhs, n)
    rhs, unit = sp.S.Zero, sp.S.Zero
    for term in terms_of(problem.rhs):
        collapsed = discretize_symbolic(term, n)
        rhs += sp.nsimplify(dx) ** _scale_exponent(term) * collapsed
        unit += collapsed
    logger.info("classical counterpart of %s on n=%d (dx=%g)", problem.name, n, dx)
    return ClassicalPde(problem.name, n, dx, lhs, sp.expand(rhs), sp.expand(unit))


# ==============================================================================
#  CLASSICAL-LIMIT FIDELITY
# ==============================================================================

@dataclass(frozen=True)
class LimitCheck:
    n: int
    mode: str
    max_error: float
    mismatched: tuple = ()

    @property
    def passed(self):
        return not self.mismatched and self.max_error <= LIMIT_TOLERANCE

    def to_mapping(self):
        return {"n": self.n, "mode": self.mode, "max_error": self.max_error,
                "mismatched": list(self.mismatched), "passed": self.passed}


def _random_values(exprs, rng):
    values = {}
    for e in exprs:
        for node in sp.preorder_traversal(e):
            if isinstance(node, AppliedUndef) and node not in values:
                values[node] = sp.Float(rng.uniform(-1, 1))
    for e in exprs:
        for s in e.free_symbols:
            values.setdefault(s, sp.Float(rng.uniform(-1, 1)))
    return values


def classical_limit_check(generator, n, seed=RANDOM_SEED, symbolic=None):
    """Compare the discretized generator with the n-variable heat family.

    Small n are compared exactly; larger n at one random parameter point.
    """
    symbolic = n in SYMBOLIC_SIZES if symbolic is None else symbolic
    mine = discretize_generator(generator, n).components()
    reference = classical_heat_family(n).components()
    if symbolic:
        mismatched = tuple(k for k in reference if sp.expand(mine[k] - reference[k]) != 0)
        return LimitCheck(n, "symbolic", 0.0 if not mismatched else float("inf"), mismatched)

    rng = np.random.default_rng(seed)
    values = _random_values([*mine.values(), *reference.values()], rng)
    errors = {k: abs(float(mine[k].xreplace(values) - reference[k].xreplace(values))) for k in reference}
    worst = max(errors.values())
    mismatched = tuple(k for k, err in errors.items() if err > LIMIT_TOLERANCE)
    logger.info("classical limit n=%d: max error %.2e", n, worst)
    return LimitCheck(n, "numeric", worst, mismatched)


def classical_limit_study(generator, sizes=(*SYMBOLIC_SIZES, NUMERIC_SIZE), seed=RANDOM_SEED):
    return [classical_limit_check(generator, n, seed) for n in sizes]
