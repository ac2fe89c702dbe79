# fdelie/characteristics/invariants.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : characteristics | invariants and invariant solutions
#
# A generator acts on an expression as the first-order operator
#   X = eta d/dPhi + sum_j xi_tj d/dt_j + int xi_x(s) delta/delta u(s) ds
# and an invariant is annihilated by it. An invariant solution Phi = phi
# makes X[Phi - phi] vanish once Phi is replaced by phi.

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import sympy as sp

from ..calculus.derivatives import GeneratorAction
from ..core.canonical import canonicalize, simplify_residual
from ..core.nodes import PHI, T, Field, index_symbol, subs_free
from ..core.printer import to_dsl
from ..errors import InvalidFixtureError
from ..symmetry.problem import Domain

logger = logging.getLogger(__name__)

ROLES = ("scalar", "field", "dependent")


def verify_invariant(inv, generator, domain=None, times=(T,)):
    """X inv, canonical; zero certifies invariance."""
    action = GeneratorAction(generator, domain or Domain(), None, times)
    return simplify_residual(action(canonicalize(inv)))


# ==============================================================================
#  INVARIANT SOLUTIONS
# ==============================================================================

@dataclass(frozen=True)
class PdeResidualHandle:
    """Deferred numeric check that phi solves the problem, run on a grid."""
    phi: sp.Expr
    problem: object

    def evaluate(self, grid, bindings, samples=None, seed=None):
        from ..simulation.oracles import invariant_solution_residual
        kwargs = {k: v for k, v in (("samples", samples), ("seed", seed)) if v is not None}
        return invariant_solution_residual(self.phi, grid, bindings=bindings, problem=self.problem, **kwargs)


def verify_invariant_solution(phi, generator, problem):
    """(X[Phi - phi] at Phi = phi, handle for the numeric equation residual)."""
    action = GeneratorAction(generator, problem.domain, None, problem.times)
    phi = canonicalize(phi)
    raw = action(PHI - phi)
    sym = simplify_residual(subs_free(canonicalize(raw), {PHI: phi}))
    logger.info("invariant solution: symmetry residual %s", "0" if sym == 0 else "nonzero")
    return sym, PdeResidualHandle(phi, problem)


# ==============================================================================
#  INVARIANT SETS
# ==============================================================================

@dataclass
class Invariant:
    name: str
    role: str
    expr: sp.Expr
    source: str = ""


@dataclass
class InvariantSet:
    """Scalars C_1..C_m, the field family [C(x)] and the invariant playing the dependent role.

    point is the excluded point x1 of the domain; position None means the midpoint.
    """
    members: list = field(default_factory=list)
    point: sp.Symbol = None
    position: float = None

    @property
    def scalars(self):
        return [m for m in self.members if m.role == "scalar"]

    @property
    def fields(self):
        return [m for m in self.members if m.role == "field"]

    @property
    def dependent(self):
        found = [m for m in self.members if m.role == "dependent"]
        return found[0] if found else None

    def verify(self, generator, domain=None, times=(T,)):
        """[(invariant, residual)] for every member."""
        return [(m, verify_invariant(m.expr, generator, domain, times)) for m in self.members]

    def point_position(self, domain_bounds):
        if self.position is not None:
            return self.position
        lo, hi = domain_bounds
        return (lo + hi) / 2

    def to_records(self, results):
        return [{"name": m.name, "role": m.role, "invariant": to_dsl(m.expr),
                 "residual": to_dsl(r), "invariant_ok": r == 0} for m, r in results]


def _parse_point(text, source):
    name, _, value = text.partition("=")
    name = name.strip()
    if not name:
        raise InvalidFixtureError(source, "empty 'point:' line")
    try:
        position = float(value) if value.strip() else None
    except ValueError as exc:
        raise InvalidFixtureError(source, f"bad point position '{value.strip()}'") from exc
    return index_symbol(name), position


def load_invariants(path, problem):
    """Read `role [name]: expression` lines; roles are scalar, field and dependent.

    `point: x1` (optionally `point: x1 = 0.25`) names the excluded point.
    Blank lines and lines starting with # are skipped.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"invariant file '{path}' not found")
    out = InvariantSet()
    counts = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, colon, body = line.partition(":")
        if not colon:
            raise InvalidFixtureError(str(path), f"line {number}: expected 'role: expression'")
        words = head.split()
        role = words[0] if words else ""
        if role == "point":
            out.point, out.position = _parse_point(body, str(path))
            continue
        if role not in ROLES:
            raise InvalidFixtureError(str(path), f"line {number}: unknown role '{role}'")
        counts[role] = counts.get(role, 0) + 1
        name = words[1] if len(words) > 1 else f"{role}{counts[role]}"
        out.members.append(Invariant(name, role, problem.parse(body.strip()), body.strip()))
    if not out.members:
        raise InvalidFixtureError(str(path), "no invariants listed")
    logger.info("loaded %d invariants from %s", len(out.members), path)
    return out


# ==============================================================================
#  CLASSICAL CONSTANTS OF THE HYPERBOLIC EXAMPLE
# ==============================================================================

def classical_constants(domain, variant=0):
    """C_1 and C_2..C_n of Phi F_Phi + sum_i F_{u_i} = 0 on a Kronecker domain.

    variant 0: C_1 = Phi/exp(u_1),             C_i = u_{i-1} - u_i
    variant 1: C_1 = Phi exp(-sum_i u_i / n),  C_i = u_1 - u_i
    """
    u = [Field(1, s) for s in domain.sites]
    n = len(u)
    if variant == 0:
        first = PHI / sp.exp(u[0])
        rest = [u[i - 1] - u[i] for i in range(1, n)]
    else:
        first = PHI * sp.exp(-sp.Add(*u) / n)
        rest = [u[0] - u[i] for i in range(1, n)]
    members = [Invariant("C1", "dependent", canonicalize(first))]
    members += [Invariant(f"C{i + 2}", "scalar", canonicalize(c)) for i, c in enumerate(rest)]
    return InvariantSet(members)


# ==============================================================================
#  CHARACTERISTIC INVARIANTS OF THE HEAT INVARIANT-SOLUTION GENERATOR
# ==============================================================================

# Generator: xi_t = 0, xi_x = a4(x) t + a5(x), eta = -a6 Phi - Phi/2 int a4 u.
HEAT_INVARIANTS = {
    "tau": "t",
    "C": "u(x)/(a4(x)*t + a5(x)) - u(x1)/(a4(x1)*t + a5(x1))",
    # printed form; invariant only when a4 is constant
    "C_Phi_printed": ("Phi*exp((4*a6*int[z:a..b] u(z) dz"
                      " + int[z:a..b] int[w:a..b] a4(w)*u(z)*u(w) dw dz)"
                      " / (4*int[z:a..b] (a4(z)*t + a5(z)) dz))"),
    # V = int a4 u is the clock along the characteristics
    "C_Phi": ("Phi*exp((4*a6*int[z:a..b] a4(z)*u(z) dz + (int[z:a..b] a4(z)*u(z) dz)^2)"
              " / (4*int[z:a..b] a4(z)*(a4(z)*t + a5(z)) dz))"),
}


def heat_invariants(problem, constant_a4=False):
    """tau, [C(x)] and both dependent invariants, parsed in the problem's names.

    With constant_a4 every a4(.) becomes the parameter a4.
    """
    roles = {"tau": "scalar", "C": "field", "C_Phi_printed": "dependent", "C_Phi": "dependent"}
    members = []
    for name, text in HEAT_INVARIANTS.items():
        if constant_a4:
            text = re.sub(r"a4\(\w+\)", "a4", text)
        members.append(Invariant(name, roles[name], problem.parse(text), text))
    return InvariantSet(members, index_symbol("x1"))
