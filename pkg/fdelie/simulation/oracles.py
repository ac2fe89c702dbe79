# fdelie/simulation/oracles.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : discrete bridge | numeric oracles on grids
#
# Symmetry transport: a generator whose xi does not involve Phi maps a
# solution Phi to
#     Phi'(t', u') = [exp(eps X)(t, u, Phi(t, u))]_Phi,  (t, u) = exp(-eps X)(t', u'),
# which must again solve the equation.

import logging
from dataclasses import dataclass

import numpy as np

from ..config import (RANDOM_SEED, SWEEP_SAMPLES, TRANSPORT_BASELINE_TOLERANCE,
                      TRANSPORT_SAMPLES)
from ..core.nodes import PHI
from ..core.parser import parse
from ..errors import InvalidFixtureError, ScopeError
from .evaluator import Bindings, Evaluator, solution_from_expr
from .flow import GeneratorField, flow, flow_steps, integrate
from .grid import DiscreteState, random_states

logger = logging.getLogger(__name__)

# ==============================================================================
#  CONFIGURATION
# ==============================================================================

HEAT_EQUATION = "dt(Phi) - int[z:a..b] fd(fd(Phi, u(z)), u(z)) dz"
HEAT_KERNEL_T0 = 1.0

# Invariant solution of the heat equation under X = int (a4 t + a5) delta/delta u
# - (a6 + int a4 u / 2) Phi d/dPhi, with g([C]) = {g}.
INVARIANT_SOLUTION = ("{g}/sqrt(t*int[z:a..b] a4(z) dz + int[z:a..b] a5(z) dz)"
                      " * exp(-(2*a6 + int[z:a..b] a4(z)*u(z) dz)^2"
                      " / (4*int[z:a..b] a4(z) dz"
                      " * (t*int[z:a..b] a4(z) dz + int[z:a..b] a5(z) dz)))")

# Intermediate form Phi = h exp(H) with h = 1; D = int (a4 t + a5), A = int a4.
_H = ("-(4*a6*int[z:a..b] u(z) dz + int[z:a..b] int[w:a..b] a4(w)*u(z)*u(w) dw dz)"
      " / (4*int[z:a..b] (a4(z)*t + a5(z)) dz)")
_D = "int[z:a..b] (a4(z)*t + a5(z)) dz"
_A = "int[z:a..b] a4(z) dz"
INTERMEDIATE_FORMS = {
    "phi": f"exp({_H})",
    "tder_printed": f"exp({_H}) * ({_H}) * ({_A}) / ({_D})",
    "tder_chain": f"-exp({_H}) * ({_H}) * ({_A}) / ({_D})",
    "funder_printed": (f"exp({_H}) * ((2*a6 + int[z:a..b] a4(z)*u(z) dz) / (2*{_D}))^2"
                       f" - exp({_H}) * ({_A}) / (2*{_D})"),
}


# ==============================================================================
#  EQUATION RESIDUALS
# ==============================================================================

def heat_kernel(grid, t0=HEAT_KERNEL_T0, center=0.0):
    """Gaussian solution of Phi_t = kappa sum_i Phi_{u_i u_i} with kappa = 1/dx."""
    kappa = grid.kappa
    n = grid.n

    def solution(t, u):
        s = np.asarray(t, dtype=float) + t0
        r2 = np.sum((np.asarray(u, dtype=float) - center) ** 2, axis=-1)
        return s ** (-n / 2) * np.exp(-r2 / (4 * kappa * s))

    return solution


def equation_residual(equation, grid, solution, states, bindings=None):
    """Values of the equation expression (lhs - rhs) for a solution at sampled states."""
    bindings = (bindings or Bindings()).with_solution(solution)
    evaluator = Evaluator(grid, bindings)
    states = states.with_phi(solution(states.t, states.u))
    return evaluator(equation, states)


def _equation_of(problem):
    return parse(HEAT_EQUATION) if problem is None else problem.equation


# ==============================================================================
#  SYMMETRY TRANSPORT
# ==============================================================================

@dataclass
class TransportResult:
    generator: str
    n: int
    eps: float
    baseline: float
    max_residual: float
    steps: int
    samples: int
    seed: int

    def to_mapping(self):
        return dict(self.__dict__)


def transported(generator, grid, solution, eps, steps, bindings=None):
    """The image Phi' of a solution under exp(eps X), with a fixed RK4 step count."""
    velocity = GeneratorField(generator, grid, bindings)

    def image(t, u):
        target = DiscreteState.of(t, u)
        base = integrate(velocity, target, -eps, steps)
        base = base.with_phi(solution(base.t, base.u))
        return integrate(velocity, base, eps, steps).phi

    return image


def symmetry_transport_test(problem, generator, grid, eps, solution, bindings=None,
                            samples=TRANSPORT_SAMPLES, seed=RANDOM_SEED,
                            tolerance=TRANSPORT_BASELINE_TOLERANCE):
    """Max equation residual of the transported solution over sampled states."""
    for part in (*generator.xi_t, generator.xi_x):
        if part.has(PHI):
            raise ScopeError(f"{generator.name}: transport needs xi independent of Phi")
    equation = _equation_of(problem)
    rng = np.random.default_rng(seed)
    states = random_states(grid, samples, rng)

    baseline = float(np.max(np.abs(equation_residual(equation, grid, solution, states, bindings))))
    if baseline > tolerance:
        raise InvalidFixtureError("solution", f"baseline residual {baseline:.2e} > {tolerance:.0e}")

    _, forward = flow_steps(generator, grid, states, eps, bindings)
    _, backward = flow_steps(generator, grid, states, -eps, bindings)
    steps = max(forward, backward)
    image = transported(generator, grid, solution, eps, steps, bindings)
    residual = float(np.max(np.abs(equation_residual(equation, grid, image, states, bindings))))
    logger.info("transport %s n=%d eps=%g: residual %.3e (%d steps)", generator.name, grid.n, eps, residual, steps)
    return TransportResult(generator.name, grid.n, eps, baseline, residual, steps, samples, seed)


# ==============================================================================
#  FLOW PROPERTIES
# ==============================================================================

def flow_group_law(generator, grid, eps1, eps2, bindings=None, samples=8, seed=RANDOM_SEED):
    """max |exp(eps1 X) exp(eps2 X) s - exp((eps1 + eps2) X) s| over sampled states."""
    rng = np.random.default_rng(seed)
    states = random_states(grid, samples, rng)
    states = states.with_phi(rng.uniform(0.5, 1.5, size=samples))
    twice = flow(generator, grid, flow(generator, grid, states, eps2, bindings), eps1, bindings)
    once = flow(generator, grid, states, eps1 + eps2, bindings)
    return twice.distance(once)


def flow_tangent_error(generator, grid, bindings=None, h=1e-4, samples=8, seed=RANDOM_SEED):
    """max |(flow(h) - flow(-h)) / 2h - (xi_t, xi_x, eta)| at eps = 0."""
    rng = np.random.default_rng(seed)
    states = random_states(grid, samples, rng)
    states = states.with_phi(rng.uniform(0.5, 1.5, size=samples))
    plus = flow(generator, grid, states, h, bindings)
    minus = flow(generator, grid, states, -h, bindings)
    dt, du, dphi = GeneratorField(generator, grid, bindings)(states)
    return max(np.max(np.abs((plus.t - minus.t) / (2 * h) - dt)),
               np.max(np.abs((plus.u - minus.u) / (2 * h) - du)),
               np.max(np.abs((plus.phi - minus.phi) / (2 * h) - dphi)))


# ==============================================================================
#  INVARIANT SOLUTIONS
# ==============================================================================

def invariant_solution_text(g="1"):
    return INVARIANT_SOLUTION.format(g=g)


def invariant_solution_residual(phi, grid, samples=SWEEP_SAMPLES, bindings=None, problem=None,
                                seed=RANDOM_SEED):
    """Max |equation residual| of a closed-form phi at random states (heat equation by default)."""
    if isinstance(phi, str):
        phi = parse(phi)
    rng = np.random.default_rng(seed)
    states = random_states(grid, samples, rng)
    solution = solution_from_expr(phi, grid, bindings)
    residual = equation_residual(_equation_of(problem), grid, solution, states, bindings)
    return float(np.max(np.abs(residual)))


@dataclass
class IntermediateCheck:
    n: int
    tder_printed: float
    tder_chain: float
    funder_printed: float
    scale: float

    def to_mapping(self):
        return dict(self.__dict__)


def intermediate_relation_check(grid, bindings, samples=SWEEP_SAMPLES, seed=RANDOM_SEED):
    """Two-sided evaluation of the time and functional derivative relations of Phi = exp(H)."""
    forms = {name: parse(text) for name, text in INTERMEDIATE_FORMS.items()}
    rng = np.random.default_rng(seed)
    states = random_states(grid, samples, rng)
    solution = solution_from_expr(forms["phi"], grid, bindings)
    evaluator = Evaluator(grid, bindings.with_solution(solution))
    states = states.with_phi(solution(states.t, states.u))

    phi_t = evaluator(parse("dt(Phi)"), states)
    phi_uu = evaluator(parse("int[z:a..b] fd(fd(Phi, u(z)), u(z)) dz"), states)

    def gap(lhs, name):
        return float(np.max(np.abs(lhs - evaluator(forms[name], states))))

    return IntermediateCheck(grid.n, gap(phi_t, "tder_printed"), gap(phi_t, "tder_chain"),
                             gap(phi_uu, "funder_printed"), float(np.max(np.abs(phi_t))))
