# fdelie/simulation/flow.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : discrete bridge | one-parameter group of a generator (RK4)
#
#   d t/d eps = xi_t,   d u_i/d eps = xi_x(x_i),   d Phi/d eps = eta,
# started from the identity at eps = 0.

import logging

import numpy as np

from ..config import FLOW_MAX_DOUBLINGS, FLOW_START_STEPS, FLOW_TOLERANCE
from ..errors import NonFiniteStateError, ScopeError
from .evaluator import Evaluator
from .grid import DiscreteState

logger = logging.getLogger(__name__)


class GeneratorField:
    """Velocity field (xi_t, xi_x(x_i), eta) of a generator on a grid."""

    def __init__(self, generator, grid, bindings=None):
        if len(generator.xi_t) != 1:
            raise ScopeError("numeric flows support a single time variable")
        self.generator = generator
        self.grid = grid
        self.evaluator = Evaluator(grid, bindings)

    def __call__(self, state):
        g = self.generator
        dt = self.evaluator(g.xi_t[0], state)
        du = self.evaluator(g.xi_x, state, (g.anchor,))
        dphi = self.evaluator(g.eta, state)
        return dt, du, dphi


def _step(velocity, state, h):
    def shifted(k, c):
        return DiscreteState(state.t + c * k[0], state.u + c * k[1], state.phi + c * k[2])

    k1 = velocity(state)
    k2 = velocity(shifted(k1, h / 2))
    k3 = velocity(shifted(k2, h / 2))
    k4 = velocity(shifted(k3, h))
    combined = [(a + 2 * b + 2 * c + d) / 6 for a, b, c, d in zip(k1, k2, k3, k4)]
    return shifted(combined, h)


def integrate(velocity, state, eps, steps):
    """Fixed-step RK4 from 0 to eps."""
    h = eps / steps
    for _ in range(steps):
        state = _step(velocity, state, h)
        if not (np.all(np.isfinite(state.t)) and np.all(np.isfinite(state.u))
                and np.all(np.isfinite(state.phi))):
            raise NonFiniteStateError(f"flow left the finite states at eps={eps} ({steps} steps)")
    return state


def flow_steps(generator, grid, state, eps, bindings=None, tolerance=FLOW_TOLERANCE):
    """(flowed state, step count) with steps doubled until the result moves by < tolerance."""
    velocity = GeneratorField(generator, grid, bindings)
    state.check_finite()
    steps = FLOW_START_STEPS
    current = integrate(velocity, state, eps, steps)
    for _ in range(FLOW_MAX_DOUBLINGS):
        refined = integrate(velocity, state, eps, 2 * steps)
        change = refined.distance(current)
        steps, current = 2 * steps, refined
        if change < tolerance:
            logger.debug("flow of %s converged with %d steps (change %.2e)", generator.name, steps, change)
            return current, steps
    logger.warning("flow of %s: change still %.2e after %d steps", generator.name, change, steps)
    return current, steps


def flow(generator, grid, state, eps, bindings=None, steps=None):
    """exp(eps X) applied to a batch of discrete states."""
    if steps is not None:
        return integrate(GeneratorField(generator, grid, bindings), state, eps, steps)
    return flow_steps(generator, grid, state, eps, bindings)[0]
