# fdelie/calculus/numeric.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : functional calculus | finite-difference oracle for delta/delta u(x)

import logging

import numpy as np

from ..config import CLASS_INDICES, FD_BATCH, FD_EPSILON, RANDOM_SEED
from ..core.nodes import index_symbol
from ..simulation.evaluator import Evaluator
from ..simulation.grid import DiscreteState, random_states
from .derivatives import functional_derivative

logger = logging.getLogger(__name__)


def _spare_index(expr):
    taken = {s.name for s in expr.free_symbols}
    for name in CLASS_INDICES:
        if name not in taken:
            return index_symbol(name)
    raise ValueError(f"no spare index name left for {expr}")


def finite_difference_check(expr, grid, trials=4, bindings=None, seed=RANDOM_SEED, eps=FD_EPSILON,
                            batch=FD_BATCH):
    """Max |delta e/delta u(x_i) - (1/dx)(e(u + eps e_i) - e(u - eps e_i))/(2 eps)| over random states."""
    x = _spare_index(expr)
    symbolic = functional_derivative(expr, 1, x)
    evaluator = Evaluator(grid, bindings)
    rng = np.random.default_rng(seed)
    states = random_states(grid, trials, rng)
    states = states.with_phi(rng.uniform(0.5, 1.5, size=trials))
    exact = evaluator(symbolic, states, (x,))

    n = grid.n
    numeric = np.empty((trials, n))
    for start in range(0, n, batch):
        shift = eps * np.eye(n)[start:start + batch]
        m = len(shift)
        u = np.concatenate([states.u[:, None, :] + shift, states.u[:, None, :] - shift], axis=1)
        t = np.repeat(states.t, 2 * m)
        phi = np.repeat(states.phi, 2 * m)
        values = evaluator(expr, DiscreteState.of(t, u.reshape(-1, n), phi)).reshape(trials, 2 * m)
        numeric[:, start:start + m] = (values[:, :m] - values[:, m:]) / (2 * eps) / grid.dx

    error = float(np.max(np.abs(exact - numeric)))
    logger.debug("finite-difference check n=%d: %.2e", n, error)
    return error
