# fdelie/simulation/grid.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : discrete bridge | midpoint grids and discrete states
#
# Dictionary between the continuum and n grid points:
#   int f dx        ->  sum_i f(x_i) dx
#   delta(x_i-x_j)  ->  [i = j] / dx
#   delta/delta u(x_i) -> (1/dx) d/du_i

from dataclasses import dataclass, replace

import numpy as np

from ..errors import NonFiniteStateError, ScopeError


@dataclass(frozen=True)
class Grid:
    a: float = 0.0
    b: float = 1.0
    n: int = 64

    def __post_init__(self):
        if self.n < 2:
            raise ScopeError(f"a grid needs n >= 2 nodes, got {self.n}")
        if not self.b > self.a:
            raise ScopeError(f"empty grid interval ({self.a}, {self.b})")

    @classmethod
    def unit(cls, n):
        """n nodes at unit spacing on (0, n): dx = 1, so kappa = 1."""
        return cls(0.0, float(n), n)

    @property
    def dx(self):
        return (self.b - self.a) / self.n

    @property
    def kappa(self):
        return 1.0 / self.dx

    @property
    def nodes(self):
        return self.a + (np.arange(self.n) + 0.5) * self.dx

    @property
    def length(self):
        return self.b - self.a

    def nearest(self, x):
        """Index of the node closest to x."""
        i = int(np.floor((float(x) - self.a) / self.dx))
        return min(max(i, 0), self.n - 1)

    def midpoint(self):
        return 0.5 * (self.a + self.b)


@dataclass(frozen=True)
class DiscreteState:
    """A batch of states: t (m,), u (m, n), phi (m,)."""
    t: np.ndarray
    u: np.ndarray
    phi: np.ndarray

    @classmethod
    def of(cls, t, u, phi=0.0):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        m = u.shape[0]
        t = np.broadcast_to(np.asarray(t, dtype=float), (m,)).copy()
        phi = np.broadcast_to(np.asarray(phi, dtype=float), (m,)).copy()
        return cls(t, u, phi)

    @property
    def size(self):
        return self.u.shape[0]

    def with_phi(self, phi):
        return replace(self, phi=np.broadcast_to(np.asarray(phi, dtype=float), (self.size,)).copy())

    def check_finite(self):
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.phi))):
            raise NonFiniteStateError("state contains NaN or inf")
        return self

    def distance(self, other):
        return max(np.max(np.abs(self.t - other.t)),
                   np.max(np.abs(self.u - other.u)),
                   np.max(np.abs(self.phi - other.phi)))


def random_states(grid, samples, rng, t_range=(0.1, 1.0), scale=0.5):
    """Sampled states with smooth random fields (a few low modes)."""
    x = (grid.nodes - grid.a) / grid.length
    modes = np.arange(1, 4)
    coeffs = rng.normal(0.0, scale, size=(samples, modes.size))
    offset = rng.normal(0.0, scale, size=(samples, 1))
    u = offset + coeffs @ np.sin(np.pi * np.outer(modes, x))
    t = rng.uniform(*t_range, size=samples)
    return DiscreteState.of(t, u)
