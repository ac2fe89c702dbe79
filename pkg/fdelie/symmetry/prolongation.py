# fdelie/symmetry/prolongation.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : symmetry engine | prolongation coefficients zeta
#
#   zeta_{;u(x)} = D_x eta - int Phi_{,u(s)} D_x xi_s ds - sum_k Phi_{,t_k} D_x xi_{t_k}
#   zeta_{;t_j}  = D_j eta - int Phi_{,u(s)} D_j xi_s ds - sum_k Phi_{,t_k} D_j xi_{t_k}
#   zeta_{;J s}  = D_s zeta_{;J} - int Phi_{,J u(r)} D_s xi_r dr - sum_k Phi_{,J t_k} D_s xi_{t_k}
#
# where D_x = D/Du(x)dx and D_j = D/Dt_j are total derivatives. The last slot
# of a second-order jet is peeled first (u-slots before t-slots), so
# zeta_{;u(x)t} = D_{u(x)} zeta_{;t} - ...

import logging

import sympy as sp

from ..config import MAX_JET_ORDER
from ..core.canonical import canonicalize
from ..core.nodes import PHI, T, Field, Jet, fresh_index, subs_free
from ..calculus.derivatives import TotalField, TotalTime
from ..errors import ScopeError
from .problem import Domain

logger = logging.getLogger(__name__)


def _extend(jet, slot):
    if isinstance(slot, Field):
        return Jet((), (slot,)) if jet == PHI else jet.with_field(slot)
    return Jet((slot,), ()) if jet == PHI else jet.with_time(slot)


def _peel(jet):
    """Split a jet into (parent jet, last slot)."""
    if jet.u_slots:
        last = jet.u_slots[-1]
        return Jet(jet.t_slots, jet.u_slots[:-1]), last
    last = jet.t_slots[-1]
    return Jet(jet.t_slots[:-1], jet.u_slots), last


def _total(slot):
    if isinstance(slot, Field):
        return TotalField(slot.component, slot.point)
    return TotalTime(slot)


def zeta_step(generator, parent, slot, parent_zeta, domain=None, times=(T,)):
    """One application of the recursion: zeta of parent extended by slot."""
    domain = domain or Domain()
    D = _total(slot)
    out = D(parent_zeta)
    s = fresh_index("s")
    out -= domain.integrate(s, _extend(parent, Field(1, s)) * D(generator.xi_at(1, s)))
    for t, xi in zip(times, generator.xi_t):
        out -= _extend(parent, t) * D(xi)
    return out


class ProlongedGenerator:
    """A generator with lazily computed zeta coefficients.

    Coefficients are computed once per slot pattern (points replaced by fresh
    indices) and moved to the requested points on lookup.
    """

    def __init__(self, generator, domain=None, times=(T,), order=MAX_JET_ORDER):
        if order > MAX_JET_ORDER:
            raise ScopeError(f"prolongation order {order} > {MAX_JET_ORDER}")
        self.base = generator
        self.domain = domain or Domain()
        self.times = tuple(times)
        self.order = order
        self._placeholders = tuple(fresh_index(f"p{i}") for i in range(order))
        self._cache = {}

    def _pattern(self, jet):
        points = []
        for p in jet.points:
            if p not in points:
                points.append(p)
        to_placeholder = dict(zip(points, self._placeholders))
        from_placeholder = {v: k for k, v in to_placeholder.items()}
        slots = tuple(Field(f.component, to_placeholder[f.point], f.order) for f in jet.u_slots)
        return Jet(jet.t_slots, slots), from_placeholder

    def _compute(self, jet):
        if jet == PHI:
            return self.base.eta
        parent, slot = _peel(jet)
        parent_zeta = self._compute(parent) if parent == PHI else self.zeta(parent)
        return canonicalize(zeta_step(self.base, parent, slot, parent_zeta, self.domain, self.times))

    def zeta(self, jet):
        """zeta_{;jet}, the prolongation coefficient of a jet variable."""
        if jet == PHI:
            return self.base.eta
        if jet.order > self.order:
            raise ScopeError(f"jet {jet} has order {jet.order} > {self.order}")
        if any(f.order for f in jet.u_slots):
            raise ScopeError(f"jet {jet} differentiates by a field gradient")
        pattern, back = self._pattern(jet)
        if pattern not in self._cache:
            logger.debug("computing zeta for %s", pattern)
            self._cache[pattern] = self._compute(pattern)
        return subs_free(self._cache[pattern], back)

    __call__ = zeta

    @property
    def zetas(self):
        return dict(self._cache)

    def demand(self, expr):
        """Compute every coefficient needed to prolong expr."""
        for node in sp.preorder_traversal(expr):
            if isinstance(node, Jet):
                self.zeta(node)
        return self


# ==============================================================================
#  PUBLIC OPERATIONS
# ==============================================================================

def zeta_u(generator, component, point, domain=None, times=(T,)):
    return ProlongedGenerator(generator, domain, times, order=1).zeta(Jet((), (Field(component, point),)))


def zeta_t(generator, j=0, domain=None, times=(T,)):
    return ProlongedGenerator(generator, domain, times, order=1).zeta(Jet((times[j],), ()))


def zeta_higher(generator, jet, domain=None, times=(T,)):
    if jet.order != 2:
        raise ScopeError(f"zeta_higher expects a second-order jet, got {jet}")
    return ProlongedGenerator(generator, domain, times, order=2).zeta(jet)


def prolong(generator, problem=None, order=MAX_JET_ORDER):
    """Second-order prolongation; with a problem, its jets are computed eagerly."""
    if problem is None:
        return ProlongedGenerator(generator, order=order)
    pg = ProlongedGenerator(generator, problem.domain, problem.times, order)
    return pg.demand(problem.equation)
