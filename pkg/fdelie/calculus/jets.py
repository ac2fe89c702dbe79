# fdelie/calculus/jets.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : functional calculus | differentiation with respect to a jet variable
#
# d Phi_{,u(s1)u(s2)} / d Phi_{,u(p)u(q)}
#     off the diagonal (p != q) : delta(s1-p) delta(s2-q) + delta(s1-q) delta(s2-p)
#     on the diagonal  (p == q) : delta(s1-p)                      when s1 == s2
#                                 delta(s1-p) delta(s2-p)          otherwise
# Single-slot and t-slot jets match slot by slot. Integrals are sifted by the
# canonical form afterwards.

import itertools

import sympy as sp

from ..config import MAX_JET_ORDER
from ..core.canonical import IndexTag, canonicalize, apply_tags
from ..core.nodes import PHI, Dirac, Field, Jet
from ..errors import ScopeError
from .derivatives import DerivativeMapper

ON_DIAGONAL = "on_diagonal"
OFF_DIAGONAL = "off_diagonal"


def jets_in(expr):
    """Every jet variable occurring in expr (Phi excluded)."""
    return {node for node in sp.preorder_traversal(expr) if isinstance(node, Jet)}


def check_polynomial(expr):
    """Raise ScopeError unless expr is a polynomial in its jet variables."""
    def walk(e, inside):
        if isinstance(e, Jet):
            if inside:
                raise ScopeError(f"jet {e} enters non-polynomially")
            if e.order > MAX_JET_ORDER:
                raise ScopeError(f"jet {e} has order {e.order} > {MAX_JET_ORDER}")
            return
        if e.is_Pow:
            base, exponent = e.args
            ok = exponent.is_Integer and exponent > 0
            walk(base, inside or not ok)
            walk(exponent, True)
            return
        if isinstance(e, sp.Function):
            for a in e.args:
                walk(a, True)
            return
        for a in e.args:
            walk(a, inside)
    walk(sp.sympify(expr), False)


def _slot_match(slots, targets):
    return sp.Mul(*[Dirac(s.point, p.point) if s.component == p.component else sp.S.Zero
                    for s, p in zip(slots, targets)])


class JetCoefficient(DerivativeMapper):
    def __init__(self, jet, diag):
        points = jet.points if isinstance(jet, Jet) else ()
        super().__init__(protected=set(points))
        self.jet = jet
        self.diag = diag

    def map_symbol(self, e):
        return sp.S.One if e == PHI and self.jet == PHI else sp.S.Zero

    def map_jet(self, e):
        v = self.jet
        if v == PHI or sorted(map(str, e.t_slots)) != sorted(map(str, v.t_slots)):
            return sp.S.Zero
        if len(e.u_slots) != len(v.u_slots):
            return sp.S.Zero
        if len(v.u_slots) < 2:
            return _slot_match(e.u_slots, v.u_slots)
        s1, s2 = e.u_slots
        if self.diag == ON_DIAGONAL:
            p = v.u_slots[0]
            if s1 == s2:
                return _slot_match((s1,), (p,))
            return _slot_match((s1, s2), (p, p))
        return sp.Add(*[_slot_match((s1, s2), perm) for perm in itertools.permutations(v.u_slots)])


def jet_derivative(expr, jet, diag=None):
    """Coefficient-extraction derivative of expr with respect to a jet variable."""
    check_polynomial(expr)
    tags = ()
    if isinstance(jet, Jet) and len(jet.u_slots) == 2:
        first, second = jet.u_slots
        if diag is None:
            diag = ON_DIAGONAL if first.point == second.point else OFF_DIAGONAL
        if diag == ON_DIAGONAL and first.point != second.point:
            jet = Jet(jet.t_slots, (first, Field(second.component, first.point)))
        elif diag == OFF_DIAGONAL:
            if first.point == second.point:
                raise ScopeError(f"off-diagonal derivative needs two distinct points, got {jet}")
            tags = (IndexTag(first.point, second.point, False),)
    result = canonicalize(JetCoefficient(jet, diag)(canonicalize(expr)))
    return canonicalize(apply_tags(result, tags)) if tags else result
