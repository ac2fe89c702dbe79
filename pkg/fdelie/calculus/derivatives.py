# fdelie/calculus/derivatives.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : functional calculus | partial, functional and total derivatives
#
# Every derivative is a derivation on the expression tree. DerivativeMapper
# implements the structural rules once (linearity, Leibniz, power rule,
# chain rule through elementary functions, differentiation under the integral
# sign); subclasses only say what happens at the leaves.
#
#     leaf          d/dt_k      d/dPhi   delta/delta u(x)     D/Dt_k        D/Du(x)dx
#     t_j           [j=k]       0        0                    [j=k]         0
#     Phi           0           1        0                    Phi_{,t_k}    Phi_{,u(x)}
#     u(y)          0           0        delta(x-y)           0             delta(x-y)
#     jet J         0           0        0                    J_{,t_k}      J_{,u(x)}
#     functional f  f_{,t_k}    f_{,Phi} f_{,u(x)}            f_{,t_k} + Phi_{,t_k} f_{,Phi}   (same for u)

from dataclasses import dataclass

import sympy as sp
from sympy.core.function import AppliedUndef

from ..core.canonical import canonicalize
from ..core.nodes import (PHI, T, Dirac, Field, Functional, Jet, Kernel, Zeta,
                          fresh_index, subs_free)
from ..errors import MissingZetaError, ScopeError


# ==============================================================================
#  STRUCTURAL RULES
# ==============================================================================

class DerivativeMapper:
    """Base derivation. Leaves not overridden differentiate to zero."""

    def __init__(self, protected=()):
        self.protected = set(protected)

    def __call__(self, expr):
        return self.rec(sp.sympify(expr))

    def rec(self, e):
        if e.is_Number or isinstance(e, sp.NumberSymbol):
            return sp.S.Zero
        if e.is_Add:
            return sp.Add(*[self.rec(a) for a in e.args])
        if e.is_Mul:
            return self.map_product(e)
        if e.is_Pow:
            return self.map_power(e)
        if isinstance(e, sp.Integral):
            return self.map_integral(e)
        if isinstance(e, Field):
            return self.map_field(e)
        if isinstance(e, Jet):
            return self.map_jet(e)
        if isinstance(e, Functional):
            return self.map_functional(e)
        if isinstance(e, Zeta):
            return self.map_zeta(e)
        if isinstance(e, (Kernel, Dirac, AppliedUndef, sp.Derivative)):
            return sp.S.Zero
        if isinstance(e, sp.Function):
            return self.map_function(e)
        if isinstance(e, sp.Symbol):
            return self.map_symbol(e)
        raise ScopeError(f"cannot differentiate {e!r}")

    def map_product(self, e):
        factors = e.args
        out = []
        for i, factor in enumerate(factors):
            d = self.rec(factor)
            if d != 0:
                out.append(sp.Mul(*factors[:i], d, *factors[i + 1:]))
        return sp.Add(*out)

    def map_power(self, e):
        base, exponent = e.args
        db, de = self.rec(base), self.rec(exponent)
        out = sp.S.Zero
        if db != 0:
            out += exponent * base ** (exponent - 1) * db
        if de != 0:
            out += e * sp.log(base) * de
        return out

    def map_function(self, e):
        out = sp.S.Zero
        for i, arg in enumerate(e.args):
            d = self.rec(arg)
            if d != 0:
                out += e.fdiff(i + 1) * d
        return out

    def map_integral(self, e):
        clash = {v for v, _, _ in e.limits} & self.protected
        if clash:
            mapping = {v: fresh_index(str(v)) for v in clash}
            e = sp.Integral(subs_free(e.function, mapping),
                            *[(mapping.get(v, v), lo, hi) for v, lo, hi in e.limits])
        d = self.rec(e.function)
        if d == 0:
            return sp.S.Zero
        return sp.Integral(d, *e.limits)

    def map_symbol(self, e):
        return sp.S.Zero

    def map_field(self, e):
        return sp.S.Zero

    def map_jet(self, e):
        return sp.S.Zero

    def map_functional(self, e):
        return sp.S.Zero

    def map_zeta(self, e):
        raise ScopeError(f"cannot differentiate the unexpanded coefficient {e}")


def _field_delta(field, component, point):
    if field.order > 0:
        raise ScopeError(f"functional derivative of a field gradient {field} needs delta derivatives")
    if field.component != component:
        return sp.S.Zero
    return Dirac(point, field.point)


# ==============================================================================
#  EXPLICIT (PARTIAL) DERIVATIVES
# ==============================================================================

class PartialTime(DerivativeMapper):
    def __init__(self, t=T):
        super().__init__()
        self.t = t

    def map_symbol(self, e):
        return sp.S.One if e == self.t else sp.S.Zero

    def map_functional(self, e):
        return e.derived(self.t)


class PartialPhi(DerivativeMapper):
    def map_symbol(self, e):
        return sp.S.One if e == PHI else sp.S.Zero

    def map_functional(self, e):
        return e.derived(PHI)


class FunctionalDerivative(DerivativeMapper):
    """delta/delta u_alpha(x) holding Phi, t and every jet fixed."""

    def __init__(self, component, point):
        super().__init__(protected={point})
        self.component = component
        self.point = point
        self.slot = Field(component, point)

    def map_field(self, e):
        return _field_delta(e, self.component, self.point)

    def map_functional(self, e):
        return e.derived(self.slot)


# ==============================================================================
#  TOTAL DERIVATIVES
# ==============================================================================

class TotalTime(PartialTime):
    """D/Dt_k: explicit part plus the chain through Phi."""

    def map_symbol(self, e):
        if e == PHI:
            return Jet((self.t,), ())
        return super().map_symbol(e)

    def map_jet(self, e):
        return e.with_time(self.t)

    def map_functional(self, e):
        return e.derived(self.t) + Jet((self.t,), ()) * e.derived(PHI)


class TotalField(FunctionalDerivative):
    """D/Du_alpha(x)dx: explicit functional derivative plus the chain through Phi."""

    def map_symbol(self, e):
        if e == PHI:
            return Jet((), (self.slot,))
        return sp.S.Zero

    def map_jet(self, e):
        return e.with_field(self.slot)

    def map_functional(self, e):
        return e.derived(self.slot) + Jet((), (self.slot,)) * e.derived(PHI)


# ==============================================================================
#  DSL SURFACE OPERATORS  dt / fd / dphi
# ==============================================================================

class SurfaceDerivative(DerivativeMapper):
    """dt(e), fd(e, u(x)), dphi(e) as written in the DSL.

    Applied to Phi or a jet they build jets; applied to a named functional they
    add the slot without a chain term, so dt(eta) is the explicit eta_{,t}.
    """

    def __init__(self, var):
        protected = {var.point} if isinstance(var, Field) else set()
        super().__init__(protected=protected)
        self.var = var

    def map_symbol(self, e):
        if e == self.var:
            return sp.S.One
        if e == PHI:
            if isinstance(self.var, Field):
                return Jet((), (self.var,))
            return Jet((self.var,), ())
        return sp.S.Zero

    def map_jet(self, e):
        if self.var == PHI:
            return sp.S.Zero
        return e.with_field(self.var) if isinstance(self.var, Field) else e.with_time(self.var)

    def map_field(self, e):
        if isinstance(self.var, Field):
            return _field_delta(e, self.var.component, self.var.point)
        return sp.S.Zero

    def map_functional(self, e):
        return e.derived(self.var)


def surface_derivative(expr, var):
    return SurfaceDerivative(var)(expr)


# ==============================================================================
#  GENERATOR ACTION  X = eta d/dPhi + sum xi_t d/dt + int xi(s) delta/delta u(s) ds
# ==============================================================================

class GeneratorAction(DerivativeMapper):
    """Applies a generator as a first-order operator.

    zetas maps a jet to its prolongation coefficient; without it, jets raise
    MissingZetaError.
    """

    def __init__(self, generator, domain, zetas=None, times=(T,)):
        protected = set()
        for part in (generator.eta, *generator.xi_t, generator.xi_x):
            protected |= sp.sympify(part).free_symbols
        super().__init__(protected=protected - {generator.anchor})
        self.g = generator
        self.domain = domain
        self.zetas = zetas
        self.times = tuple(times)

    def map_symbol(self, e):
        if e == PHI:
            return self.g.eta
        if e in self.times:
            return self.g.xi_t[self.times.index(e)]
        return sp.S.Zero

    def map_field(self, e):
        value = self.g.xi_at(e.component, e.point)
        if e.order:
            value = sp.diff(value, e.point, e.order)
        return value

    def map_functional(self, e):
        out = self.g.eta * e.derived(PHI)
        for t, xi in zip(self.times, self.g.xi_t):
            out += xi * e.derived(t)
        if e.depends_on(Field(1, self.g.anchor)):
            s = fresh_index("s")
            out += self.domain.integrate(s, self.g.xi_at(1, s) * e.derived(Field(1, s)))
        return out

    def map_jet(self, e):
        if self.zetas is None:
            raise MissingZetaError(e)
        return self.zetas(e)


# ==============================================================================
#  PUBLIC OPERATIONS
# ==============================================================================

KINDS = ("partial_t", "partial_phi", "functional_u", "total_t", "total_u", "jet")


@dataclass(frozen=True)
class DerivativeRequest:
    target: sp.Expr
    kind: str
    component: int = 1
    index: sp.Symbol | None = None
    time: sp.Symbol = T
    jet: sp.Expr | None = None
    diag: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown derivative kind '{self.kind}'")
        if self.kind in ("functional_u", "total_u") and self.index is None:
            raise ValueError(f"{self.kind} needs an index")
        if self.kind == "jet" and self.jet is None:
            raise ValueError("jet derivative needs a jet variable")


def functional_derivative(expr, component, point):
    """delta expr / delta u_component(point), canonical."""
    return canonicalize(FunctionalDerivative(component, point)(canonicalize(expr)))


def partial_t(expr, t=T):
    return canonicalize(PartialTime(t)(canonicalize(expr)))


def partial_phi(expr):
    return canonicalize(PartialPhi()(canonicalize(expr)))


def total_derivative(expr, req):
    """Total derivative D/Dt_k or D/Du(x)dx of expr as requested."""
    if req.kind == "total_t":
        mapper = TotalTime(req.time)
    elif req.kind == "total_u":
        mapper = TotalField(req.component, req.index)
    else:
        raise ValueError(f"total_derivative cannot serve a '{req.kind}' request")
    return canonicalize(mapper(canonicalize(expr)))


def derivative(req):
    """Dispatch any DerivativeRequest."""
    if req.kind == "partial_t":
        return partial_t(req.target, req.time)
    if req.kind == "partial_phi":
        return partial_phi(req.target)
    if req.kind == "functional_u":
        return functional_derivative(req.target, req.component, req.index)
    if req.kind == "jet":
        from .jets import jet_derivative
        return jet_derivative(req.target, req.jet, req.diag)
    return total_derivative(req.target, req)
