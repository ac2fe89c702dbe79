# fdelie/core/nodes.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : expression core | node types of the immutable expression tree
#
# Expressions are sympy trees. Sums, products, powers, exp and definite
# integrals are the stock sympy nodes; the classes below add field values,
# jet variables, named unknown functionals, kernels, Dirac deltas and
# prolongation placeholders. Every class normalizes itself in __new__ so that
# any rebuild (xreplace, subs_free) stays in canonical slot order.

from dataclasses import dataclass

import sympy as sp
from sympy import default_sort_key
from sympy.core.symbol import Str


# ==============================================================================
#  BASIC SYMBOLS
# ==============================================================================

T   = sp.Symbol("t", real=True)
PHI = sp.Symbol("Phi", real=True)
A   = sp.Symbol("a", real=True)
B   = sp.Symbol("b", real=True)


def index_symbol(name):
    return sp.Symbol(str(name), real=True)


def param_symbol(name):
    return sp.Symbol(str(name), real=True)


def fresh_index(hint="s"):
    return sp.Dummy(str(hint).lstrip("_") or "s", real=True)


class Site(sp.Symbol):
    """An isolated point of a Kronecker-only domain. Distinct sites never coincide."""


@dataclass(frozen=True)
class Index:
    name: str
    domain: tuple = (A, B)
    kind: str = "free"

    @property
    def symbol(self):
        return index_symbol(self.name)


def as_index(value):
    """Accept an Index, a sympy symbol or a plain name and return the index symbol."""
    if isinstance(value, Index):
        return value.symbol
    if isinstance(value, sp.Symbol):
        return value
    return index_symbol(value)


def _name(value):
    return value if isinstance(value, Str) else Str(str(value))


# ==============================================================================
#  FIELD VALUES AND JET VARIABLES
# ==============================================================================

class Field(sp.Expr):
    """Field value u_alpha(x); order > 0 is the spatial derivative d^k u/dx^k."""

    is_commutative = True

    def __new__(cls, component, point, order=0):
        return sp.Expr.__new__(cls, sp.Integer(component), sp.sympify(point), sp.Integer(order))

    @property
    def component(self):
        return int(self.args[0])

    @property
    def point(self):
        return self.args[1]

    @property
    def order(self):
        return int(self.args[2])

    def _eval_derivative(self, s):
        if s == self.point:
            return Field(self.component, self.point, self.order + 1)
        return sp.S.Zero


def _field_key(field):
    return (field.component, default_sort_key(field.point), field.order)


class Jet(sp.Expr):
    """A derivative of Phi, identified by its sorted t-slots and u-slots.

    A jet without slots is Phi itself.
    """

    is_commutative = True

    def __new__(cls, t_slots=(), u_slots=()):
        ts = tuple(sorted((sp.sympify(s) for s in t_slots), key=default_sort_key))
        us = tuple(sorted(u_slots, key=_field_key))
        if not ts and not us:
            return PHI
        return sp.Expr.__new__(cls, sp.Tuple(*ts), sp.Tuple(*us))

    @property
    def t_slots(self):
        return tuple(self.args[0])

    @property
    def u_slots(self):
        return tuple(self.args[1])

    @property
    def order(self):
        return len(self.t_slots) + len(self.u_slots)

    @property
    def points(self):
        return tuple(f.point for f in self.u_slots)

    def with_time(self, t):
        return Jet(self.t_slots + (t,), self.u_slots)

    def with_field(self, field):
        return Jet(self.t_slots, self.u_slots + (field,))


# ==============================================================================
#  NAMED FUNCTIONALS, KERNELS, DELTAS
# ==============================================================================

DEPENDENCIES = ("Phi", "t", "u")


def _slot_rank(slot):
    if slot == PHI:
        return (0, default_sort_key(slot))
    if isinstance(slot, Field):
        return (2, _field_key(slot))
    return (1, default_sort_key(slot))


class Functional(sp.Expr):
    """Named unknown functional of (Phi, t, [u]) such as eta, xi_t, xi(x) or f2.

    slots is the sorted multiset of variables it has been differentiated by;
    anchors are the explicit index arguments (xi is anchored at its own x).
    """

    is_commutative = True

    def __new__(cls, name, anchors=(), depends="Phi t u", slots=()):
        if isinstance(depends, Str):
            depends = depends.name.split()
        elif isinstance(depends, str):
            depends = depends.split()
        deps = Str(" ".join(d for d in DEPENDENCIES if d in set(depends)))
        ordered = tuple(sorted((sp.sympify(s) for s in slots), key=_slot_rank))
        return sp.Expr.__new__(cls, _name(name), sp.Tuple(*anchors), deps, sp.Tuple(*ordered))

    @property
    def name(self):
        return self.args[0].name

    @property
    def anchors(self):
        return tuple(self.args[1])

    @property
    def depends(self):
        return tuple(self.args[2].name.split())

    @property
    def slots(self):
        return tuple(self.args[3])

    def depends_on(self, var):
        if var == PHI:
            return "Phi" in self.depends
        if isinstance(var, Field):
            return "u" in self.depends
        return "t" in self.depends

    def derived(self, var):
        if not self.depends_on(var):
            return sp.S.Zero
        return Functional(self.args[0], self.anchors, self.args[2], self.slots + (var,))

    def base(self):
        return Functional(self.args[0], self.anchors, self.args[2], ())

    def kinds(self):
        """Slot multiset with the points abstracted away."""
        out = []
        for slot in self.slots:
            if slot == PHI:
                out.append("Phi")
            elif isinstance(slot, Field):
                out.append(f"u{slot.component}")
            else:
                out.append(f"t:{slot}")
        return tuple(sorted(out))


PARITIES = ("none", "symmetric", "antisymmetric")


class Kernel(sp.Expr):
    """Opaque two-point kernel K(x, x') with a declared parity.

    Antisymmetric kernels vanish on the diagonal and are stored with sorted
    arguments and an extracted sign; symmetric kernels are stored sorted.
    """

    is_commutative = True

    def __new__(cls, name, parity, first, second):
        parity = parity.name if isinstance(parity, Str) else str(parity)
        if parity not in PARITIES:
            raise ValueError(f"unknown kernel parity '{parity}'")
        first, second = sp.sympify(first), sp.sympify(second)
        swapped = default_sort_key(second) < default_sort_key(first)
        if parity == "antisymmetric":
            if first == second:
                return sp.S.Zero
            if swapped:
                return -sp.Expr.__new__(cls, _name(name), Str(parity), second, first)
        elif parity == "symmetric" and swapped:
            first, second = second, first
        return sp.Expr.__new__(cls, _name(name), Str(parity), first, second)

    @property
    def name(self):
        return self.args[0].name

    @property
    def parity(self):
        return self.args[1].name

    @property
    def points(self):
        return self.args[2], self.args[3]


class Dirac(sp.Expr):
    """delta(x - x'). Coinciding index symbols give 1, distinct sites give 0."""

    is_commutative = True

    def __new__(cls, first, second):
        first, second = sp.sympify(first), sp.sympify(second)
        if first == second:
            return sp.S.One
        if isinstance(first, Site) and isinstance(second, Site):
            return sp.S.Zero
        if default_sort_key(second) < default_sort_key(first):
            first, second = second, first
        return sp.Expr.__new__(cls, first, second)

    @property
    def points(self):
        return self.args


class Zeta(sp.Expr):
    """Unexpanded prolongation coefficient attached to a jet."""

    is_commutative = True

    def __new__(cls, jet):
        return sp.Expr.__new__(cls, jet)

    @property
    def jet(self):
        return self.args[0]


STRUCTURED = (Field, Jet, Functional, Kernel, Dirac, Zeta)


# ==============================================================================
#  SCOPE-AWARE SUBSTITUTION
# ==============================================================================

def subs_free(expr, mapping):
    """Simultaneous substitution that respects indices rebound by inner integrals."""
    if not mapping:
        return expr
    if expr in mapping:
        return mapping[expr]
    if isinstance(expr, sp.Integral):
        bound = {lim[0] for lim in expr.limits}
        inner = {k: v for k, v in mapping.items() if k not in bound and expr.function.has(k)}
        incoming = set()
        for value in inner.values():
            incoming |= sp.sympify(value).free_symbols
        if bound & incoming:
            expr = freshen(expr)
        function = subs_free(expr.function, inner)
        limits = [(v, subs_free(lo, mapping), subs_free(hi, mapping)) for v, lo, hi in expr.limits]
        return sp.Integral(function, *limits)
    if not expr.args or isinstance(expr, Str):
        return expr
    args = [subs_free(a, mapping) for a in expr.args]
    if all(x is y for x, y in zip(args, expr.args)):
        return expr
    return expr.func(*args)


def freshen(expr):
    """Rename every integral-bound index to a fresh dummy."""
    if isinstance(expr, sp.Integral):
        mapping = {v: fresh_index(str(v)) for v, _, _ in expr.limits}
        function = freshen(subs_free(expr.function, mapping))
        return sp.Integral(function, *[(mapping[v], lo, hi) for v, lo, hi in expr.limits])
    if not expr.args or isinstance(expr, Str):
        return expr
    args = [freshen(a) for a in expr.args]
    if all(x is y for x, y in zip(args, expr.args)):
        return expr
    return expr.func(*args)
