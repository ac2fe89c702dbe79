# fdelie/core/parser.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : expression core | DSL parser (lark, LALR)
#
# Surface syntax:
#   u(x)  Phi  t  a  b  E  numbers  + - * / ^  ( )
#   dt(e) dt(e, t2)  fd(e, u(x))  ddu(e, u(x))  dphi(e)  dx(u(x))
#   int[x:a..b] e dx   dirac(x, xp)   exp(e) sqrt(e) log(e)   zeta(J)
#   declared kernels C(x,xp,t) c(x,xp), functionals eta xit xi(x) f2 g h,
#   index functions a4(x) a5(x), parameters a1..a6

import re

import sympy as sp
from lark import Lark, Tree
from lark.exceptions import UnexpectedInput
from lark.visitors import Interpreter

from ..errors import DslSyntaxError, ScopeError, UnboundIndexError
from .canonical import canonicalize
from .declarations import Declarations
from .nodes import (A, B, PHI, T, Dirac, Field, Functional, Jet, Kernel, Zeta,
                    index_symbol, param_symbol)


# ==============================================================================
#  GRAMMAR
# ==============================================================================

GRAMMAR = r"""
    ?start: sum

    ?sum: product
        | sum "+" product   -> add
        | sum "-" product   -> sub

    ?product: unary
        | product "*" unary -> mul
        | product "/" unary -> div

    ?unary: power
        | "-" unary         -> neg
        | "+" unary

    ?power: atom
        | atom "^" unary    -> pow

    ?atom: NUMBER                                      -> number
        | NAME                                         -> name
        | NAME "(" sum ("," sum)* ")"                  -> call
        | "int" "[" NAME ":" sum ".." sum "]" sum DIFF -> integral
        | "(" sum ")"

    NUMBER: /\d+(\.\d+)?/
    NAME: /[A-Za-z_][A-Za-z_0-9]*/
    DIFF: /d[A-Za-z_][A-Za-z_0-9]*/

    %import common.WS
    %ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr", lexer="contextual")

RESERVED_BOUND = re.compile(r"^z\d+$")
BUILTINS = {"exp": sp.exp, "sqrt": sp.sqrt, "log": sp.log}


# ==============================================================================
#  TREE -> EXPRESSION
# ==============================================================================

class _Builder(Interpreter):
    """Walks the parse tree top-down so integrals can open an index scope."""

    def __init__(self, declarations, free_indices):
        self.decl = declarations
        self.free = {}
        for item in free_indices:
            symbol = item if isinstance(item, sp.Symbol) else index_symbol(item)
            self.free[symbol.name] = symbol
        self.scopes = []

    # --- helpers ------------------------------------------------------------

    def _value(self, node):
        return self.visit(node) if isinstance(node, Tree) else self._token(node)

    def _token(self, token):
        if token.type == "NUMBER":
            return sp.Rational(str(token))
        return self._resolve_name(str(token))

    def _index(self, node):
        """Resolve an argument that must be a live index."""
        if isinstance(node, Tree) and node.data == "name":
            name = str(node.children[0])
        elif not isinstance(node, Tree) and node.type == "NAME":
            name = str(node)
        else:
            value = self._value(node)
            if isinstance(value, sp.Symbol):
                return value
            raise UnboundIndexError(str(value))
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.free and not RESERVED_BOUND.match(name):
            return self.free[name]
        raise UnboundIndexError(name)

    def _time(self, name):
        return T if name == "t" else sp.Symbol(name, real=True)

    def _field(self, node):
        value = self._value(node)
        if not isinstance(value, Field):
            raise ScopeError(f"expected a field value such as u(x), got {value}")
        return value

    def _resolve_name(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name == "Phi":
            return PHI
        if name == "E":
            return sp.E
        if name == "a":
            return A
        if name == "b":
            return B
        if name in self.decl.times:
            return self._time(name)
        spec = self.decl.functional(name)
        if spec is not None:
            if spec.anchors:
                raise UnboundIndexError(f"{name} needs {spec.anchors} index argument(s)")
            return Functional(name, (), " ".join(spec.depends))
        if RESERVED_BOUND.match(name):
            raise UnboundIndexError(name)
        if name in self.free:
            return self.free[name]
        return param_symbol(name)

    # --- arithmetic ---------------------------------------------------------

    def number(self, tree):
        return sp.Rational(str(tree.children[0]))

    def name(self, tree):
        return self._resolve_name(str(tree.children[0]))

    def add(self, tree):
        left, right = tree.children
        return self._value(left) + self._value(right)

    def sub(self, tree):
        left, right = tree.children
        return self._value(left) - self._value(right)

    def mul(self, tree):
        left, right = tree.children
        return self._value(left) * self._value(right)

    def div(self, tree):
        left, right = tree.children
        return self._value(left) / self._value(right)

    def neg(self, tree):
        return -self._value(tree.children[0])

    def unary(self, tree):
        return self._value(tree.children[0])

    def pow(self, tree):
        base, exponent = tree.children
        return self._value(base) ** self._value(exponent)

    # --- integrals ----------------------------------------------------------

    def integral(self, tree):
        var_token, lo, hi, body, diff = tree.children
        name = str(var_token)
        if str(diff)[1:] != name:
            raise UnboundIndexError(f"integral binds {name} but closes with {diff}")
        lo, hi = self._value(lo), self._value(hi)
        var = index_symbol(name)
        self.scopes.append({name: var})
        try:
            function = self._value(body)
        finally:
            self.scopes.pop()
        return sp.Integral(function, (var, lo, hi))

    # --- calls --------------------------------------------------------------

    def call(self, tree):
        from ..calculus.derivatives import surface_derivative

        head, *args = tree.children
        name = str(head)

        component = self.decl.field_component(name)
        if component is not None:
            return Field(component, self._index(args[0]))
        if name == "dx":
            f = self._field(args[0])
            return Field(f.component, f.point, f.order + 1)
        if name == "dt":
            time = self._time(str(args[1].children[0])) if len(args) > 1 else self._time(self.decl.times[0])
            return surface_derivative(self._value(args[0]), time)
        if name in ("fd", "ddu"):
            return surface_derivative(self._value(args[0]), self._field(args[1]))
        if name == "dphi":
            return surface_derivative(self._value(args[0]), PHI)
        if name == "dirac":
            return Dirac(self._index(args[0]), self._index(args[1]))
        if name == "zeta":
            jet = self._value(args[0])
            if not isinstance(jet, Jet) and jet != PHI:
                raise ScopeError(f"zeta() expects a jet variable, got {jet}")
            return Zeta(jet)
        if name in BUILTINS:
            return BUILTINS[name](*[self._value(a) for a in args])

        found = self.decl.kernel(name)
        if found is not None:
            return self._kernel(found, args)

        spec = self.decl.functional(name)
        if spec is not None:
            anchors = tuple(self._index(a) for a in args[:spec.anchors])
            return Functional(name, anchors, " ".join(spec.depends))

        if name in self.decl.index_functions:
            return sp.Function(name, real=True)(*[self._index(a) for a in args])
        return sp.Function(name, real=True)(*[self._value(a) for a in args])

    def _kernel(self, found, args):
        spec, is_off = found
        first, second = self._index(args[0]), self._index(args[1])
        if is_off or spec.diagonal is None:
            return Kernel(spec.off_name, spec.parity, first, second)
        diagonal = parse(spec.diagonal, self.decl, tuple(self.free.values()), canonical=False)
        out = diagonal * Dirac(first, second)
        if spec.off_diagonal:
            out += Kernel(spec.off_name, spec.parity, first, second)
        return out


# ==============================================================================
#  ENTRY POINT
# ==============================================================================

def parse(text, declarations=None, free_indices=None, canonical=True):
    """Parse DSL text into an expression (canonical unless canonical=False)."""
    decl = declarations or Declarations()
    indices = decl.free_indices if free_indices is None else free_indices
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise DslSyntaxError(f"cannot parse {text!r}", exc.line, exc.column) from exc
    builder = _Builder(decl, indices)
    expr = builder._value(tree)
    return canonicalize(expr) if canonical else sp.sympify(expr)
