# fdelie/core/printer.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : expression core | DSL printer, reports are replayable as input

import sympy as sp
from sympy.printing.precedence import PRECEDENCE
from sympy.printing.str import StrPrinter

from .nodes import PHI, T, Field


class DslPrinter(StrPrinter):
    """Prints expressions in the surface syntax accepted by parse()."""

    def __init__(self, fields=("u",), settings=None):
        super().__init__(settings)
        self.fields = fields

    def _time(self, expr, t):
        return f"dt({expr})" if t == T else f"dt({expr}, {t})"

    def _print_Pow(self, expr, rational=False):
        base, exponent = expr.args
        if exponent == sp.Rational(1, 2):
            return f"sqrt({self._print(base)})"
        if exponent == sp.Rational(-1, 2):
            return f"1/sqrt({self._print(base)})"
        if exponent == -1:
            return f"1/{self.parenthesize(base, PRECEDENCE['Pow'])}"
        b = self.parenthesize(base, PRECEDENCE["Pow"])
        e = self._print(exponent)
        if not (exponent.is_Integer and exponent >= 0) and not exponent.is_Symbol:
            e = f"({e})"
        return f"{b}^{e}"

    def _print_Exp1(self, expr):
        return "E"

    def _print_Integral(self, expr):
        body = self._print(expr.function)
        for var, lo, hi in expr.limits:
            body = f"int[{var}:{self._print(lo)}..{self._print(hi)}] {body} d{var}"
        return f"({body})"

    def _print_Field(self, expr):
        name = self.fields[expr.component - 1]
        out = f"{name}({self._print(expr.point)})"
        for _ in range(expr.order):
            out = f"dx({out})"
        return out

    def _wrap_slots(self, out, slots):
        for slot in slots:
            if slot == PHI:
                out = f"dphi({out})"
            elif isinstance(slot, Field):
                out = f"fd({out}, {self._print(slot)})"
            else:
                out = self._time(out, slot)
        return out

    def _print_Jet(self, expr):
        return self._wrap_slots("Phi", expr.t_slots + expr.u_slots)

    def _print_Functional(self, expr):
        out = expr.name
        if expr.anchors:
            out += "(" + ", ".join(self._print(a) for a in expr.anchors) + ")"
        return self._wrap_slots(out, expr.slots)

    def _print_Kernel(self, expr):
        first, second = expr.points
        return f"{expr.name}({self._print(first)}, {self._print(second)})"

    def _print_Dirac(self, expr):
        first, second = expr.points
        return f"dirac({self._print(first)}, {self._print(second)})"

    def _print_Zeta(self, expr):
        return f"zeta({self._print(expr.jet)})"

    def _print_Site(self, expr):
        return expr.name

    def _print_Dummy(self, expr):
        return expr.name


def to_dsl(expr, fields=("u",)):
    return DslPrinter(fields).doprint(sp.sympify(expr))
