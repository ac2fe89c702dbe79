# fdelie/characteristics/system.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : characteristics | characteristic systems of a generator
#
#   dt_1/xi_t1 = ... = dPhi/eta = delta u(x)/xi_x      for each x
#
# A zero denominator means the numerator differential vanishes along the
# characteristics (dt/0 reads t = const).

from dataclasses import dataclass

import sympy as sp

from ..core.canonical import canonicalize
from ..core.nodes import PHI, Field
from ..core.printer import to_dsl


@dataclass(frozen=True)
class Ratio:
    variable: sp.Expr
    denominator: sp.Expr

    @property
    def zero(self):
        return self.denominator == 0

    @property
    def differential(self):
        if isinstance(self.variable, Field):
            return f"delta {to_dsl(self.variable)}"
        return f"d{to_dsl(self.variable)}"

    def __str__(self):
        return f"{self.differential} / ({to_dsl(self.denominator)})"


@dataclass(frozen=True)
class CharSystem:
    """Ratios of the characteristic system; the field entry is a family over the anchor index."""
    ratios: tuple
    anchor: sp.Symbol

    def nonzero(self):
        return tuple(r for r in self.ratios if not r.zero)

    def constant_along(self):
        """Variables whose differential vanishes along the characteristics."""
        return tuple(r.variable for r in self.ratios if r.zero)

    def ratio_for(self, variable):
        for r in self.ratios:
            if r.variable == variable:
                return r
        return None

    def __str__(self):
        return " = ".join(str(r) for r in self.ratios) + f"    for each {self.anchor}"

    def to_mapping(self):
        return [{"differential": r.differential, "denominator": to_dsl(r.denominator), "zero": r.zero}
                for r in self.ratios]


def characteristic_system(generator, times=None):
    """Ratios dt_j/xi_tj, dPhi/eta, delta u(x)/xi_x of a nontrivial generator."""
    generator.require_nonzero()
    if times is None:
        times = [sp.Symbol(f"t{j}" if j else "t", real=True) for j in range(len(generator.xi_t))]
    ratios = [Ratio(t, canonicalize(xi)) for t, xi in zip(times, generator.xi_t)]
    ratios.append(Ratio(PHI, canonicalize(generator.eta)))
    ratios.append(Ratio(Field(1, generator.anchor), canonicalize(generator.xi_x)))
    return CharSystem(tuple(ratios), generator.anchor)
