# fdelie/symmetry/determining.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : symmetry engine | determining equations
#
# The on-solution expression is polynomial in jet variables whose points are
# integration indices. Every way of letting those indices coincide is a
# separate jet monomial: indices are grouped by a set partition and each
# group is sent to one of the class indices (x, xp, xpp). The coefficient of
# a monomial is read off with jet derivatives of the homogeneous part of the
# same degree, which symmetrizes Phi_{,u(x)u(xp)} = Phi_{,u(xp)u(x)}. Points
# of one monomial are distinct indices. The coefficient of every monomial
# class must vanish.

import itertools
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import sympy as sp
from sympy import default_sort_key
from sympy.utilities.iterables import multiset_partitions

from ..calculus.derivatives import FunctionalDerivative, PartialPhi, PartialTime
from ..calculus.jets import check_polynomial, jet_derivative
from ..config import CLASS_INDICES
from ..core.canonical import IndexTag, apply_tags, canonicalize, is_zero, term_parts, terms_of
from ..core.nodes import PHI, T, Field, Functional, Jet, Site, fresh_index, index_symbol, subs_free
from ..core.printer import to_dsl
from ..errors import ScopeError

logger = logging.getLogger(__name__)

DIAGONAL = "diagonal"
OFF_DIAGONAL = "off_diagonal"
NO_TAG = "none"

CLASS_POINTS = tuple(index_symbol(n) for n in CLASS_INDICES)


# ==============================================================================
#  TYPES
# ==============================================================================

@dataclass(frozen=True)
class DeterminingEquation:
    """coefficient of `monomial` = 0, under the index constraint `tag`."""
    monomial: sp.Expr
    tag: str
    expr: sp.Expr

    @property
    def degree(self):
        return sum(int(e) for b, e in (f.as_base_exp() for f in sp.Mul.make_args(self.monomial))
                   if isinstance(b, Jet))

    @property
    def key(self):
        return (sp.srepr(self.monomial), self.tag)

    def constraints(self):
        """x != x' for every pair of distinct points of the monomial."""
        distinct = list(dict.fromkeys(_monomial_points(self.monomial)))
        return tuple(IndexTag(p, q, False) for p, q in itertools.combinations(distinct, 2))

    def to_mapping(self):
        return {"monomial": to_dsl(self.monomial), "tag": self.tag, "equation": to_dsl(self.expr)}


@dataclass
class DeterminingSystem:
    equations: list
    consequences: list = field(default_factory=list)
    raw: list = field(default_factory=list)

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def find(self, monomial, tag=None):
        for eq in self.equations:
            if eq.monomial == monomial and (tag is None or eq.tag == tag):
                return eq
        return None

    def to_records(self):
        return [eq.to_mapping() for eq in self.equations]


def _monomial_points(monomial):
    points = []
    for f in sp.Mul.make_args(monomial):
        base, exponent = f.as_base_exp()
        if isinstance(base, Jet):
            points.extend(list(base.points) * int(exponent))
    return points


def _tag(monomial):
    """Only a lone second-order u-jet sits on or off the diagonal."""
    if isinstance(monomial, Jet) and len(monomial.u_slots) == 2:
        first, second = monomial.points
        return DIAGONAL if first == second else OFF_DIAGONAL
    return NO_TAG


# ==============================================================================
#  SPLITTING INTO JET-MONOMIAL CLASSES
# ==============================================================================

def _jet_factors(factors):
    jets = []
    for f in factors:
        base, exponent = f.as_base_exp()
        if isinstance(base, Jet):
            if not (exponent.is_Integer and exponent > 0):
                raise ScopeError(f"jet {base} enters with power {exponent}")
            jets.extend([base] * int(exponent))
        elif any(isinstance(n, Jet) for n in sp.preorder_traversal(f)):
            raise ScopeError(f"jet enters non-polynomially through {f}")
    return jets


def _term_monomials(term, points):
    """Degree of one canonical term and the jet monomials its indices can form."""
    outside, limits, body = term_parts(term)
    jets = _jet_factors(list(sp.Mul.make_args(outside)) + list(body))
    if not jets:
        return 0, [sp.S.One]
    bound = {lim[0] for lim in limits}
    jvars = list(dict.fromkeys(p for j in jets for p in j.points if p in bound))
    if not jvars:
        return len(jets), [sp.Mul(*jets)]
    monomials = []
    for blocks in multiset_partitions(jvars):
        k = len(blocks)
        if k > len(points):
            raise ScopeError(f"{k} coinciding index groups exceed the {len(points)} class indices")
        candidates = []
        for chosen in itertools.permutations(points[:k]):
            mapping = {v: p for block, p in zip(blocks, chosen) for v in block}
            candidates.append(sp.Mul(*[subs_free(j, mapping) for j in jets]))
        monomials.append(min(candidates, key=sp.srepr))
    return len(jets), monomials


def class_coefficient(expr, monomial, constraints=()):
    """Coefficient of a jet monomial in an expression homogeneous of its degree.

    Each jet factor J^k contributes k jet derivatives and a 1/k! factor.
    """
    out = sp.sympify(expr)
    for factor in sp.Mul.make_args(monomial):
        base, exponent = factor.as_base_exp()
        if not isinstance(base, Jet):
            continue
        for _ in range(int(exponent)):
            out = canonicalize(apply_tags(jet_derivative(out, base), constraints))
        out = out / sp.factorial(int(exponent))
    return canonicalize(apply_tags(out, constraints))


def split_classes(expr, points=CLASS_POINTS):
    """Raw jet-monomial classes of an on-solution expression."""
    expr = canonicalize(expr)
    check_polynomial(expr)
    parts = defaultdict(list)
    monomials = {}
    for term in terms_of(expr):
        degree, found = _term_monomials(term, points)
        parts[degree].append(term)
        for monomial in found:
            monomials.setdefault((sp.srepr(monomial), _tag(monomial)), (degree, monomial))
    classes = []
    for (_, tag), (degree, monomial) in monomials.items():
        constraints = DeterminingEquation(monomial, tag, sp.S.Zero).constraints()
        value = class_coefficient(sp.Add(*parts[degree]), monomial, constraints)
        classes.append(DeterminingEquation(monomial, tag, value))
    return sorted(classes, key=_order)


def _order(eq):
    return (-eq.degree, to_dsl(eq.monomial), eq.tag)


# ==============================================================================
#  REDUCTION
# ==============================================================================

def normalize(expr):
    """Divide by the numeric coefficient of the leading term."""
    terms = terms_of(expr)
    if not terms:
        return sp.S.Zero
    lead = min(terms, key=lambda t: default_sort_key(t.as_coeff_Mul()[1]))
    c = lead.as_coeff_Mul()[0]
    return canonicalize(expr / c) if c != 1 else expr


def _killer(expr):
    c, rest = expr.as_coeff_Mul()
    if isinstance(rest, Functional) and c != 0:
        return rest.name, Counter(rest.kinds())
    return None


def _kill(expr, killers):
    def dead(node):
        if not isinstance(node, Functional):
            return False
        kinds = Counter(node.kinds())
        return any(node.name == name and not (k - kinds) for name, k in killers)
    return canonicalize(expr.replace(dead, lambda node: sp.S.Zero))


def _priority(eq):
    return (eq.degree, to_dsl(eq.monomial), eq.tag)


def _contains(smaller, larger):
    return not (smaller - larger)


def reduce_system(classes):
    """Differential consequences of single-term equations.

    A class whose coefficient is c*F (F an unknown with some derivative slots)
    says F vanishes identically, so every further derivative of F vanishes too.
    Nonlinear jet classes are rewritten with these facts until nothing changes.
    A class that becomes 0, or whose single unknown is a derivative of one
    already known to vanish, is a consequence. Linear classes stay as extracted.
    """
    equations = [DeterminingEquation(eq.monomial, eq.tag, normalize(eq.expr))
                 for eq in classes if eq.expr != 0]
    consequences = []
    changed = True
    while changed:
        changed = False
        equations = sorted(equations, key=_priority)
        killers = [(i, k) for i, eq in enumerate(equations) if (k := _killer(eq.expr)) is not None]
        survivors = []
        for i, eq in enumerate(equations):
            if eq.degree < 2:
                survivors.append(eq)
                continue
            own = _killer(eq.expr)
            if own is not None:
                name, kinds = own
                implied = any(j != i and n == name and _contains(c, kinds) and (c != kinds or j < i)
                              for j, (n, c) in killers)
                if implied:
                    consequences.append(eq)
                    changed = True
                else:
                    survivors.append(eq)
                continue
            reduced = _kill(eq.expr, [k for _, k in killers])
            if reduced == 0:
                logger.debug("class %s follows from single-term equations", to_dsl(eq.monomial))
                consequences.append(eq)
                changed = True
            elif reduced != eq.expr:
                survivors.append(DeterminingEquation(eq.monomial, eq.tag, normalize(reduced)))
                changed = True
            else:
                survivors.append(eq)
        equations = survivors
    return sorted(equations, key=_order), consequences


def extract_determining(expr, problem=None, reduce=True):
    """Determining system of an on-solution expression."""
    classes = split_classes(expr)
    if not reduce:
        return DeterminingSystem([DeterminingEquation(c.monomial, c.tag, normalize(c.expr))
                                  for c in classes if c.expr != 0], [], classes)
    equations, consequences = reduce_system(classes)
    logger.info("%d raw classes -> %d determining equations (%d consequences)",
                len(classes), len(equations), len(consequences))
    return DeterminingSystem(equations, consequences, classes)


# ==============================================================================
#  INSTANTIATION ON A CONCRETE GENERATOR
# ==============================================================================

def _component(generator, node, times):
    if node.name == "eta":
        return generator.eta
    if node.name == "xi" and node.anchors:
        return generator.xi_at(1, node.anchors[0])
    for t, xi in zip(times, generator.xi_t):
        if node.name == f"xi{t}":
            return xi
    return None


def _slot_derivative(expr, slot):
    if slot == PHI:
        return PartialPhi()(expr)
    if isinstance(slot, Field):
        return FunctionalDerivative(slot.component, slot.point)(expr)
    return PartialTime(slot)(expr)


def instantiate(expr, generator, times=(T,)):
    """Replace the unknowns eta, xi_t, xi(x) and their derivatives by g's components."""
    def is_unknown(node):
        return isinstance(node, Functional) and _component(generator, node, times) is not None

    def value(node):
        # slot points may be bound outside the node; sift with fresh names
        points = {p for p in node.anchors if isinstance(p, sp.Symbol)}
        points |= {s.point for s in node.slots if isinstance(s, Field)}
        fresh = {p: fresh_index(str(p)) for p in points if not isinstance(p, Site)}
        node = subs_free(node, fresh)
        out = _component(generator, node, times)
        for slot in node.slots:
            out = canonicalize(_slot_derivative(out, slot))
        return subs_free(out, {v: k for k, v in fresh.items()})

    return canonicalize(sp.sympify(expr).replace(is_unknown, value))


def equation_holds(eq, generator, times=(T,), problem=None):
    """With a problem, on-solution unknowns (f2) are eliminated before the check."""
    value = instantiate(eq.expr, generator, times)
    if problem is not None:
        from .engine import restrict_on_solution
        value = restrict_on_solution(value, problem)
    return is_zero(value, eq.constraints())
