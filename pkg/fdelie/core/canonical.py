# fdelie/core/canonical.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : expression core | canonical form, substitution, equality
#
# Canonical form of an expression:
#   - expand into terms  coeff * int ... int body  (nested integrals and
#     products of integrals are flattened into one multi-index integral);
#   - sift every delta that touches a bound index;
#   - pull bound-independent factors out, integrate constants to (hi - lo);
#   - alpha-rename bound indices to z0, z1, ... choosing the permutation with
#     the smallest structural key; a term equal to its own negative under a
#     range-preserving renaming is dropped;
#   - let sympy collect like terms.
# Equality splits every integral into factors with no shared bound index and
# then treats each integral as an opaque symbol.

import itertools
import logging
from dataclasses import dataclass

import sympy as sp
from sympy.core.function import AppliedUndef

from ..config import MAX_BOUND_PERMUTATIONS
from ..errors import DistributionError
from .nodes import (STRUCTURED, Dirac, Field, Functional, Jet, Zeta,
                    fresh_index, freshen, subs_free)

logger = logging.getLogger(__name__)

BOUND_PREFIX = "z"


def bound_symbol(k):
    return sp.Symbol(f"{BOUND_PREFIX}{k}", real=True)


# ==============================================================================
#  TERM EXPANSION
# ==============================================================================

@dataclass(frozen=True)
class _Term:
    coeff: sp.Expr = sp.S.One
    limits: tuple = ()
    body: tuple = ()

    def times(self, other):
        return _Term(self.coeff * other.coeff, self.limits + other.limits, self.body + other.body)


def _product(left, right):
    return [x.times(y) for x in left for y in right]


def _expand(e):
    if e == sp.S.Zero:
        return []
    if e.is_Number:
        return [_Term(coeff=e)]
    if e.is_Add:
        return [term for arg in e.args for term in _expand(arg)]
    if e.is_Mul:
        terms = [_Term()]
        for arg in e.args:
            terms = _product(terms, _expand(arg))
            if not terms:
                return []
        return terms
    if isinstance(e, sp.Integral):
        return _expand_integral(e)
    if e.is_Pow:
        base, ex = e.args
        if ex.is_Integer and ex > 0 and (base.is_Add or base.is_Mul or base.has(sp.Integral)):
            terms = [_Term()]
            for _ in range(int(ex)):
                terms = _product(terms, _expand(base))
            return terms
    return [_Term(body=(_atom(e),))]


def _expand_integral(e):
    mapping, limits = {}, []
    for var, lo, hi in e.limits:
        dummy = fresh_index(str(var))
        mapping[var] = dummy
        limits.append((dummy, lo, hi))
    function = subs_free(e.function, mapping)
    return [_Term(term.coeff, tuple(limits) + term.limits, term.body) for term in _expand(function)]


def _atom(e):
    if isinstance(e, sp.Symbol) or isinstance(e, STRUCTURED):
        return e
    if e.is_Pow:
        base, ex = e.args
        return sp.Pow(canonicalize(base), canonicalize(ex))
    if isinstance(e, sp.Function) and not isinstance(e, AppliedUndef):
        return e.func(*[canonicalize(a) for a in e.args])
    return e


# ==============================================================================
#  SIFTING AND FINALIZATION
# ==============================================================================

def _check_deltas(body):
    deltas = [f for f in body if isinstance(f, Dirac)]
    if len(deltas) != len(set(deltas)):
        raise DistributionError(f"product of coincident deltas: {deltas}")


def _sift(term):
    limits, body = list(term.limits), list(term.body)
    _check_deltas(body)
    while True:
        bound = {lim[0] for lim in limits}
        for pos, factor in enumerate(body):
            base, power = factor.as_base_exp() if factor.is_Pow else (factor, 1)
            if not isinstance(base, Dirac):
                continue
            if power != 1:
                raise DistributionError(f"product of coincident deltas: {factor}")
            p, q = base.points
            if p in bound:
                var, target = p, q
            elif q in bound:
                var, target = q, p
            else:
                continue
            del body[pos]
            limits = [lim for lim in limits if lim[0] != var]
            body = [subs_free(f, {var: target}) for f in body]
            break
        else:
            break
    _check_deltas(body)
    return _Term(term.coeff, tuple(limits), tuple(body))


def _finalize(term):
    if term.coeff == 0 or any(f == 0 for f in term.body):
        return []
    bound = {lim[0] for lim in term.limits}
    inside = [f for f in term.body if f.free_symbols & bound]
    outside = [f for f in term.body if not (f.free_symbols & bound)]
    coeff = term.coeff * sp.Mul(*outside)
    used = set()
    for f in inside:
        used |= f.free_symbols
    kept = [lim for lim in term.limits if lim[0] in used]
    parts = [coeff]
    for _, lo, hi in (lim for lim in term.limits if lim[0] not in used):
        parts = [p * hi for p in parts] + [-p * lo for p in parts]
    if not kept:
        return parts
    canonical = _alpha_canonical(kept, inside)
    if canonical is None:
        return []
    return [p * canonical for p in parts]


def _first_appearance(variables, factors):
    order = []
    for node in sp.preorder_traversal(sp.Mul(*factors)):
        if node in variables and node not in order:
            order.append(node)
    return order + [v for v in variables if v not in order]


def _renumber(expr, start):
    """Name nested integral indices z<start>, z<start+1>, ... by depth."""
    if isinstance(expr, sp.Integral):
        n = len(expr.limits)
        temp = {v: fresh_index(str(v)) for v, _, _ in expr.limits}
        function = _renumber(subs_free(expr.function, temp), start + n)
        final = {temp[v]: bound_symbol(start + i) for i, (v, _, _) in enumerate(expr.limits)}
        limits = [(final[temp[v]], lo, hi) for v, lo, hi in expr.limits]
        return sp.Integral(subs_free(function, final), *limits)
    if not expr.args or not expr.has(sp.Integral):
        return expr
    return expr.func(*[_renumber(a, start) for a in expr.args])


def _alpha_canonical(limits, factors):
    variables = [lim[0] for lim in limits]
    ranges = {lim[0]: (lim[1], lim[2]) for lim in limits}
    factors = [_renumber(f, len(variables)) for f in factors]
    if len(variables) <= MAX_BOUND_PERMUTATIONS:
        orders = itertools.permutations(variables)
    else:
        orders = [_first_appearance(variables, factors)]
    seen = {}
    for order in orders:
        mapping = {v: bound_symbol(i) for i, v in enumerate(order)}
        body = sp.Mul(*[subs_free(f, mapping) for f in factors])
        c, rest = body.as_coeff_Mul()
        key = (sp.srepr(rest), sp.srepr(tuple(ranges[v] for v in order)))
        seen.setdefault(key, []).append((c, rest, order))
    key = min(seen)
    candidates = seen[key]
    c, rest, order = candidates[0]
    if any(other == -c for other, _, _ in candidates):
        return None
    new_limits = [(bound_symbol(i), *ranges[v]) for i, v in enumerate(order)]
    return c * sp.Integral(rest, *new_limits)


def canonicalize(e):
    """Return the canonical form of e (idempotent)."""
    e = sp.sympify(e)
    out = []
    for term in _expand(e):
        out.extend(_finalize(_sift(term)))
    return sp.Add(*out)


# ==============================================================================
#  TERM ACCESS
# ==============================================================================

def terms_of(e):
    return sp.Add.make_args(e) if e != 0 else ()


def term_parts(term):
    """Split a canonical term into (outside factor, limits, body factors)."""
    factors = sp.Mul.make_args(term)
    integrals = [f for f in factors if isinstance(f, sp.Integral)]
    if not integrals:
        return sp.S.One, (), factors
    integral = integrals[0]
    outside = sp.Mul(*[f for f in factors if f is not integral])
    limits = tuple(tuple(lim) for lim in integral.limits)
    return outside, limits, sp.Mul.make_args(integral.function)


# ==============================================================================
#  SUBSTITUTION
# ==============================================================================

def _template_of(key):
    """Keys like u(x) or a4(x) with symbol arguments act on every point."""
    if isinstance(key, Field) and isinstance(key.point, sp.Symbol):
        return (key.point,)
    if isinstance(key, AppliedUndef) and all(isinstance(a, sp.Symbol) for a in key.args):
        return tuple(key.args)
    return None


def _matches(node, key):
    if isinstance(key, Field):
        return isinstance(node, Field) and node.component == key.component and node.order == key.order
    return isinstance(node, AppliedUndef) and node.func == key.func


def _apply_substitution(expr, exact, templates):
    if expr in exact:
        return freshen(exact[expr])
    for key, params, value in templates:
        if _matches(expr, key):
            actual = expr.point if isinstance(expr, Field) else expr.args
            actual = (actual,) if isinstance(expr, Field) else tuple(actual)
            return subs_free(freshen(value), dict(zip(params, actual)))
    if not expr.args:
        return expr
    if isinstance(expr, (Jet, Functional, Zeta)):
        # slots are jet coordinates, only index renames reach them
        return subs_free(expr, exact)
    if isinstance(expr, sp.Integral):
        function = _apply_substitution(expr.function, exact, templates)
        return sp.Integral(function, *expr.limits)
    args = [_apply_substitution(a, exact, templates) for a in expr.args]
    if all(x is y for x, y in zip(args, expr.args)):
        return expr
    return expr.func(*args)


def substitute(e, bindings):
    """Simultaneous substitution followed by canonicalization.

    Returns (expression, warnings); keys that do not occur are reported.
    """
    e = canonicalize(e)
    exact, templates, warnings = {}, [], []
    for key, value in bindings.items():
        key, value = sp.sympify(key), sp.sympify(value)
        params = _template_of(key)
        if params is not None:
            templates.append((key, params, value))
            present = any(_matches(node, key) for node in sp.preorder_traversal(e))
        else:
            exact[key] = value
            present = e.has(key)
        if not present:
            warnings.append(f"substitution key {key} does not occur in the expression")
    for message in warnings:
        logger.debug(message)
    return canonicalize(_apply_substitution(e, exact, templates)), warnings


# ==============================================================================
#  EQUALITY
# ==============================================================================

@dataclass(frozen=True)
class IndexTag:
    """Constraint between two free indices: equal (x=x') or distinct (x!=x')."""
    first: sp.Symbol
    second: sp.Symbol
    equal: bool

    @classmethod
    def parse(cls, text):
        from .nodes import index_symbol
        if "!=" in text:
            left, right = text.split("!=")
            return cls(index_symbol(left.strip()), index_symbol(right.strip()), False)
        left, right = text.split("=")
        return cls(index_symbol(left.strip()), index_symbol(right.strip()), True)


def apply_tags(e, tags=()):
    for tag in tags:
        if isinstance(tag, str):
            tag = IndexTag.parse(tag)
        if tag.equal:
            e = subs_free(e, {tag.second: tag.first})
        else:
            pair = {tag.first, tag.second}
            e = e.replace(lambda n: isinstance(n, Dirac) and set(n.points) == pair,
                          lambda n: sp.S.Zero)
    return e


def equal_canonical(a, b, tags=()):
    return canonicalize(apply_tags(sp.sympify(a), tags)) == canonicalize(apply_tags(sp.sympify(b), tags))


def _abstract(e, memo):
    if isinstance(e, (sp.Integral, AppliedUndef, sp.Derivative) + STRUCTURED):
        if e not in memo:
            memo[e] = sp.Dummy("w")
        return memo[e]
    if not e.args:
        return e
    return e.func(*[_abstract(a, memo) for a in e.args])


def _factor_groups(variables, factors):
    """Connected groups of factors, linked by the bound indices they share."""
    groups = []
    for f in factors:
        own = f.free_symbols & set(variables)
        if not own:
            continue
        linked, members, rest = set(own), [f], []
        for indices, group in groups:
            if indices & linked:
                linked |= indices
                members = group + members
            else:
                rest.append((indices, group))
        groups = rest + [(linked, members)]
    return groups


def _separate(e):
    """Rewrite every integral as a product of integrals over disjoint index sets."""
    if isinstance(e, STRUCTURED) or not e.has(sp.Integral):
        return e
    if not isinstance(e, sp.Integral):
        return e.func(*[_separate(a) for a in e.args])
    limits = [tuple(lim) for lim in e.limits]
    variables = [lim[0] for lim in limits]
    factors = [_separate(f) for f in sp.Mul.make_args(e.function)]
    groups = _factor_groups(variables, factors)
    if len(groups) == 1 and groups[0][0] == set(variables):
        return sp.Integral(sp.Mul(*factors), *limits)
    out = sp.Mul(*[f for f in factors if not f.free_symbols & set(variables)])
    used = set()
    for indices, group in groups:
        used |= indices
        own = [lim for lim in limits if lim[0] in indices]
        out *= canonicalize(sp.Integral(sp.Mul(*group), *own))
    for var, lo, hi in limits:
        if var not in used:
            out *= hi - lo
    return out


def is_zero(e, tags=()):
    """Decide e == 0: canonical form first, rational normal form as fallback."""
    c = canonicalize(apply_tags(sp.sympify(e), tags))
    if c == 0:
        return True
    flat = _abstract(_separate(c), {})
    reduced = sp.cancel(sp.together(flat))
    if reduced == 0:
        return True
    return sp.simplify(reduced) == 0


def simplify_residual(e, tags=()):
    return sp.S.Zero if is_zero(e, tags) else canonicalize(apply_tags(sp.sympify(e), tags))
