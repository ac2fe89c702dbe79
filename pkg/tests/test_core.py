# tests/test_core.py
# FDE-Lie : expression core: parsing, canonical form, substitution, printing

import re

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fdelie.core import (A, B, PHI, T, Dirac, Field, Functional, Jet, Kernel,
                         canonicalize, equal_canonical, index_symbol, is_zero, parse,
                         substitute, to_dsl)
from fdelie.errors import DistributionError, DslSyntaxError, ScopeError, UnboundIndexError
from fdelie.simulation import Bindings, Grid, discretize, random_states

x, xp, x1 = (index_symbol(n) for n in ("x", "xp", "x1"))

CORPUS = [
    "Phi",
    "t*Phi",
    "u(x1)",
    "a6*u(x1)^2",
    "int[z:a..b] a4(z)*u(z) dz",
    "int[z:a..b] u(z)^2 dz",
    "int[z:a..b] int[w:a..b] c(z, w)*u(z)*u(w) dw dz",
    "fd(Phi, u(x))",
    "fd(fd(Phi, u(x)), u(xp))",
    "int[z:a..b] fd(fd(Phi, u(z)), u(z)) dz",
    "dt(Phi)*fd(Phi, u(x))",
    "exp(int[z:a..b] u(z) dz)",
    "int[z:a..b] Coff(x, z)*u(z) dz",
    "fd(xi(x), u(xp))",
    "dphi(eta)*dt(Phi)",
]


class TestParse:

    def test_integral_binds_its_index(self):
        e = parse("int[x:a..b] a4(x)*u(x) dx")
        assert isinstance(e, sp.Integral)
        (var, lo, hi), = e.limits
        assert (lo, hi) == (A, B)
        assert x not in e.free_symbols

    def test_jet_variable(self):
        assert parse("fd(Phi, u(x))") == Jet((), (Field(1, x),))

    def test_time_jet(self):
        assert parse("dt(Phi)") == Jet((T,), ())

    def test_heat_equation(self):
        e = parse("dt(Phi) - int[x:a..b] fd(fd(Phi, u(x)), u(x)) dx")
        z = sp.Dummy()
        expected = Jet((T,), ()) - sp.Integral(Jet((), (Field(1, z), Field(1, z))), (z, A, B))
        assert equal_canonical(e, expected)

    def test_declared_functionals_and_index_functions(self):
        e = parse("xi(x)")
        assert isinstance(e, Functional) and e.anchors == (x,)
        assert isinstance(parse("a4(x)"), sp.Function)
        assert parse("a4") == sp.Symbol("a4", real=True)

    def test_kernel_with_diagonal_carries_a_delta(self):
        e = parse("C(x, xp)", canonical=False)
        assert e.has(Dirac(x, xp))
        assert e.has(Kernel("Coff", "antisymmetric", x, xp))

    def test_syntax_error_reports_position(self):
        with pytest.raises(DslSyntaxError) as info:
            parse("u(x) +")
        assert "line 1" in str(info.value)

    def test_unknown_index(self):
        with pytest.raises(UnboundIndexError):
            parse("u(q)")

    def test_reserved_bound_name_cannot_be_free(self):
        with pytest.raises(UnboundIndexError):
            parse("u(z3)")

    def test_integral_closed_with_other_name(self):
        with pytest.raises(UnboundIndexError):
            parse("int[z:a..b] u(z) dy")

    def test_zeta_needs_a_jet(self):
        with pytest.raises(ScopeError):
            parse("zeta(t)")


class TestCanonical:

    def test_dirac_sifting(self):
        assert parse("int[xp:a..b] dirac(x, xp)*u(xp) dxp") == Field(1, x)

    def test_coincident_dirac_is_one(self):
        assert Dirac(x, x) == 1

    def test_alpha_equivalence(self):
        left = parse("int[z:a..b] int[w:a..b] c(z, w)*u(z)*u(w) dw dz")
        right = parse("int[w:a..b] int[z:a..b] c(w, z)*u(w)*u(z) dz dw")
        assert left == right

    def test_bound_names_do_not_matter(self):
        assert equal_canonical(parse("int[z:a..b] a4(z)*u(z) dz"), parse("int[w:a..b] a4(w)*u(w) dw"))

    def test_jet_slots_are_sorted(self):
        assert parse("fd(fd(Phi, u(xp)), u(x))") == parse("fd(fd(Phi, u(x)), u(xp))")

    def test_antisymmetric_kernel(self):
        assert is_zero(parse("Coff(x, xp) + Coff(xp, x)"))

    def test_antisymmetry_off_the_diagonal(self):
        e = parse("C(x, xp) + C(xp, x)")
        assert not is_zero(e)
        assert equal_canonical(e, 0, tags=("x != xp",))

    def test_distinct_free_indices(self):
        assert not equal_canonical(parse("fd(Phi, u(x))"), parse("fd(Phi, u(xp))"))

    def test_square_of_delta(self):
        with pytest.raises(DistributionError):
            parse("dirac(x, xp)^2")

    def test_constant_integrand(self):
        assert equal_canonical(parse("int[z:a..b] 1 dz"), B - A)

    def test_separable_integrals_cancel_through_a_quotient(self):
        v = parse("int[z:a..b] a4(z)*u(z) dz")
        d = parse("int[z:a..b] a4(z)*(a4(z)*t + a5(z)) dz")
        merged = canonicalize(v * d)
        assert any(len(i.limits) == 2 for i in merged.atoms(sp.Integral))
        assert is_zero(merged / d - v)
        assert not is_zero(merged / d - 2 * v)

    def test_own_negative_needs_matching_ranges(self):
        assert parse("int[z:a..b] int[w:a..b] Coff(z, w) dw dz") == 0
        e = parse("int[z:a..b] int[w:0..1] Coff(z, w) dw dz")
        assert e != 0
        assert not is_zero(e)


class TestSubstitute:

    def test_empty_substitution_is_identity(self):
        e = parse("int[z:a..b] a4(z)*u(z) dz")
        out, warnings = substitute(e, {})
        assert out == e and warnings == []

    def test_field_template(self):
        out, _ = substitute(parse("int[z:a..b] a4(z)*u(z) dz"), {Field(1, x): 0})
        assert out == 0

    def test_on_solution_substitution(self):
        rhs = parse("int[z:a..b] fd(fd(Phi, u(z)), u(z)) dz")
        out, _ = substitute(parse("dt(Phi)*fd(Phi, u(x))"), {Jet((T,), ()): rhs})
        assert equal_canonical(out, rhs * Jet((), (Field(1, x),)))

    def test_missing_key_is_reported(self):
        _, warnings = substitute(parse("Phi"), {sp.Symbol("a3", real=True): 1})
        assert len(warnings) == 1


class TestPrinter:

    def test_jet(self):
        assert to_dsl(parse("fd(fd(Phi, u(x)), u(xp))")) == "fd(fd(Phi, u(x)), u(xp))"

    def test_kernel_off_part(self):
        assert to_dsl(Kernel("Coff", "antisymmetric", x, xp)) == "Coff(x, xp)"

    def test_power(self):
        assert to_dsl(PHI**2) == "Phi^2"


NUMERIC_CORPUS = [
    "Phi",
    "t*Phi",
    "u(x1)",
    "a6*u(x1)^2",
    "int[z:a..b] a4(z)*u(z) dz",
    "int[z:a..b] u(z)^2 dz",
    "int[z:a..b] int[w:a..b] a4(z)*a5(w)*u(z)*u(w) dw dz",
    "exp(int[z:a..b] u(z) dz)",
    "int[z:a..b] dirac(z, x1)*u(z) dz",
    "(int[w:a..b] a5(w)*u(w) dw)^2",
]
NUMERIC_BINDINGS = Bindings(params={"a6": 0.7}, functions={"a4": "1 + x", "a5": "2 - x"}, points={"x1": 0.3})

HEAT_RHS = "int[z:a..b] fd(fd(Phi, u(z)), u(z)) dz"

# (bindings, the same substitution done on the DSL text)
SUBSTITUTIONS = [
    ({}, lambda s: s),
    ({Field(1, x): parse("a4(x)")}, lambda s: re.sub(r"(?<!, )\bu\(", "a4(", s)),
    ({sp.Symbol("a6", real=True): 1}, lambda s: s.replace("a6", "1")),
    ({Jet((T,), ()): parse(HEAT_RHS)}, lambda s: s.replace("dt(Phi)", f"({HEAT_RHS})")),
]


def _join(parts):
    return " + ".join(f"({k})*{e}" for k, e in parts)


def _swap_bound_names(text):
    swap = {"z": "w", "w": "z", "dz": "dw", "dw": "dz"}
    return re.sub(r"\bd?[zw]\b", lambda m: swap[m.group(0)], text)


def _terms(corpus, factors):
    products = st.lists(st.sampled_from(corpus), min_size=1, max_size=factors).map(" * ".join)
    return st.lists(st.tuples(st.integers(-3, 3), products), min_size=1, max_size=3)


sums = _terms(CORPUS, 3).map(_join)
numeric_sums = _terms(NUMERIC_CORPUS, 3).map(_join)


class TestCanonicalProperties:

    @settings(max_examples=40, deadline=None)
    @given(sums)
    def test_idempotent(self, text):
        e = parse(text)
        assert canonicalize(e) == e

    @settings(max_examples=40, deadline=None)
    @given(sums)
    def test_printed_form_parses_back(self, text):
        e = parse(text)
        assert parse(to_dsl(e)) == e

    @settings(max_examples=30, deadline=None)
    @given(_terms(CORPUS, 2), _terms(CORPUS, 2))
    def test_equality_is_an_equivalence(self, parts, other):
        a = parse(_join(parts))
        b = parse(_swap_bound_names(_join(parts[::-1])))
        c = parse(_join(parts[::-1]))
        d = parse(_join(other))
        assert equal_canonical(a, a)
        assert equal_canonical(a, b) and equal_canonical(b, a)
        assert equal_canonical(b, c) and equal_canonical(a, c)
        assert equal_canonical(a, d) == equal_canonical(d, a)
        if equal_canonical(a, d):
            assert equal_canonical(d, c)

    @settings(max_examples=30, deadline=None)
    @given(sums, st.sampled_from(range(len(SUBSTITUTIONS))))
    def test_substitution_commutes_with_canonical_form(self, text, k):
        bindings, rewrite = SUBSTITUTIONS[k]
        expected = parse(rewrite(text))
        for e in (parse(text, canonical=False), parse(text)):
            out, _ = substitute(e, bindings)
            assert is_zero(out - expected), text

    @settings(max_examples=30, deadline=None)
    @given(numeric_sums)
    def test_canonical_form_keeps_the_grid_value(self, text):
        grid = Grid(0.0, 1.0, 12)
        states = random_states(grid, 3, np.random.default_rng(7)).with_phi(1.3)
        raw = discretize(parse(text, canonical=False), grid, NUMERIC_BINDINGS).batch(states)
        canonical = discretize(parse(text), grid, NUMERIC_BINDINGS).batch(states)
        np.testing.assert_allclose(canonical, raw, rtol=1e-10, atol=1e-10)
