# tests/test_calculus.py
# FDE-Lie : functional, total and jet derivatives; finite-difference oracle

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fdelie.calculus import (OFF_DIAGONAL, ON_DIAGONAL, DerivativeRequest, derivative,
                             functional_derivative, jet_derivative, total_derivative)
from fdelie.calculus.numeric import finite_difference_check
from fdelie.core import PHI, T, Dirac, Field, Jet, equal_canonical, index_symbol, parse
from fdelie.errors import ScopeError
from fdelie.simulation import Bindings, Grid

x, xp, xpp, xppp, x1 = (index_symbol(n) for n in ("x", "xp", "xpp", "xppp", "x1"))

# no free x, so delta/delta u(x) acts at a fresh point
FUNCTIONALS = [
    "int[z:a..b] a4(z)*u(z) dz",
    "u(x1)",
    "Phi*t",
    "int[z:a..b] u(z)^2 dz",
    "int[z:a..b] int[w:a..b] c(z, w)*u(z)*u(w) dw dz",
    "a6*int[z:a..b] u(z) dz",
]


class TestFunctionalDerivative:

    def test_linear_functional(self):
        e = parse("int[xp:a..b] a4(xp)*u(xp) dxp")
        assert functional_derivative(e, 1, x) == parse("a4(x)")

    def test_evaluation_functional(self):
        assert functional_derivative(parse("u(x1)"), 1, x) == Dirac(x, x1)

    def test_quadratic_functional_twice(self):
        e = parse("int[xt:a..b] int[xs:a..b] c(xt, xs)*u(xs)*u(xt) dxs dxt")
        first = functional_derivative(e, 1, x)
        second = functional_derivative(first, 1, xpp)
        assert equal_canonical(second, parse("c(xpp, x) + c(x, xpp)"))

    def test_constant(self):
        assert functional_derivative(parse("a1*t + 3"), 1, x) == 0

    def test_other_component(self):
        assert functional_derivative(parse("int[z:a..b] u(z) dz"), 2, x) == 0

    def test_gradient_needs_delta_derivatives(self):
        with pytest.raises(ScopeError):
            functional_derivative(parse("dx(u(x1))"), 1, x)


class TestDerivativeProperties:

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(FUNCTIONALS), st.sampled_from(FUNCTIONALS), st.integers(-3, 3), st.integers(-3, 3))
    def test_linearity(self, left, right, p, q):
        e1, e2 = parse(left), parse(right)
        lhs = functional_derivative(p * e1 + q * e2, 1, x)
        rhs = p * functional_derivative(e1, 1, x) + q * functional_derivative(e2, 1, x)
        assert equal_canonical(lhs, rhs)

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(FUNCTIONALS), st.sampled_from(FUNCTIONALS))
    def test_leibniz(self, left, right):
        e1, e2 = parse(left), parse(right)
        lhs = functional_derivative(e1 * e2, 1, x)
        rhs = e1 * functional_derivative(e2, 1, x) + functional_derivative(e1, 1, x) * e2
        assert equal_canonical(lhs, rhs)


class TestTotalDerivative:

    def test_time(self):
        assert total_derivative(PHI, DerivativeRequest(PHI, "total_t")) == Jet((T,), ())

    def test_field(self):
        req = DerivativeRequest(PHI, "total_u", index=x)
        assert total_derivative(PHI, req) == Jet((), (Field(1, x),))

    def test_explicit_time(self):
        out = total_derivative(T * PHI, DerivativeRequest(T * PHI, "total_t"))
        assert equal_canonical(out, PHI + T * Jet((T,), ()))

    def test_functional_chain_term(self):
        eta = parse("eta")
        out = total_derivative(eta, DerivativeRequest(eta, "total_t"))
        assert equal_canonical(out, parse("dt(eta) + dt(Phi)*dphi(eta)"))

    def test_partial_time_dispatch(self):
        e = parse("t^2*Phi")
        assert derivative(DerivativeRequest(e, "partial_t")) == 2 * T * PHI

    def test_wrong_kind_for_total(self):
        with pytest.raises(ValueError):
            total_derivative(PHI, DerivativeRequest(PHI, "partial_phi"))

    @pytest.mark.parametrize("kwargs", [
        {"kind": "curl"},
        {"kind": "total_u"},
        {"kind": "functional_u"},
        {"kind": "jet"},
    ])
    def test_malformed_requests(self, kwargs):
        with pytest.raises(ValueError):
            DerivativeRequest(PHI, **kwargs)


class TestJetDerivative:

    def test_on_diagonal(self):
        e = parse("int[z:a..b] fd(fd(Phi, u(z)), u(z))*a4(z) dz")
        v = Jet((), (Field(1, xpp), Field(1, xpp)))
        assert jet_derivative(e, v, ON_DIAGONAL) == parse("a4(xpp)")

    def test_off_diagonal_symmetrizes(self):
        e = parse("2*int[z:a..b] int[w:a..b] fd(fd(Phi, u(z)), u(w))*fd(xi(w), u(z)) dw dz")
        v = Jet((), (Field(1, xpp), Field(1, xppp)))
        expected = parse("2*fd(xi(xppp), u(xpp)) + 2*fd(xi(xpp), u(xppp))")
        assert equal_canonical(jet_derivative(e, v, OFF_DIAGONAL), expected)

    def test_diagonal_is_inferred(self):
        e = parse("fd(fd(Phi, u(x)), u(x))*t")
        assert jet_derivative(e, Jet((), (Field(1, x), Field(1, x)))) == T

    def test_first_order(self):
        e = parse("int[z:a..b] fd(Phi, u(z))*a4(z) dz + dt(Phi)")
        assert jet_derivative(e, Jet((), (Field(1, x),))) == parse("a4(x)")
        assert jet_derivative(e, Jet((T,), ())) == 1

    def test_absent_variable(self):
        assert jet_derivative(parse("Phi*t"), Jet((), (Field(1, x),))) == 0

    def test_off_diagonal_needs_distinct_points(self):
        with pytest.raises(ScopeError):
            jet_derivative(parse("Phi"), Jet((), (Field(1, x), Field(1, x))), OFF_DIAGONAL)

    def test_non_polynomial(self):
        with pytest.raises(ScopeError):
            jet_derivative(parse("exp(fd(Phi, u(x)))"), Jet((), (Field(1, x),)))


class TestFiniteDifferenceOracle:

    @pytest.mark.parametrize("n", [16, 64, 256])
    def test_linear_functional(self, n):
        e = parse("int[z:a..b] a4(z)*u(z) dz")
        bindings = Bindings(functions={"a4": "1 + x"})
        assert finite_difference_check(e, Grid(0.0, 1.0, n), bindings=bindings) < 1e-8

    @pytest.mark.parametrize("n", [16, 64, 256])
    def test_quadratic_functional(self, n):
        e = parse("int[z:a..b] int[w:a..b] c(z, w)*u(z)*u(w) dw dz")
        bindings = Bindings(kernels={"c": "exp(-(x - xp)^2)"})
        assert finite_difference_check(e, Grid(0.0, 1.0, n), bindings=bindings) < 1e-6

    def test_batch_size_does_not_change_the_result(self):
        e = parse("int[z:a..b] int[w:a..b] c(z, w)*u(z)*u(w) dw dz")
        bindings = Bindings(kernels={"c": "exp(-(x - xp)^2)"})
        grid = Grid(0.0, 1.0, 24)
        whole = finite_difference_check(e, grid, bindings=bindings, batch=24)
        assert finite_difference_check(e, grid, bindings=bindings, batch=5) == pytest.approx(whole, abs=1e-9)

    @pytest.mark.parametrize("text", ["u(x1)", "exp(int[z:a..b] u(z) dz)", "int[z:a..b] u(z)^3 dz"])
    def test_nonlinear_and_point_functionals(self, text):
        assert finite_difference_check(parse(text), Grid(0.0, 1.0, 32)) < 1e-6

    def test_constant(self):
        assert finite_difference_check(parse("3"), Grid(0.0, 1.0, 8)) == 0.0
