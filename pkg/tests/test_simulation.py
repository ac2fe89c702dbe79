# tests/test_simulation.py
# FDE-Lie : grids, numeric evaluation, flows, transport and the classical bridge

import json
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

from fdelie.core import PHI, index_symbol, parse
from fdelie.errors import InvalidFixtureError, ScopeError, UnboundParameterError
from fdelie.simulation import (Bindings, DiscreteState, Grid, classical_counterpart,
                               classical_heat_family, classical_limit_check, discretize,
                               discretize_generator, discretize_symbolic, equation_residual,
                               flow, flow_group_law, flow_tangent_error, heat_kernel,
                               intermediate_relation_check, invariant_solution_residual,
                               invariant_solution_text, random_states, symmetry_transport_test)
from fdelie.simulation.classical import field_symbols
from fdelie.simulation.residual_study import CASES, run_residual_study, save_residual_study
from fdelie.symmetry import Generator

x = index_symbol("x")


@pytest.fixture
def states():
    rng = np.random.default_rng(3)
    return random_states(Grid(0.0, 1.0, 8), 4, rng).with_phi(1.5)


class TestGrid:

    def test_midpoint_nodes(self):
        grid = Grid(0.0, 1.0, 4)
        assert grid.dx == 0.25 and grid.kappa == 4.0
        np.testing.assert_allclose(grid.nodes, [0.125, 0.375, 0.625, 0.875])

    def test_unit_spacing(self):
        grid = Grid.unit(8)
        assert grid.dx == 1.0 and grid.kappa == 1.0

    def test_nearest(self):
        grid = Grid(0.0, 1.0, 4)
        assert grid.nearest(0.3) == 1
        assert grid.nearest(-5) == 0 and grid.nearest(5) == 3

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1), (1.0, 0.0, 4)])
    def test_invalid(self, args):
        with pytest.raises(ScopeError):
            Grid(*args)

    def test_state_batch(self):
        state = DiscreteState.of(0.5, np.zeros((3, 4)))
        assert state.size == 3
        assert state.t.shape == (3,) and state.phi.shape == (3,)


class TestEvaluation:

    def test_linear_functional_of_constants(self):
        f = discretize(parse("int[z:a..b] a4(z)*u(z) dz"), Grid(0.0, 1.0, 10), Bindings(functions={"a4": "1"}))
        assert f(np.ones(10)) == pytest.approx(1.0)

    def test_discrete_delta(self):
        grid = Grid(0.0, 1.0, 8)
        f = discretize(parse("dirac(x, x1)"), grid, Bindings(points={"x1": 0.3}), axes=(x,))
        expected = np.zeros(8)
        expected[grid.nearest(0.3)] = 1 / grid.dx
        np.testing.assert_allclose(f(np.zeros(8)), expected)

    def test_sifted_delta_matches_discrete_delta(self):
        grid = Grid(0.0, 1.0, 8)
        u = np.linspace(-1.0, 1.0, 8)
        bindings = Bindings(points={"x1": 0.7})
        sifted = discretize(parse("u(x1)"), grid, bindings)(u)
        raw = discretize(parse("int[z:a..b] dirac(z, x1)*u(z) dz", canonical=False), grid, bindings)(u)
        assert sifted == pytest.approx(raw)

    def test_double_integral(self):
        grid = Grid(0.0, 1.0, 16)
        f = discretize(parse("int[z:a..b] u(z) dz * int[w:a..b] u(w) dw"), grid)
        assert f(np.full(16, 2.0)) == pytest.approx(4.0)

    def test_unbound_parameter(self):
        f = discretize(parse("a6*Phi"), Grid(0.0, 1.0, 4))
        with pytest.raises(UnboundParameterError):
            f(np.zeros(4), phi=1.0)

    def test_heat_kernel_solves_the_heat_equation(self, heat, states):
        grid = Grid(0.0, 1.0, 8)
        residual = equation_residual(heat.equation, grid, heat_kernel(grid), states)
        assert np.max(np.abs(residual)) < 1e-8


class TestFlows:

    def test_time_translation(self, heat_generators, states):
        out = flow(heat_generators["S1"], Grid(0.0, 1.0, 8), states, 0.7)
        np.testing.assert_allclose(out.t, states.t + 0.7, atol=1e-12)
        np.testing.assert_allclose(out.u, states.u, atol=1e-12)

    def test_scaling_of_phi(self, heat_generators, states):
        out = flow(heat_generators["S6"], Grid(0.0, 1.0, 8), states, 1.0)
        np.testing.assert_allclose(out.phi, np.e * states.phi, atol=1e-10)

    def test_parabolic_scaling(self, heat_generators, states):
        out = flow(heat_generators["S5"], Grid(0.0, 1.0, 8), states, 0.3)
        assert np.max(np.abs(out.t - np.exp(0.6) * states.t)) < 1e-10
        assert np.max(np.abs(out.u - np.exp(0.3) * states.u)) < 1e-10

    @pytest.mark.parametrize("name", ["S4", "S5", "S7"])
    def test_group_law(self, heat_generators, name):
        bindings = Bindings(points={"x1": 0.3})
        assert flow_group_law(heat_generators[name], Grid(0.0, 1.0, 8), 0.2, 0.3, bindings) < 1e-9

    def test_tangent(self, heat_generators):
        assert flow_tangent_error(heat_generators["S5"], Grid(0.0, 1.0, 8)) < 1e-6


class TestTransport:

    @pytest.mark.parametrize("name", ["S1", "S5", "S6"])
    def test_heat_kernel_symmetries(self, heat, heat_generators, name):
        grid = Grid.unit(8)
        result = symmetry_transport_test(heat, heat_generators[name], grid, 0.3, heat_kernel(grid), samples=20)
        assert result.max_residual < 1e-8
        assert result.to_mapping()["n"] == 8

    def test_corrupted_generator(self, heat, corrupted_s5):
        grid = Grid.unit(8)
        result = symmetry_transport_test(heat, corrupted_s5, grid, 0.3, heat_kernel(grid), samples=20)
        assert result.max_residual > 1e-3

    def test_bad_baseline(self, heat, heat_generators):
        def not_a_solution(t, u):
            return np.asarray(t, dtype=float) + 0.0 * np.sum(u, axis=-1)

        with pytest.raises(InvalidFixtureError):
            symmetry_transport_test(heat, heat_generators["S1"], Grid.unit(4), 0.3, not_a_solution)

    def test_phi_dependent_xi(self, heat):
        g = Generator(sp.S.Zero, (PHI,), sp.S.Zero, name="phi_clock")
        with pytest.raises(ScopeError):
            symmetry_transport_test(heat, g, Grid.unit(4), 0.3, heat_kernel(Grid.unit(4)))


class TestClassicalBridge:

    def test_three_variables(self, heat):
        pde = classical_counterpart(heat, 3)
        assert pde.kappa == 1.0
        assert len(sp.Add.make_args(pde.rhs)) == 3
        assert all(isinstance(term, sp.Derivative) for term in sp.Add.make_args(pde.rhs))

    def test_grid_normalization(self, heat):
        pde = classical_counterpart(heat, Grid(0.0, 1.0, 4))
        assert pde.kappa == 4.0
        assert sp.expand(pde.rhs - 4 * pde.unit_rhs) == 0
        assert pde.to_mapping()["time_rescaling"] == "t -> 4 * t"

    def test_single_variable(self, heat):
        pde = classical_counterpart(heat, 1)
        assert isinstance(pde.rhs, sp.Derivative)

    def test_symbolic_discretization(self):
        u1, u2, u3 = field_symbols(3)
        out = discretize_symbolic(parse("int[z:a..b] a4(z)*u(z) dz + (b - a)"), 3)
        a4 = [sp.Symbol(f"a4_{i}", real=True) for i in (1, 2, 3)]
        assert sp.expand(out - (a4[0] * u1 + a4[1] * u2 + a4[2] * u3 + 3)) == 0

    def test_discretized_scaling_generator(self, heat_generators):
        g = discretize_generator(heat_generators["S5"], 3)
        assert g.xi == field_symbols(3)
        assert g.xi_t == 2 * sp.Symbol("t", real=True)

    def test_heat_family_shape(self):
        family = classical_heat_family(2)
        assert set(family.components()) == {"eta", "xi_t", "xi_1", "xi_2"}

    @pytest.mark.parametrize("n", [2, 3])
    def test_general_family_symbolic(self, family_i, n):
        generator, _ = family_i
        check = classical_limit_check(generator, n)
        assert check.mode == "symbolic" and check.passed, check.mismatched

    def test_general_family_numeric(self, family_i):
        generator, _ = family_i
        check = classical_limit_check(generator, 64)
        assert check.mode == "numeric" and check.passed, check.to_mapping()

    def test_mismatch_is_reported(self, heat_generators):
        check = classical_limit_check(heat_generators["S6"], 2)
        assert not check.passed
        assert "eta" in check.mismatched


class TestInvariantSolutionResidual:

    def test_constant_a4(self):
        residual = invariant_solution_residual(invariant_solution_text(), Grid(0.0, 1.0, 32), 4,
                                               CASES["constant_a4"])
        assert residual < 1e-6

    def test_varying_a4(self):
        residual = invariant_solution_residual(invariant_solution_text(), Grid(0.0, 1.0, 64), 4,
                                               CASES["varying_a4"])
        assert residual > 1e-4

    def test_zero_field(self):
        grid = Grid(0.0, 1.0, 8)
        bindings = Bindings(params={"a6": 0.0}, functions={"a4": "1", "a5": "2"})
        f = discretize(parse(invariant_solution_text("3")), grid, bindings)
        assert f(np.zeros(8), t=0.5) == pytest.approx(3 / np.sqrt(0.5 + 2))

    def test_intermediate_relations(self):
        check = intermediate_relation_check(Grid(0.0, 1.0, 128), CASES["constant_a4"], samples=4)
        assert check.tder_chain < 1e-6
        assert check.funder_printed < 1e-6
        assert check.tder_printed > 1e-3


class TestResidualStudy:

    def test_table_and_reports(self, tmp_path):
        study = run_residual_study(sizes=(16, 32), samples=2, seed=7)
        assert set(study.table["case"]) == {"constant_a4", "varying_a4"}
        assert len(study.table) == 4
        assert len(study.conclusions) == 2
        payload = study.to_mapping()
        assert payload["seed"] == 7 and payload["command"] == "residual_study"

        paths = [Path(p) for p in save_residual_study(study, tmp_path / "reports")]
        assert [p.suffix for p in paths] == [".csv", ".json", ".png"]
        assert all(p.exists() and p.parent == tmp_path / "reports" for p in paths)
        assert json.loads(paths[1].read_text(encoding="utf-8"))["schema"] == 1
