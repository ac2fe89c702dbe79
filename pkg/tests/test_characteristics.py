# tests/test_characteristics.py
# FDE-Lie : characteristic systems, invariants and invariant solutions

import pytest
import sympy as sp

from conftest import fixture_path
from fdelie.characteristics import (characteristic_system, classical_constants, heat_invariants,
                                    load_invariants, verify_invariant, verify_invariant_solution)
from fdelie.core import PHI, T, Field, index_symbol, parse
from fdelie.errors import EmptyGeneratorError, InvalidFixtureError
from fdelie.simulation import Bindings, Grid
from fdelie.symmetry import Domain, Generator, generator_from_mapping, load_generators

x = index_symbol("x")

CONSTANT_A4 = {"name": "inv_hc_const", "xi_t": ["0"], "xi_x": "a4*t + a5(x)",
               "eta": "-a6*Phi - a4*Phi*int[z:a..b] u(z) dz/2"}


@pytest.fixture(scope="module")
def inv_hc(heat):
    generators, problem = load_generators(fixture_path("inv_hc_generators.json"), heat)
    return generators[0], problem


class TestCharacteristicSystem:

    def test_time_translation(self, heat_generators):
        system = characteristic_system(heat_generators["S1"])
        assert system.ratio_for(T).denominator == 1
        assert set(system.constant_along()) == {PHI, Field(1, x)}

    def test_scaling_of_phi(self, heat_generators):
        system = characteristic_system(heat_generators["S6"])
        assert [r.variable for r in system.nonzero()] == [PHI]

    def test_invariant_solution_generator(self, inv_hc):
        g, problem = inv_hc
        system = characteristic_system(g, problem.times)
        assert system.ratio_for(T).zero
        assert system.ratio_for(Field(1, x)).denominator == problem.parse("a4(x)*t + a5(x)")
        assert system.ratio_for(PHI).denominator == problem.parse("-a6*Phi - Phi*int[z:a..b] a4(z)*u(z) dz/2")

    def test_text_and_records(self, heat_generators):
        system = characteristic_system(heat_generators["S5"])
        assert str(system).startswith("dt / (2*t)")
        assert [r["zero"] for r in system.to_mapping()] == [False, True, False]

    def test_zero_generator(self):
        with pytest.raises(EmptyGeneratorError):
            characteristic_system(Generator(sp.S.Zero, (sp.S.Zero,), sp.S.Zero))


class TestInvariants:

    def test_hyperbolic_constants(self, heat):
        generators, problem = load_generators(fixture_path("eq_char_generators.json"), heat)
        invariants = load_invariants(fixture_path("invariants_eq_char.txt"), problem)
        assert invariants.point == index_symbol("x1")
        for member, residual in invariants.verify(generators[0], problem.domain, problem.times):
            assert residual == 0, member.name

    def test_time_is_not_invariant_under_translation(self, heat_generators):
        assert verify_invariant(parse("t"), heat_generators["S1"]) == 1

    def test_invariant_solution_generator(self, inv_hc):
        g, problem = inv_hc
        invariants = load_invariants(fixture_path("invariants_inv_hc.txt"), problem)
        assert [m.role for m in invariants.members] == ["scalar", "field", "dependent"]
        for member, residual in invariants.verify(g, problem.domain, problem.times):
            assert residual == 0, member.name

    def test_printed_dependent_invariant_needs_constant_a4(self, heat, inv_hc):
        g, problem = inv_hc
        checked = dict((m.name, r) for m, r in heat_invariants(problem).verify(g, problem.domain))
        assert checked["tau"] == 0 and checked["C"] == 0 and checked["C_Phi"] == 0
        assert checked["C_Phi_printed"] != 0

        constant = generator_from_mapping(CONSTANT_A4, heat)
        checked = dict((m.name, r) for m, r in heat_invariants(heat, constant_a4=True).verify(constant, heat.domain))
        assert all(r == 0 for r in checked.values()), checked

    def test_unit_domain_file(self, heat_unit):
        generators, problem = load_generators(fixture_path("inv_hc_const_generators.json"), heat_unit)
        invariants = load_invariants(fixture_path("invariants_inv_hc_const.txt"), problem)
        for member, residual in invariants.verify(generators[0], problem.domain, problem.times):
            assert residual == 0, member.name

    @pytest.mark.parametrize("variant", [0, 1])
    def test_classical_constants(self, variant):
        domain = Domain.kronecker(4)
        shift = Generator(PHI, (sp.S.Zero,), sp.S.One)
        constants = classical_constants(domain, variant)
        assert len(constants.members) == 4
        assert constants.dependent.name == "C1"
        for member, residual in constants.verify(shift, domain):
            assert residual == 0, member.name

    def test_records(self, heat, heat_generators):
        invariants = load_invariants(fixture_path("invariants_eq_char.txt"), heat)
        records = invariants.to_records(invariants.verify(heat_generators["S1"], heat.domain))
        assert [r["name"] for r in records] == ["C1", "C1_mean", "C", "C_slope"]
        assert all(r["invariant_ok"] for r in records)


class TestInvariantFiles:

    def test_missing_file(self, heat, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_invariants(tmp_path / "none.txt", heat)

    @pytest.mark.parametrize("content", [
        "# only comments\n",
        "vector v: u(x)\n",
        "u(x) - u(x1)\n",
        "point: x1 = left\nfield C: u(x)\n",
    ])
    def test_invalid_files(self, heat, tmp_path, content):
        path = tmp_path / "bad.txt"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(InvalidFixtureError):
            load_invariants(path, heat)

    def test_point_position_and_default_names(self, heat, tmp_path):
        path = tmp_path / "inv.txt"
        path.write_text("point: x1 = 0.25\nscalar: t\nscalar: a6\n", encoding="utf-8")
        invariants = load_invariants(path, heat)
        assert invariants.point_position((0.0, 1.0)) == 0.25
        assert [m.name for m in invariants.scalars] == ["scalar1", "scalar2"]


class TestInvariantSolution:

    def test_closed_form_on_the_unit_domain(self, heat_unit):
        generators, problem = load_generators(fixture_path("inv_hc_const_generators.json"), heat_unit)
        phi = problem.parse(fixture_path("invariant_solution_const.txt").read_text(encoding="utf-8").strip())
        sym, handle = verify_invariant_solution(phi, generators[0], problem)
        assert sym == 0
        bindings = Bindings(params={"a4": 1.0, "a6": 0.3}, functions={"a5": "1"})
        assert handle.evaluate(Grid(0.0, 1.0, 32), bindings, samples=4) < 1e-6

    def test_constant_is_not_invariant_under_scaling(self, heat, heat_generators):
        sym, _ = verify_invariant_solution(sp.Integer(1), heat_generators["S6"], heat)
        assert sym != 0
