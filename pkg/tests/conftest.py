# tests/conftest.py
# FDE-Lie : shared fixtures for the test suite

from pathlib import Path

import pytest

from fdelie.symmetry import determining_system, load_generators, load_problem

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name):
    return FIXTURES / name


@pytest.fixture(scope="session")
def heat():
    return load_problem(fixture_path("heat_problem.json"))


@pytest.fixture(scope="session")
def heat_unit():
    return load_problem(fixture_path("heat_problem_unit.json"))


@pytest.fixture(scope="session")
def trivial():
    return load_problem(fixture_path("trivial_problem.json"))


@pytest.fixture(scope="session")
def heat_generators(heat):
    generators, _ = load_generators(fixture_path("heat_generators.json"), heat)
    return {g.name: g for g in generators}


@pytest.fixture(scope="session")
def corrupted_s5(heat):
    generators, _ = load_generators(fixture_path("corrupted_s5.json"), heat)
    return generators[0]


@pytest.fixture(scope="session")
def family_i(heat):
    """The general heat symmetry generator and the problem carrying the f2 declaration."""
    generators, problem = load_generators(fixture_path("family_I.json"), heat)
    return generators[0], problem


@pytest.fixture(scope="session")
def heat_system(heat):
    return determining_system(heat)
