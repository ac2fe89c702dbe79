# tests/test_cli.py
# FDE-Lie : command line: exit codes, printed reports and JSON output

import json

import pytest

from conftest import fixture_path
from fdelie.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main

HEAT = str(fixture_path("heat_problem.json"))
HEAT_UNIT = str(fixture_path("heat_problem_unit.json"))


def _generator_file(tmp_path, *items, name="generators.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"anchor": "x", "generators": list(items)}), encoding="utf-8")
    return str(path)


class TestDetermine:

    def test_heat(self, tmp_path, capsys):
        out = tmp_path / "determine.json"
        assert main(["determine", "--problem", HEAT, "--json-out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["schema"] == 1
        assert len(report["equations"]) == 8
        assert "Determining equations" in capsys.readouterr().out

    def test_classical_mode(self, capsys):
        assert main(["determine", "--problem", HEAT, "--mode", "classical", "--grid-n", "2"]) == EXIT_OK
        assert "heat_n2" in capsys.readouterr().out

    def test_missing_problem_flag(self, capsys):
        assert main(["determine"]) == EXIT_INPUT
        assert "ERROR :" in capsys.readouterr().out


class TestVerify:

    def test_heat_symmetries(self, capsys):
        code = main(["verify", "--problem", HEAT, "--generators", str(fixture_path("heat_generators.json"))])
        assert code == EXIT_OK
        assert "7 / 7" in capsys.readouterr().out

    def test_corrupted(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        code = main(["verify", "--problem", HEAT, "--generators", str(fixture_path("corrupted_s5.json")),
                     "--json-out", str(out)])
        assert code == EXIT_FAILED
        printed = capsys.readouterr().out
        assert "NOT a symmetry" in printed and "[diagonal]" in printed
        assert json.loads(out.read_text(encoding="utf-8"))["results"][0]["residual_zero"] is False

    def test_missing_file(self, tmp_path, capsys):
        code = main(["verify", "--problem", str(tmp_path / "none.json"),
                     "--generators", str(fixture_path("heat_generators.json"))])
        assert code == EXIT_INPUT
        assert "ERROR :" in capsys.readouterr().out

    def test_empty_generator_list(self, tmp_path):
        assert main(["verify", "--problem", HEAT, "--generators", _generator_file(tmp_path)]) == EXIT_INPUT

    def test_bad_expression(self, tmp_path, capsys):
        path = _generator_file(tmp_path, {"name": "broken", "eta": "Phi +"})
        assert main(["verify", "--problem", HEAT, "--generators", path]) == EXIT_INPUT
        assert "line 1" in capsys.readouterr().out

    def test_classical_mode_is_out_of_scope(self):
        code = main(["verify", "--problem", HEAT, "--generators", str(fixture_path("heat_generators.json")),
                     "--mode", "classical"])
        assert code == EXIT_INPUT


class TestInvariants:

    def test_hyperbolic_constants(self, capsys):
        code = main(["invariants", "--problem", HEAT,
                     "--generators", str(fixture_path("eq_char_generators.json")),
                     "--invariants", str(fixture_path("invariants_eq_char.txt"))])
        assert code == EXIT_OK
        assert "All invariant" in capsys.readouterr().out

    def test_invariant_solution(self, tmp_path):
        out = tmp_path / "invariants.json"
        solution = fixture_path("invariant_solution_const.txt").read_text(encoding="utf-8").strip()
        code = main(["invariants", "--problem", HEAT_UNIT,
                     "--generators", str(fixture_path("inv_hc_const_generators.json")),
                     "--invariants", str(fixture_path("invariants_inv_hc_const.txt")),
                     "--solution", solution, "--grid-n", "16", "--json-out", str(out)])
        assert code == EXIT_OK
        record = json.loads(out.read_text(encoding="utf-8"))["results"][0]
        assert record["solution"]["symmetry_residual"] == "0"
        assert record["solution"]["equation_residual"] < 1e-6


class TestNumeric:

    def test_heat_kernel_transport(self, tmp_path, capsys):
        path = _generator_file(tmp_path, {"name": "S1", "xi_t": ["1"]}, {"name": "S6", "eta": "Phi"})
        assert main(["numeric", "--problem", HEAT, "--generators", path, "--grid-n", "4"]) == EXIT_OK
        assert "transport" in capsys.readouterr().out

    def test_corrupted_generator(self):
        code = main(["numeric", "--problem", HEAT, "--generators", str(fixture_path("corrupted_s5.json")),
                     "--grid-n", "4"])
        assert code == EXIT_FAILED

    def test_same_seed_same_table(self, tmp_path):
        path = _generator_file(tmp_path, {"name": "S5", "xi_t": ["2*t"], "xi_x": "u(x)"})
        tables = []
        for k in range(2):
            out = tmp_path / f"numeric{k}.json"
            main(["numeric", "--problem", HEAT, "--generators", path, "--grid-n", "4", "--seed", "11",
                  "--json-out", str(out)])
            tables.append(json.loads(out.read_text(encoding="utf-8"))["results"])
        assert tables[0] == tables[1]

    def test_phi_dependent_generator_is_skipped(self, tmp_path, capsys):
        path = _generator_file(tmp_path, {"name": "clock", "xi_t": ["Phi"]})
        assert main(["numeric", "--problem", HEAT, "--generators", path, "--grid-n", "4"]) == EXIT_OK
        assert "skipped" in capsys.readouterr().out

    @pytest.mark.parametrize("n", ["0", "1"])
    def test_grid_too_small(self, n, capsys):
        code = main(["numeric", "--problem", HEAT, "--generators", str(fixture_path("heat_generators.json")),
                     "--grid-n", n])
        assert code == EXIT_INPUT
        assert "ERROR :" in capsys.readouterr().out


class TestBridge:

    def test_counterpart(self, capsys):
        assert main(["bridge", "--problem", HEAT, "--grid-n", "3"]) == EXIT_OK
        printed = capsys.readouterr().out
        assert "kappa" in printed and "Unit normalization" in printed

    def test_general_family(self, tmp_path, capsys):
        out = tmp_path / "bridge.json"
        code = main(["bridge", "--problem", HEAT, "--generators", str(fixture_path("family_I.json")),
                     "--grid-n", "2", "--json-out", str(out)])
        assert code == EXIT_OK
        assert "matches" in capsys.readouterr().out
        assert json.loads(out.read_text(encoding="utf-8"))["limits"][0]["passed"] is True
