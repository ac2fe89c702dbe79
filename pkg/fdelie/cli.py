# fdelie/cli.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : command line | determine, verify, invariants, numeric, bridge
#
# Exit codes: 0 success, 1 verification failure, 2 input error.

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import sympy as sp

from .characteristics import characteristic_system, load_invariants, verify_invariant_solution
from .config import RANDOM_SEED, REPORT_DIR, REPORT_SCHEMA
from .core.printer import to_dsl
from .errors import FdeLieError, InvalidFixtureError, ScopeError
from .simulation import (Bindings, Grid, classical_counterpart, classical_limit_check, flow_group_law,
                         heat_kernel, symmetry_transport_test)
from .symmetry import collapse, determining_system, load_generators, load_problem, verify_candidate

logger = logging.getLogger(__name__)

# ==============================================================================
#  CONFIGURATION
# ==============================================================================

EXIT_OK        = 0
EXIT_FAILED    = 1
EXIT_INPUT     = 2
DEFAULT_GRID_N = 8
DEFAULT_EPS    = 0.3
TRANSPORT_TOLERANCE = 1e-8
GROUP_LAW_EPS  = (0.2, 0.3)


# ==============================================================================
#  REPORT HELPERS
# ==============================================================================

def _title(text):
    print("=" * 65)
    print(f"  {text}")
    print("=" * 65)


def _row(label, value, width=28):
    print(f"  {label:<{width}}: {value}")


def _write_json(path, payload):
    if not path:
        return
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"schema": REPORT_SCHEMA, **payload}, fh, indent=2, sort_keys=True)
    print(f"\n  Report saved → '{path}'")


def _bindings_of(path):
    """The optional `bindings` block of a generator file."""
    if not path:
        return Bindings()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return Bindings.from_mapping(data.get("bindings"))


def _grid_for(problem, n):
    lo, hi = problem.domain.lo, problem.domain.hi
    if lo.is_number and hi.is_number:
        return Grid(float(lo), float(hi), n)
    return Grid.unit(n)


def _require(args, *names):
    for name in names:
        if not getattr(args, name):
            raise InvalidFixtureError("<command line>", f"--{name.replace('_', '-')} is required")


# ==============================================================================
#  COMMANDS
# ==============================================================================

def cmd_determine(args):
    _require(args, "problem")
    problem = load_problem(args.problem)
    if args.mode == "classical":
        problem = collapse(problem, args.grid_n)
    system = determining_system(problem, reduce=not args.raw)

    _title(f"DETERMINING EQUATIONS | {problem.name} ({args.mode})")
    _row("Equation", to_dsl(problem.equation))
    _row("Determining equations", len(system))
    _row("Implied classes", len(system.consequences))
    print("─" * 65)
    for k, eq in enumerate(system, start=1):
        print(f"  E{k:<3} [{eq.tag}] {to_dsl(eq.monomial)}")
        print(f"        {to_dsl(eq.expr)} = 0")
    print("=" * 65)

    _write_json(args.json_out, {"command": "determine", "problem": problem.name, "mode": args.mode,
                                "equations": system.to_records(),
                                "consequences": [eq.to_mapping() for eq in system.consequences]})
    return EXIT_OK


def cmd_verify(args):
    _require(args, "problem", "generators")
    if args.mode == "classical":
        raise ScopeError("verify runs on the continuum problem; use 'bridge' for classical counterparts")
    problem = load_problem(args.problem)
    generators, problem = load_generators(args.generators, problem)
    reports = [verify_candidate(g, problem) for g in generators]

    _title(f"SYMMETRY VERIFICATION | {problem.name}")
    for report in reports:
        status = "symmetry" if report.residual_zero else "NOT a symmetry"
        _row(report.candidate or "?", status)
        for monomial in report.failed_monomials:
            print(f"    └─ fails on {monomial}")
    print("─" * 65)
    passed = sum(r.residual_zero for r in reports)
    _row("Passed", f"{passed} / {len(reports)}")
    print("=" * 65)

    _write_json(args.json_out, {"command": "verify", "problem": problem.name,
                                "results": [r.to_mapping() for r in reports]})
    return EXIT_OK if passed == len(reports) else EXIT_FAILED


def cmd_invariants(args):
    _require(args, "problem", "generators", "invariants")
    problem = load_problem(args.problem)
    generators, problem = load_generators(args.generators, problem)
    invariants = load_invariants(args.invariants, problem)
    ok = True
    results = []

    _title(f"INVARIANTS | {Path(args.invariants).name}")
    for g in generators:
        system = characteristic_system(g, problem.times)
        _row(g.name or "generator", str(system))
        checked = invariants.verify(g, problem.domain, problem.times)
        for member, residual in checked:
            good = residual == 0
            ok &= good
            print(f"    ├─ {member.role:<9} {member.name:<14}: {'invariant' if good else 'residual ' + to_dsl(residual)}")
        record = {"generator": g.name, "characteristics": system.to_mapping(),
                  "invariants": invariants.to_records(checked)}

        if args.solution:
            phi = problem.parse(args.solution)
            sym, handle = verify_invariant_solution(phi, g, problem)
            residual = handle.evaluate(_grid_for(problem, args.grid_n), _bindings_of(args.generators),
                                       seed=args.seed)
            ok &= sym == 0
            print("─" * 65)
            _row("  X[Phi - solution]", "0" if sym == 0 else to_dsl(sym))
            _row("  equation residual", f"{residual:.3e} (n = {args.grid_n})")
            record["solution"] = {"solution": to_dsl(phi), "symmetry_residual": to_dsl(sym),
                                  "equation_residual": residual, "n": args.grid_n, "seed": args.seed}
        results.append(record)
        print("─" * 65)
    _row("All invariant", "yes" if ok else "no")
    print("=" * 65)

    _write_json(args.json_out, {"command": "invariants", "problem": problem.name, "results": results})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_numeric(args):
    _require(args, "problem", "generators")
    problem = load_problem(args.problem)
    generators, problem = load_generators(args.generators, problem)
    bindings = _bindings_of(args.generators)
    grid = Grid.unit(args.grid_n)
    solution = heat_kernel(grid)
    rows = []
    ok = True

    _title(f"NUMERIC ORACLES | {problem.name} | n = {grid.n} | seed = {args.seed}")
    for g in generators:
        try:
            result = symmetry_transport_test(problem, g, grid, args.eps, solution, bindings, seed=args.seed)
        except ScopeError as exc:
            _row(g.name, f"skipped ({exc})")
            rows.append({"generator": g.name, "skipped": str(exc)})
            continue
        law = flow_group_law(g, grid, *GROUP_LAW_EPS, bindings, seed=args.seed)
        good = result.max_residual < TRANSPORT_TOLERANCE
        ok &= good
        _row(g.name, f"transport {result.max_residual:.3e}  group law {law:.1e}  "
                     f"{'ok' if good else 'FAILED'}")
        rows.append({**result.to_mapping(), "group_law_error": law, "passed": good})
    print("=" * 65)

    payload = {"command": "numeric", "problem": problem.name, "seed": args.seed, "n": grid.n,
               "eps": args.eps, "results": rows}
    if args.sweep:
        from .simulation.residual_study import print_residual_report, run_residual_study, save_residual_study
        study = run_residual_study(seed=args.seed)
        print()
        print_residual_report(study)
        paths = save_residual_study(study, args.out_dir)
        for path in paths:
            print(f"  Saved → '{path}'")
        payload["residual_study"] = study.to_mapping()

    _write_json(args.json_out, payload)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_bridge(args):
    _require(args, "problem")
    problem = load_problem(args.problem)
    grid = Grid.unit(args.grid_n) if args.unit else _grid_for(problem, args.grid_n)
    pde = classical_counterpart(problem, grid)
    ok = True

    _title(f"CLASSICAL COUNTERPART | {problem.name} | n = {pde.n}")
    _row("dx", f"{pde.dx:g}")
    _row("kappa = 1/dx", f"{pde.kappa:g}")
    _row("Grid normalization", pde.text())
    _row("Unit normalization", pde.unit_text())
    record = {"command": "bridge", "problem": problem.name, "counterpart": pde.to_mapping(), "limits": []}

    if args.generators:
        generators, _ = load_generators(args.generators, problem)
        print("─" * 65)
        for g in generators:
            check = classical_limit_check(g, args.grid_n, seed=args.seed)
            ok &= check.passed
            verdict = "matches" if check.passed else f"differs on {', '.join(check.mismatched)}"
            _row(f"{g.name} ({check.mode})", f"{verdict}  (max error {check.max_error:.1e})")
            record["limits"].append({"generator": g.name, **check.to_mapping()})
    print("=" * 65)

    _write_json(args.json_out, record)
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "determine": cmd_determine,
    "verify": cmd_verify,
    "invariants": cmd_invariants,
    "numeric": cmd_numeric,
    "bridge": cmd_bridge,
}


# ==============================================================================
#  ENTRY POINT
# ==============================================================================

def build_parser():
    parser = argparse.ArgumentParser(prog="fdelie",
                                     description="Lie point symmetries of functional differential equations")
    parser.add_argument("--verbose", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("determine", "derive the determining equations of a problem"),
                            ("verify", "check candidate generators against a problem"),
                            ("invariants", "verify invariants (and an invariant solution) of generators"),
                            ("numeric", "heat-kernel transport, flow checks and residual sweeps"),
                            ("bridge", "classical counterpart on n variables and classical-limit checks")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--problem", help="JSON problem file")
        p.add_argument("--generators", help="JSON generator file")
        p.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N, help="grid size / number of sites")
        p.add_argument("--seed", type=int, default=RANDOM_SEED)
        p.add_argument("--json-out", help="write a JSON report here")
        p.add_argument("--mode", choices=("continuum", "classical"), default="continuum")
        p.add_argument("--out-dir", default=REPORT_DIR, help="folder for tables and charts")
        p.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)

    sub.choices["determine"].add_argument("--raw", action="store_true",
                                          help="keep every coefficient class (no reduction)")
    sub.choices["invariants"].add_argument("--invariants", help="invariant file (role: expression lines)")
    sub.choices["invariants"].add_argument("--solution", help="closed-form invariant solution to check")
    sub.choices["numeric"].add_argument("--eps", type=float, default=DEFAULT_EPS)
    sub.choices["numeric"].add_argument("--sweep", action="store_true",
                                        help="also run the invariant-solution residual study")
    sub.choices["bridge"].add_argument("--unit", action="store_true", help="use a unit-spacing grid")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "grid_n", 2) < 2 and args.command != "determine":
        print(f"  ERROR : --grid-n must be at least 2, got {args.grid_n}")
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (FdeLieError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"  ERROR : {exc}")
        return EXIT_INPUT
    except sp.SympifyError as exc:
        print(f"  ERROR : cannot read expression ({exc})")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
