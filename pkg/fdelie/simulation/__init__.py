"""Discrete bridge: grids, numeric evaluation, flows, classical counterparts and oracles."""

from .classical import (ClassicalGenerator, ClassicalPde, LimitCheck, classical_counterpart,
                        classical_heat_family, classical_limit_check, classical_limit_study,
                        discretize_generator, discretize_symbolic)
from .evaluator import Bindings, Discretized, Evaluator, NumericJets, discretize, solution_from_expr
from .flow import GeneratorField, flow, flow_steps, integrate
from .grid import DiscreteState, Grid, random_states
from .oracles import (HEAT_EQUATION, IntermediateCheck, TransportResult, equation_residual,
                      flow_group_law, flow_tangent_error, heat_kernel, intermediate_relation_check,
                      invariant_solution_residual, invariant_solution_text, symmetry_transport_test,
                      transported)

__all__ = [
    "ClassicalGenerator", "ClassicalPde", "LimitCheck", "classical_counterpart",
    "classical_heat_family", "classical_limit_check", "classical_limit_study",
    "discretize_generator", "discretize_symbolic",
    "Bindings", "Discretized", "Evaluator", "NumericJets", "discretize", "solution_from_expr",
    "GeneratorField", "flow", "flow_steps", "integrate",
    "DiscreteState", "Grid", "random_states",
    "HEAT_EQUATION", "IntermediateCheck", "TransportResult", "equation_residual",
    "flow_group_law", "flow_tangent_error", "heat_kernel", "intermediate_relation_check",
    "invariant_solution_residual", "invariant_solution_text", "symmetry_transport_test",
    "transported",
]
