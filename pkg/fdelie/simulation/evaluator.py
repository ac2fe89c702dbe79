# fdelie/simulation/evaluator.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Module : discrete bridge | numeric evaluation of expressions on a grid
#
# Every index left free in an expression is a grid axis (or, for fixed points
# such as x1, the node nearest to its position). Values are numpy arrays of
# shape (m, n, n, ...) where m is the batch of states and each further axis
# belongs to one index. Jets of a solution are computed with 8th-order
# central stencils.

import logging
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef

from ..config import JET_FD_STEP
from ..core.nodes import A, B, PHI, T, Dirac, Field, Functional, Jet, Kernel, Site, Zeta, freshen
from ..core.parser import parse
from ..errors import ScopeError, UnboundParameterError
from .grid import DiscreteState

logger = logging.getLogger(__name__)

ELEMENTARY = {
    sp.exp: np.exp, sp.log: np.log, sp.sin: np.sin, sp.cos: np.cos,
    sp.tanh: np.tanh, sp.sinh: np.sinh, sp.cosh: np.cosh, sp.Abs: np.abs,
}

MAX_HESSIAN_NODES = 32   # off-diagonal second jets over two axes need n^2 stencils


# ==============================================================================
#  BINDINGS
# ==============================================================================

@dataclass
class Bindings:
    """Numeric values for everything an expression leaves symbolic.

    params      name -> float
    functions   index functions, name -> callable(nodes) | array (n,) | float | DSL text in x
    kernels     name -> callable(X, XP) | array (n, n) | DSL text in x, xp
    functionals name -> callable(t, u, grid) returning one value per state
    points      fixed point name -> position (default: midpoint of the grid)
    solution    callable(t, u) -> Phi, needed for jet variables
    """
    params: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    kernels: dict = field(default_factory=dict)
    functionals: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    solution: object = None

    def with_solution(self, solution):
        return Bindings(self.params, self.functions, self.kernels, self.functionals, self.points, solution)

    def with_params(self, **params):
        merged = {**self.params, **params}
        return Bindings(merged, self.functions, self.kernels, self.functionals, self.points, self.solution)

    @classmethod
    def from_mapping(cls, data):
        """Read a `bindings` block: params, functions and kernels (DSL text allowed), points."""
        data = data or {}
        return cls(params={k: float(v) for k, v in data.get("params", {}).items()},
                   functions=dict(data.get("functions", {})),
                   kernels=dict(data.get("kernels", {})),
                   points={k: float(v) for k, v in data.get("points", {}).items()})


# ==============================================================================
#  TENSORS WITH NAMED AXES
# ==============================================================================

@dataclass
class _Tensor:
    data: np.ndarray        # (m or 1, n per axis ...)
    axes: tuple = ()

    def on(self, axes):
        """Data reshaped to broadcast against the axis order `axes`."""
        order = sorted(range(len(self.axes)), key=lambda i: axes.index(self.axes[i]))
        data = np.transpose(self.data, (0, *[i + 1 for i in order]))
        present = {self.axes[i]: data.shape[k + 1] for k, i in enumerate(order)}
        return data.reshape((data.shape[0], *[present.get(ax, 1) for ax in axes]))


def _scalar(value):
    return _Tensor(np.asarray([float(value)]), ())


def _union(tensors):
    axes = []
    for t in tensors:
        for ax in t.axes:
            if ax not in axes:
                axes.append(ax)
    return tuple(axes)


def _combine(tensors, op):
    axes = _union(tensors)
    out = tensors[0].on(axes)
    for t in tensors[1:]:
        out = op(out, t.on(axes))
    return _Tensor(out, axes)


# ==============================================================================
#  JETS OF A SOLUTION
# ==============================================================================

_OFFSETS = np.arange(-4, 5)
_FIRST = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_SECOND = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])


def _stencil(directions, h):
    """[(weight, {direction: shift})] for d/d(directions); a direction is 't' or a node index."""
    if len(directions) == 1:
        return [(w / h, {directions[0]: o * h}) for o, w in zip(_OFFSETS, _FIRST) if w]
    first, second = directions
    if first == second:
        return [(w / h ** 2, {first: o * h}) for o, w in zip(_OFFSETS, _SECOND)]
    return [(wi * wj / h ** 2, {first: oi * h, second: oj * h})
            for oi, wi in zip(_OFFSETS, _FIRST) if wi
            for oj, wj in zip(_OFFSETS, _FIRST) if wj]


class NumericJets:
    """Derivatives of a solution Phi(t, u) by central finite differences.

    u-derivatives follow the grid dictionary delta/delta u(x_i) = (1/dx) d/du_i.
    """

    def __init__(self, solution, grid, step=JET_FD_STEP, budget=2_000_000):
        self.solution = solution
        self.grid = grid
        self.step = step
        self.budget = budget

    def derive(self, state, entries):
        """(m, len(entries)) array of derivatives; each entry is a tuple of directions."""
        n = self.grid.n
        stencils = [_stencil(tuple(e), self.step) for e in entries]
        p = max(len(s) for s in stencils)
        k = len(entries)
        weights = np.zeros((k, p))
        dt = np.zeros((k, p))
        du = np.zeros((k, p, n))
        for i, stencil in enumerate(stencils):
            for j, (w, shift) in enumerate(stencil):
                weights[i, j] = w
                for direction, offset in shift.items():
                    if direction == "t":
                        dt[i, j] += offset
                    else:
                        du[i, j, direction] += offset
        m = state.size
        out = np.empty((m, k))
        chunk = max(1, self.budget // max(1, k * p * n))
        for start in range(0, m, chunk):
            stop = min(m, start + chunk)
            t = state.t[start:stop, None, None] + dt[None]
            u = state.u[start:stop, None, None, :] + du[None]
            values = np.asarray(self.solution(t.reshape(-1), u.reshape(-1, n)), dtype=float)
            out[start:stop] = (values.reshape(stop - start, k, p) * weights[None]).sum(axis=-1)
        return out

    def value(self, jet, state, resolve):
        """Jet variable as a tensor; resolve maps a point to ('axis', symbol) or ('node', i)."""
        n = self.grid.n
        t_dirs = []
        for slot in jet.t_slots:
            if slot != T:
                raise ScopeError(f"numeric jets support the single time t, got {slot}")
            t_dirs.append("t")
        points = [resolve(f.point) for f in jet.u_slots]
        if any(f.order for f in jet.u_slots):
            raise ScopeError(f"jet {jet} differentiates by a field gradient")
        axes = []
        for kind, value in points:
            if kind == "axis" and value not in axes:
                axes.append(value)
        if len(axes) == 2 and n > MAX_HESSIAN_NODES:
            raise ScopeError(f"off-diagonal second jets need n <= {MAX_HESSIAN_NODES}, got {n}")
        combos = list(np.ndindex(*([n] * len(axes)))) if axes else [()]
        entries = []
        for combo in combos:
            where = dict(zip(axes, combo))
            u_dirs = [where[value] if kind == "axis" else value for kind, value in points]
            entries.append(tuple(t_dirs + u_dirs))
        if not entries[0]:
            return _Tensor(np.asarray(self.solution(state.t, state.u), dtype=float), ())
        values = self.derive(state, entries) / self.grid.dx ** len(points)
        return _Tensor(values.reshape((state.size, *([n] * len(axes)))), tuple(axes))


# ==============================================================================
#  EVALUATOR
# ==============================================================================

class Evaluator:
    """Evaluates canonical (or raw) expressions on a grid for a batch of states."""

    def __init__(self, grid, bindings=None, step=JET_FD_STEP):
        self.grid = grid
        self.bindings = bindings or Bindings()
        self.step = step
        self._functions = {}
        self._kernels = {}
        self._prepared = {}

    # --- public -------------------------------------------------------------

    def __call__(self, expr, state, axes=()):
        """Values of expr with the given free indices as trailing axes: (m, n, ...)."""
        self._state = state
        self._axes = set(axes)
        expr = sp.sympify(expr)
        if expr not in self._prepared:
            self._prepared[expr] = freshen(expr)
        result = self._eval(self._prepared[expr])
        shape = (state.size, *([self.grid.n] * len(axes)))
        return np.broadcast_to(result.on(tuple(axes)), shape).copy()

    # --- points ---------------------------------------------------------------

    def _resolve(self, point):
        if point in self._axes:
            return "axis", point
        if isinstance(point, Site):
            raise UnboundParameterError(point.name)
        if not isinstance(point, sp.Symbol):
            raise ScopeError(f"cannot place point {point} on the grid")
        position = self.bindings.points.get(point.name, self.grid.midpoint())
        return "node", self.grid.nearest(position)

    def _pair(self, p, q, matrix):
        (kp, vp), (kq, vq) = self._resolve(p), self._resolve(q)
        if kp == "axis" and kq == "axis":
            if vp == vq:
                return _Tensor(np.diag(matrix)[None], (vp,))
            return _Tensor(matrix[None], (vp, vq))
        if kp == "axis":
            return _Tensor(matrix[None, :, vq], (vp,))
        if kq == "axis":
            return _Tensor(matrix[None, vp, :], (vq,))
        return _scalar(matrix[vp, vq])

    def _along(self, point, values):
        """values (n,) or (m, n) placed at a point."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[None]
        kind, where = self._resolve(point)
        if kind == "axis":
            return _Tensor(values, (where,))
        return _Tensor(values[:, where], ())

    # --- bound numeric data -------------------------------------------------

    def _text_values(self, text, names):
        expr = parse(text) if isinstance(text, str) else sp.sympify(text)
        symbols = [sp.Symbol(n, real=True) for n in names]
        sub = Evaluator(self.grid, self.bindings, self.step)
        state = DiscreteState.of(0.0, np.zeros(self.grid.n))
        return sub(expr, state, symbols)[0]

    def _function_values(self, name):
        if name not in self._functions:
            if name not in self.bindings.functions:
                raise UnboundParameterError(name)
            value = self.bindings.functions[name]
            nodes = self.grid.nodes
            if callable(value):
                out = np.broadcast_to(np.asarray(value(nodes), dtype=float), nodes.shape)
            elif isinstance(value, (str, sp.Basic)):
                out = self._text_values(value, ("x",))
            else:
                out = np.broadcast_to(np.asarray(value, dtype=float), nodes.shape)
            self._functions[name] = np.array(out)
        return self._functions[name]

    def _kernel_matrix(self, kernel):
        name = kernel.name
        if name not in self._kernels:
            if name not in self.bindings.kernels:
                raise UnboundParameterError(name)
            value = self.bindings.kernels[name]
            nodes = self.grid.nodes
            if callable(value):
                out = np.asarray(value(nodes[:, None], nodes[None, :]), dtype=float)
            elif isinstance(value, (str, sp.Basic)):
                out = self._text_values(value, ("x", "xp"))
            else:
                out = np.asarray(value, dtype=float)
            out = np.broadcast_to(out, (self.grid.n, self.grid.n)).copy()
            if kernel.parity == "antisymmetric":
                out = 0.5 * (out - out.T)
            elif kernel.parity == "symmetric":
                out = 0.5 * (out + out.T)
            self._kernels[name] = out
        return self._kernels[name]

    # --- recursion ----------------------------------------------------------

    def _eval(self, e):
        if e.is_Number or isinstance(e, sp.NumberSymbol):
            return _scalar(float(e))
        if isinstance(e, sp.Symbol):
            return self._symbol(e)
        if isinstance(e, sp.Add):
            return _combine([self._eval(a) for a in e.args], np.add)
        if isinstance(e, sp.Mul):
            return _combine([self._eval(a) for a in e.args], np.multiply)
        if isinstance(e, sp.Pow):
            return _combine([self._eval(a) for a in e.args], np.power)
        if isinstance(e, sp.Integral):
            return self._integral(e)
        if isinstance(e, Field):
            u = self._state.u
            for _ in range(e.order):
                u = np.gradient(u, self.grid.dx, axis=1, edge_order=2)
            return self._along(e.point, u)
        if isinstance(e, Dirac):
            return self._pair(*e.points, np.eye(self.grid.n) / self.grid.dx)
        if isinstance(e, Kernel):
            return self._pair(*e.points, self._kernel_matrix(e))
        if isinstance(e, Jet):
            return self._jet(e)
        if isinstance(e, Functional):
            return self._functional(e)
        if isinstance(e, Zeta):
            raise ScopeError("zeta placeholders have no numeric value")
        if isinstance(e, AppliedUndef):
            if len(e.args) != 1:
                raise ScopeError(f"index function {e} must take exactly one index")
            return self._along(e.args[0], self._function_values(e.func.__name__))
        if e.func in ELEMENTARY:
            inner = self._eval(e.args[0])
            return _Tensor(ELEMENTARY[e.func](inner.data), inner.axes)
        raise ScopeError(f"no numeric rule for {e.func.__name__}")

    def _symbol(self, e):
        state = self._state
        if e == PHI:
            return _Tensor(state.phi, ())
        if e == T:
            return _Tensor(state.t, ())
        if e == A:
            return _scalar(self.grid.a)
        if e == B:
            return _scalar(self.grid.b)
        if e in self._axes:
            return _Tensor(self.grid.nodes[None], (e,))
        if e.name in self.bindings.params:
            return _scalar(self.bindings.params[e.name])
        if e.name in self.bindings.points:
            return _scalar(self.bindings.points[e.name])
        raise UnboundParameterError(e.name)

    def _integral(self, e):
        grid = self.grid
        for _, lo, hi in e.limits:
            if float(self._eval(lo).data[0]) != grid.a or float(self._eval(hi).data[0]) != grid.b:
                raise ScopeError(f"integral over ({lo}, {hi}) does not match the grid ({grid.a}, {grid.b})")
        variables = [lim[0] for lim in e.limits]
        saved = set(self._axes)
        self._axes |= set(variables)
        try:
            factors = [self._eval(f) for f in sp.Mul.make_args(e.function)]
        finally:
            self._axes = saved
        return self._contract(factors, variables)

    def _contract(self, factors, variables):
        """Sum a product of tensors over the bound axes (einsum keeps products of sums factored)."""
        grid = self.grid
        m = max(f.data.shape[0] for f in factors)
        axes = _union(factors)
        labels = {ax: chr(ord("b") + k) for k, ax in enumerate(axes)}
        operands, subscripts = [], []
        for f in factors:
            operands.append(np.broadcast_to(f.data, (m, *([grid.n] * len(f.axes)))))
            subscripts.append("a" + "".join(labels[ax] for ax in f.axes))
        kept = tuple(ax for ax in axes if ax not in variables)
        out = "a" + "".join(labels[ax] for ax in kept)
        data = np.einsum(",".join(subscripts) + "->" + out, *operands, optimize=True)
        summed = sum(var in axes for var in variables)
        data = data * grid.dx ** summed * grid.length ** (len(variables) - summed)
        return _Tensor(data, kept)

    def _jet(self, e):
        solution = self.bindings.solution
        if solution is None:
            raise UnboundParameterError(f"solution (needed for {e})")
        jets = NumericJets(solution, self.grid, self.step)
        return jets.value(e, self._state, self._resolve)

    def _functional(self, e):
        if e.slots or e.anchors:
            raise ScopeError(f"derivatives of the functional {e.name} have no numeric binding")
        if e.name not in self.bindings.functionals:
            raise UnboundParameterError(e.name)
        state = self._state
        values = self.bindings.functionals[e.name](state.t, state.u, self.grid)
        return _Tensor(np.broadcast_to(np.asarray(values, dtype=float), (state.size,)).copy(), ())


# ==============================================================================
#  PUBLIC OPERATIONS
# ==============================================================================

class Discretized:
    """An expression made into a function of (u_1..u_n, t, Phi) on a grid."""

    def __init__(self, expr, grid, bindings=None, axes=()):
        self.expr = expr
        self.grid = grid
        self.axes = tuple(axes)
        self.evaluator = Evaluator(grid, bindings)

    def __call__(self, u, t=0.0, phi=0.0):
        single = np.ndim(u) == 1
        out = self.evaluator(self.expr, DiscreteState.of(t, u, phi), self.axes)
        return out[0] if single else out

    def batch(self, state):
        return self.evaluator(self.expr, state, self.axes)


def discretize(expr, grid, bindings=None, axes=()):
    """Evaluable n-variable function of an expression; unbound parameters fail on call."""
    return Discretized(expr, grid, bindings, axes)


def solution_from_expr(expr, grid, bindings=None):
    """Phi(t, u) callable from a closed-form expression in t and [u]."""
    evaluator = Evaluator(grid, bindings)

    def solution(t, u):
        return evaluator(expr, DiscreteState.of(t, u))

    return solution
