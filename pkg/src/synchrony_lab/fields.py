"""Laplacian vector fields: from a difference potential, or additive with odd couplings.

Every field here is a gradient flow ``f = -grad E``; ``energy`` returns ``E``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                        standard_transformations)

from .graph_model import NetworkGraph, parse_graph

__all__ = [
    "FieldError", "NotOdd", "MissingCoupling", "MissingConstant",
    "NonDifferentiableExpression", "OddCoupling", "DifferencePotential",
    "LaplacianMap", "AdditiveLaplacianSystem", "VerificationReport",
    "laplacian_map_from_potential", "verify_laplacian_map", "build_additive_system",
    "potential", "check_condition_30", "finite_difference_jacobian",
    "parse_system", "kuramoto_g6", "g6_tilde",
]

TWO_PI = 2.0 * math.pi


class FieldError(ValueError):
    pass


class NotOdd(FieldError):
    pass


class MissingCoupling(FieldError):
    pass


class MissingConstant(FieldError):
    pass


class NonDifferentiableExpression(FieldError):
    pass


@dataclass(frozen=True)
class OddCoupling:
    """Odd coupling function phi with phi(-t) = -phi(t) by construction.

    ``params`` depends on ``kind``:
      sine             (amplitude,)
      linear           (slope,)
      odd_polynomial   coefficients of t, t^3, t^5, ...
      scaled_sine_sum  pairs (a_m, m) for sum a_m sin(m t)
    """
    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in ("sine", "linear", "odd_polynomial", "scaled_sine_sum"):
            raise FieldError(f"unknown coupling kind {self.kind!r}")
        if self.kind == "scaled_sine_sum" and any(m == 0 for _, m in self.params):
            raise FieldError("scaled_sine_sum frequencies must be nonzero")

    @classmethod
    def sine(cls, amplitude: float = 1.0) -> "OddCoupling":
        return cls("sine", (float(amplitude),))

    @classmethod
    def linear(cls, slope: float = 1.0) -> "OddCoupling":
        return cls("linear", (float(slope),))

    @classmethod
    def odd_polynomial(cls, coefficients: Sequence[float]) -> "OddCoupling":
        return cls("odd_polynomial", tuple(float(c) for c in coefficients))

    @classmethod
    def polynomial(cls, powers: Mapping[int, float]) -> "OddCoupling":
        """Polynomial from ``{power: coefficient}``; any even power is rejected."""
        even = {p: c for p, c in powers.items() if int(p) % 2 == 0 and c != 0}
        if even:
            raise NotOdd(f"even powers {sorted(even)} make the coupling non-odd")
        top = max((int(p) for p in powers), default=1)
        coeffs = [0.0] * ((top + 1) // 2)
        for p, c in powers.items():
            coeffs[(int(p) - 1) // 2] = float(c)
        return cls.odd_polynomial(coeffs)

    @classmethod
    def scaled_sine_sum(cls, terms: Sequence[tuple[float, float]]) -> "OddCoupling":
        return cls("scaled_sine_sum", tuple((float(a), float(m)) for a, m in terms))

    @classmethod
    def from_document(cls, doc: Mapping) -> "OddCoupling":
        kind = doc.get("kind")
        try:
            if kind == "sine":
                return cls.sine(doc.get("amplitude", 1.0))
            if kind == "linear":
                return cls.linear(doc.get("slope", 1.0))
            if kind == "odd_polynomial":
                return cls.odd_polynomial(doc["coefficients"])
            if kind == "polynomial":
                return cls.polynomial({int(p): c for p, c in doc["powers"].items()})
            if kind == "scaled_sine_sum":
                return cls.scaled_sine_sum([tuple(t) for t in doc["terms"]])
        except (KeyError, TypeError) as exc:
            raise FieldError(f"bad coupling document {doc!r}") from exc
        raise FieldError(f"unknown coupling kind {kind!r}")

    def to_document(self) -> dict:
        if self.kind == "sine":
            return {"kind": "sine", "amplitude": self.params[0]}
        if self.kind == "linear":
            return {"kind": "linear", "slope": self.params[0]}
        if self.kind == "odd_polynomial":
            return {"kind": "odd_polynomial", "coefficients": list(self.params)}
        return {"kind": "scaled_sine_sum", "terms": [list(t) for t in self.params]}

    @property
    def periodic(self) -> bool:
        """2*pi-periodic (a zero coupling counts as periodic)."""
        if self.kind == "sine":
            return True
        if self.kind == "scaled_sine_sum":
            return all(float(m).is_integer() for _, m in self.params)
        return all(c == 0 for c in self.params)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "sine":
            return self.params[0] * np.sin(t)
        if self.kind == "linear":
            return self.params[0] * t
        if self.kind == "odd_polynomial":
            return sum(c * t ** (2 * k + 1) for k, c in enumerate(self.params)) + 0.0 * t
        return sum(a * np.sin(m * t) for a, m in self.params) + 0.0 * t

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "sine":
            return self.params[0] * np.cos(t)
        if self.kind == "linear":
            return self.params[0] + 0.0 * t
        if self.kind == "odd_polynomial":
            return sum((2 * k + 1) * c * t ** (2 * k) for k, c in enumerate(self.params)) + 0.0 * t
        return sum(a * m * np.cos(m * t) for a, m in self.params) + 0.0 * t

    def antiderivative(self, t):
        """Even primitive psi with psi(0) = 0 and psi' = phi."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sine":
            return self.params[0] * (1.0 - np.cos(t))
        if self.kind == "linear":
            return 0.5 * self.params[0] * t * t
        if self.kind == "odd_polynomial":
            return sum(c * t ** (2 * k + 2) / (2 * k + 2) for k, c in enumerate(self.params)) + 0.0 * t
        return sum((a / m) * (1.0 - np.cos(m * t)) for a, m in self.params) + 0.0 * t


# --------------------------------------------------------------------------
# Laplacian maps from a potential in difference coordinates

@dataclass(frozen=True)
class DifferencePotential:
    n: int
    expression: str
    k: float = 0.0


_ALLOWED_FUNCS = (sp.sin, sp.cos)


def _parse_expression(text: str, n: int) -> tuple[sp.Expr, list[sp.Symbol]]:
    symbols = [sp.Symbol(f"t{i}") for i in range(1, n)]
    local = {s.name: s for s in symbols}
    local.update(sin=sp.sin, cos=sp.cos)
    glob = {"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational,
            "Symbol": sp.Symbol, "__builtins__": {}}
    try:
        expr = parse_expr(text, local_dict=local, global_dict=glob,
                          transformations=standard_transformations + (convert_xor,))
    except Exception as exc:  # sympy raises a zoo of types on bad input
        raise NonDifferentiableExpression(f"cannot parse {text!r}: {exc}") from exc
    expr = sp.sympify(expr)
    extra = expr.free_symbols - set(symbols)
    if extra:
        raise NonDifferentiableExpression(f"unknown identifiers {sorted(map(str, extra))}")
    bad = [f for f in expr.atoms(sp.Function) if not isinstance(f, _ALLOWED_FUNCS)]
    if bad:
        raise NonDifferentiableExpression(f"unsupported functions {bad}")
    return expr, symbols


class LaplacianMap:
    """f_i = dg/dt_i(x_1 - x_n, ..., x_{n-1} - x_n), f_n = k - sum_{i<n} f_i."""

    def __init__(self, pot: DifferencePotential):
        n = pot.n
        if n < 2:
            raise FieldError("a Laplacian map needs n >= 2")
        expr, syms = _parse_expression(pot.expression, n)
        grad = [sp.diff(expr, s) for s in syms]
        hess = [[sp.diff(gi, s) for s in syms] for gi in grad]
        self.n = n
        self.k = float(pot.k)
        self.definition = pot
        self._g = sp.lambdify(syms, expr, "numpy")
        self._grad = [sp.lambdify(syms, gi, "numpy") for gi in grad]
        self._hess = [[sp.lambdify(syms, h, "numpy") for h in row] for row in hess]

    def _diffs(self, x):
        x = np.asarray(x, dtype=float)
        t = x[..., :-1] - x[..., -1:]
        return x, [t[..., i] for i in range(self.n - 1)]

    def __call__(self, x):
        x, t = self._diffs(x)
        shape = x.shape[:-1]
        head = [np.broadcast_to(np.asarray(gi(*t), dtype=float), shape) for gi in self._grad]
        out = np.zeros(x.shape)
        for i, v in enumerate(head):
            out[..., i] = v
        out[..., -1] = self.k - out[..., :-1].sum(axis=-1)
        return out

    def jacobian(self, x):
        x, t = self._diffs(x)
        shape = x.shape[:-1]
        m = self.n - 1
        h = np.zeros(shape + (m, m))
        for i in range(m):
            for j in range(m):
                h[..., i, j] = np.broadcast_to(np.asarray(self._hess[i][j](*t), dtype=float), shape)
        jac = np.zeros(shape + (self.n, self.n))
        jac[..., :m, :m] = h
        jac[..., :m, m] = -h.sum(axis=-1)
        jac[..., m, :m] = -h.sum(axis=-2)
        jac[..., m, m] = h.sum(axis=(-1, -2))
        return jac

    def energy(self, x):
        """E = -(g(differences) + k x_n), so that f = -grad E."""
        x, t = self._diffs(x)
        g = np.broadcast_to(np.asarray(self._g(*t), dtype=float), x.shape[:-1])
        return -(g + self.k * x[..., -1])


def laplacian_map_from_potential(p: DifferencePotential) -> LaplacianMap:
    return LaplacianMap(p)


# --------------------------------------------------------------------------
# verification

def finite_difference_jacobian(f: Callable, x, h: float | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-5 * (1.0 + np.abs(x).max())
    n = x.size
    jac = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        jac[:, j] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h)
    return jac


@dataclass
class VerificationReport:
    symmetry_defect: list[float]
    row_sum_defect: list[float]
    fd_disagreement: list[float] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_laplacian_map(f: Callable, sample_points, jacobian: Callable | None = None,
                         tol: float = 1e-6, fd_rel_tol: float = 1e-4) -> VerificationReport:
    """Check the Laplacian property of ``f`` at each sample point.

    Defects use the analytic Jacobian when given, otherwise central finite
    differences; with an analytic Jacobian the finite-difference agreement
    (relative to ``1 + max|J|``) is reported too.
    """
    rep = VerificationReport([], [])
    for x in sample_points:
        x = np.asarray(x, dtype=float)
        fd = finite_difference_jacobian(f, x)
        jac = np.asarray(jacobian(x)) if jacobian is not None else fd
        rep.symmetry_defect.append(float(np.abs(jac - jac.T).max()))
        rep.row_sum_defect.append(float(np.abs(jac.sum(axis=1)).max()))
        if jacobian is not None:
            rep.fd_disagreement.append(float(np.abs(fd - jac).max() / (1.0 + np.abs(jac).max())))
    if max(rep.symmetry_defect, default=0.0) > tol:
        rep.failures.append("NotSymmetric")
    if max(rep.row_sum_defect, default=0.0) > tol:
        rep.failures.append("RowSumNonzero")
    if max(rep.fd_disagreement, default=0.0) > fd_rel_tol:
        rep.failures.append("FiniteDifferenceMismatch")
    return rep


# --------------------------------------------------------------------------
# additive systems

class AdditiveLaplacianSystem:
    """f_c(x) = k_[c] + sum over inputs d of phi_[cd](x_d - x_c) on a bidirected graph."""

    def __init__(self, graph: NetworkGraph, coupling: Mapping[str, OddCoupling],
                 constant: Mapping[str, float]):
        if not graph.bidirected:
            raise FieldError("additive Laplacian systems need a bidirected graph")
        for cls in graph.edge_classes:
            if cls not in coupling:
                raise MissingCoupling(f"no coupling for edge class {cls!r}")
        for cls in graph.cell_classes:
            if cls not in constant:
                raise MissingConstant(f"no constant for cell class {cls!r}")
        self.graph = graph
        self.coupling = {cls: coupling[cls] for cls in graph.edge_classes}
        self.constant = {cls: float(constant[cls]) for cls in graph.cell_classes}
        n, m = graph.n_cells, len(graph.edges)
        self.n = n
        self._u = np.array([u for u, _, _ in graph.edges], dtype=np.intp)
        self._v = np.array([v for _, v, _ in graph.edges], dtype=np.intp)
        self._cls = [cls for _, _, cls in graph.edges]
        self._incidence = np.zeros((m, n))
        self._incidence[np.arange(m), self._u] = 1.0
        self._incidence[np.arange(m), self._v] = -1.0
        self._k = np.array([self.constant[c] for c in graph.cell_class])
        self._masks = {cls: np.array([c == cls for c in self._cls]) for cls in self.coupling}

    @property
    def constants_vector(self) -> np.ndarray:
        return self._k.copy()

    @property
    def torus_reducible(self) -> bool:
        return all(c.periodic for c in self.coupling.values())

    def _per_edge(self, diffs, method: str):
        out = np.zeros_like(diffs)
        for cls, mask in self._masks.items():
            if mask.any():
                out[..., mask] = getattr(self.coupling[cls], method)(diffs[..., mask])
        return out

    def _diffs(self, x):
        x = np.asarray(x, dtype=float)
        return x, x[..., self._v] - x[..., self._u]

    def __call__(self, x):
        x, d = self._diffs(x)
        return self._k + self._per_edge(d, "__call__") @ self._incidence

    evaluate = __call__

    def jacobian(self, x):
        x, d = self._diffs(x)
        w = self._per_edge(d, "derivative")
        jac = np.zeros(x.shape[:-1] + (self.n, self.n))
        jac[..., self._u, self._v] = w
        jac[..., self._v, self._u] = w
        idx = np.arange(self.n)
        jac[..., idx, idx] = -jac.sum(axis=-1)
        return jac

    def energy(self, x):
        """sum_edges psi(x_v - x_u) - sum_c k_c x_c; f = -grad of this."""
        x, d = self._diffs(x)
        return self._per_edge(d, "antiderivative").sum(axis=-1) - x @ self._k

    def to_document(self) -> dict:
        return {
            "graph": self.graph.to_document(),
            "couplings": {cls: c.to_document() for cls, c in self.coupling.items()},
            "constants": dict(self.constant),
        }


def build_additive_system(graph: NetworkGraph, couplings: Mapping[str, OddCoupling],
                          constants: Mapping[str, float] | None = None) -> AdditiveLaplacianSystem:
    if constants is None:
        constants = {cls: 0.0 for cls in graph.cell_classes}
    return AdditiveLaplacianSystem(graph, couplings, constants)


def potential(sys: AdditiveLaplacianSystem | LaplacianMap) -> Callable:
    """Scalar energy E with f = -grad E (decreasing along trajectories)."""
    return sys.energy


def parse_system(document: Mapping) -> AdditiveLaplacianSystem:
    try:
        graph = parse_graph(document["graph"])
        couplings = {cls: OddCoupling.from_document(d) for cls, d in document["couplings"].items()}
    except KeyError as exc:
        raise FieldError(f"system document missing {exc}") from exc
    return build_additive_system(graph, couplings, document.get("constants"))


def check_condition_30(sys: AdditiveLaplacianSystem, epsilon: float, n_samples: int = 1000,
                       seed: int = 0) -> bool:
    """Sampled check that t * phi(t) > 0 on (-eps, eps) minus 0 for every coupling.

    ``phi'(0) > 0`` is only sufficient for *some* epsilon, so the sample decides.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    rng = np.random.default_rng(seed)
    t = rng.uniform(-epsilon, epsilon, size=n_samples)
    t = t[t != 0.0]
    return all(bool((t * c(t) > 0).all()) for c in sys.coupling.values())


def slope_at_zero_positive(sys: AdditiveLaplacianSystem) -> bool:
    return all(float(c.derivative(0.0)) > 0 for c in sys.coupling.values())


def kuramoto_g6() -> AdditiveLaplacianSystem:
    from .graph_model import make_Gn
    return build_additive_system(make_Gn(6), {"a": OddCoupling.sine(1.0)})


def g6_tilde() -> AdditiveLaplacianSystem:
    from .graph_model import make_named_graph
    return build_additive_system(make_named_graph("fig5"),
                                 {"sin": OddCoupling.sine(1.0), "id": OddCoupling.linear(1.0)})
