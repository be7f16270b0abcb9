"""Network-flow problem and its dual calculus.

The primal problem is min sum_e phi_e(x_e) subject to A x = b on a
directed graph with incidence matrix A and balanced supply b. Its dual is
evaluated edge-separably: given node potentials ``lam``, each edge solves
a scalar problem whose optimizer is x_e = (phi_e')^{-1}(lam_tail - lam_head).
The dual gradient is the flow-conservation residual A x(lam) - b and the
dual Hessian is the weighted Laplacian A diag(1/phi_e'') A^T, split here
into its diagonal D and off-diagonal B with H = D - B.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, NonPositiveCoefficient, UnbalancedSupply
from .graph import DirectedGraph, all_pairs_distances, build_graph, incidence_matrix

QUADRATIC = "quadratic"
COSH = "cosh"

SUPPLY_BALANCE_TOL = 1e-12


@dataclass(frozen=True)
class EdgeCost:
    """Strictly convex scalar edge cost.

    quadratic: phi(x) = x^2 / (2 c),   phi'(x) = x / c,      phi''(x) = 1 / c
    cosh:      phi(x) = c (cosh x - 1), phi'(x) = c sinh x,  phi''(x) = c cosh x

    Both families have phi' invertible on all of R, which the dual
    evaluation requires.
    """

    family: str
    coefficient: float = 1.0

    def __post_init__(self):
        if self.family not in (QUADRATIC, COSH):
            raise ValueError(f"unknown cost family {self.family!r}")
        if not self.coefficient > 0:
            raise NonPositiveCoefficient(
                f"coefficient must be positive, got {self.coefficient}"
            )


class FlowProblem:
    """Validated flow problem: graph, per-edge costs, balanced supply."""

    def __init__(self, graph: DirectedGraph, costs: list[EdgeCost], b: np.ndarray):
        b = np.asarray(b, dtype=float)
        if len(costs) != graph.num_edges:
            raise DimensionMismatch(
                f"{len(costs)} costs for {graph.num_edges} edges"
            )
        if b.shape != (graph.n,):
            raise DimensionMismatch(f"supply shape {b.shape}, expected ({graph.n},)")
        imbalance = abs(float(b.sum()))
        if imbalance > SUPPLY_BALANCE_TOL * max(1.0, float(np.abs(b).sum())):
            raise UnbalancedSupply(f"supply sums to {b.sum():g}, expected 0")
        self.graph = graph
        self.costs = list(costs)
        self.b = b
        # Vectorized views used by every dual evaluation.
        self.tails = np.array([tail - 1 for tail, _ in graph.edges], dtype=int)
        self.heads = np.array([head - 1 for _, head in graph.edges], dtype=int)
        self.coeff = np.array([c.coefficient for c in costs])
        self.quad_mask = np.array([c.family == QUADRATIC for c in costs])
        self.cosh_mask = ~self.quad_mask
        self.A = incidence_matrix(graph)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges

    def phi(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        q, h, c = self.quad_mask, self.cosh_mask, self.coeff
        out[q] = x[q] ** 2 / (2.0 * c[q])
        out[h] = c[h] * (np.cosh(x[h]) - 1.0)
        return out

    def phi_prime_inv(self, y: np.ndarray) -> np.ndarray:
        out = np.empty_like(y)
        q, h, c = self.quad_mask, self.cosh_mask, self.coeff
        out[q] = c[q] * y[q]
        out[h] = np.arcsinh(y[h] / c[h])
        return out

    def phi_double_prime(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        q, h, c = self.quad_mask, self.cosh_mask, self.coeff
        out[q] = 1.0 / c[q]
        out[h] = c[h] * np.cosh(x[h])
        return out


@dataclass(frozen=True)
class DualState:
    """Dual iterate with its recovered primal flow and Hessian splitting.

    ``hess_diag`` is the diagonal D of the dual Hessian as a vector;
    ``hess_offdiag`` is the nonnegative off-diagonal part B as a dense
    matrix, so H = diag(hess_diag) - hess_offdiag.
    """

    lam: np.ndarray
    x: np.ndarray
    g: np.ndarray
    hess_diag: np.ndarray
    hess_offdiag: np.ndarray


def make_problem(
    graph: DirectedGraph, costs: list[EdgeCost], b: np.ndarray
) -> FlowProblem:
    """Validate dimensions, positivity, and supply balance."""
    return FlowProblem(graph, costs, b)


def uniform_costs(graph: DirectedGraph, family: str, coefficient: float = 1.0) -> list[EdgeCost]:
    return [EdgeCost(family, coefficient) for _ in range(graph.num_edges)]


def place_source_sink(graph: DirectedGraph, amount: float) -> np.ndarray:
    """Supply vector with +amount and -amount on a diametral node pair.

    The pair is at undirected distance exactly diam(G); ties break to the
    lexicographically smallest (source, sink) index pair.
    """
    dist = all_pairs_distances(graph)
    diameter = max(max(row) for row in dist)
    for i in range(graph.n):
        for j in range(graph.n):
            if i != j and dist[i][j] == diameter:
                b = np.zeros(graph.n)
                b[i] = float(amount)
                b[j] = -float(amount)
                return b
    raise AssertionError("connected graph must have a diametral pair")


def primal_from_dual(problem: FlowProblem, lam: np.ndarray) -> np.ndarray:
    """Per-edge optimal flow x_e = (phi_e')^{-1}(lam_tail - lam_head)."""
    lam = np.asarray(lam, dtype=float)
    return problem.phi_prime_inv(lam[problem.tails] - lam[problem.heads])


def dual_gradient(problem: FlowProblem, lam: np.ndarray) -> np.ndarray:
    """Gradient of the dual: the conservation residual A x(lam) - b."""
    return problem.A @ primal_from_dual(problem, lam) - problem.b


def dual_hessian_split(
    problem: FlowProblem, lam: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal/off-diagonal split (D, B) of the dual Hessian at ``lam``.

    H = A W A^T with W_ee = 1/phi_e''(x_e(lam)); returns D = diag(H) as a
    vector and B = D - H as a dense matrix with zero diagonal and
    nonnegative entries on graph edges.
    """
    x = primal_from_dual(problem, lam)
    w = 1.0 / problem.phi_double_prime(x)
    n = problem.n
    diag = np.zeros(n)
    np.add.at(diag, problem.tails, w)
    np.add.at(diag, problem.heads, w)
    offdiag = np.zeros((n, n))
    np.add.at(offdiag, (problem.tails, problem.heads), w)
    np.add.at(offdiag, (problem.heads, problem.tails), w)
    return diag, offdiag


def dual_state(problem: FlowProblem, lam: np.ndarray) -> DualState:
    lam = np.asarray(lam, dtype=float)
    x = primal_from_dual(problem, lam)
    g = problem.A @ x - problem.b
    diag, offdiag = dual_hessian_split(problem, lam)
    return DualState(lam=lam, x=x, g=g, hess_diag=diag, hess_offdiag=offdiag)


def dual_value(problem: FlowProblem, lam: np.ndarray) -> float:
    """Dual objective q(lam) = sum_e [-phi_e(x_e) + y_e x_e] - lam . b
    with y = A^T lam and x = x(lam)."""
    lam = np.asarray(lam, dtype=float)
    y = lam[problem.tails] - lam[problem.heads]
    x = problem.phi_prime_inv(y)
    return float(np.sum(-problem.phi(x) + y * x) - lam @ problem.b)


def primal_metrics(problem: FlowProblem, lam: np.ndarray) -> tuple[float, float]:
    """Primal objective f(x(lam)) and feasibility residual ||A x(lam) - b||."""
    x = primal_from_dual(problem, lam)
    objective = float(np.sum(problem.phi(x)))
    feasibility = float(np.linalg.norm(problem.A @ x - problem.b))
    return objective, feasibility


def problem_to_text(problem: FlowProblem) -> str:
    """Serialize: graph header and edges, then 'family c' per edge, then
    one supply value per node. Floats use repr so round-trips are exact."""
    lines = [f"{problem.n} {problem.num_edges}"]
    lines.extend(f"{tail} {head}" for tail, head in problem.graph.edges)
    lines.extend(f"{c.family} {c.coefficient!r}" for c in problem.costs)
    lines.extend(f"{v!r}" for v in problem.b)
    return "\n".join(lines) + "\n"


def problem_from_text(text: str) -> FlowProblem:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, num_edges = (int(tok) for tok in lines[0].split())
    expected = 1 + num_edges + num_edges + n
    if len(lines) != expected:
        raise ValueError(f"expected {expected} lines, got {len(lines)}")
    edges = []
    for ln in lines[1 : 1 + num_edges]:
        tail, head = ln.split()
        edges.append((int(tail), int(head)))
    costs = []
    for ln in lines[1 + num_edges : 1 + 2 * num_edges]:
        family, coeff = ln.split()
        costs.append(EdgeCost(family, float(coeff)))
    b = np.array([float(ln) for ln in lines[1 + 2 * num_edges :]])
    return make_problem(build_graph(n, edges), costs, b)


def write_problem(problem: FlowProblem, path: str | Path) -> None:
    Path(path).write_text(problem_to_text(problem))


def read_problem(path: str | Path) -> FlowProblem:
    return problem_from_text(Path(path).read_text())
