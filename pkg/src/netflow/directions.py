"""Descent-direction engines for the dual problem.

Four interchangeable directions:

- gradient: d = -g.
- truncated-series Newton of order N ("add-N"): the Hessian pseudo-inverse
  is expanded through the splitting H = D - B as the series
  sum_i (D^-1 B)^i D^-1 and truncated after N+1 terms. Computed by the
  fixed-point recursion d <- D^-1 B d - D^-1 g iterated N+1 times from
  d = 0, one sparse matrix-vector product per step, so entry i of the
  result only ever sees data from nodes at most N hops from i.
- consensus Newton: the same recursion run m times (bare splitting), or
  the identity-shifted variant d <- (D+I)^-1 (B+I) d - (D+I)^-1 g.
- exact Newton: d = -H^+ g via a rank-one-regularized dense solve,
  centralized and used as the reference oracle.

The diagnostics here (residual norms, spectral radius, positive
definiteness of the truncated series) use dense spectra and are meant for
verification, not for the per-node message-passing loop.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, SingularBeyondNullspace

BARE = "bare"
SHIFTED = "shifted"


@dataclass(frozen=True)
class Gradient:
    label = "gradient"


@dataclass(frozen=True)
class AddN:
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")

    @property
    def label(self) -> str:
        return f"add-{self.order}"


@dataclass(frozen=True)
class ConsensusNewton:
    rounds: int
    splitting: str = BARE

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.splitting not in (BARE, SHIFTED):
            raise ValueError(f"unknown splitting {self.splitting!r}")

    @property
    def label(self) -> str:
        return f"consensus-{self.rounds}"


@dataclass(frozen=True)
class ExactNewton:
    label = "newton"


DirectionMethod = Union[Gradient, AddN, ConsensusNewton, ExactNewton]


@dataclass(frozen=True)
class NewtonDiagnostics:
    """Residual and contraction diagnostics for an approximate direction.

    eps_norm is ||H d + g||. realized_rho is the second-largest eigenvalue
    modulus of D^-1 B (the contraction factor of the series on the
    mean-zero subspace). contraction_bound is the degree/diameter upper
    bound 1 - 1/(n * max_degree * (diameter + 1) * b_max) with b_max the
    largest off-diagonal Hessian magnitude.
    """

    eps_norm: float
    contraction_bound: float
    realized_rho: float


def _check_dims(diag: np.ndarray, offdiag: np.ndarray, g: np.ndarray) -> None:
    n = g.shape[0]
    if diag.shape != (n,) or offdiag.shape != (n, n):
        raise DimensionMismatch(
            f"diag {diag.shape}, offdiag {offdiag.shape}, gradient ({n},)"
        )


def gradient_direction(g: np.ndarray) -> np.ndarray:
    return -np.asarray(g, dtype=float)


def _splitting_recursion(
    diag: np.ndarray, offdiag: np.ndarray, g: np.ndarray, steps: int
) -> np.ndarray:
    d = np.zeros_like(g)
    dinv_g = g / diag
    for _ in range(steps):
        d = (offdiag @ d) / diag - dinv_g
    return d


def add_direction(
    order: int, diag: np.ndarray, offdiag: np.ndarray, g: np.ndarray
) -> np.ndarray:
    """Truncated-series Newton direction of the given order.

    Equals -sum_{i=0}^{order} (D^-1 B)^i D^-1 g, evaluated by the
    recursion rather than explicit matrix powers.
    """
    _check_dims(diag, offdiag, g)
    return _splitting_recursion(diag, offdiag, g, order + 1)


def consensus_newton_direction(
    rounds: int,
    diag: np.ndarray,
    offdiag: np.ndarray,
    g: np.ndarray,
    splitting: str = BARE,
) -> np.ndarray:
    """Run the consensus fixed-point dynamic for ``rounds`` iterations from 0.

    With the bare splitting this is arithmetic-identical to
    add_direction(rounds - 1, ...). The shifted variant uses
    (D+I, B+I), whose iteration matrix avoids the -1 eigenvalue even on
    bipartite supports.
    """
    _check_dims(diag, offdiag, g)
    if splitting == BARE:
        return _splitting_recursion(diag, offdiag, g, rounds)
    d = np.zeros_like(g)
    shifted_diag = diag + 1.0
    for _ in range(rounds):
        d = (offdiag @ d + d - g) / shifted_diag
    return d


def exact_newton_direction(
    diag: np.ndarray, offdiag: np.ndarray, g: np.ndarray
) -> np.ndarray:
    """Exact Newton step d = -H^+ g for the Laplacian H = D - B.

    Solves the rank-one regularized system (H + (1/n) 1 1^T) d = -g and
    re-projects onto the mean-zero subspace, which is exact because g has
    zero mean. Raises SingularBeyondNullspace when H has rank below n-1.
    """
    _check_dims(diag, offdiag, g)
    n = g.shape[0]
    if not _support_connected(offdiag):
        raise SingularBeyondNullspace(
            "Hessian support is disconnected (rank < n-1)"
        )
    if not np.any(g):
        return np.zeros_like(g)
    H = np.diag(diag) - offdiag
    try:
        d = np.linalg.solve(H + np.full((n, n), 1.0 / n), -g)
    except np.linalg.LinAlgError as exc:
        raise SingularBeyondNullspace(str(exc)) from exc
    d -= d.mean()
    residual = np.linalg.norm(H @ d + g)
    # Roundoff floor: a rank-deficient H leaves a residual on the order of
    # ||g|| itself, far above this.
    floor = 100.0 * np.finfo(float).eps * np.linalg.norm(H) * max(np.linalg.norm(d), 1.0)
    if residual > 1e-9 * np.linalg.norm(g) + floor:
        raise SingularBeyondNullspace(
            f"Newton residual {residual:g} exceeds tolerance; Hessian rank < n-1"
        )
    return d


def _support_connected(offdiag: np.ndarray) -> bool:
    n = offdiag.shape[0]
    nbrs = [np.nonzero(offdiag[i] > 0)[0] for i in range(n)]
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == n


def _support_degree_diameter(offdiag: np.ndarray) -> tuple[int, int]:
    # Degree and diameter of the sparsity support of B, by BFS. Returns
    # diameter n (vacuous bound) if the support is disconnected.
    n = offdiag.shape[0]
    nbrs = [np.nonzero(offdiag[i] > 0)[0] for i in range(n)]
    max_degree = max(len(a) for a in nbrs)
    diameter = 0
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        worst = max(dist)
        if min(dist) < 0:
            return max_degree, n
        diameter = max(diameter, worst)
    return max_degree, diameter


def realized_contraction(diag: np.ndarray, offdiag: np.ndarray) -> float:
    """Second-largest eigenvalue modulus of D^-1 B.

    Computed from the symmetric similar matrix D^-1/2 B D^-1/2; dense,
    diagnostics only.
    """
    scale = 1.0 / np.sqrt(diag)
    sym = scale[:, None] * offdiag * scale[None, :]
    eigvals = np.linalg.eigvalsh(sym)
    moduli = np.sort(np.abs(eigvals))[::-1]
    return float(moduli[1]) if moduli.size > 1 else 0.0


def newton_error(
    diag: np.ndarray, offdiag: np.ndarray, d: np.ndarray, g: np.ndarray
) -> NewtonDiagnostics:
    """Residual ||H d + g|| plus spectral diagnostics of the splitting."""
    _check_dims(diag, offdiag, g)
    if d.shape != g.shape:
        raise DimensionMismatch(f"direction {d.shape}, gradient {g.shape}")
    eps_norm = float(np.linalg.norm(diag * d - offdiag @ d + g))
    n = g.shape[0]
    max_degree, diameter = _support_degree_diameter(offdiag)
    b_max = float(offdiag.max())
    bound = 1.0 - 1.0 / (n * max_degree * (diameter + 1) * b_max)
    return NewtonDiagnostics(
        eps_norm=eps_norm,
        contraction_bound=bound,
        realized_rho=realized_contraction(diag, offdiag),
    )


def mean_zero_basis(n: int) -> np.ndarray:
    """Orthonormal n x (n-1) basis of the subspace orthogonal to all-ones."""
    q, _ = np.linalg.qr(np.ones((n, 1)), mode="complete")
    return q[:, 1:]


def series_operator(order: int, diag: np.ndarray, offdiag: np.ndarray) -> np.ndarray:
    """Dense truncated-series approximation to the Hessian pseudo-inverse.

    sum_{i=0}^{order} D^-1/2 (D^-1/2 B D^-1/2)^i D^-1/2, built by explicit
    matrix powers. Verification oracle; never used in the iteration loop.
    """
    n = diag.shape[0]
    scale = 1.0 / np.sqrt(diag)
    sym = scale[:, None] * offdiag * scale[None, :]
    total = np.eye(n)
    term = np.eye(n)
    for _ in range(order):
        term = term @ sym
        total = total + term
    return scale[:, None] * total * scale[None, :]


def projected_spd_check(diag: np.ndarray, offdiag: np.ndarray, order: int) -> float:
    """Minimum eigenvalue of the truncated-series operator restricted to
    the mean-zero subspace; positive on connected non-bipartite supports."""
    approx = series_operator(order, diag, offdiag)
    basis = mean_zero_basis(diag.shape[0])
    projected = basis.T @ approx @ basis
    projected = (projected + projected.T) / 2.0
    return float(np.linalg.eigvalsh(projected)[0])
