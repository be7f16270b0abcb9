"""Step-size rules: fixed steps and inexact distributed backtracking.

The backtracking rule works with an approximate gradient norm eta obtained
by synchronous averaging consensus (Metropolis weights) instead of the true
norm: each node starts from its squared gradient entry, mixes for a fixed
number of rounds, and a designated root node (node 1) reads out
sqrt(n * estimate). The accepted step alpha = beta^m is the first trial
satisfying

    eta(lam + beta^m d) <= (1 - sigma beta^m) eta(lam) + slack + gamma,

where slack absorbs the direction's residual error and gamma the norm
estimation error. Both default to small positive constants and can be set
to zero for exact-descent experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BacktrackExhausted
from .flow import FlowProblem, dual_gradient
from .graph import DirectedGraph


@dataclass(frozen=True)
class LineSearchConfig:
    sigma: float = 0.1
    beta: float = 0.5
    slack: float = 1e-6
    gamma: float = 1e-8
    consensus_rounds: int = 50
    max_backtracks: int = 30

    def __post_init__(self):
        if not 0.0 < self.sigma < 0.5:
            raise ValueError(f"sigma must be in (0, 1/2), got {self.sigma}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        if self.slack < 0 or self.gamma < 0:
            raise ValueError("slack and gamma must be nonnegative")


@dataclass(frozen=True)
class FixedStep:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def label(self) -> str:
        return f"fixed:{self.alpha:g}"


@dataclass(frozen=True)
class Backtracking:
    config: LineSearchConfig = LineSearchConfig()

    label = "backtrack"


StepRule = Union[FixedStep, Backtracking]


def metropolis_matrix(graph: DirectedGraph) -> np.ndarray:
    """Symmetric doubly stochastic mixing matrix with Metropolis weights.

    W_ij = 1/(1 + max(deg_i, deg_j)) on edges, diagonal absorbs the rest.
    Converges to the average on any connected graph.
    """
    n = graph.n
    degree = [len(adj) for adj in graph.adjacency]
    W = np.zeros((n, n))
    for tail, head in graph.edges:
        i, j = tail - 1, head - 1
        w = 1.0 / (1.0 + max(degree[i], degree[j]))
        W[i, j] += w
        W[j, i] += w
    np.fill_diagonal(W, 1.0 - W.sum(axis=1))
    return W


def approx_norm(
    graph: DirectedGraph, g: np.ndarray, rounds: int
) -> tuple[float, float]:
    """Consensus estimate of ||g|| and its true error.

    Runs ``rounds`` Metropolis averaging steps on the per-node squared
    entries and reads the estimate at node 1; eta = sqrt(n * estimate).
    The returned true_error = |eta - ||g||| is metering information, not
    something a node could know.
    """
    values = np.asarray(g, dtype=float) ** 2
    if rounds > 0:
        W = metropolis_matrix(graph)
        for _ in range(rounds):
            values = W @ values
    eta = float(np.sqrt(graph.n * max(values[0], 0.0)))
    return eta, abs(eta - float(np.linalg.norm(g)))


def backtracking_exchanges(trials: int, consensus_rounds: int) -> int:
    """Exchange rounds consumed by ``trials`` trial-point evaluations: each
    costs 2 rounds for the trial gradient plus the consensus rounds for
    its norm estimate."""
    return trials * (2 + consensus_rounds)


def backtracking_stepsize(
    problem: FlowProblem,
    lam: np.ndarray,
    d: np.ndarray,
    eta_k: float,
    config: LineSearchConfig,
) -> tuple[float, int, int]:
    """Smallest m with an acceptable trial step; returns (alpha, m, exchanges).

    alpha = beta^m. Raises BacktrackExhausted past max_backtracks; the
    exception carries the fallback step beta^max_backtracks and the rounds
    already spent so callers can continue with a warning.
    """
    lam = np.asarray(lam, dtype=float)
    d = np.asarray(d, dtype=float)
    for m in range(config.max_backtracks + 1):
        step = config.beta**m
        trial_eta, _ = approx_norm(
            problem.graph, dual_gradient(problem, lam + step * d), config.consensus_rounds
        )
        threshold = (1.0 - config.sigma * step) * eta_k + config.slack + config.gamma
        if trial_eta <= threshold:
            return step, m, backtracking_exchanges(m + 1, config.consensus_rounds)
    raise BacktrackExhausted(
        max_backtracks=config.max_backtracks,
        alpha_fallback=config.beta**config.max_backtracks,
        exchanges_used=backtracking_exchanges(
            config.max_backtracks + 1, config.consensus_rounds
        ),
    )
