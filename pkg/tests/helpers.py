"""Shared test fixtures: instance factories and near-optimum construction."""

from __future__ import annotations

import numpy as np

from netflow import (
    ExactNewton,
    FixedStep,
    dual_gradient,
    make_problem,
    place_source_sink,
    random_connected_graph,
    run_trial,
)
from netflow.flow import uniform_costs


def make_instance(n, num_edges, seed, family="cosh", coefficient=1.0, amount=1.0):
    graph = random_connected_graph(n, num_edges, seed)
    return make_problem(
        graph,
        uniform_costs(graph, family, coefficient),
        place_source_sink(graph, amount),
    )


def random_instances(count, seed, n_range=(4, 20), family=None, amount=1.0):
    """Deterministic stream of (problem, rng) pairs over mixed sizes/families."""
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 10 * count:
        attempts += 1
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        max_pairs = n * (n - 1) // 2
        num_edges = int(rng.integers(n, max_pairs + 1))
        fam = family or ("cosh" if attempts % 2 else "quadratic")
        try:
            problem = make_instance(
                n, num_edges, seed + attempts, fam,
                coefficient=float(rng.uniform(0.5, 2.0)), amount=amount,
            )
        except Exception:
            continue
        out.append(problem)
    assert len(out) == count
    return out


def near_optimum(problem, tol=1e-13):
    """High-precision dual solution via exact Newton iterations."""
    report = run_trial(problem, ExactNewton(), FixedStep(1.0), tol=tol, max_iters=200)
    assert report.converged
    return report.final_lambda


def perturb_to_gradient_norm(problem, lam_star, target, seed):
    """Mean-zero perturbation of lam_star bisected so ||g|| is near target."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=problem.n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    lo, hi = 0.0, 1.0
    while np.linalg.norm(dual_gradient(problem, lam_star + hi * v)) < target:
        hi *= 2.0
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if np.linalg.norm(dual_gradient(problem, lam_star + mid * v)) < target:
            lo = mid
        else:
            hi = mid
    return lam_star + lo * v
