"""Experiment suites: multi-seed trial batteries and their summaries.

A suite config is a flat key=value text file (see ``parse_suite_config``).
Each (size, seed, method) trial writes one trace CSV named

    n{n}_E{E}_s{seed}_{method}_{ok|cap}.trace.csv

where the trailing flag records convergence, so a directory of traces is
self-describing and ``summarize`` can rebuild the summary from files
alone. Seeds are sequential from ``base_seed``. Reruns with an identical
config reproduce byte-identical files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from statistics import mean, median

from .directions import AddN, BARE, ConsensusNewton, DirectionMethod, ExactNewton, Gradient
from .errors import EmptyInput, NetflowError
from .flow import FlowProblem, make_problem, place_source_sink, uniform_costs
from .graph import random_connected_graph
from .linesearch import Backtracking, FixedStep, LineSearchConfig, StepRule
from .simulator import TRACE_HEADER, run_trial, safe_gradient_step, trace_from_csv, write_trace

SUMMARY_HEADER = "n,E,method,min_rounds,mean_rounds,max_rounds,median_rounds,converged_frac"

FIXED_AUTO = "fixed:auto"

_TRACE_NAME = re.compile(
    r"^n(?P<n>\d+)_E(?P<E>\d+)_s(?P<seed>\d+)_(?P<method>[a-z0-9.:-]+)_(?P<flag>ok|cap)\.trace\.csv$"
)


@dataclass(frozen=True)
class MethodSpec:
    """A direction method paired with its step policy.

    step is 'fixed:<alpha>', 'fixed:auto' (largest globally safe gradient
    step, resolved per instance), or 'backtrack'.
    """

    method: DirectionMethod
    step: str = "fixed:1"

    @property
    def label(self) -> str:
        return self.method.label


@dataclass(frozen=True)
class SuiteConfig:
    sizes: tuple[tuple[int, int], ...]
    trials: int
    methods: tuple[MethodSpec, ...]
    base_seed: int = 0
    cost_family: str = "cosh"
    coefficient: float = 1.0
    amount: float = 6.0
    tol: float = 1e-10
    max_iters: int = 1_000_000
    max_rounds: int = 100_000_000
    linesearch: LineSearchConfig = field(default_factory=LineSearchConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        labels = [spec.label for spec in self.methods]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate method labels in suite: {labels}")


@dataclass(frozen=True)
class TrialStat:
    n: int
    E: int
    method: str
    seed: int
    converged: bool
    rounds: int


@dataclass(frozen=True)
class SummaryRow:
    n: int
    E: int
    method: str
    min_rounds: int | None
    mean_rounds: float | None
    max_rounds: int | None
    median_rounds: float | None
    converged_frac: float


def parse_method_label(label: str) -> DirectionMethod:
    """Parse 'gradient', 'add-N', 'consensus-M[:shifted]', or 'newton'."""
    label = label.strip()
    if label == "gradient":
        return Gradient()
    if label == "newton":
        return ExactNewton()
    if label.startswith("add-"):
        return AddN(int(label[4:]))
    if label.startswith("consensus-"):
        rest = label[len("consensus-"):]
        if ":" in rest:
            rounds, splitting = rest.split(":", 1)
            return ConsensusNewton(int(rounds), splitting)
        return ConsensusNewton(int(rest), BARE)
    raise ValueError(f"unknown method label {label!r}")


def parse_method_spec(text: str) -> MethodSpec:
    """Parse '<method>[@<step>]', e.g. 'add-2@fixed:1' or 'gradient@fixed:auto'."""
    if "@" in text:
        method_part, step = text.split("@", 1)
    else:
        method_part, step = text, "fixed:1"
    step = step.strip()
    if step != FIXED_AUTO and step != "backtrack":
        if not step.startswith("fixed:"):
            raise ValueError(f"unknown step policy {step!r}")
        float(step[6:])  # validate now rather than mid-suite
    return MethodSpec(method=parse_method_label(method_part), step=step)


def resolve_step_rule(spec: MethodSpec, problem: FlowProblem,
                      linesearch: LineSearchConfig) -> StepRule:
    if spec.step == "backtrack":
        return Backtracking(linesearch)
    if spec.step == FIXED_AUTO:
        return FixedStep(safe_gradient_step(problem))
    return FixedStep(float(spec.step[6:]))


def parse_suite_config(text: str) -> SuiteConfig:
    """Parse the flat key=value suite format ('#' starts a comment).

    Required keys: sizes (comma list of NxE), trials, methods (comma list
    of method specs). Optional: base_seed, cost, coefficient, amount, tol,
    max_iters, max_rounds, and the line-search keys sigma, beta, slack,
    gamma, consensus_rounds, max_backtracks.
    """
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()

    for required in ("sizes", "trials", "methods"):
        if required not in values:
            raise ValueError(f"suite config missing required key {required!r}")

    sizes = []
    for chunk in values["sizes"].split(","):
        n_str, e_str = chunk.strip().lower().split("x")
        sizes.append((int(n_str), int(e_str)))
    methods = tuple(
        parse_method_spec(chunk.strip()) for chunk in values["methods"].split(",")
    )
    ls = LineSearchConfig(
        sigma=float(values.get("sigma", 0.1)),
        beta=float(values.get("beta", 0.5)),
        slack=float(values.get("slack", 1e-6)),
        gamma=float(values.get("gamma", 1e-8)),
        consensus_rounds=int(values.get("consensus_rounds", 50)),
        max_backtracks=int(values.get("max_backtracks", 30)),
    )
    return SuiteConfig(
        sizes=tuple(sizes),
        trials=int(values["trials"]),
        methods=methods,
        base_seed=int(values.get("base_seed", 0)),
        cost_family=values.get("cost", "cosh"),
        coefficient=float(values.get("coefficient", 1.0)),
        amount=float(values.get("amount", 6.0)),
        tol=float(values.get("tol", 1e-10)),
        max_iters=int(values.get("max_iters", 1_000_000)),
        max_rounds=int(values.get("max_rounds", 100_000_000)),
        linesearch=ls,
    )


def trace_filename(n: int, E: int, seed: int, method: str, converged: bool) -> str:
    flag = "ok" if converged else "cap"
    return f"n{n}_E{E}_s{seed}_{method}_{flag}.trace.csv"


def run_suite(config: SuiteConfig, out_dir: str | Path) -> list[SummaryRow]:
    """Run every (size, seed, method) trial, write traces and summary.csv.

    Instance generation failures are recorded as capped trials with an
    empty trace body rather than aborting the suite.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats: list[TrialStat] = []
    for n, E in config.sizes:
        for seed in range(config.base_seed, config.base_seed + config.trials):
            try:
                graph = random_connected_graph(n, E, seed)
            except NetflowError:
                for spec in config.methods:
                    stats.append(TrialStat(n, E, spec.label, seed, False, 0))
                    name = trace_filename(n, E, seed, spec.label, False)
                    (out / name).write_text(TRACE_HEADER + "\n")
                continue
            problem = make_problem(
                graph,
                uniform_costs(graph, config.cost_family, config.coefficient),
                place_source_sink(graph, config.amount),
            )
            for spec in config.methods:
                report = run_trial(
                    problem,
                    spec.method,
                    resolve_step_rule(spec, problem, config.linesearch),
                    tol=config.tol,
                    max_iters=config.max_iters,
                    max_rounds=config.max_rounds,
                    meta={"n": n, "E": E, "seed": seed},
                )
                stats.append(
                    TrialStat(n, E, spec.label, seed, report.converged, report.total_rounds)
                )
                write_trace(report, out / trace_filename(n, E, seed, spec.label, report.converged))
    rows = summarize_stats(stats)
    (out / "summary.csv").write_text(summary_to_csv(rows))
    return rows


def summarize_stats(stats: list[TrialStat]) -> list[SummaryRow]:
    if not stats:
        raise EmptyInput("no trials to summarize")
    groups: dict[tuple[int, int, str], list[TrialStat]] = {}
    for stat in stats:
        groups.setdefault((stat.n, stat.E, stat.method), []).append(stat)
    rows = []
    for (n, E, method) in sorted(groups):
        bucket = groups[(n, E, method)]
        rounds = [s.rounds for s in bucket if s.converged]
        frac = len(rounds) / len(bucket)
        if rounds:
            rows.append(
                SummaryRow(n, E, method, min(rounds), mean(rounds), max(rounds),
                           float(median(rounds)), frac)
            )
        else:
            rows.append(SummaryRow(n, E, method, None, None, None, None, frac))
    return rows


def summarize(trace_dir: str | Path) -> list[SummaryRow]:
    """Rebuild summary rows from a directory of trace CSVs.

    Trial metadata comes from the filename convention; the total round
    count is the last record of each converged trace.
    """
    stats = []
    for path in sorted(Path(trace_dir).glob("*.trace.csv")):
        match = _TRACE_NAME.match(path.name)
        if not match:
            continue
        records = trace_from_csv(path.read_text())
        converged = match["flag"] == "ok"
        rounds = records[-1].rounds if records else 0
        stats.append(
            TrialStat(int(match["n"]), int(match["E"]), match["method"],
                      int(match["seed"]), converged, rounds)
        )
    if not stats:
        raise EmptyInput(f"no trace files in {trace_dir}")
    return summarize_stats(stats)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def summary_to_csv(rows: list[SummaryRow]) -> str:
    lines = [SUMMARY_HEADER]
    for r in rows:
        lines.append(
            f"{r.n},{r.E},{r.method},{_fmt(r.min_rounds)},{_fmt(r.mean_rounds)},"
            f"{_fmt(r.max_rounds)},{_fmt(r.median_rounds)},{_fmt(r.converged_frac)}"
        )
    return "\n".join(lines) + "\n"
