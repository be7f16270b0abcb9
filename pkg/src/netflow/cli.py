"""netflow command line: a thin client over the service layer.

Every subcommand builds a service request model and either invokes the
in-process handler (default) or POSTs it to a running server
(``--server http://host:port``). With a remote server, paths given to
``suite``/``summarize`` refer to the server's filesystem.

Exit codes: 0 success, 2 when a requested single run did not converge,
1 on any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import NetflowError
from .service import handlers
from .service.schemas import (
    GenerateGraphRequest,
    GraphResponse,
    MethodModel,
    RunTrialRequest,
    StepModel,
    SuiteRequest,
    SuiteResponse,
    SummarizeRequest,
    SummarizeResponse,
    TrialResponse,
)

_ROUTES = {
    "generate": ("/graphs/generate", handlers.generate_graph, GraphResponse),
    "run": ("/trials/run", handlers.run_single_trial, TrialResponse),
    "suite": ("/suites/run", handlers.run_experiment_suite, SuiteResponse),
    "summarize": ("/summaries/compute", handlers.summarize_traces, SummarizeResponse),
}


class ServiceClient:
    def __init__(self, server: str | None):
        self.server = server.rstrip("/") if server else None

    def call(self, route: str, request):
        path, handler, response_cls = _ROUTES[route]
        if self.server is None:
            return handler(request)
        import httpx

        reply = httpx.post(
            self.server + path, json=request.model_dump(), timeout=None
        )
        if reply.status_code >= 400:
            raise NetflowError(f"server error {reply.status_code}: {reply.text}")
        return response_cls.model_validate(reply.json())


def _parse_step(text: str) -> StepModel:
    if text == "backtrack":
        return StepModel(kind="backtrack")
    if text.startswith("fixed:"):
        value = text[6:]
        if value == "auto":
            return StepModel(kind="auto")
        return StepModel(kind="fixed", alpha=float(value))
    raise ValueError(f"--step must be fixed:<alpha>, fixed:auto, or backtrack, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netflow")
    parser.add_argument("--server", default=None, help="base URL of a running service")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random connected non-bipartite graph")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--edges", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None, help="graph file to write (stdout if omitted)")

    run = sub.add_parser("run", help="run one optimization trial")
    run.add_argument("--graph", default=None, help="graph text file")
    run.add_argument("--problem", default=None, help="problem text file (overrides --cost/--amount)")
    run.add_argument("--cost", choices=["quadratic", "cosh"], default="cosh")
    run.add_argument("--coefficient", type=float, default=1.0)
    run.add_argument("--amount", type=float, default=1.0,
                     help="source/sink units placed a diameter apart")
    run.add_argument("--method", choices=["gradient", "add", "consensus", "newton"],
                     required=True)
    run.add_argument("--order", type=int, default=0, help="series order for --method add")
    run.add_argument("--inner", type=int, default=20,
                     help="inner rounds for --method consensus")
    run.add_argument("--splitting", choices=["bare", "shifted"], default="bare")
    run.add_argument("--step", default="fixed:1")
    run.add_argument("--tol", type=float, default=1e-10)
    run.add_argument("--max-iters", type=int, default=1_000_000)
    run.add_argument("--max-rounds", type=int, default=100_000_000)
    run.add_argument("--sigma", type=float, default=0.1)
    run.add_argument("--beta", type=float, default=0.5)
    run.add_argument("--slack", type=float, default=1e-6)
    run.add_argument("--gamma", type=float, default=1e-8)
    run.add_argument("--consensus-rounds", type=int, default=50)
    run.add_argument("--max-backtracks", type=int, default=30)
    run.add_argument("--out", default=None, help="trace CSV to write")

    suite = sub.add_parser("suite", help="run a multi-seed experiment suite")
    suite.add_argument("--config", required=True, help="key=value suite config file")
    suite.add_argument("--out", required=True, help="output directory for traces and summary")

    summ = sub.add_parser("summarize", help="summarize a directory of trace CSVs")
    summ.add_argument("--dir", required=True)
    summ.add_argument("--out", default=None, help="summary CSV to write (stdout if omitted)")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_gen(client: ServiceClient, args) -> int:
    response = client.call(
        "generate",
        GenerateGraphRequest(nodes=args.nodes, edges=args.edges, seed=args.seed),
    )
    if args.out:
        Path(args.out).write_text(response.text)
    else:
        sys.stdout.write(response.text)
    m = response.metrics
    print(
        f"generated n={response.n} E={len(response.edges)} "
        f"max_degree={m.max_degree} diameter={m.diameter} bipartite={m.bipartite}",
        file=sys.stderr,
    )
    return 0


def _cmd_run(client: ServiceClient, args) -> int:
    request = RunTrialRequest(
        graph_text=Path(args.graph).read_text() if args.graph else None,
        problem_text=Path(args.problem).read_text() if args.problem else None,
        cost=args.cost,
        coefficient=args.coefficient,
        amount=args.amount,
        method=MethodModel(
            kind=args.method, order=args.order, inner=args.inner,
            splitting=args.splitting,
        ),
        step=_parse_step(args.step),
        linesearch={
            "sigma": args.sigma,
            "beta": args.beta,
            "slack": args.slack,
            "gamma": args.gamma,
            "consensus_rounds": args.consensus_rounds,
            "max_backtracks": args.max_backtracks,
        },
        tol=args.tol,
        max_iters=args.max_iters,
        max_rounds=args.max_rounds,
        include_trace=True,
    )
    response = client.call("run", request)
    if args.out:
        Path(args.out).write_text(response.trace_csv)
    print(
        f"method={response.method} step={response.step} "
        f"converged={response.converged} iterations={response.iterations} "
        f"rounds={response.rounds} grad_norm={response.final_grad_norm:.3e}"
    )
    return 0 if response.converged else 2


def _cmd_suite(client: ServiceClient, args) -> int:
    response = client.call(
        "suite",
        SuiteRequest(config_text=Path(args.config).read_text(), out_dir=args.out),
    )
    print(f"wrote {response.trace_files} traces and summary.csv to {response.out_dir}")
    return 0


def _cmd_summarize(client: ServiceClient, args) -> int:
    response = client.call("summarize", SummarizeRequest(trace_dir=args.dir))
    if args.out:
        Path(args.out).write_text(response.csv)
    else:
        sys.stdout.write(response.csv)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    client = ServiceClient(args.server)
    commands = {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "suite": _cmd_suite,
        "summarize": _cmd_summarize,
    }
    try:
        return commands[args.command](client, args)
    except (NetflowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
