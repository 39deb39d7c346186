"""Command-line client for the optimization service.

Every subcommand builds an HTTP request and sends it to the service.  By
default requests are dispatched to an in-process instance of the app (no
server needs to be running); pass ``--server URL`` to talk to a remote
instance instead.  ``hagopt serve`` starts a standalone server.
"""

import sys
from pathlib import Path

import click
import httpx


def make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # the in-process transport import warns about its own dependencies
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


def graph_payload(input_path: str, undirected: bool) -> dict:
    text = Path(input_path).read_text()
    if text.lstrip().startswith("{"):
        return {"graph_json": text, "undirected": undirected}
    return {"edge_list": text, "undirected": undirected}


def write_output(path: str | None, content: str) -> None:
    if path:
        Path(path).write_text(content)


server_option = click.option("--server", default=None, metavar="URL",
                             help="Remote service URL (default: run in-process).")
undirected_option = click.option("--undirected", is_flag=True,
                                 help="Treat the input edge list as undirected.")


@click.group()
def main() -> None:
    """Rewrite aggregation graphs to eliminate redundant work."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--algo", type=click.Choice(["full", "partial", "degree", "hub", "optimal"]),
              default="full", show_default=True)
@click.option("--k", type=int, required=True, help="Intermediate-node budget.")
@click.option("--d", type=int, default=2, show_default=True,
              help="In-degree of every intermediate node.")
@click.option("--single-layer/--multi-layer", "single_layer", default=True,
              help="Restrict intermediates to read original senders only.")
@click.option("--no-stop-on-nonpositive", "no_stop", is_flag=True,
              help="Keep inserting nodes even when they cannot add value.")
@click.option("--candidate-floor", type=int, default=2, show_default=True,
              help="Smallest receiver count worth a new node.")
@click.option("--seed", type=int, default=None,
              help="Accepted for flag symmetry; optimization itself is deterministic.")
@undirected_option
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the optimized graph (JSON) here.")
@click.option("--report", type=click.Path(dir_okay=False), default=None,
              help="Write the per-step value trace (CSV) here.")
@server_option
def optimize(input_path, algo, k, d, single_layer, no_stop, candidate_floor,
             seed, undirected, out, report, server):
    """Optimize one graph and print a one-line summary."""
    payload = {
        "graph": graph_payload(input_path, undirected),
        "algorithm": algo,
        "k": k,
        "d": d,
        "layer_mode": "single" if single_layer else "multi",
        "stop_on_nonpositive": not no_stop,
        "candidate_floor": candidate_floor,
        "seed": seed,
    }
    with make_client(server) as client:
        data = post(client, "/optimize", payload)
    if not data["equivalence_ok"]:
        raise click.ClickException("optimized graph failed the equivalence check")
    write_output(out, data["hag"])
    if report:
        lines = ["step,in_set,receivers,marginal_value,cumulative_value"]
        for i, rec in enumerate(data["trace"], start=1):
            in_set = " ".join(str(x) for x in rec["in_set"])
            lines.append(f"{i},{in_set},{rec['receivers']},"
                         f"{rec['marginal_value']},{rec['cumulative_value']}")
        write_output(report, "\n".join(lines) + "\n")
    click.echo(f"value={data['value']} k_used={data['k_used']} "
               f"elapsed_ms={data['elapsed_ms']:.3f}")


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--algo", "algos", multiple=True, required=True,
              type=click.Choice(["full", "partial", "degree", "hub", "optimal"]))
@click.option("--k", type=int, required=True)
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--single-layer/--multi-layer", "single_layer", default=True)
@click.option("--no-stop-on-nonpositive", "no_stop", is_flag=True)
@click.option("--candidate-floor", type=int, default=2, show_default=True)
@undirected_option
@click.option("--report", type=click.Path(dir_okay=False), default=None,
              help="Write per-algorithm rows (CSV) here.")
@server_option
def compare(input_path, algos, k, d, single_layer, no_stop, candidate_floor,
            undirected, report, server):
    """Run several algorithms on one graph and print their ratios."""
    payload = {
        "graph": graph_payload(input_path, undirected),
        "algorithms": list(algos),
        "k": k,
        "d": d,
        "layer_mode": "single" if single_layer else "multi",
        "stop_on_nonpositive": not no_stop,
        "candidate_floor": candidate_floor,
    }
    with make_client(server) as client:
        data = post(client, "/compare", payload)
    write_output(report, data["csv"])
    for row in data["rows"]:
        click.echo(f"algorithm={row['algorithm']} value={row['value']} "
                   f"elapsed_ms={row['elapsed_ms']:.3f}")
    for pair, ratio in sorted(data["value_ratios"].items()):
        shown = "n/a" if ratio is None else f"{ratio:.4f}"
        click.echo(f"value_ratio {pair} = {shown}")


@main.command("experiment-er")
@click.option("--n", type=int, default=15, show_default=True)
@click.option("--p", "p_grid", type=float, multiple=True, required=True,
              help="Edge probability; repeat for a grid.")
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--k", "k_list", type=int, multiple=True, default=(2, 3),
              show_default=True)
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--algo", "algos", multiple=True, default=("full", "partial"),
              type=click.Choice(["full", "partial", "degree", "hub"]), show_default=True)
@click.option("--er-undirected", is_flag=True,
              help="Sample undirected graphs (both orientations per edge).")
@click.option("--report", type=click.Path(dir_okay=False), default=None,
              help="Write trial rows (CSV) here.")
@click.option("--aggregate-report", type=click.Path(dir_okay=False), default=None,
              help="Write aggregate rows (CSV) here.")
@server_option
def experiment_er(n, p_grid, trials, k_list, d, seed, algos, er_undirected,
                  report, aggregate_report, server):
    """Score algorithms against the exact optimum on random graphs."""
    payload = {
        "n": n,
        "p_grid": list(p_grid),
        "trials": trials,
        "k_list": list(k_list),
        "d": d,
        "seed": seed,
        "undirected": er_undirected,
        "algorithms": list(algos),
    }
    with make_client(server) as client:
        data = post(client, "/experiments/erdos-renyi", payload)
    write_output(report, data["csv"])
    write_output(aggregate_report, data["aggregates_csv"])
    for agg in data["aggregates"]:
        mean_oma = agg["mean_one_minus_alpha"]
        shown = "n/a" if mean_oma is None else f"{mean_oma:.4f}"
        click.echo(f"algorithm={agg['algorithm']} p={agg['p']} k={agg['k']} "
                   f"trials={agg['trials']} mean_one_minus_alpha={shown}")


@main.command("experiment-layers")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--k-max", type=int, default=100, show_default=True)
@undirected_option
@click.option("--report", type=click.Path(dir_okay=False), default=None,
              help="Write per-budget rows (CSV) here.")
@server_option
def experiment_layers(input_path, k_max, undirected, report, server):
    """Single- versus multi-layer greedy value over budgets 1..k_max."""
    payload = {
        "graph": graph_payload(input_path, undirected),
        "k_max": k_max,
    }
    with make_client(server) as client:
        data = post(client, "/experiments/layers", payload)
    write_output(report, data["csv"])
    click.echo(f"mean_single={data['mean_single']:.2f} "
               f"mean_multi={data['mean_multi']:.2f} "
               f"mean_improvement_pct={data['mean_improvement_pct']:.3f} "
               f"std_improvement_pct={data['std_improvement_pct']:.3f}")


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=25, show_default=True,
              help="Instances per property check.")
@click.option("--inject-fault", is_flag=True,
              help="Corrupt one graph on purpose to prove faults are caught.")
@server_option
def validate(seed, trials, inject_fault, server):
    """Run the property suite; exit nonzero if any check fails."""
    payload = {"seed": seed, "trials": trials, "inject_fault": inject_fault}
    with make_client(server) as client:
        data = post(client, "/validate", payload)
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"{status} {check['name']}: {check['detail']}")
    if not data["ok"]:
        sys.exit(1)
    click.echo("all checks passed")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--names", default=None,
              help="Comma-separated display names for original nodes.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def render(input_path, names, out):
    """Render an optimized-graph JSON file as DOT text (local operation)."""
    from .ingest import deserialize_hag, export_dot

    hag = deserialize_hag(Path(input_path).read_text())
    name_list = names.split(",") if names else None
    dot = export_dot(hag, name_list)
    if out:
        write_output(out, dot)
    else:
        click.echo(dot, nl=False)


if __name__ == "__main__":
    main()
