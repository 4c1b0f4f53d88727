"""Command line client for the corridor contouring toolkit.

Every command is a thin client of the HTTP service. By default the service
runs in process (no server required); ``--server URL`` targets a remote
instance instead. Exit codes: 0 on success (for ``run``: goal reached),
1 on invalid input, 2 when a run aborts or the time budget expires short
of the goal.
"""

from __future__ import annotations

import contextlib
import csv
import json
import pathlib
import sys
import warnings

import click

from .demo import write_demo
from .sim import RunSummary

TUBE_ROW_COLUMNS = ["theta", "nx", "ny", "nz", "offset", "fallback"]
TUBE_VERTEX_COLUMNS = ["theta", "index", "x", "y", "z"]


def _fail(message: str) -> "SystemExit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(1)


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"{path} is not valid JSON: {exc}") from exc


def _inline_scenario(path) -> dict:
    """Load a scenario file and inline any referenced course files."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise _fail(f"{path}: scenario must be a JSON object")
    base = pathlib.Path(path).parent
    for key in ("trajectory", "corridor"):
        ref = doc.get(key)
        if isinstance(ref, str):
            doc[key] = _load_json(base / ref)
    doc.setdefault("name", pathlib.Path(path).stem)
    return doc


@contextlib.contextmanager
def _client(server: str | None):
    if server:
        import httpx

        with httpx.Client(base_url=server.rstrip("/"), timeout=600.0) as client:
            yield client
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            from fastapi.testclient import TestClient

        from .service import app

        with TestClient(app) as client:
            yield client


def _post(client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", "")
        except ValueError:
            detail = resp.text
        if isinstance(detail, dict):
            message = detail.get("message", json.dumps(detail))
            pointer = detail.get("pointer")
            if pointer:
                message = f"{message} (at {pointer})"
        else:
            message = str(detail)
        raise _fail(message)
    return resp.json()


def _write_csv(path, columns: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


@click.group()
def main() -> None:
    """Corridor-constrained contouring controller toolkit."""


_server_option = click.option(
    "--server", default=None, metavar="URL",
    help="Remote service URL; defaults to an in-process service.",
)


@main.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the per-tick log CSV here.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--rho", type=float, default=None,
              help="Override the progress reward weight.")
@click.option("--no-recovery", is_flag=True,
              help="Disable the slack-softened recovery solve.")
@click.option("--baseline", is_flag=True,
              help="Run the corridor-blind tracker instead of the controller.")
@_server_option
def run(scenario, out, seed, rho, no_recovery, baseline, server) -> None:
    """Run a closed-loop scenario and print its summary line."""
    doc = _inline_scenario(scenario)
    payload = {
        "scenario": doc,
        "options": {
            "rho": rho,
            "no_recovery": no_recovery,
            "seed": seed,
            "baseline": baseline,
        },
    }
    with _client(server) as client:
        data = _post(client, "/run", payload)
    if out:
        _write_csv(out, data["log_columns"], data["log_rows"])
    summary = RunSummary(**data["summary"])
    click.echo(summary.format_line())
    if summary.outcome != "goal":
        sys.exit(2)


@main.command()
@click.argument("trajectory", type=click.Path(exists=True, dir_okay=False))
@click.argument("corridor", type=click.Path(exists=True, dir_okay=False))
@_server_option
def validate(trajectory, corridor, server) -> None:
    """Check course inputs; prints one PASS/FAIL line per check."""
    payload = {
        "trajectory": _load_json(trajectory),
        "corridor": _load_json(corridor),
    }
    with _client(server) as client:
        data = _post(client, "/validate", payload)
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"{status} {check['name']}: {check['detail']}")
    if not data["ok"]:
        sys.exit(1)


@main.command()
@click.argument("trajectory", type=click.Path(exists=True, dir_okay=False))
@click.argument("corridor", type=click.Path(exists=True, dir_okay=False))
@click.option("--theta", "thetas", type=float, multiple=True,
              help="Reference time to slice at; repeatable.")
@click.option("--out", type=click.Path(dir_okay=False), default="tube_rows.csv",
              show_default=True, help="Halfspace rows CSV.")
@click.option("--vertices-out", type=click.Path(dir_okay=False),
              default="tube_vertices.csv", show_default=True,
              help="Cross-section vertices CSV.")
@_server_option
def tube(trajectory, corridor, thetas, out, vertices_out, server) -> None:
    """Sample tube constraint rows (and section vertices) along the reference."""
    payload = {
        "trajectory": _load_json(trajectory),
        "corridor": _load_json(corridor),
        "thetas": list(thetas),
    }
    with _client(server) as client:
        data = _post(client, "/tube", payload)
    _write_csv(
        out, TUBE_ROW_COLUMNS,
        ([r[c] for c in TUBE_ROW_COLUMNS] for r in data["rows"]),
    )
    _write_csv(
        vertices_out, TUBE_VERTEX_COLUMNS,
        ([v[c] for c in TUBE_VERTEX_COLUMNS] for v in data["vertices"]),
    )
    click.echo(
        f"wrote {len(data['rows'])} rows to {out} and "
        f"{len(data['vertices'])} vertices to {vertices_out}"
    )


@main.command("solve-dump")
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default="horizon_qp.txt",
              show_default=True, help="Write the QP dump here.")
@_server_option
def solve_dump(scenario, out, server) -> None:
    """Dump the first horizon QP of a scenario in loadable text form."""
    doc = _inline_scenario(scenario)
    with _client(server) as client:
        data = _post(client, "/solve-dump", {"scenario": doc})
    pathlib.Path(out).write_text(data["text"], encoding="utf-8")
    click.echo(f"wrote QP with n={data['n']} variables, m={data['m']} rows to {out}")


@main.command()
@click.option("--out", type=click.Path(file_okay=False), default="demo",
              show_default=True, help="Directory for the generated files.")
def demo(out) -> None:
    """Generate the bundled demo courses and scenario files."""
    paths = write_demo(out)
    for name in sorted(paths):
        click.echo(f"wrote {paths[name]}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port) -> None:
    """Serve the HTTP API."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
