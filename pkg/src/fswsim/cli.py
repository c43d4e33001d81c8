"""Command-line interface: run scenarios, compare runs, print reports."""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click

from .interfaces import QUATERNION_FIELDS
from .runner import CompareError, compare_runs, evaluate_assertions, run_scenario
from .scenario import ScenarioError, load_scenario
from .sim import build_stack, write_artifacts
from .runner import build_report

OUT_ROOT_ENV = "FSWSIM_OUT"


def _out_root() -> Path:
    return Path(os.environ.get(OUT_ROOT_ENV, "runs"))


@click.group()
def main():
    """Deterministic flight-software simulator and spoofing testbed."""


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True))
@click.option("--assert", "run_asserts", is_flag=True,
              help="Evaluate the scenario's assertions; exit nonzero on failure.")
@click.option("--serve", is_flag=True,
              help="Run wall-clock paced with the ground-station API served live.")
@click.option("--headless", is_flag=True, default=False,
              help="Logical-time run with no service (the default).")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Artifact directory (default: $FSWSIM_OUT/<scenario-name>).")
@click.option("--port", type=int, default=52101, help="Service port for --serve.")
def run(scenario_file, run_asserts, serve, headless, out_dir, port):
    """Run one scenario and persist its artifacts."""
    if serve and headless:
        raise click.UsageError("--serve and --headless are mutually exclusive")
    try:
        scenario = load_scenario(scenario_file)
    except ScenarioError as exc:
        raise click.ClickException(str(exc))
    out = Path(out_dir) if out_dir else _out_root() / scenario.name

    if serve:
        _run_served(scenario, out, port)
        return

    stack, report = run_scenario(scenario, out_dir=out)
    click.echo(f"run complete: {scenario.name} -> {out}")
    click.echo(json.dumps(report, indent=2))

    if run_asserts:
        results = evaluate_assertions(stack, report)
        failed = 0
        for name, ok, detail in results:
            click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
            failed += not ok
        if failed:
            sys.exit(1)


def _run_served(scenario, out: Path, port: int) -> None:
    import threading
    import uvicorn
    from .groundstation import GroundStation
    from .service import create_app

    ground = GroundStation()
    stack = build_stack(scenario, ground=ground)
    app = create_app(
        ground,
        alerts=lambda: [a.to_dict() for a in stack.defenses.alerts]
        if stack.defenses else [])
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    click.echo(f"ground station API on http://127.0.0.1:{port}")
    try:
        for tick in range(scenario.duration_ticks):
            stack.bus.set_tick(tick)
            for cmd in scenario.script_at(tick):
                ground.send_command(cmd.device, cmd.command, wall_tick=tick)
            stack.scheduler.tick(tick)
            time.sleep(0.1)
    except KeyboardInterrupt:
        pass
    finally:
        server.should_exit = True
    write_artifacts(stack, out)
    (out / "report.json").write_text(json.dumps(build_report(stack), indent=2) + "\n")
    click.echo(f"artifacts -> {out}")


@main.command()
@click.argument("dir_a", type=click.Path(exists=True))
@click.argument("dir_b", type=click.Path(exists=True))
@click.option("--mask", multiple=True,
              help="Field names to mask; 'quaternion' expands to the q_* fields.")
def compare(dir_a, dir_b, mask):
    """Diff the ground-visible record of two runs."""
    fields: list[str] = []
    for m in mask:
        fields.extend(QUATERNION_FIELDS if m == "quaternion" else [m])
    try:
        result = compare_runs(dir_a, dir_b, mask_fields=tuple(fields))
    except CompareError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(result, indent=2))
    if result["verdict"] != "INDISTINGUISHABLE":
        sys.exit(1)


@main.command()
@click.argument("run_dir", type=click.Path(exists=True))
def report(run_dir):
    """Pretty-print the report of a persisted run."""
    path = Path(run_dir) / "report.json"
    if not path.exists():
        raise click.ClickException(f"no report.json under {run_dir}")
    data = json.loads(path.read_text())
    click.echo(json.dumps(data, indent=2))


@main.command()
@click.argument("scenario_dir", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
def matrix(scenario_dir, out_dir):
    """Run every scenario JSON in a directory with assertions."""
    root = Path(out_dir) if out_dir else _out_root()
    failed = 0
    for path in sorted(Path(scenario_dir).glob("*.json")):
        scenario = load_scenario(path)
        stack, rep = run_scenario(scenario, out_dir=root / scenario.name)
        results = evaluate_assertions(stack, rep)
        bad = [r for r in results if not r[1]]
        status = "PASS" if not bad else "FAIL"
        click.echo(f"[{status}] {scenario.name} "
                   f"({len(results) - len(bad)}/{len(results)} assertions)")
        for name, ok, detail in bad:
            click.echo(f"    FAIL {name}: {detail}")
        failed += bool(bad)
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
