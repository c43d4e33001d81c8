"""Record a ground-station API trace for the operator-console tests.

Runs a scenario, serves its ground station through the real FastAPI
app, captures every REST snapshot the console hydrates from, and writes
the lot as one JSON fixture.

Usage: python3 tools/record_api_trace.py <scenario.json> <out.json>
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from fswsim.runner import run_scenario
from fswsim.scenario import load_scenario
from fswsim.service import create_app


def record(scenario_path: str) -> dict:
    scenario = load_scenario(scenario_path)
    stack, report = run_scenario(scenario)
    alerts = [a.to_dict() for a in stack.defenses.alerts] if stack.defenses else []
    client = TestClient(create_app(stack.ground, alerts=lambda: alerts))
    archive = client.get("/archive").json()
    return {
        "scenario": scenario.name,
        "hk": client.get("/hk").json(),
        "archive": archive,
        "cmdlog": client.get("/cmdlog").json(),
        "alerts": client.get("/alerts").json(),
        "raw": client.get("/raw/0").json() if archive else None,
        "stream": archive,  # the WS stream replays parsed records in order
    }


def main() -> None:
    scenario_path, out_path = sys.argv[1], sys.argv[2]
    trace = record(scenario_path)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    Path(out_path).write_text(json.dumps(trace, indent=2) + "\n")
    print(f"{trace['scenario']}: {len(trace['archive'])} records, "
          f"{len(trace['alerts'])} alerts -> {out_path}")


if __name__ == "__main__":
    main()
