"""Record live API responses into frontend test fixtures.

Runs the HTTP service in-process against the bundled default scenario and
captures the exact request/response pairs the console tests replay, so
the frontend test suite exercises real wire payloads without a server.

Usage: python3 tools/record_console_fixtures.py [output_dir]
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from flexqnet.api import create_app
from flexqnet.scenario import load_scenario
from flexqnet.session import SessionStore


def main(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        store = SessionStore(Path(tmp) / "store")
        client = TestClient(create_app(store, load_scenario("paper-default")))
        recorded = []

        def record(name, method, path, body=None, params=None):
            if method == "GET":
                response = client.get(path, params=params)
            elif method == "PUT":
                response = client.put(path, json=body)
            else:
                response = client.post(path, json=body)
            entry = {
                "name": name,
                "request": {"method": method, "path": path, "body": body, "params": params},
                "response": {"status": response.status_code, "body": response.json()},
            }
            recorded.append(entry)
            return response.json()

        scenario = record("scenario-v1", "GET", "/scenario")

        alphabetical = record(
            "plan-alphabetical",
            "POST",
            "/plan",
            body={
                "version": 1,
                "policy": {"variant": "fixed_grid", "group_size": 2},
                "objective": {"variant": "equalize"},
                "allow_drop": False,
                "alphabetical": True,
            },
        )
        record(
            "plan-balanced",
            "POST",
            "/plan",
            body={
                "version": 1,
                "policy": {"variant": "fixed_grid", "group_size": 2},
                "objective": {"variant": "equalize"},
                "allow_drop": False,
                "alphabetical": False,
            },
        )
        record(
            "plan-flex",
            "POST",
            "/plan",
            body={
                "version": 1,
                "policy": {"variant": "full_flex", "group_size": 2},
                "objective": {"variant": "equalize"},
                "allow_drop": True,
                "alphabetical": False,
            },
        )

        base_allocation = alphabetical["plan"]["allocation"]
        record(
            "predict-alphabetical",
            "POST",
            "/predict",
            body={"version": 1, "allocation": base_allocation},
        )

        moved = dict(base_allocation)
        moved["1"] = ["Charlie", "Dave"]  # brightest channel away from Alice-Bob
        record("predict-moved", "POST", "/predict", body={"version": 1, "allocation": moved})

        noop = dict(base_allocation)
        record("predict-noop", "POST", "/predict", body={"version": 1, "allocation": noop})

        committed = dict(scenario["scenario"])
        committed["allocation"] = moved
        record(
            "scenario-commit",
            "PUT",
            "/scenario",
            body={"base_version": 1, "scenario": committed},
        )
        record("scenario-v2", "GET", "/scenario")
        # replaying the same stale edit now records the conflict payload
        record(
            "scenario-commit-conflict",
            "PUT",
            "/scenario",
            body={"base_version": 1, "scenario": committed},
        )

        for entry in recorded:
            path = out_dir / f"{entry['name']}.json"
            path.write_text(json.dumps(entry, indent=2, sort_keys=True) + "\n")
        print(f"wrote {len(recorded)} fixtures to {out_dir}")


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("frontend/test/fixtures")
    main(target)
