"""On-disk session store: versioned scenarios plus computed artifacts.

Each scenario edit writes a new immutable version file; concurrent edits
are resolved optimistically by checking the caller's base version against
the latest on disk. Plans, reports, and simulation outputs land under
artifacts/ next to the scenario history.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .scenario import Scenario, scenario_from_dict, scenario_to_dict

_VERSION_FILE = re.compile(r"v(\d{4})\.json$")


class VersionConflictError(RuntimeError):
    """The scenario changed since the caller last read it."""

    def __init__(self, name: str, expected: int, latest: int):
        self.expected = expected
        self.latest = latest
        super().__init__(
            f"scenario {name!r} is at version {latest}, caller expected {expected}"
        )


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "scenarios").mkdir(parents=True, exist_ok=True)
        (self.root / "artifacts").mkdir(parents=True, exist_ok=True)

    def _scenario_dir(self, name: str) -> Path:
        return self.root / "scenarios" / name

    def latest_version(self, name: str) -> int:
        directory = self._scenario_dir(name)
        if not directory.exists():
            return 0
        versions = [
            int(m.group(1))
            for p in directory.iterdir()
            if (m := _VERSION_FILE.fullmatch(p.name))
        ]
        return max(versions, default=0)

    def save_scenario(self, scenario: Scenario, expected_version: int | None = None) -> int:
        """Persist a new version; raises VersionConflictError on stale edits.

        expected_version None skips the optimistic check (first import or
        forced overwrite by a single-writer tool).
        """
        latest = self.latest_version(scenario.name)
        if expected_version is not None and expected_version != latest:
            raise VersionConflictError(scenario.name, expected_version, latest)
        version = latest + 1
        directory = self._scenario_dir(scenario.name)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"v{version:04d}.json"
        path.write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
        return version

    def load_scenario(self, name: str, version: int | None = None) -> tuple[Scenario, int]:
        if version is None:
            version = self.latest_version(name)
        if version == 0:
            raise FileNotFoundError(f"no stored scenario named {name!r}")
        path = self._scenario_dir(name) / f"v{version:04d}.json"
        if not path.exists():
            raise FileNotFoundError(f"scenario {name!r} has no version {version}")
        return scenario_from_dict(json.loads(path.read_text())), version

    def scenario_names(self) -> list[str]:
        base = self.root / "scenarios"
        return sorted(p.name for p in base.iterdir() if p.is_dir())

    def artifact_path(self, stem: str, suffix: str = ".json") -> Path:
        return self.root / "artifacts" / f"{stem}{suffix}"

    def save_artifact(self, stem: str, payload: dict) -> Path:
        path = self.artifact_path(stem)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path
