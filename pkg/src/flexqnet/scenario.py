"""Scenario files: one human-editable JSON document per network setup.

A scenario bundles the source spectrum, the channel grid, switch and
filter hardware, the receivers, coincidence-counting conventions, the
planning objective, and (optionally) a concrete allocation plus RNG
seeds. Parsing and validation are separate stages: parse errors carry the
file position, validation reports every failed field at once instead of
stopping at the first. The schema is documented in docs/scenario-format.md
and versioned through the schema_version field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .allocator import EQUALIZE, FULL_FLEX, GridPolicy, Objective
from .hardware import Detector, DwdmModel, WssModel
from .network import (
    Allocation,
    NetworkModel,
    User,
    make_link,
)
from .spectrum import BiphotonSpectrum, carve_grid, validate_grid

SCHEMA_VERSION = 1
BUNDLED = ("paper-default",)


class ScenarioParseError(ValueError):
    """The file is not well-formed JSON; message carries the position."""


class ScenarioValidationError(ValueError):
    """One or more fields failed validation; all failures are listed."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("invalid scenario:\n  " + "\n  ".join(errors))


@dataclass
class Scenario:
    name: str
    spectrum: BiphotonSpectrum
    slice_width_ghz: float
    channel_count: int
    wss: WssModel
    dwdm: DwdmModel
    users: list[User]
    gating: str = "synchronized"
    window_ps: int = 1024
    histogram_span_ps: int = 60_000
    offsets_ps: dict[str, int] = field(default_factory=dict)
    objective: Objective = Objective(EQUALIZE)
    grid_policy: GridPolicy = GridPolicy(FULL_FLEX)
    allocation: Allocation | None = None
    seeds: dict[str, int] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def build_network(self) -> NetworkModel:
        channels = carve_grid(self.spectrum, self.slice_width_ghz, self.channel_count)
        return NetworkModel(
            users=list(self.users),
            wss=self.wss,
            dwdm=self.dwdm,
            spectrum=self.spectrum,
            channels=channels,
            gating=self.gating,
            window_ps=self.window_ps,
            histogram_span_ps=self.histogram_span_ps,
            offsets_ps=dict(self.offsets_ps),
        )


class _Checker:
    """Collects path-annotated validation errors while pulling fields."""

    def __init__(self, raw: dict):
        self.raw = raw
        self.errors: list[str] = []

    def fail(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def get(self, path: str, kind, required: bool = True, default=None):
        node = self.raw
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                if required:
                    self.fail(path, "missing required field")
                return default
            node = node[part]
        if kind is float and isinstance(node, int):
            node = float(node)
        if kind is not None and not isinstance(node, kind):
            self.fail(path, f"expected {getattr(kind, '__name__', kind)}, got {type(node).__name__}")
            return default
        return node

    def build(self, path: str, constructor, /, **kwargs):
        """Construct a domain object, turning ValueError into a field error."""
        try:
            return constructor(**kwargs)
        except (ValueError, TypeError) as exc:
            self.fail(path, str(exc))
            return None


def _parse_link(raw, users: set[str], path: str, check: _Checker):
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        check.fail(path, "a link is a two-element array of user names")
        return None
    a, b = raw
    if a == b:
        check.fail(path, f"link users must differ, got {a!r} twice")
        return None
    if a not in users or b not in users:
        check.fail(path, f"link references unknown user in {raw!r}")
        return None
    return make_link(a, b)


def scenario_from_dict(raw: dict) -> Scenario:
    """Validate a parsed scenario document; reports all failures together."""
    check = _Checker(raw)

    version = check.get("schema_version", int, required=False, default=SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        check.fail("schema_version", f"unsupported version {version}, expected {SCHEMA_VERSION}")

    name = check.get("name", str, required=False, default="unnamed")

    spectrum = check.build(
        "spectrum",
        BiphotonSpectrum,
        first_null_detuning_ghz=check.get("spectrum.first_null_detuning_ghz", float, default=1.0),
        stopband_halfwidth_ghz=check.get("spectrum.stopband_halfwidth_ghz", float, required=False, default=0.0),
        total_pair_flux=check.get("spectrum.total_pair_flux", float, default=0.0),
    )
    slice_width = check.get("grid.slice_width_ghz", float, default=1.0)
    channel_count = check.get("grid.channel_count", int, default=1)
    if isinstance(slice_width, float) and slice_width <= 0:
        check.fail("grid.slice_width_ghz", "must be > 0")
    if isinstance(channel_count, int) and channel_count < 1:
        check.fail("grid.channel_count", "must be >= 1")

    wss = check.build(
        "wss",
        WssModel,
        port_count=check.get("wss.port_count", int, default=1),
        insertion_loss_db=check.get("wss.insertion_loss_db", float, default=0.0),
        resolution_ghz=check.get("wss.resolution_ghz", float, default=1.0),
        addressability_ghz=check.get("wss.addressability_ghz", float, default=1.0),
        total_bandwidth_ghz=check.get("wss.total_bandwidth_ghz", float, default=1.0),
    )
    dwdm = check.build(
        "dwdm",
        DwdmModel,
        reflection_loss_db=check.get("dwdm.reflection_loss_db", float, required=False, default=0.25),
        transmission_loss_db=check.get("dwdm.transmission_loss_db", float, required=False, default=0.6),
        best_case_mode=check.get("dwdm.best_case_mode", str, required=False, default="two_transmissions"),
    )

    users: list[User] = []
    raw_users = check.get("users", list, default=[])
    for i, entry in enumerate(raw_users or []):
        path = f"users[{i}]"
        sub = _Checker(entry if isinstance(entry, dict) else {})
        detector = sub.build(
            f"{path}.detector",
            Detector,
            efficiency=sub.get("detector.efficiency", float, default=0.0),
            duty_cycle=sub.get("detector.duty_cycle", float, required=False, default=1.0),
            dark_rate=sub.get("detector.dark_rate", float, required=False, default=0.0),
            jitter_fwhm_ps=sub.get("detector.jitter_fwhm_ps", float, required=False, default=0.0),
        )
        user_name = sub.get("name", str, default=f"user{i}")
        if detector is not None:
            user = sub.build(
                path,
                User,
                name=user_name,
                detector=detector,
                path_loss_db=sub.get("path_loss_db", float, required=False, default=0.0),
            )
            if user is not None:
                users.append(user)
        check.errors.extend(
            e if e.startswith(path) else f"{path}.{e}" for e in sub.errors
        )
    names = [u.name for u in users]
    if len(set(names)) != len(names):
        check.fail("users", f"duplicate user names in {names}")
    if len(names) < 2:
        check.fail("users", "need at least two users")

    gating = check.get("gating", str, required=False, default="synchronized")
    if gating not in ("synchronized", "independent"):
        check.fail("gating", f"must be 'synchronized' or 'independent', got {gating!r}")

    window_ps = check.get("coincidence.window_ps", int, required=False, default=1024)
    span_ps = check.get("coincidence.histogram_span_ps", int, required=False, default=60_000)
    if window_ps is not None and window_ps <= 0:
        check.fail("coincidence.window_ps", "must be > 0")
    offsets_raw = check.get("coincidence.offsets_ps", dict, required=False, default={})
    offsets: dict[str, int] = {}
    for user_name, off in (offsets_raw or {}).items():
        if user_name not in names:
            check.fail("coincidence.offsets_ps", f"offset for unknown user {user_name!r}")
        elif not isinstance(off, int):
            check.fail("coincidence.offsets_ps", f"offset for {user_name!r} must be integer ps")
        else:
            offsets[user_name] = off

    user_set = set(names)
    variant = check.get("objective.variant", str, required=False, default=EQUALIZE)
    targets = None
    raw_targets = check.get("objective.targets", list, required=False)
    if raw_targets is not None:
        targets = {}
        for i, item in enumerate(raw_targets):
            link = _parse_link(item.get("link"), user_set, f"objective.targets[{i}].link", check)
            rate = item.get("rate")
            if link is not None and isinstance(rate, (int, float)):
                targets[link] = float(rate)
            elif link is not None:
                check.fail(f"objective.targets[{i}].rate", "missing numeric rate")
    premium_raw = check.get("objective.premium_link", list, required=False)
    premium_link = (
        _parse_link(premium_raw, user_set, "objective.premium_link", check)
        if premium_raw is not None
        else None
    )
    floors = None
    raw_floors = check.get("objective.floors", list, required=False)
    if raw_floors is not None:
        floors = {}
        for i, item in enumerate(raw_floors):
            link = _parse_link(item.get("link"), user_set, f"objective.floors[{i}].link", check)
            rate = item.get("rate")
            if link is not None and isinstance(rate, (int, float)):
                floors[link] = float(rate)
    objective = check.build(
        "objective",
        Objective,
        variant=variant,
        targets=targets,
        premium_link=premium_link,
        floors=floors,
    )

    policy = check.build(
        "grid_policy",
        GridPolicy,
        variant=check.get("grid_policy.variant", str, required=False, default=FULL_FLEX),
        group_size=check.get("grid_policy.group_size", int, required=False, default=2),
    )

    allocation: Allocation | None = None
    raw_allocation = raw.get("allocation")
    if raw_allocation is not None:
        if not isinstance(raw_allocation, dict):
            check.fail("allocation", "must be an object of channel index to link")
        else:
            allocation = {}
            for key, value in raw_allocation.items():
                try:
                    index = int(key)
                except ValueError:
                    check.fail("allocation", f"channel key {key!r} is not an integer")
                    continue
                if isinstance(channel_count, int) and not 1 <= index <= channel_count:
                    check.fail("allocation", f"channel {index} outside the {channel_count}-channel grid")
                    continue
                link = _parse_link(value, user_set, f"allocation[{key}]", check)
                if link is not None:
                    allocation[index] = link

    seeds_raw = check.get("seeds", dict, required=False, default={})
    seeds = {}
    for key, value in (seeds_raw or {}).items():
        if not isinstance(value, int):
            check.fail(f"seeds.{key}", "seed must be an integer")
        else:
            seeds[key] = value

    # grid-versus-switch compatibility is part of scenario validity
    if spectrum is not None and wss is not None and not check.errors:
        channels = carve_grid(spectrum, slice_width, channel_count)
        for violation in validate_grid(channels, wss):
            check.fail(
                f"grid (channel {violation.channel_index}, {violation.slice_kind})",
                violation.detail,
            )

    if check.errors:
        raise ScenarioValidationError(check.errors)

    return Scenario(
        name=name,
        spectrum=spectrum,
        slice_width_ghz=slice_width,
        channel_count=channel_count,
        wss=wss,
        dwdm=dwdm,
        users=users,
        gating=gating,
        window_ps=window_ps,
        histogram_span_ps=span_ps,
        offsets_ps=offsets,
        objective=objective,
        grid_policy=policy,
        allocation=allocation,
        seeds=seeds,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of scenario_from_dict; save then load is identity."""
    objective: dict = {"variant": scenario.objective.variant}
    if scenario.objective.targets:
        objective["targets"] = [
            {"link": list(link), "rate": rate}
            for link, rate in sorted(scenario.objective.targets.items())
        ]
    if scenario.objective.premium_link:
        objective["premium_link"] = list(scenario.objective.premium_link)
    if scenario.objective.floors:
        objective["floors"] = [
            {"link": list(link), "rate": rate}
            for link, rate in sorted(scenario.objective.floors.items())
        ]
    doc = {
        "schema_version": scenario.schema_version,
        "name": scenario.name,
        "spectrum": {
            "first_null_detuning_ghz": scenario.spectrum.first_null_detuning_ghz,
            "stopband_halfwidth_ghz": scenario.spectrum.stopband_halfwidth_ghz,
            "total_pair_flux": scenario.spectrum.total_pair_flux,
        },
        "grid": {
            "slice_width_ghz": scenario.slice_width_ghz,
            "channel_count": scenario.channel_count,
        },
        "wss": {
            "port_count": scenario.wss.port_count,
            "insertion_loss_db": scenario.wss.insertion_loss_db,
            "resolution_ghz": scenario.wss.resolution_ghz,
            "addressability_ghz": scenario.wss.addressability_ghz,
            "total_bandwidth_ghz": scenario.wss.total_bandwidth_ghz,
        },
        "dwdm": {
            "reflection_loss_db": scenario.dwdm.reflection_loss_db,
            "transmission_loss_db": scenario.dwdm.transmission_loss_db,
            "best_case_mode": scenario.dwdm.best_case_mode,
        },
        "users": [
            {
                "name": u.name,
                "detector": {
                    "efficiency": u.detector.efficiency,
                    "duty_cycle": u.detector.duty_cycle,
                    "dark_rate": u.detector.dark_rate,
                    "jitter_fwhm_ps": u.detector.jitter_fwhm_ps,
                },
                "path_loss_db": u.path_loss_db,
            }
            for u in scenario.users
        ],
        "gating": scenario.gating,
        "coincidence": {
            "window_ps": scenario.window_ps,
            "histogram_span_ps": scenario.histogram_span_ps,
            "offsets_ps": dict(scenario.offsets_ps),
        },
        "objective": objective,
        "grid_policy": {
            "variant": scenario.grid_policy.variant,
            "group_size": scenario.grid_policy.group_size,
        },
        "allocation": (
            {str(i): list(link) for i, link in sorted(scenario.allocation.items())}
            if scenario.allocation is not None
            else None
        ),
        "seeds": dict(scenario.seeds),
    }
    return doc


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    if isinstance(source, str) and source in BUNDLED:
        text = resources.files("flexqnet").joinpath(f"data/{source}.json").read_text()
        origin = f"bundled:{source}"
    else:
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(f"scenario file {path} does not exist")
        text = path.read_text()
        origin = str(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"{origin}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ScenarioParseError(f"{origin}: top level must be a JSON object")
    return scenario_from_dict(raw)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def allocation_to_dict(allocation: Allocation) -> dict:
    return {str(i): list(link) for i, link in sorted(allocation.items())}


def allocation_from_dict(raw: dict, scenario: Scenario) -> Allocation:
    """Parse an allocation fragment against an existing scenario."""
    user_set = {u.name for u in scenario.users}
    check = _Checker({})
    allocation: Allocation = {}
    for key, value in raw.items():
        try:
            index = int(key)
        except (TypeError, ValueError):
            check.fail("allocation", f"channel key {key!r} is not an integer")
            continue
        if not 1 <= index <= scenario.channel_count:
            check.fail("allocation", f"channel {index} outside the grid")
            continue
        link = _parse_link(value, user_set, f"allocation[{key}]", check)
        if link is not None:
            allocation[index] = link
    if check.errors:
        raise ScenarioValidationError(check.errors)
    return allocation
