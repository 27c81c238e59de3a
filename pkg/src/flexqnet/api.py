"""HTTP provisioning API over the session store.

JSON in, JSON out; every request that evaluates physics names the
scenario version it wants, so reads are immutable snapshots and repeated
requests with identical inputs return identical bodies. Edits are
optimistic: the caller sends the version it based its edit on and gets a
409 if someone else committed first. Randomized endpoints require an
explicit seed.
"""

from __future__ import annotations

import math
import threading

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import wire
from .allocator import GridPolicy, Objective, SizeError, plan_with_policy
from .hardware import loss_table
from .network import ConfigError
from .ratemodel import predict_report
from .scenario import (
    Scenario,
    ScenarioValidationError,
    allocation_from_dict,
    scenario_from_dict,
    scenario_to_dict,
)
from .session import SessionStore, VersionConflictError
from .timetags import count_coincidences, simulate_timetags
from .tomography import ChannelNoiseModel, SamplerConfig, link_fidelity_scan

API_SCHEMA_VERSION = 1


class ScenarioEdit(BaseModel):
    base_version: int
    scenario: dict


class PolicyBody(BaseModel):
    variant: str = "full_flex"
    group_size: int = 2


class ObjectiveBody(BaseModel):
    variant: str = "equalize"
    targets: list[dict] | None = None
    premium_link: list[str] | None = None
    floors: list[dict] | None = None


class PlanRequest(BaseModel):
    version: int
    policy: PolicyBody = PolicyBody()
    objective: ObjectiveBody = ObjectiveBody()
    allow_drop: bool = False
    alphabetical: bool = False


class PredictRequest(BaseModel):
    version: int
    allocation: dict[str, tuple[str, str]]


class SimulateRequest(BaseModel):
    version: int
    duration_s: float = Field(gt=0.0)
    seed: int  # explicit seed is part of the reproducibility contract


class SamplerBody(BaseModel):
    particles: int = 2500
    mutations_per_stage: int = 40
    final_mutations: int = 40


class TomoRequest(BaseModel):
    version: int
    seed: int
    default_mix: float = 1.0
    mix_overrides: dict[str, float] = {}
    phase_rad: float = math.pi
    per_basis_total: int = 10_000
    sampler: SamplerBody = SamplerBody()


def _objective_from_body(body: ObjectiveBody, scenario: Scenario) -> Objective:
    names = {u.name for u in scenario.users}

    def parse_links(items):
        table = {}
        for item in items:
            pair = item.get("link")
            if not pair or len(pair) != 2 or any(p not in names for p in pair):
                raise HTTPException(422, detail=f"bad link in objective: {pair!r}")
            table[tuple(sorted(pair))] = float(item["rate"])
        return table

    premium = None
    if body.premium_link is not None:
        if len(body.premium_link) != 2 or any(p not in names for p in body.premium_link):
            raise HTTPException(422, detail=f"bad premium_link {body.premium_link!r}")
        premium = tuple(sorted(body.premium_link))
    try:
        return Objective(
            variant=body.variant,
            targets=parse_links(body.targets) if body.targets else None,
            premium_link=premium,
            floors=parse_links(body.floors) if body.floors else None,
        )
    except ValueError as exc:
        raise HTTPException(422, detail=str(exc)) from exc


def create_app(store: SessionStore, initial_scenario: Scenario | None = None) -> FastAPI:
    app = FastAPI(title="flexqnet provisioning API", version=str(API_SCHEMA_VERSION))
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    lock = threading.Lock()

    if initial_scenario is not None and store.latest_version(initial_scenario.name) == 0:
        store.save_scenario(initial_scenario)
    names = store.scenario_names()
    if not names:
        raise ValueError("session store holds no scenario and none was provided")
    scenario_name = initial_scenario.name if initial_scenario is not None else names[0]

    def load(version: int | None = None) -> tuple[Scenario, int]:
        try:
            return store.load_scenario(scenario_name, version)
        except FileNotFoundError as exc:
            raise HTTPException(404, detail=str(exc)) from exc

    @app.get("/scenario")
    def get_scenario(version: int | None = Query(default=None)):
        scenario, actual = load(version)
        return {
            "schema_version": API_SCHEMA_VERSION,
            "version": actual,
            "scenario": scenario_to_dict(scenario),
        }

    @app.put("/scenario")
    def put_scenario(edit: ScenarioEdit):
        try:
            scenario = scenario_from_dict(edit.scenario)
        except ScenarioValidationError as exc:
            raise HTTPException(422, detail=exc.errors) from exc
        if scenario.name != scenario_name:
            raise HTTPException(422, detail=f"scenario name must stay {scenario_name!r}")
        with lock:
            try:
                version = store.save_scenario(scenario, expected_version=edit.base_version)
            except VersionConflictError as exc:
                raise HTTPException(
                    409, detail={"message": str(exc), "latest": exc.latest}
                ) from exc
        return {"schema_version": API_SCHEMA_VERSION, "version": version}

    @app.post("/plan")
    def post_plan(request: PlanRequest):
        scenario, version = load(request.version)
        network = scenario.build_network()
        objective = _objective_from_body(request.objective, scenario)
        try:
            policy = GridPolicy(request.policy.variant, request.policy.group_size)
            plan = plan_with_policy(
                network,
                policy,
                objective,
                allow_drop=request.allow_drop,
                alphabetical=request.alphabetical,
            )
        except (SizeError, ValueError) as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        payload = {
            "schema_version": API_SCHEMA_VERSION,
            "version": version,
            "plan": wire.plan_to_dict(plan),
        }
        stem = f"plan-v{version}-{request.policy.variant}-{objective.variant}"
        if request.alphabetical:
            stem += "-alphabetical"
        store.save_artifact(stem, payload)
        return payload

    @app.post("/predict")
    def post_predict(request: PredictRequest):
        scenario, version = load(request.version)
        network = scenario.build_network()
        try:
            allocation = allocation_from_dict(request.allocation, scenario)
            report = predict_report(network, allocation)
        except (ScenarioValidationError, ConfigError) as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        return {
            "schema_version": API_SCHEMA_VERSION,
            "version": version,
            "report": wire.report_to_dict(report),
        }

    @app.post("/simulate")
    def post_simulate(request: SimulateRequest):
        scenario, version = load(request.version)
        network = scenario.build_network()
        allocation = dict(scenario.allocation or {})
        report = predict_report(network, allocation)
        stream = simulate_timetags(network, allocation, request.duration_s, request.seed)
        histograms = count_coincidences(
            stream, network.window_ps, network.offsets_ps, network.histogram_span_ps
        )
        return {
            "schema_version": API_SCHEMA_VERSION,
            "version": version,
            "seed": request.seed,
            "duration_s": request.duration_s,
            "report": wire.report_to_dict(report),
            "simulated_singles": {
                name: stream.times_ps[name].size / request.duration_s
                for name in sorted(stream.times_ps)
            },
            "histograms": wire.histograms_to_dict(histograms),
        }

    @app.get("/loss-table")
    def get_loss_table(n_min: int = Query(default=2, ge=2), n_max: int = Query(default=16)):
        scenario, version = load()
        if n_max < n_min:
            raise HTTPException(422, detail="n_max must be >= n_min")
        rows = loss_table(scenario.wss, scenario.dwdm, range(n_min, n_max + 1))
        return {
            "schema_version": API_SCHEMA_VERSION,
            "version": version,
            **wire.loss_rows_to_dict(rows),
        }

    @app.post("/tomo")
    def post_tomo(request: TomoRequest):
        scenario, version = load(request.version)
        network = scenario.build_network()
        try:
            overrides = {int(k): float(v) for k, v in request.mix_overrides.items()}
            noise = ChannelNoiseModel(
                default_mix=request.default_mix,
                mix_overrides=overrides,
                phase_rad=request.phase_rad,
            )
            config = SamplerConfig(
                particles=request.sampler.particles,
                mutations_per_stage=request.sampler.mutations_per_stage,
                final_mutations=request.sampler.final_mutations,
            )
        except ValueError as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        scan = link_fidelity_scan(
            network,
            network.channels,
            noise,
            per_basis_total=request.per_basis_total,
            config=config,
            seed=request.seed,
        )
        return {
            "schema_version": API_SCHEMA_VERSION,
            "version": version,
            "seed": request.seed,
            **wire.scan_to_dict(scan),
        }

    return app
