"""Command-line driver.

Subcommands: plan, predict, simulate, compare-loss, tomo, serve, init.
Every report subcommand writes delimiter-separated tables plus rendered
PNG figures into the session store, and prints where they went.

Exit codes: 0 success, 1 internal fault, 2 usage, 3 bad scenario or
configuration, 4 plan infeasible for the requested objective.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import reporting, wire
from .allocator import (
    FIXED_GRID,
    FULL_FLEX,
    GridPolicy,
    Objective,
    SizeError,
    plan_with_policy,
)
from .hardware import loss_table
from .network import ConfigError, link_label
from .ratemodel import predict_report
from .scenario import (
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    allocation_from_dict,
    load_scenario,
    scenario_to_dict,
)
from .session import SessionStore
from .timetags import count_coincidences, simulate_timetags, write_binary, write_text
from .tomography import ChannelNoiseModel, SamplerConfig, link_fidelity_scan

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_INFEASIBLE = 4


def _add_scenario_arg(parser):
    parser.add_argument(
        "--scenario",
        default="paper-default",
        help="scenario file path or bundled name (default: paper-default)",
    )
    parser.add_argument(
        "--store",
        default="session",
        help="session store directory for artifacts (default: ./session)",
    )


def _parse_user_range(text: str) -> range:
    lo, _, hi = text.partition("..")
    try:
        return range(int(lo), int(hi) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N..M, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexqnet",
        description="Plan and simulate flex-grid entanglement distribution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="compute a channel-to-link allocation plan")
    _add_scenario_arg(p)
    p.add_argument("--policy", choices=["alphabetical", "fixed-grid", "full-flex"])
    p.add_argument(
        "--objective",
        choices=["equalize", "max-min", "weighted-targets", "premium"],
        help="override the scenario objective variant",
    )
    p.add_argument("--allow-drop", action="store_true", help="permit dropping weak links")
    p.add_argument("--group-size", type=int, help="fixed-grid group width in channels")
    p.add_argument("--tag", default="plan", help="artifact stem (default: plan)")

    p = sub.add_parser("predict", help="rate report for the scenario allocation")
    _add_scenario_arg(p)
    p.add_argument("--plan", help="read the allocation from a saved plan artifact")
    p.add_argument("--tag", default="predict")

    p = sub.add_parser("simulate", help="Monte Carlo time tags plus coincidence counting")
    _add_scenario_arg(p)
    p.add_argument("--plan", help="read the allocation from a saved plan artifact")
    p.add_argument("--duration", type=float, default=10.0, help="simulated seconds")
    p.add_argument("--seed", type=int, help="RNG seed (default: scenario seeds.simulate)")
    p.add_argument("--export-tags", action="store_true", help="also write raw time tags")
    p.add_argument("--tag", default="simulate")

    p = sub.add_parser("compare-loss", help="WSS vs DWDM loss scaling table")
    _add_scenario_arg(p)
    p.add_argument("--users", type=_parse_user_range, default=range(2, 17), help="range N..M")
    p.add_argument("--tag", default="compare-loss")

    p = sub.add_parser("tomo", help="per-channel Bayesian fidelity scan")
    _add_scenario_arg(p)
    p.add_argument("--default-mix", type=float, default=1.0, help="source mix parameter")
    p.add_argument(
        "--channel-mix",
        action="append",
        default=[],
        metavar="CH=MIX",
        help="per-channel override, e.g. 12=0.8 (repeatable)",
    )
    p.add_argument("--phase", type=float, default=math.pi, help="residual pair phase (rad)")
    p.add_argument("--counts", type=int, default=10_000, help="coincidences per basis")
    p.add_argument("--seed", type=int, help="RNG seed (default: scenario seeds.tomography)")
    p.add_argument("--particles", type=int, default=2500, help="posterior sampler population")
    p.add_argument("--mutations", type=int, default=40, help="Metropolis sweeps per stage")
    p.add_argument("--tag", default="tomo")

    p = sub.add_parser("serve", help="start the HTTP provisioning API")
    _add_scenario_arg(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8470)

    p = sub.add_parser("init", help="write the bundled default scenario for editing")
    p.add_argument("--out", default="scenario.json")
    return parser


def _scenario_and_store(args) -> tuple[Scenario, SessionStore]:
    scenario = load_scenario(args.scenario)
    return scenario, SessionStore(args.store)


def _allocation_for(args, scenario: Scenario, network):
    if getattr(args, "plan", None):
        payload = json.loads(Path(args.plan).read_text())
        raw = payload.get("allocation", payload)
        return allocation_from_dict(raw, scenario)
    return dict(scenario.allocation or {})


def _objective_from_args(args, scenario: Scenario) -> Objective:
    if args.objective is None:
        return scenario.objective
    variant = args.objective.replace("-", "_")
    return Objective(
        variant=variant,
        targets=scenario.objective.targets,
        premium_link=scenario.objective.premium_link,
        floors=scenario.objective.floors,
    )


def cmd_plan(args) -> int:
    scenario, store = _scenario_and_store(args)
    network = scenario.build_network()
    objective = _objective_from_args(args, scenario)
    policy = scenario.grid_policy
    alphabetical = False
    if args.policy == "alphabetical":
        policy = GridPolicy(FIXED_GRID, args.group_size or policy.group_size)
        alphabetical = True
    elif args.policy == "fixed-grid":
        policy = GridPolicy(FIXED_GRID, args.group_size or policy.group_size)
    elif args.policy == "full-flex":
        policy = GridPolicy(FULL_FLEX)

    plan = plan_with_policy(
        network, policy, objective, allow_drop=args.allow_drop, alphabetical=alphabetical
    )
    payload = wire.plan_to_dict(plan)
    path = store.save_artifact(args.tag, payload)
    reporting.write_table(
        store.artifact_path(args.tag, ".tsv"),
        ("link", "status", "channels", "coincidence_s"),
        reporting.plan_rows(plan),
    )
    reporting.rates_figure(plan.predicted, store.artifact_path(args.tag + "-rates", ".png"))
    reporting.allocation_map_figure(
        network, plan.allocation, store.artifact_path(args.tag + "-map", ".png")
    )
    print(f"plan written to {path}")
    for link in sorted(plan.predicted.links):
        status = "active" if link in plan.active_links else "dropped"
        print(f"  {link_label(link)}: {plan.predicted.links[link].coincidence:.4g} /s ({status})")
    print(f"objective value: {plan.objective_value:.6g}")
    if "infeasible" in plan.diagnostics:
        print(f"infeasible: {plan.diagnostics['infeasible']}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_predict(args) -> int:
    scenario, store = _scenario_and_store(args)
    network = scenario.build_network()
    allocation = _allocation_for(args, scenario, network)
    report = predict_report(network, allocation)
    store.save_artifact(args.tag, wire.report_to_dict(report))
    reporting.write_table(
        store.artifact_path(args.tag, ".tsv"),
        ("kind", "name", "rate_s", "accidental_s", "car"),
        reporting.report_rows(report),
    )
    reporting.rates_figure(report, store.artifact_path(args.tag + "-rates", ".png"))
    reporting.allocation_map_figure(
        network, allocation, store.artifact_path(args.tag + "-map", ".png")
    )
    for name in sorted(report.singles):
        print(f"singles {name}: {report.singles[name]:.4g} /s")
    for link in sorted(report.links):
        print(f"link {link_label(link)}: {report.links[link].coincidence:.4g} /s")
    print(f"artifacts under {store.root / 'artifacts'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario, store = _scenario_and_store(args)
    network = scenario.build_network()
    allocation = _allocation_for(args, scenario, network)
    seed = args.seed if args.seed is not None else scenario.seeds.get("simulate", 0)

    report = predict_report(network, allocation)
    stream = simulate_timetags(network, allocation, args.duration, seed)
    histograms = count_coincidences(
        stream, network.window_ps, network.offsets_ps, network.histogram_span_ps
    )

    rows = []
    for name in sorted(stream.times_ps):
        simulated = stream.times_ps[name].size / args.duration
        rows.append(("singles", name, report.singles[name], simulated))
    for link in sorted(histograms):
        rates = report.links[link]
        predicted_peak = rates.coincidence + rates.accidental
        rows.append(("link", link_label(link), predicted_peak, histograms[link].peak_rate))
    reporting.write_table(
        store.artifact_path(args.tag, ".tsv"),
        ("kind", "name", "predicted_s", "simulated_s"),
        rows,
    )
    reporting.write_table(
        store.artifact_path(args.tag + "-histograms", ".tsv"),
        ("link", "delay_ps", "counts"),
        reporting.histogram_rows(histograms),
    )
    reporting.histogram_figure(histograms, store.artifact_path(args.tag + "-histograms", ".png"))
    store.save_artifact(
        args.tag,
        {
            "seed": seed,
            "duration_s": args.duration,
            "report": wire.report_to_dict(report),
            "simulated_singles": {n: stream.times_ps[n].size / args.duration for n in sorted(stream.times_ps)},
            "histograms": wire.histograms_to_dict(histograms),
        },
    )
    if args.export_tags:
        order = [u.name for u in network.users]
        write_binary(stream, store.artifact_path(args.tag + "-tags", ".bin"), order)
        write_text(stream, store.artifact_path(args.tag + "-tags", ".txt"))
    for kind, name, predicted, simulated in rows:
        print(f"{kind} {name}: predicted {predicted:.4g} /s, simulated {simulated:.4g} /s")
    return EXIT_OK


def cmd_compare_loss(args) -> int:
    scenario, store = _scenario_and_store(args)
    rows = loss_table(scenario.wss, scenario.dwdm, args.users)
    reporting.write_table(
        store.artifact_path(args.tag, ".tsv"),
        ("n_users", "wss_loss_db", "dwdm_best_db", "dwdm_worst_db"),
        reporting.loss_table_rows(rows),
    )
    reporting.loss_figure(rows, store.artifact_path(args.tag, ".png"))
    store.save_artifact(args.tag, wire.loss_rows_to_dict(rows))
    for r in rows:
        print(f"n={r.n_users}: wss {r.wss_loss_db} dB, dwdm {r.dwdm_best_db}..{r.dwdm_worst_db} dB")
    return EXIT_OK


def cmd_tomo(args) -> int:
    scenario, store = _scenario_and_store(args)
    network = scenario.build_network()
    overrides = {}
    for item in args.channel_mix:
        key, _, value = item.partition("=")
        overrides[int(key)] = float(value)
    noise = ChannelNoiseModel(
        default_mix=args.default_mix, mix_overrides=overrides, phase_rad=args.phase
    )
    seed = args.seed if args.seed is not None else scenario.seeds.get("tomography", 0)
    config = SamplerConfig(particles=args.particles, mutations_per_stage=args.mutations)
    scan = link_fidelity_scan(
        network, network.channels, noise, per_basis_total=args.counts, config=config, seed=seed
    )
    reporting.write_table(
        store.artifact_path(args.tag, ".tsv"),
        ("channel", "mix", "fidelity_mean", "fidelity_std", "samples", "ess", "converged"),
        reporting.fidelity_rows(scan),
    )
    reporting.fidelity_figure(scan, store.artifact_path(args.tag, ".png"))
    store.save_artifact(args.tag, wire.scan_to_dict(scan))
    for r in scan:
        print(
            f"channel {r.channel_index}: fidelity {r.summary.fidelity_mean:.4f} "
            f"+- {r.summary.fidelity_std:.4f}"
        )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    scenario, store = _scenario_and_store(args)
    app = create_app(store, scenario)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_init(args) -> int:
    scenario = load_scenario("paper-default")
    Path(args.out).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
    print(f"wrote {args.out}")
    return EXIT_OK


_HANDLERS = {
    "plan": cmd_plan,
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "compare-loss": cmd_compare_loss,
    "tomo": cmd_tomo,
    "serve": cmd_serve,
    "init": cmd_init,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ScenarioParseError, ScenarioValidationError, ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SizeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal fault: {exc!r}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
