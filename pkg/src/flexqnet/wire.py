"""JSON-ready views of computed artifacts.

The CLI and the HTTP API both serialize through these helpers, so a
number seen in a file artifact is byte-for-byte the number the API
returns for the same request.
"""

from __future__ import annotations

from .allocator import AllocationPlan
from .hardware import LossRow
from .network import link_label
from .ratemodel import RateReport
from .timetags import PairHistogram
from .tomography import ChannelFidelity


def report_to_dict(report: RateReport) -> dict:
    return {
        "singles": {name: rate for name, rate in sorted(report.singles.items())},
        "links": {
            link_label(link): {
                "coincidence": rates.coincidence,
                "accidental": rates.accidental,
                "car": rates.car,
            }
            for link, rates in sorted(report.links.items())
        },
        "active_links": [link_label(l) for l in report.active_links],
        "balance": {
            "max_rate": report.balance.max_rate,
            "min_rate": report.balance.min_rate,
            "score": report.balance.score,
        },
    }


def plan_to_dict(plan: AllocationPlan) -> dict:
    diagnostics = dict(plan.diagnostics)
    if "dropped_links" in diagnostics:
        diagnostics["dropped_links"] = [link_label(l) for l in diagnostics["dropped_links"]]
    return {
        "allocation": {str(i): list(link) for i, link in sorted(plan.allocation.items())},
        "active_links": [link_label(l) for l in plan.active_links],
        "objective_value": plan.objective_value,
        "report": report_to_dict(plan.predicted),
        "diagnostics": diagnostics,
    }


def loss_rows_to_dict(rows: list[LossRow]) -> dict:
    return {
        "rows": [
            {
                "n_users": r.n_users,
                "wss_loss_db": r.wss_loss_db,
                "dwdm_best_db": r.dwdm_best_db,
                "dwdm_worst_db": r.dwdm_worst_db,
            }
            for r in rows
        ]
    }


def histogram_to_dict(histogram: PairHistogram) -> dict:
    return {
        "delays_ps": [int(d) for d in histogram.delays_ps],
        "counts": [int(c) for c in histogram.counts],
        "peak_delay_ps": histogram.peak_delay_ps,
        "peak_count": histogram.peak_count,
        "peak_rate": histogram.peak_rate,
        "argmax_delay_ps": histogram.argmax_delay_ps,
    }


def histograms_to_dict(histograms: dict) -> dict:
    return {link_label(link): histogram_to_dict(h) for link, h in sorted(histograms.items())}


def scan_to_dict(scan: list[ChannelFidelity]) -> dict:
    return {
        "channels": [
            {
                "channel": r.channel_index,
                "mix": r.mix,
                "fidelity_mean": r.summary.fidelity_mean,
                "fidelity_std": r.summary.fidelity_std,
                "sample_count": r.summary.sample_count,
                "effective_sample_size": r.summary.effective_sample_size,
                "converged": r.summary.diagnostics.get("converged"),
            }
            for r in scan
        ]
    }
