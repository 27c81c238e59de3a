"""Report writers: delimiter-separated tables with matching figures.

Every CLI report lands as machine-readable text plus a rendered PNG next
to it, so runs can be grepped and eyeballed without re-running anything.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .allocator import AllocationPlan
from .hardware import LossRow
from .network import Allocation, NetworkModel, link_label
from .ratemodel import RateReport
from .timetags import PairHistogram
from .tomography import ChannelFidelity

LINK_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown",
               "tab:pink", "tab:gray", "tab:olive", "tab:cyan")


def write_table(path: str | Path, header, rows, delimiter: str = "\t") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(delimiter.join(str(h) for h in header) + "\n")
        for row in rows:
            fh.write(delimiter.join(_format(v) for v in row) + "\n")
    return path


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def loss_table_rows(rows: list[LossRow]):
    return [(r.n_users, r.wss_loss_db, r.dwdm_best_db, r.dwdm_worst_db) for r in rows]


def loss_figure(rows: list[LossRow], path: str | Path) -> Path:
    ns = [r.n_users for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.fill_between(
        ns,
        [r.dwdm_best_db for r in rows],
        [r.dwdm_worst_db for r in rows],
        alpha=0.25,
        color="tab:red",
        label="DWDM tree (best to worst band)",
    )
    ax.plot(ns, [r.dwdm_worst_db for r in rows], "-", color="tab:red")
    ax.plot(ns, [r.wss_loss_db for r in rows], "-", color="tab:blue", label="switch (all bands)")
    ax.set_xlabel("users")
    ax.set_ylabel("distribution loss (dB)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def report_rows(report: RateReport):
    singles = [("singles", name, rate, "", "") for name, rate in sorted(report.singles.items())]
    links = [
        (
            "link",
            link_label(link),
            rates.coincidence,
            rates.accidental,
            rates.car if rates.car is not None else "",
        )
        for link, rates in sorted(report.links.items())
    ]
    return singles + links


def rates_figure(report: RateReport, path: str | Path, title: str = "") -> Path:
    links = sorted(report.links)
    rates = [report.links[l].coincidence for l in links]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.bar(range(len(links)), rates, color=[LINK_COLORS[i % len(LINK_COLORS)] for i in range(len(links))])
    ax.set_xticks(range(len(links)))
    ax.set_xticklabels([link_label(l) for l in links], rotation=45, ha="right")
    ax.set_ylabel("coincidences (s$^{-1}$)")
    if any(r > 0 for r in rates):
        ax.set_yscale("log")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def allocation_map_figure(
    network: NetworkModel, allocation: Allocation, path: str | Path, title: str = ""
) -> Path:
    """Mirror-symmetric strip of the carved grid, colored by owning link.

    Idler slices sit at negative detuning, signal slices at positive, the
    stopband in the middle; unassigned channels stay hatched gray.
    """
    links = sorted({tuple(l) for l in allocation.values()})
    colors = {link: LINK_COLORS[i % len(LINK_COLORS)] for i, link in enumerate(links)}
    fig, ax = plt.subplots(figsize=(7, 2.6))
    for channel in network.channels:
        link = allocation.get(channel.index)
        color = colors.get(tuple(link)) if link else "0.85"
        hatch = None if link else "//"
        for sl in (channel.signal, channel.idler):
            ax.axvspan(sl.lower_ghz, sl.upper_ghz, color=color, hatch=hatch, alpha=0.9)
        ax.text(
            (channel.signal.lower_ghz + channel.signal.upper_ghz) / 2,
            0.5,
            str(channel.index),
            ha="center",
            va="center",
            fontsize=7,
        )
    half_stop = network.spectrum.stopband_halfwidth_ghz
    if half_stop > 0:
        ax.axvspan(-half_stop, half_stop, color="k", alpha=0.15)
    handles = [plt.Rectangle((0, 0), 1, 1, color=colors[l]) for l in links]
    if handles:
        ax.legend(handles, [link_label(l) for l in links], ncol=3, fontsize=7, loc="upper center",
                  bbox_to_anchor=(0.5, -0.25))
    edge = max(ch.signal.upper_ghz for ch in network.channels)
    ax.set_xlim(-edge * 1.02, edge * 1.02)
    ax.set_yticks([])
    ax.set_xlabel("detuning (GHz)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plan_rows(plan: AllocationPlan):
    rows = []
    for link in sorted(plan.predicted.links):
        assigned = sorted(i for i, l in plan.allocation.items() if tuple(l) == link)
        rows.append(
            (
                link_label(link),
                "active" if link in plan.active_links else "dropped",
                ",".join(str(i) for i in assigned),
                plan.predicted.links[link].coincidence,
            )
        )
    return rows


def histogram_rows(histograms: dict):
    rows = []
    for link in sorted(histograms):
        h: PairHistogram = histograms[link]
        for delay, count in zip(h.delays_ps, h.counts):
            rows.append((link_label(link), int(delay), int(count)))
    return rows


def histogram_figure(histograms: dict, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, link in enumerate(sorted(histograms)):
        h: PairHistogram = histograms[link]
        ax.step(
            h.delays_ps / 1000.0,
            h.counts + 0.1,  # keep zero bins visible on the log axis
            where="mid",
            label=link_label(link),
            color=LINK_COLORS[i % len(LINK_COLORS)],
        )
    ax.set_yscale("log")
    ax.set_xlabel("delay (ns)")
    ax.set_ylabel("counts per bin")
    ax.legend(fontsize=7, ncol=3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def fidelity_rows(scan: list[ChannelFidelity]):
    return [
        (
            r.channel_index,
            r.mix,
            r.summary.fidelity_mean,
            r.summary.fidelity_std,
            r.summary.sample_count,
            f"{r.summary.effective_sample_size:.1f}",
            r.summary.diagnostics.get("converged", ""),
        )
        for r in scan
    ]


def fidelity_figure(scan: list[ChannelFidelity], path: str | Path) -> Path:
    idx = [r.channel_index for r in scan]
    means = [r.summary.fidelity_mean for r in scan]
    stds = [r.summary.fidelity_std for r in scan]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.errorbar(idx, means, yerr=stds, fmt="o", capsize=3)
    ax.axhline(0.95, color="0.5", linestyle="--", linewidth=1)
    ax.set_xlabel("channel")
    ax.set_ylabel("singlet fidelity (posterior mean)")
    ax.set_ylim(min(0.2, min(means) - 0.05), 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
