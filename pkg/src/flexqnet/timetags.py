"""Monte Carlo time-tag simulation and coincidence counting.

Pair events are homogeneous Poisson processes per assigned channel. Each
photon is detected with probability efficiency * transmittance, subject to
its detector gate. When the two gates of a link share one clock, the gate
phase is sampled once per pair, so joint gate survival is min(duty) while
per-photon marginals stay duty * efficiency * transmittance; independent
gates draw separate phases. Detection times carry Gaussian jitter and are
recorded at 1 ps granularity.

Coincidences are counted per user pair by sweeping the two sorted streams
once and histogramming time differences into window-wide bins. Electronic
per-user offsets shift where each link's peak sits on the shared delay
axis; each pair's counting window stays centered on its own calibrated
peak, as a hardware correlator would be configured.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .network import (
    SYNCHRONIZED,
    Allocation,
    Link,
    NetworkModel,
    make_link,
    validate_allocation,
)
from .ratemodel import user_transmittance

PS_PER_S = 1e12
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

RECORD_FORMAT = "<BQ"  # user id byte, then unsigned 8-byte picoseconds
RECORD_SIZE = struct.calcsize(RECORD_FORMAT)


class StreamOrderError(ValueError):
    """A time-tag stream was not sorted in time."""


@dataclass
class TimetagStream:
    """Detection times (ps since run start) per user, plus run metadata."""

    times_ps: dict[str, np.ndarray]
    duration_s: float
    seed: int

    def __post_init__(self):
        limit = int(self.duration_s * PS_PER_S)
        for name, times in self.times_ps.items():
            if times.size and (times.min() < 0 or times.max() >= limit):
                raise ValueError(f"stream {name!r} has times outside [0, duration)")

    def counts(self) -> dict[str, int]:
        return {name: int(t.size) for name, t in self.times_ps.items()}


def simulate_timetags(
    network: NetworkModel,
    allocation: Allocation,
    duration_s: float,
    seed: int,
) -> TimetagStream:
    """Simulate detection streams for every user; reproducible from seed."""
    if duration_s <= 0:
        raise ValueError("duration_s must be > 0")
    validate_allocation(allocation, network)
    rng = np.random.default_rng(seed)
    synchronized = network.gating == SYNCHRONIZED

    collected: dict[str, list[np.ndarray]] = {u.name: [] for u in network.users}

    for index in sorted(allocation):
        link = make_link(*allocation[index])
        u, v = (network.user(link[0]), network.user(link[1]))
        flux = network.channel_fluxes[index]
        n_pairs = rng.poisson(flux * duration_s)
        if n_pairs == 0:
            continue
        t_pair = rng.uniform(0.0, duration_s, size=n_pairs)

        p_u = u.detector.efficiency * user_transmittance(network, u)
        p_v = v.detector.efficiency * user_transmittance(network, v)
        hit_u = rng.uniform(size=n_pairs) < p_u
        hit_v = rng.uniform(size=n_pairs) < p_v
        if synchronized:
            gate = rng.uniform(size=n_pairs)
            hit_u &= gate < u.detector.duty_cycle
            hit_v &= gate < v.detector.duty_cycle
        else:
            hit_u &= rng.uniform(size=n_pairs) < u.detector.duty_cycle
            hit_v &= rng.uniform(size=n_pairs) < v.detector.duty_cycle

        for user, hits in ((u, hit_u), (v, hit_v)):
            t = t_pair[hits]
            sigma = user.detector.jitter_fwhm_ps * FWHM_TO_SIGMA / PS_PER_S
            if sigma > 0 and t.size:
                t = t + rng.normal(0.0, sigma, size=t.size)
            collected[user.name].append(t)

    for user in network.users:
        dark = user.detector.dark_rate * user.detector.duty_cycle
        n_dark = rng.poisson(dark * duration_s)
        if n_dark:
            collected[user.name].append(rng.uniform(0.0, duration_s, size=n_dark))

    limit = int(duration_s * PS_PER_S)
    times_ps = {}
    for name, parts in collected.items():
        if parts:
            t = np.concatenate(parts)
            ticks = np.rint(t * PS_PER_S).astype(np.int64)
            ticks = ticks[(ticks >= 0) & (ticks < limit)]
            ticks.sort()
        else:
            ticks = np.empty(0, dtype=np.int64)
        times_ps[name] = ticks
    return TimetagStream(times_ps=times_ps, duration_s=duration_s, seed=seed)


@dataclass(frozen=True)
class PairHistogram:
    """Delay histogram for one user pair.

    delays_ps are bin centers on the shared (offset-shifted) axis; the
    calibrated peak sits in the central bin. peak_rate is that bin's
    counts divided by the run duration.
    """

    link: Link
    delays_ps: np.ndarray
    counts: np.ndarray
    peak_delay_ps: int
    peak_count: int
    peak_rate: float
    argmax_delay_ps: int


def pair_histogram(
    times_u: np.ndarray,
    times_v: np.ndarray,
    duration_s: float,
    window_ps: int,
    span_ps: int,
    offset_u_ps: int = 0,
    offset_v_ps: int = 0,
    link: Link = ("u", "v"),
) -> PairHistogram:
    """Histogram of (t_u - t_v) differences in window-wide bins.

    Bins cover +- span around the calibrated peak; the sweep advances a
    match window through the second stream once, so cost is linear in
    events plus matches.
    """
    for times in (times_u, times_v):
        if times.size > 1 and np.any(np.diff(times) < 0):
            raise StreamOrderError("streams must be sorted before counting")
    w = int(window_ps)
    n_side = max(1, math.ceil(span_ps / w))
    half_reach = (n_side + 0.5) * w

    lo = np.searchsorted(times_v, times_u - half_reach, side="left")
    hi = np.searchsorted(times_v, times_u + half_reach, side="right")
    lengths = hi - lo
    total = int(lengths.sum())
    counts = np.zeros(2 * n_side + 1, dtype=np.int64)
    if total:
        starts = np.repeat(lo, lengths)
        offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        dt = np.repeat(times_u, lengths) - times_v[starts + offsets]
        k = np.floor_divide(dt + w // 2, w)
        k = k[np.abs(k) <= n_side].astype(np.int64)
        counts += np.bincount((k + n_side).astype(np.intp), minlength=2 * n_side + 1)

    shift = int(offset_u_ps) - int(offset_v_ps)
    delays = shift + w * np.arange(-n_side, n_side + 1, dtype=np.int64)
    peak_count = int(counts[n_side])
    return PairHistogram(
        link=link,
        delays_ps=delays,
        counts=counts,
        peak_delay_ps=shift,
        peak_count=peak_count,
        peak_rate=peak_count / duration_s,
        argmax_delay_ps=int(delays[int(np.argmax(counts))]),
    )


def count_coincidences(
    stream: TimetagStream,
    window_ps: int,
    offsets_ps: dict[str, int] | None = None,
    span_ps: int = 60_000,
) -> dict[Link, PairHistogram]:
    """Coincidence histograms for every user pair in the stream."""
    if window_ps <= 0:
        raise ValueError("window_ps must be > 0")
    offsets_ps = offsets_ps or {}
    results: dict[Link, PairHistogram] = {}
    for u, v in combinations(sorted(stream.times_ps), 2):
        results[(u, v)] = pair_histogram(
            stream.times_ps[u],
            stream.times_ps[v],
            stream.duration_s,
            window_ps,
            span_ps,
            offset_u_ps=offsets_ps.get(u, 0),
            offset_v_ps=offsets_ps.get(v, 0),
            link=(u, v),
        )
    return results


def write_binary(stream: TimetagStream, path: str | Path, user_order: list[str]) -> None:
    """Write merged chronological records: user id byte + uint64 ps, LE."""
    ids = {name: i for i, name in enumerate(user_order)}
    chunks = []
    for name, times in stream.times_ps.items():
        if name not in ids:
            raise ValueError(f"stream user {name!r} missing from user_order")
        chunks.append(np.stack([np.full(times.size, ids[name], dtype=np.int64), times]))
    merged = (
        np.concatenate(chunks, axis=1) if chunks else np.empty((2, 0), dtype=np.int64)
    )
    order = np.lexsort((merged[0], merged[1]))
    with open(path, "wb") as fh:
        for uid, t in merged[:, order].T:
            fh.write(struct.pack(RECORD_FORMAT, int(uid), int(t)))


def read_binary(path: str | Path, user_order: list[str], duration_s: float, seed: int = 0) -> TimetagStream:
    data = Path(path).read_bytes()
    if len(data) % RECORD_SIZE:
        raise ValueError(f"truncated record file: {len(data)} bytes")
    times: dict[str, list[int]] = {name: [] for name in user_order}
    for i in range(0, len(data), RECORD_SIZE):
        uid, t = struct.unpack_from(RECORD_FORMAT, data, i)
        if uid >= len(user_order):
            raise ValueError(f"record user id {uid} out of range")
        times[user_order[uid]].append(t)
    return TimetagStream(
        times_ps={k: np.asarray(v, dtype=np.int64) for k, v in times.items()},
        duration_s=duration_s,
        seed=seed,
    )


def write_text(stream: TimetagStream, path: str | Path, delimiter: str = "\t") -> None:
    """Merged chronological text records: user name, time in ps."""
    rows = []
    for name, times in stream.times_ps.items():
        rows.extend((int(t), name) for t in times)
    rows.sort()
    with open(path, "w") as fh:
        fh.write(f"user{delimiter}time_ps\n")
        for t, name in rows:
            fh.write(f"{name}{delimiter}{t}\n")


def read_text(path: str | Path, duration_s: float, seed: int = 0, delimiter: str = "\t") -> TimetagStream:
    times: dict[str, list[int]] = {}
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("user"):
            raise ValueError("missing time-tag text header")
        for line in fh:
            name, t = line.rstrip("\n").split(delimiter)
            times.setdefault(name, []).append(int(t))
    return TimetagStream(
        times_ps={k: np.asarray(sorted(v), dtype=np.int64) for k, v in times.items()},
        duration_s=duration_s,
        seed=seed,
    )
