import numpy as np
import pytest

from flexqnet.network import make_link
from flexqnet.ratemodel import predict_report
from flexqnet.timetags import (
    StreamOrderError,
    TimetagStream,
    count_coincidences,
    pair_histogram,
    read_binary,
    read_text,
    simulate_timetags,
    write_binary,
    write_text,
)

from helpers import ideal_detector, uniform_network


def small_network(**kwargs):
    defaults = dict(n_channels=4, flux_per_channel=2000.0)
    defaults.update(kwargs)
    return uniform_network(
        [
            ("u1", ideal_detector(0.8, jitter=40.0), 0.0),
            ("u2", ideal_detector(0.5, jitter=40.0), 0.0),
        ],
        **defaults,
    )


def full_allocation(net):
    link = make_link(net.users[0].name, net.users[1].name)
    return {ch.index: link for ch in net.channels}


class TestSimulateTimetags:
    def test_deterministic_from_seed(self):
        net = small_network()
        a = simulate_timetags(net, full_allocation(net), 0.5, seed=11)
        b = simulate_timetags(net, full_allocation(net), 0.5, seed=11)
        for name in a.times_ps:
            assert np.array_equal(a.times_ps[name], b.times_ps[name])

    def test_different_seeds_differ(self):
        net = small_network()
        a = simulate_timetags(net, full_allocation(net), 0.5, seed=11)
        b = simulate_timetags(net, full_allocation(net), 0.5, seed=12)
        assert any(
            not np.array_equal(a.times_ps[n], b.times_ps[n]) for n in a.times_ps
        )

    def test_zero_efficiency_leaves_only_darks(self):
        net = uniform_network(
            [
                ("u1", ideal_detector(0.0, dark=5000.0), 0.0),
                ("u2", ideal_detector(0.0), 0.0),
            ]
        )
        stream = simulate_timetags(net, full_allocation(net), 1.0, seed=3)
        assert stream.times_ps["u2"].size == 0
        assert stream.times_ps["u1"].size > 0  # darks only

    def test_streams_sorted_and_bounded(self):
        net = small_network()
        stream = simulate_timetags(net, full_allocation(net), 0.25, seed=5)
        limit = int(0.25 * 1e12)
        for times in stream.times_ps.values():
            assert np.all(np.diff(times) >= 0)
            if times.size:
                assert times.min() >= 0 and times.max() < limit

    def test_singles_match_prediction_over_seeds(self):
        net = small_network()
        allocation = full_allocation(net)
        report = predict_report(net, allocation)
        duration = 1.0
        counts = {name: 0 for name in report.singles}
        n_seeds = 100
        for seed in range(n_seeds):
            stream = simulate_timetags(net, allocation, duration, seed=seed)
            for name in counts:
                counts[name] += stream.times_ps[name].size
        for name, total in counts.items():
            expected = report.singles[name] * duration * n_seeds
            assert abs(total - expected) <= 3.0 * np.sqrt(expected)


class TestCountCoincidences:
    def test_inserted_simultaneous_events(self):
        k = 17
        base = np.arange(1, k + 1, dtype=np.int64) * 1_000_000
        extra = np.array([123_456_789], dtype=np.int64)
        stream = TimetagStream(
            times_ps={"u1": base, "u2": np.sort(np.concatenate([base, extra]))},
            duration_s=1.0,
            seed=0,
        )
        histograms = count_coincidences(stream, window_ps=1024)
        assert histograms[("u1", "u2")].peak_count == k

    def test_flat_background_matches_accidental_formula(self):
        rate_u, rate_v, duration = 20_000.0, 15_000.0, 5.0
        rng = np.random.default_rng(77)
        times_u = np.sort(
            rng.integers(0, int(duration * 1e12), size=rng.poisson(rate_u * duration))
        ).astype(np.int64)
        times_v = np.sort(
            rng.integers(0, int(duration * 1e12), size=rng.poisson(rate_v * duration))
        ).astype(np.int64)
        stream = TimetagStream(
            times_ps={"u1": times_u, "u2": times_v}, duration_s=duration, seed=0
        )
        hist = count_coincidences(stream, window_ps=1024, span_ps=60_000)[("u1", "u2")]
        expected_per_bin = rate_u * rate_v * 1024e-12 * duration
        mean_bin = hist.counts.mean()
        assert abs(mean_bin - expected_per_bin) <= 4.0 * np.sqrt(
            expected_per_bin / hist.counts.size
        )

    def test_offsets_separate_peak_positions(self, paper_network):
        offsets = paper_network.offsets_ps
        positions = {}
        for u, v in paper_network.links:
            positions[(u, v)] = offsets.get(u, 0) - offsets.get(v, 0)
        values = list(positions.values())
        assert len(set(values)) == len(values)
        assert all(v % 10_000 == 0 for v in values)

    def test_unsorted_stream_rejected(self):
        bad = np.array([5, 3, 9], dtype=np.int64)
        good = np.array([1, 2, 3], dtype=np.int64)
        with pytest.raises(StreamOrderError):
            pair_histogram(bad, good, 1.0, 1024, 10_000)

    def test_swap_and_negate_mirrors_histogram(self):
        rng = np.random.default_rng(5)
        t_u = np.sort(rng.integers(0, int(1e12), size=4000)).astype(np.int64)
        t_v = np.sort(rng.integers(0, int(1e12), size=3000)).astype(np.int64)
        fwd = pair_histogram(t_u, t_v, 1.0, 1024, 30_000, 7_000, 3_000)
        rev = pair_histogram(t_v, t_u, 1.0, 1024, 30_000, -3_000, -7_000)
        assert np.array_equal(fwd.counts, rev.counts[::-1])
        # both axes are centered on the same calibrated peak position
        shift = 7_000 - 3_000
        assert np.array_equal(fwd.delays_ps + rev.delays_ps[::-1], np.full(fwd.delays_ps.size, 2 * shift))

    def test_monte_carlo_error_shrinks_with_duration(self):
        net = small_network(flux_per_channel=5000.0)
        allocation = full_allocation(net)
        link = make_link("u1", "u2")
        report = predict_report(net, allocation)
        predicted = report.links[link].coincidence + report.links[link].accidental
        errors = {}
        for duration in (1.0, 4.0, 16.0):
            rates = []
            for seed in range(6):
                stream = simulate_timetags(net, allocation, duration, seed=seed)
                hist = count_coincidences(stream, net.window_ps)[link]
                rates.append(hist.peak_rate)
            errors[duration] = abs(np.mean(rates) - predicted) / predicted
        # 16x the duration should beat 1x by roughly sqrt scaling; allow slack
        assert errors[16.0] < max(errors[1.0], 1e-4) * 1.5


class TestStreamIO:
    def make_stream(self):
        net = small_network()
        return net, simulate_timetags(net, full_allocation(net), 0.1, seed=21)

    def test_binary_round_trip(self, tmp_path):
        net, stream = self.make_stream()
        order = [u.name for u in net.users]
        path = tmp_path / "tags.bin"
        write_binary(stream, path, order)
        loaded = read_binary(path, order, stream.duration_s)
        for name in order:
            assert np.array_equal(loaded.times_ps[name], stream.times_ps[name])

    def test_binary_record_layout(self, tmp_path):
        stream = TimetagStream(
            times_ps={"a": np.array([7], dtype=np.int64), "b": np.array([3], dtype=np.int64)},
            duration_s=1.0,
            seed=0,
        )
        path = tmp_path / "tags.bin"
        write_binary(stream, path, ["a", "b"])
        raw = path.read_bytes()
        assert len(raw) == 18  # two 9-byte records, chronological
        assert raw[0] == 1 and int.from_bytes(raw[1:9], "little") == 3
        assert raw[9] == 0 and int.from_bytes(raw[10:18], "little") == 7

    def test_text_round_trip(self, tmp_path):
        net, stream = self.make_stream()
        path = tmp_path / "tags.txt"
        write_text(stream, path)
        loaded = read_text(path, stream.duration_s)
        for name in stream.times_ps:
            assert np.array_equal(loaded.times_ps[name], stream.times_ps[name])
