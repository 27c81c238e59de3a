import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexqnet.hardware import (
    DwdmModel,
    WssModel,
    crossover_users,
    dwdm_best_loss,
    dwdm_filter_count,
    dwdm_worst_loss,
    fully_connected_capacity,
    loss_table,
)

DWDM = DwdmModel(reflection_loss_db=0.25, transmission_loss_db=0.6)
TESTBED_WSS = WssModel(
    port_count=4,
    insertion_loss_db=4.5,
    resolution_ghz=20.0,
    addressability_ghz=4.0,
    total_bandwidth_ghz=9000.0,
)
SCALED_WSS = WssModel(
    port_count=20,
    insertion_loss_db=4.5,
    resolution_ghz=6.25,
    addressability_ghz=6.25,
    total_bandwidth_ghz=4800.0,
)


class TestFilterCount:
    def test_twenty_users_need_740(self):
        assert dwdm_filter_count(20) == 740

    def test_minimum_network(self):
        assert dwdm_filter_count(2) == 2

    def test_four_users(self):
        assert dwdm_filter_count(4) == 20

    def test_rejects_single_user(self):
        with pytest.raises(ValueError):
            dwdm_filter_count(1)

    @given(st.integers(min_value=2, max_value=500))
    def test_discrete_derivative(self, n):
        assert dwdm_filter_count(n + 1) - dwdm_filter_count(n) == 4 * n - 1


class TestWorstLoss:
    def test_sixteen_users(self):
        assert dwdm_worst_loss(DWDM, 16) == pytest.approx(60.6)

    def test_two_users(self):
        assert dwdm_worst_loss(DWDM, 2) == pytest.approx(1.1)

    def test_lossless_filters(self):
        lossless = DwdmModel(reflection_loss_db=0.0, transmission_loss_db=0.0)
        for n in (2, 5, 50):
            assert dwdm_worst_loss(lossless, n) == 0.0

    @given(st.integers(min_value=2, max_value=200))
    def test_strictly_increasing(self, n):
        assert dwdm_worst_loss(DWDM, n + 1) > dwdm_worst_loss(DWDM, n)


class TestBestLoss:
    def test_default_two_transmissions(self):
        assert dwdm_best_loss(DWDM, 4) == pytest.approx(1.2)

    def test_reflection_plus_transmission_mode(self):
        model = DwdmModel(best_case_mode="reflection_plus_transmission")
        assert dwdm_best_loss(model, 4) == pytest.approx(0.85)

    def test_lossless_transmission(self):
        model = DwdmModel(reflection_loss_db=0.25, transmission_loss_db=0.0)
        assert dwdm_best_loss(model, 4) == 0.0

    @given(st.integers(min_value=2, max_value=200))
    def test_independent_of_user_count(self, n):
        assert dwdm_best_loss(DWDM, n) == dwdm_best_loss(DWDM, 2)


class TestCrossover:
    def test_testbed_defaults(self):
        assert crossover_users(TESTBED_WSS, DWDM) == 5
        assert dwdm_worst_loss(DWDM, 4) == pytest.approx(3.6)
        assert dwdm_worst_loss(DWDM, 5) == pytest.approx(5.6)

    def test_free_switch_wins_immediately(self):
        wss = WssModel(4, 0.0, 20.0, 4.0, 9000.0)
        assert crossover_users(wss, DWDM) == 2

    def test_large_insertion_loss(self):
        wss = WssModel(4, 60.6, 20.0, 4.0, 9000.0)
        assert crossover_users(wss, DWDM) == 17

    def test_zero_reflection_is_domain_error(self):
        with pytest.raises(ValueError):
            crossover_users(TESTBED_WSS, DwdmModel(reflection_loss_db=0.0))

    @given(st.floats(min_value=0.0, max_value=80.0))
    @settings(max_examples=50)
    def test_bracketing_invariant(self, insertion):
        wss = WssModel(4, insertion, 20.0, 4.0, 9000.0)
        n = crossover_users(wss, DWDM)
        assert dwdm_worst_loss(DWDM, n) > insertion
        if n > 2:
            assert dwdm_worst_loss(DWDM, n - 1) <= insertion


class TestCapacity:
    def test_twenty_user_projection(self):
        assert fully_connected_capacity(SCALED_WSS, 12.5) == 20

    def test_wider_slices(self):
        # integer scan: 14*13*25 = 4550 <= 4800 while 15*14*25 = 5250 > 4800
        assert fully_connected_capacity(SCALED_WSS, 25.0) == 14

    def test_port_bound_dominates(self):
        wss = WssModel(2, 4.5, 6.25, 6.25, 1e6)
        assert fully_connected_capacity(wss, 12.5) == 2

    def test_below_resolution_rejected(self):
        with pytest.raises(ValueError):
            fully_connected_capacity(SCALED_WSS, 5.0)

    def oracle_scan(self, wss, width):
        best = 1
        n = 2
        while n <= wss.port_count and n * (n - 1) * width <= wss.total_bandwidth_ghz:
            best = n
            n += 1
        return best

    @given(
        bandwidth=st.floats(min_value=100.0, max_value=20000.0),
        width=st.floats(min_value=6.25, max_value=200.0),
        ports=st.integers(min_value=1, max_value=40),
    )
    @settings(max_examples=80)
    def test_matches_integer_scan_oracle(self, bandwidth, width, ports):
        wss = WssModel(ports, 4.5, 6.25, 6.25, bandwidth)
        assert fully_connected_capacity(wss, width) == self.oracle_scan(wss, width)

    @given(
        bandwidth=st.floats(min_value=100.0, max_value=20000.0),
        width=st.floats(min_value=6.25, max_value=200.0),
    )
    @settings(max_examples=40)
    def test_monotone_in_bandwidth_and_width(self, bandwidth, width):
        wss_small = WssModel(40, 4.5, 6.25, 6.25, bandwidth)
        wss_big = WssModel(40, 4.5, 6.25, 6.25, bandwidth * 2)
        assert fully_connected_capacity(wss_big, width) >= fully_connected_capacity(
            wss_small, width
        )
        assert fully_connected_capacity(wss_small, width) >= fully_connected_capacity(
            wss_small, width * 2
        )


class TestLossTable:
    def test_paper_range(self):
        rows = loss_table(TESTBED_WSS, DWDM, range(2, 17))
        assert len(rows) == 15
        assert rows[-1].dwdm_worst_db == pytest.approx(60.6)

    def test_wss_column_constant(self):
        rows = loss_table(TESTBED_WSS, DWDM, range(2, 17))
        assert {r.wss_loss_db for r in rows} == {4.5}

    def test_worst_column_monotone(self):
        rows = loss_table(TESTBED_WSS, DWDM, range(2, 17))
        worst = [r.dwdm_worst_db for r in rows]
        assert worst == sorted(worst)

    def test_empty_range_rejected(self):
        with pytest.raises(ValueError):
            loss_table(TESTBED_WSS, DWDM, range(5, 5))
