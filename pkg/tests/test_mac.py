import math

import pytest
from hypothesis import given, settings, strategies as st

from wsnsim.core import node_stream
from wsnsim.mac import (
    DOT11B_NS2,
    DOT11B_OMNET,
    DOT154_DEFAULT,
    Direction,
    PROFILES,
    PhaseKind,
    airtime_ns,
    build_cca_exchange,
    build_exchange,
    build_rts_cts_exchange,
    compute_airtime,
    contention_window,
    draw_backoff,
    draw_backoff_slots,
    fit_frame_overhead,
    get_profile,
    reported_airtime_us,
)

# Published 802.11b timing table this artifact reproduces: control frames
# (one value per simulator) and data frames per payload.
CONTROL_FRAME_US = {"rts": (207, 207), "cts": (203, 202), "ack": (203, 202)}
DATA_FRAME_US = {  # payload -> (omnet-profile, ns2-profile)
    10: (246, 239),
    30: (261, 253),
    50: (275, 268),
    70: (290, 282),
    90: (304, 297),
}


class TestAirtime:
    def test_rts_matches_table_within_one_microsecond(self):
        got = compute_airtime(DOT11B_NS2, 20)
        assert got == pytest.approx(206.5454545454, rel=1e-9)
        for reported in CONTROL_FRAME_US["rts"]:
            assert abs(got - reported) <= 1.0

    def test_cts_ack_match_table_within_one_microsecond(self):
        got = compute_airtime(DOT11B_NS2, 14)
        assert got == pytest.approx(202.1818181818, rel=1e-9)
        for frame in ("cts", "ack"):
            for reported in CONTROL_FRAME_US[frame]:
                assert abs(got - reported) <= 1.0

    @pytest.mark.parametrize("payload", sorted(DATA_FRAME_US))
    def test_data_frames_match_table_for_both_overhead_presets(self, payload):
        omnet_us, ns2_us = DATA_FRAME_US[payload]
        ns2_got = compute_airtime(DOT11B_NS2, DOT11B_NS2.overhead_bytes + payload)
        omnet_got = compute_airtime(DOT11B_OMNET, DOT11B_OMNET.overhead_bytes + payload)
        assert abs(ns2_got - ns2_us) <= 1.0
        assert abs(omnet_got - omnet_us) <= 1.0
        # The floored report reproduces the cells exactly.
        assert reported_airtime_us(DOT11B_NS2, DOT11B_NS2.overhead_bytes + payload) == ns2_us
        assert reported_airtime_us(DOT11B_OMNET, DOT11B_OMNET.overhead_bytes + payload) == omnet_us

    def test_dot154_26_byte_mpdu(self):
        # 250 kbps = 32 us per byte; SHR+PHR = 192 us.
        assert compute_airtime(DOT154_DEFAULT, 26) == pytest.approx(192 + 26 * 32, abs=1e-9)
        assert airtime_ns(DOT154_DEFAULT, 26) == 1_024_000

    def test_nanosecond_airtime_rounds_half_up(self):
        # 20 bytes at 11 Mbps: 14545.45... ns of payload time.
        assert airtime_ns(DOT11B_NS2, 20) == 192_000 + 14_545

    def test_nonpositive_frame_rejected(self):
        for fn in (compute_airtime, airtime_ns, reported_airtime_us):
            with pytest.raises(ValueError):
                fn(DOT11B_NS2, 0)

    @given(st.integers(min_value=1, max_value=199))
    @settings(max_examples=60, deadline=None)
    def test_airtime_is_affine_in_frame_bytes(self, nbytes):
        # Finite difference over one byte equals 8/bitrate everywhere.
        step = compute_airtime(DOT11B_NS2, nbytes + 1) - compute_airtime(DOT11B_NS2, nbytes)
        assert step == pytest.approx(8.0 / 11.0, rel=1e-9)
        step154 = compute_airtime(DOT154_DEFAULT, nbytes + 1) - compute_airtime(DOT154_DEFAULT, nbytes)
        assert step154 == pytest.approx(32.0, rel=1e-9)


class TestRtsCtsExchange:
    def test_phase_sequence_and_total(self):
        tl = build_rts_cts_exchange(DOT11B_NS2, 10, backoff_us=0)
        kinds = [p.kind for p in tl.phases]
        assert kinds == [
            PhaseKind.DIFS, PhaseKind.BACKOFF, PhaseKind.TX, PhaseKind.SIFS,
            PhaseKind.RX, PhaseKind.SIFS, PhaseKind.TX, PhaseKind.SIFS, PhaseKind.RX,
        ]
        # 50 + 206.545 + 10 + 202.182 + 10 + 239.273 + 10 + 202.182 us
        assert tl.total_ns == 930_182
        assert tl.total_us == pytest.approx(930.182, abs=1e-9)

    def test_total_equals_sum_of_phases_exactly(self):
        tl = build_rts_cts_exchange(DOT11B_OMNET, 50, backoff_us=140)
        assert tl.total_ns == sum(p.duration_ns for p in tl.phases)

    def test_payload_increase_touches_only_the_data_phase(self):
        base = build_rts_cts_exchange(DOT11B_NS2, 10)
        bigger = build_rts_cts_exchange(DOT11B_NS2, 30)
        diffs = [
            (a.kind, b.duration_ns - a.duration_ns)
            for a, b in zip(base.phases, bigger.phases)
            if a.duration_ns != b.duration_ns
        ]
        assert len(diffs) == 1
        kind, delta_ns = diffs[0]
        assert kind is PhaseKind.TX
        assert delta_ns / 1000 == pytest.approx(8 * 20 / 11, abs=1e-3)

    def test_zero_payload_rejected(self):
        with pytest.raises(ValueError):
            build_rts_cts_exchange(DOT11B_NS2, 0)

    def test_wrong_profile_rejected(self):
        with pytest.raises(ValueError, match="dot11b"):
            build_rts_cts_exchange(DOT154_DEFAULT, 10)

    def test_data_frame_carries_overhead_plus_payload(self):
        tl = build_rts_cts_exchange(DOT11B_NS2, 40)
        data = [f for f in tl.frames() if f.role.value == "data"]
        assert len(data) == 1
        assert data[0].total_bytes == 55 + 40


class TestCcaExchange:
    def test_phase_sequence_and_total(self):
        tl = build_cca_exchange(DOT154_DEFAULT, 10, backoff_periods=0)
        kinds = [p.kind for p in tl.phases]
        assert kinds == [
            PhaseKind.BACKOFF, PhaseKind.CCA, PhaseKind.TURNAROUND,
            PhaseKind.TX, PhaseKind.TURNAROUND, PhaseKind.RX,
        ]
        # CCA 128 + turnaround 192 + data 1024 + turnaround 192 + ack 544
        assert tl.total_ns == 2_080_000

    def test_backoff_periods_add_exactly(self):
        base = build_cca_exchange(DOT154_DEFAULT, 10, backoff_periods=0)
        two = build_cca_exchange(DOT154_DEFAULT, 10, backoff_periods=2)
        assert two.total_ns - base.total_ns == 2 * 320_000

    def test_ack_airtime_is_payload_independent(self):
        small = build_cca_exchange(DOT154_DEFAULT, 10)
        large = build_cca_exchange(DOT154_DEFAULT, 90)
        assert small.phases[-1].duration_ns == large.phases[-1].duration_ns == 544_000

    def test_wrong_profile_rejected(self):
        with pytest.raises(ValueError, match="dot154"):
            build_cca_exchange(DOT11B_NS2, 10)


class TestBackoff:
    def test_seeded_draws_are_reproducible(self):
        a = [draw_backoff(DOT11B_NS2, node_stream(5, 0)) for _ in range(3)]
        b = [draw_backoff(DOT11B_NS2, node_stream(5, 0)) for _ in range(3)]
        assert a == b

    def test_attempt_zero_range_dot11b(self):
        rng = node_stream(1, 0)
        draws = [draw_backoff(DOT11B_NS2, rng, attempt=0) for _ in range(2000)]
        assert all(d % 20 == 0 for d in draws)
        assert min(d // 20 for d in draws) == 0
        assert max(d // 20 for d in draws) == 31

    def test_mean_of_uniform_backoff(self):
        rng = node_stream(17, 3)
        n = 100_000
        mean_slots = sum(draw_backoff_slots(DOT11B_NS2, rng) for _ in range(n)) / n
        assert mean_slots == pytest.approx(15.5, rel=0.02)

    def test_contention_window_doubles_and_caps(self):
        assert [contention_window(DOT11B_NS2, a) for a in range(7)] == [
            31, 63, 127, 255, 511, 1023, 1023,
        ]
        assert [contention_window(DOT154_DEFAULT, a) for a in range(4)] == [7, 15, 31, 31]

    def test_negative_attempt_rejected(self):
        with pytest.raises(ValueError):
            contention_window(DOT11B_NS2, -1)


class TestOverheadFit:
    def test_refits_ns2_preset_from_reported_table(self):
        payloads = sorted(DATA_FRAME_US)
        fit = fit_frame_overhead(payloads, [DATA_FRAME_US[p][1] for p in payloads])
        assert (fit.overhead_bytes, fit.rounding) == (55, "floor")
        assert fit.total_deviation_us == 0

    def test_refits_omnet_preset_from_reported_table(self):
        payloads = sorted(DATA_FRAME_US)
        fit = fit_frame_overhead(payloads, [DATA_FRAME_US[p][0] for p in payloads])
        assert (fit.overhead_bytes, fit.rounding) == (65, "floor")
        assert fit.total_deviation_us == 0

    def test_mismatched_inputs_rejected(self):
        with pytest.raises(ValueError):
            fit_frame_overhead([10, 20], [239])
        with pytest.raises(ValueError):
            fit_frame_overhead([], [])


class TestProfiles:
    def test_presets_addressable_by_name(self):
        assert set(PROFILES) == {"dot11b/ns2", "dot11b/omnet", "dot154/default"}
        assert get_profile("dot11b/ns2").overhead_bytes == 55
        assert get_profile("dot11b/omnet").overhead_bytes == 65
        assert get_profile("dot154/default").overhead_bytes == 16

    def test_unknown_profile_rejected(self):
        with pytest.raises(ValueError, match="unknown PHY profile"):
            get_profile("dot11g/fast")

    def test_build_exchange_dispatches_by_family(self):
        t11 = build_exchange(get_profile("dot11b/ns2"), 10, backoff_slots=2)
        assert t11.phases[1].duration_ns == 2 * 20_000
        t154 = build_exchange(get_profile("dot154/default"), 10, backoff_slots=2)
        assert t154.phases[0].duration_ns == 2 * 320_000

    def test_frame_direction_markers(self):
        tl = build_rts_cts_exchange(DOT11B_NS2, 10)
        directions = [p.direction for p in tl.phases if p.frame is not None]
        assert directions == [
            Direction.SENDER, Direction.RECEIVER, Direction.SENDER, Direction.RECEIVER,
        ]
