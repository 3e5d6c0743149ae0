"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS/FAIL line of
every criterion as it completes.  Criterion 8 executes the full scaling
benchmark (4 to 512 nodes) and takes a few minutes; everything else finishes
in seconds.
"""

import time

import pytest

from wsnsim.core import Engine, seconds
from wsnsim.energy import UnitMode
from wsnsim.harness import (
    SweepGrid,
    bench_scale,
    emit_csv,
    energy_csv_text,
    linear_fit,
    run_scenario,
    sweep_energy,
)
from wsnsim.mac import (
    DOT11B_NS2,
    DOT11B_OMNET,
    compute_airtime,
    fit_frame_overhead,
    reported_airtime_us,
)
from wsnsim.scenario import MeshScenario, PingApp, PingScenario
from wsnsim.evalkit import comparison_table, load_bundled

# Published 802.11b timings reproduced by this artifact (microseconds).
CONTROL_FRAME_US = {"rts": (207, 207), "cts": (203, 202), "ack": (203, 202)}
DATA_FRAME_US = {10: (246, 239), 30: (261, 253), 50: (275, 268),
                  70: (290, 282), 90: (304, 297)}


def _verdict(criterion: int, label: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] criterion {criterion:>2}: {status} - {label}{suffix}")
    assert ok, f"criterion {criterion} failed: {label}{suffix}"


# --- closed-form oracle, independent of the mac/energy modules -------------
# 802.11b long preamble + PLCP header is 192 us; all frames at 11 Mbit/s;
# durations as integer nanoseconds, payload term rounded half up.

def _oracle_airtime_ns(frame_bytes: int) -> int:
    return 192_000 + (8 * frame_bytes * 10**9 + 5_500_000) // 11_000_000


def _oracle_sender_active_aj(payload: int, overhead: int = 55) -> int:
    tx_nw, rx_nw = 750_000_000, 220_000_000  # 750 mW / 220 mW
    tx_time = _oracle_airtime_ns(20) + _oracle_airtime_ns(overhead + payload)  # RTS+DATA
    rx_time = 2 * _oracle_airtime_ns(14)                                       # CTS+ACK
    return tx_nw * tx_time + rx_nw * rx_time


def test_criterion_01_control_frame_airtimes():
    rts = compute_airtime(DOT11B_NS2, 20)
    ctl = compute_airtime(DOT11B_NS2, 14)
    ok = all(abs(rts - v) <= 1.0 for v in CONTROL_FRAME_US["rts"])
    for frame in ("cts", "ack"):
        ok = ok and all(abs(ctl - v) <= 1.0 for v in CONTROL_FRAME_US[frame])
    _verdict(1, "control-frame airtimes within 1 us of the published table", ok,
             f"RTS {rts:.2f} us, CTS/ACK {ctl:.2f} us")


def test_criterion_02_data_frame_airtimes_and_overhead_fit():
    start = time.perf_counter()
    ok = True
    for payload, (omnet_us, ns2_us) in DATA_FRAME_US.items():
        ns2 = compute_airtime(DOT11B_NS2, DOT11B_NS2.overhead_bytes + payload)
        omn = compute_airtime(DOT11B_OMNET, DOT11B_OMNET.overhead_bytes + payload)
        ok = ok and abs(ns2 - ns2_us) <= 1.0 and abs(omn - omnet_us) <= 1.0
        ok = ok and reported_airtime_us(DOT11B_NS2, 55 + payload) == ns2_us
        ok = ok and reported_airtime_us(DOT11B_OMNET, 65 + payload) == omnet_us
    payloads = sorted(DATA_FRAME_US)
    ns2_fit = fit_frame_overhead(payloads, [DATA_FRAME_US[p][1] for p in payloads])
    omn_fit = fit_frame_overhead(payloads, [DATA_FRAME_US[p][0] for p in payloads])
    ok = ok and (ns2_fit.overhead_bytes, ns2_fit.rounding) == (55, "floor")
    ok = ok and (omn_fit.overhead_bytes, omn_fit.rounding) == (65, "floor")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1.0
    _verdict(2, "data-frame airtimes and brute-force overhead fit", ok,
             f"fits ns2={ns2_fit.overhead_bytes}/{ns2_fit.rounding} "
             f"omnet={omn_fit.overhead_bytes}/{omn_fit.rounding} in {elapsed:.2f} s")


def _per_interval_j(report) -> float:
    intervals = int(report.sim_duration_s * report.freq_hz + 1e-9)
    return report.node_total_aj(0) / 1e18 / intervals


def test_criterion_03_inter_profile_energy_gap():
    ok = True
    gaps = []
    for payload in range(10, 100, 10):
        ns2 = run_scenario(PingScenario(protocol="dot11b/ns2", payload_bytes=payload,
                                        frequency_hz=1.0, seed=1), track_intervals=False)
        omn = run_scenario(PingScenario(protocol="dot11b/omnet", payload_bytes=payload,
                                        frequency_hz=1.0, seed=1), track_intervals=False)
        gap = (_per_interval_j(omn) - _per_interval_j(ns2)) / _per_interval_j(ns2)
        gaps.append(gap)
        ok = ok and 0.0 < gap < 0.05
    _verdict(3, "omnet-profile interval energy exceeds ns2-profile by (0, 5)%", ok,
             f"gap range [{min(gaps) * 100:.3f}%, {max(gaps) * 100:.3f}%]")


def test_criterion_04_energy_oracle():
    oracle_aj = _oracle_sender_active_aj(10)
    scenario = PingScenario(protocol="dot11b/ns2", payload_bytes=10, frequency_hz=1.0, seed=1)
    engine = Engine(scenario.seed)
    app = PingApp(engine, scenario, model_kind="sm")
    engine.run_until(seconds(scenario.duration_s))
    app.finish()
    # Sender-role active energy of the first interval's request exchange:
    # the first two tx deltas (RTS, DATA) and first two rx deltas (CTS, ACK).
    period_ns = scenario.period_ns
    first = [e for e in app.bindings[0].trace.entries if e[0] < period_ns]
    tx = [delta for _, cat, delta in first if cat == "tx"][:2]
    rx = [delta for _, cat, delta in first if cat == "rx"][:2]
    measured_aj = sum(tx) + sum(rx)
    rel = abs(measured_aj - oracle_aj) / oracle_aj
    ok = len(tx) == 2 and len(rx) == 2 and rel <= 1e-9
    _verdict(4, "per-interval sender active energy equals the closed-form oracle", ok,
             f"oracle {oracle_aj / 1e12:.5f} uJ, measured {measured_aj / 1e12:.5f} uJ, "
             f"rel diff {rel:.2e}")


def test_criterion_05_model_equivalence_on_the_full_sweep():
    grid = SweepGrid()
    sm = sweep_energy(grid, seed=1, model="sm")
    hier = sweep_energy(grid, seed=1, model="hier")
    charge = sweep_energy(grid, seed=1, model="hier", unit_mode=UnitMode.CHARGE_CURRENT)
    ok = len(sm) == len(hier) == len(charge) == 54
    worst = 0.0
    for a, b in zip(sm, hier):
        for node in (0, 1):
            ta, tb = a.node_total_aj(node), b.node_total_aj(node)
            rel = abs(ta - tb) / ta
            worst = max(worst, rel)
            ok = ok and rel <= 1e-9
    worst_q = 0.0
    for a, c in zip(sm, charge):
        for node in (0, 1):
            ta, tc = a.node_total_aj(node), c.node_total_aj(node)
            rel = abs(ta - tc) / ta
            worst_q = max(worst_q, rel)
            ok = ok and rel <= 1e-9
    _verdict(5, "state-machine and hierarchical totals agree across 54 runs", ok,
             f"worst power-mode rel {worst:.2e}, worst charge-mode rel {worst_q:.2e}")


def test_criterion_06_component_model_payload_independence():
    small = run_scenario(PingScenario(payload_bytes=10, seed=1), model="comp",
                         track_intervals=False)
    large = run_scenario(PingScenario(payload_bytes=90, seed=1), model="comp",
                         track_intervals=False)
    ok = (small.energy_totals_aj == large.energy_totals_aj
          and small.total_aj() > 0)
    _verdict(6, "component-accounting totals identical for 10 B and 90 B payloads", ok,
             f"both {small.total_aj() / 1e18:.6g} J")


def test_criterion_07_ping_pair_symmetry():
    ok = True
    for payload in range(10, 100, 10):
        report = run_scenario(PingScenario(payload_bytes=payload, seed=7), model="sm",
                              track_intervals=False)
        ok = ok and report.energy_totals_aj[0] == report.energy_totals_aj[1]
    _verdict(7, "sender and receiver totals exactly equal under identical power tables", ok)


def test_criterion_08_scaling_benchmark(tmp_path):
    bc_values = [1, 2, 4, 8, 16, 32, 64, 128]
    start = time.perf_counter()
    reports = bench_scale(bc_values, seed=1, out_dir=tmp_path)
    elapsed = time.perf_counter() - start
    counts_ok = all(
        r.events == 2 * 100 * r.nodes * (r.nodes - 1) for r in reports
    ) and len(reports) == len(bc_values)
    _, _, r2 = linear_fit([r.events for r in reports], [r.wall_ms for r in reports])
    csv_ok = (tmp_path / "runs.csv").exists()
    ok = counts_ok and elapsed < 600.0 and r2 > 0.98 and csv_ok
    _verdict(8, "bench-scale: exact event counts, linear wall-time, under 10 min", ok,
             f"{elapsed:.1f} s total, R^2 {r2:.4f}, "
             f"largest run {reports[-1].events} events")


def test_criterion_09_determinism(tmp_path):
    # (a) Two consecutive runs of the same (scenario, seed) emit identical
    # energy CSV bytes, for both scenario families.
    ok = True
    for scenario in (PingScenario(payload_bytes=30, frequency_hz=2.0, seed=11),
                     MeshScenario(bc_count=2, rounds=5, duration_s=5.0, seed=11)):
        first = energy_csv_text([run_scenario(scenario)])
        second = energy_csv_text([run_scenario(scenario)])
        ok = ok and first == second and len(first.splitlines()) > 1
    # (b) Worker-pool sizes 1 and 4 produce identical energy CSV bytes for
    # the full default sweep.
    serial = sweep_energy(SweepGrid(), seed=3, workers=1)
    pooled = sweep_energy(SweepGrid(), seed=3, workers=4)
    ok = ok and energy_csv_text(serial) == energy_csv_text(pooled)
    from wsnsim.harness import runs_csv_text

    ok = ok and len(runs_csv_text(serial).strip().splitlines()) == 1 + 54
    _verdict(9, "byte-identical energy CSVs across reruns and worker-pool sizes", ok)


def test_criterion_10_comparison_matrix_fixture():
    tossim = load_bundled("tossim")
    ns2 = load_bundled("ns2")
    omnet = load_bundled("omnetpp-inet")
    matrix = comparison_table([tossim, ns2, omnet])

    enum_expect = {
        ("Nature of the simulator", "TOSSIM"): "Emulator",
        ("Nature of the simulator", "NS2"): "Simulator",
        ("Nature of the simulator", "OMNeT++/INET"): "Simulator",
        ("Type of the simulator", "TOSSIM"): "discrete-event",
        ("Type of the simulator", "NS2"): "discrete-event",
        ("Type of the simulator", "OMNeT++/INET"): "discrete-event",
        ("Heterogeneity", "TOSSIM"): "No",
        ("Heterogeneity", "NS2"): "No",
        ("Heterogeneity", "OMNeT++/INET"): "Yes",
        ("Design philosophy", "TOSSIM"): "single-level",
        ("Design philosophy", "NS2"): "single-level",
        ("Design philosophy", "OMNeT++/INET"): "single-level",
        ("Modelling", "TOSSIM"): "Available",
        ("Modelling", "NS2"): "Available",
        ("Modelling", "OMNeT++/INET"): "Available",
        ("Mobility model", "TOSSIM"): "Yes",
        ("Mobility model", "NS2"): "Yes",
        ("Mobility model", "OMNeT++/INET"): "Yes",
    }
    ok = all(matrix.cell(c, n) == expected for (c, n), expected in enum_expect.items())

    presence_expect = {
        ("License", "TOSSIM"): ["BSD"],
        ("License", "NS2"): ["GPLv2"],
        ("License", "OMNeT++/INET"): ["Academic Public License", "LGPL"],
        ("User Interface", "TOSSIM"): ["Python", "C++", "NesC"],
        ("User Interface", "NS2"): ["C++", "OTcl"],
        ("User Interface", "OMNeT++/INET"): ["C++", "NED"],
        ("Supported platforms", "TOSSIM"): ["Linux", "Windows"],
        ("Supported platforms", "NS2"): ["Linux", "MacOS", "FreeBSD"],
        ("Supported platforms", "OMNeT++/INET"): ["Windows", "Linux", "Mac OSX"],
        ("Wireless medium model", "TOSSIM"): ["log-normal shadowing", "noise"],
        ("Wireless medium model", "NS2"): ["shadowing", "2-ray ground", "free space"],
        ("Wireless medium model", "OMNeT++/INET"): ["rayleigh fading", "nakagami fading",
                                                    "obstacle loss"],
        ("Energy model", "TOSSIM"): ["Battery model: No", "RF states: Yes", "harvester"],
        ("Energy model", "NS2"): ["ideal battery", "RF states: Yes",
                                  "sensing and processing"],
        ("Energy model", "OMNeT++/INET"): ["Battery model: Yes", "RF states: Yes",
                                           "sensing and processing"],
        ("Supported technology and protocols", "TOSSIM"): ["TinyOS"],
        ("Supported technology and protocols", "NS2"): ["802.11b", "802.15.4", "AODV"],
        ("Supported technology and protocols", "OMNeT++/INET"): ["802.11p", "MIPv6", "BGP"],
    }
    for (criterion, name), needles in presence_expect.items():
        cell = matrix.cell(criterion, name)
        for needle in needles:
            ok = ok and needle.lower() in cell.lower()
    _verdict(10, "comparison matrix reproduces the published criteria table", ok)
