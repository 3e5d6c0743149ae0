"""Benchmark harness: execute scenarios, sample host metrics, emit reports.

The harness workflow is: build a scenario, run it on a fresh engine while a
background sampler watches this process's CPU and resident memory, then
freeze everything into a :class:`RunReport` and emit CSV files with frozen
schemas.  Wall time is measured around the engine loop only, so runs of
different sizes stay comparable.

Determinism contract: for a fixed (scenario, seed) the simulated results --
event counts, energy totals, per-interval buckets and therefore the
``energy.csv`` bytes -- are identical across repeated runs and across
worker-pool sizes.  Host metrics (wall/CPU/RSS) are the only
non-deterministic report fields and live only in ``runs.csv``.
"""

from __future__ import annotations

import csv
import logging
import os
import threading
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import psutil
except ImportError:  # pragma: no cover - psutil is a declared dependency
    psutil = None

from .core import Engine, seconds
from .energy import UnitMode, aj_to_j, energy_report
from .scenario import (
    BC_COUNTS,
    MESH_PAYLOAD_BYTES,
    MESH_PROTOCOL,
    MeshApp,
    MeshScenario,
    PingApp,
    PingScenario,
    Scenario,
    load_scenario,
)

log = logging.getLogger(__name__)

RUNS_CSV_HEADER = (
    "run_id,scenario,protocol,payload_bytes,freq_hz,nodes,sim_duration_s,"
    "wall_ms,peak_rss_bytes,cpu_avg_pct,cpu_max_pct,events,seed"
)
ENERGY_CSV_HEADER = "run_id,node_id,model,category,interval_index,energy_j"

# Category emission order in energy.csv; anything else goes after, sorted.
CATEGORY_ORDER = ("tx", "rx", "idle", "sleep", "aux", "radio.send", "radio.receive")

OUTPUT_DIR_ENV = "WSNSIM_OUT"
DEFAULT_SAMPLE_INTERVAL_MS = 100


@dataclass
class HostMetricsSeries:
    """CPU/RSS samples of one process at a fixed interval."""

    interval_ms: int
    samples: list[tuple[float, int]] = field(default_factory=list)
    available: bool = True

    @property
    def cpu_mean(self) -> float | None:
        if not self.available or not self.samples:
            return None
        return sum(s[0] for s in self.samples) / len(self.samples)

    @property
    def cpu_max(self) -> float | None:
        if not self.available or not self.samples:
            return None
        return max(s[0] for s in self.samples)

    @property
    def rss_peak(self) -> int | None:
        if not self.available or not self.samples:
            return None
        return max(s[1] for s in self.samples)


def sample_host_metrics(
    process, interval_ms: int = DEFAULT_SAMPLE_INTERVAL_MS, max_duration_s: float | None = None
) -> HostMetricsSeries:
    """Sample a process's CPU % and RSS until it exits (or the cap is hit).

    ``process`` is a pid or a ``psutil.Process``.  Each sample covers one
    interval: CPU is the utilisation over that window (100 = one full
    core).  On hosts without process statistics the series is returned with
    ``available=False`` and the caller's run remains valid.
    """
    series = HostMetricsSeries(interval_ms=interval_ms)
    if psutil is None:
        series.available = False
        return series
    try:
        proc = process if hasattr(process, "cpu_percent") else psutil.Process(process)
        deadline = None if max_duration_s is None else _time.monotonic() + max_duration_s
        proc.cpu_percent(None)  # prime the counter
        while proc.is_running():
            if deadline is not None and _time.monotonic() >= deadline:
                break
            _time.sleep(interval_ms / 1000.0)
            if not proc.is_running():
                break
            cpu = proc.cpu_percent(None)
            rss = proc.memory_info().rss
            series.samples.append((cpu, rss))
    except Exception:
        if not series.samples:
            series.available = False
    return series


class _RunSampler:
    """Background sampler of the current process while an engine runs."""

    def __init__(self, interval_ms: int = DEFAULT_SAMPLE_INTERVAL_MS):
        self.interval_ms = interval_ms
        self.series = HostMetricsSeries(interval_ms=interval_ms)
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def __enter__(self) -> "_RunSampler":
        if psutil is None:
            self.series.available = False
            return self
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()
        return self

    def _loop(self) -> None:
        try:
            proc = psutil.Process()
            proc.cpu_percent(None)
            while not self._stop.wait(self.interval_ms / 1000.0):
                self.series.samples.append((proc.cpu_percent(None), proc.memory_info().rss))
        except Exception:
            if not self.series.samples:
                self.series.available = False

    def __exit__(self, *exc) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
        # A run shorter than one interval yields no samples; the metric
        # fields then stay None and the run remains valid.


@dataclass
class RunReport:
    """Everything measured and simulated in one run."""

    run_id: str
    scenario: str
    protocol: str
    payload_bytes: int
    freq_hz: float
    nodes: int
    sim_duration_s: float
    wall_ms: float
    peak_rss_bytes: int | None
    cpu_avg_pct: float | None
    cpu_max_pct: float | None
    events: int
    seed: int
    model: str
    interval_s: float
    energy_totals_aj: dict[int, dict[str, int]]
    interval_buckets_aj: dict[int, dict[str, dict[int, int]]] | None

    def node_total_aj(self, node_id: int) -> int:
        return sum(self.energy_totals_aj.get(node_id, {}).values())

    def total_aj(self) -> int:
        return sum(self.node_total_aj(n) for n in self.energy_totals_aj)

    def total_j(self) -> float:
        return aj_to_j(self.total_aj())


def make_run_id(scenario_name: str, protocol: str, payload: int, freq: float,
                model: str, seed: int) -> str:
    return f"{scenario_name}_{protocol.replace('/', '-')}_p{payload}_f{freq:g}_{model}_s{seed}"


def _model_label(model: str, unit_mode: UnitMode) -> str:
    if model == "hier" and unit_mode is UnitMode.CHARGE_CURRENT:
        return "hier-q"
    return model


def run_scenario(
    scenario: Scenario | str | Path,
    seed: int | None = None,
    model: str = "sm",
    unit_mode: UnitMode = UnitMode.POWER_ENERGY,
    out_dir: str | Path | None = None,
    track_intervals: bool = True,
    sample_interval_ms: int = DEFAULT_SAMPLE_INTERVAL_MS,
) -> RunReport:
    """Execute one scenario and return its report.

    ``seed`` overrides the scenario's own seed when given.  With ``out_dir``
    the run's CSV files are written there as well.
    """
    if isinstance(scenario, (str, Path)):
        scenario = load_scenario(str(scenario))
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    engine = Engine(scenario.seed)
    end_ns = seconds(scenario.duration_s)

    if isinstance(scenario, PingScenario):
        app = PingApp(engine, scenario, model_kind=model, unit_mode=unit_mode)
        with _RunSampler(sample_interval_ms) as sampler:
            t0 = _time.perf_counter()
            events = engine.run_until(end_ns)
            wall_s = _time.perf_counter() - t0
        app.finish()
        interval_s = 1.0 / scenario.frequency_hz
        totals = {n: b.totals_aj() for n, b in app.bindings.items()}
        buckets = None
        if track_intervals and scenario.duration_s > 0:
            buckets = {
                n: energy_report(b.trace, interval_s) for n, b in app.bindings.items()
            }
        protocol = scenario.protocol
        payload = scenario.payload_bytes
        nodes = 2
    else:
        app = MeshApp(engine, scenario, model_kind=model, track_intervals=track_intervals)
        with _RunSampler(sample_interval_ms) as sampler:
            t0 = _time.perf_counter()
            events = engine.run_until(end_ns)
            wall_s = _time.perf_counter() - t0
        interval_s = 1.0 / scenario.frequency_hz
        totals = app.totals_aj()
        buckets = app.interval_buckets_aj() if track_intervals else None
        protocol = MESH_PROTOCOL
        payload = MESH_PAYLOAD_BYTES
        nodes = scenario.node_count

    label = _model_label(model, unit_mode)
    report = RunReport(
        run_id=make_run_id(scenario.name, protocol, payload, scenario.frequency_hz,
                           label, scenario.seed),
        scenario=scenario.name,
        protocol=protocol,
        payload_bytes=payload,
        freq_hz=scenario.frequency_hz,
        nodes=nodes,
        sim_duration_s=scenario.duration_s,
        wall_ms=wall_s * 1000.0,
        peak_rss_bytes=sampler.series.rss_peak,
        cpu_avg_pct=sampler.series.cpu_mean,
        cpu_max_pct=sampler.series.cpu_max,
        events=events,
        seed=scenario.seed,
        model=label,
        interval_s=interval_s,
        energy_totals_aj=totals,
        interval_buckets_aj=buckets,
    )
    if out_dir is not None:
        emit_csv([report], out_dir)
    return report


def bench_scale(
    bc_list: list[int] | tuple[int, ...] = BC_COUNTS,
    seed: int = 1,
    out_dir: str | Path | None = None,
) -> list[RunReport]:
    """Run the mesh scaling benchmark for every basic-component count.

    Per-interval energy tracking is disabled: the benchmark measures the
    engine, and totals per node/category are kept regardless.  A failing
    run is logged and skipped; the sweep continues.
    """
    if not bc_list:
        raise ValueError("bc_list must be non-empty")
    reports = []
    for bc in bc_list:
        try:
            scenario = MeshScenario(bc_count=bc, seed=seed)
            reports.append(run_scenario(scenario, model="sm", track_intervals=False))
        except Exception as exc:
            log.warning("bench-scale run for bc=%s failed: %s", bc, exc)
    if out_dir is not None:
        emit_csv(reports, out_dir)
    return reports


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid of ping runs, iterated in a fixed order."""

    protocols: tuple[str, ...] = ("dot11b/ns2", "dot154/default")
    payloads: tuple[int, ...] = tuple(range(10, 100, 10))
    frequencies: tuple[float, ...] = (0.1, 1.0, 2.0)
    duration_s: float = 100.0

    def scenarios(self, seed: int) -> list[PingScenario]:
        return [
            PingScenario(protocol=proto, payload_bytes=p, frequency_hz=f,
                         duration_s=self.duration_s, seed=seed)
            for proto in self.protocols
            for p in self.payloads
            for f in self.frequencies
        ]

    def __len__(self) -> int:
        return len(self.protocols) * len(self.payloads) * len(self.frequencies)


def _sweep_worker(args: tuple) -> RunReport:
    scenario, model, unit_mode_value = args
    return run_scenario(scenario, model=model, unit_mode=UnitMode(unit_mode_value))


def sweep_energy(
    grid: SweepGrid | None = None,
    seed: int = 1,
    model: str = "sm",
    unit_mode: UnitMode = UnitMode.POWER_ENERGY,
    workers: int = 1,
    out_dir: str | Path | None = None,
) -> list[RunReport]:
    """Run the energy sweep; reports come back in grid order.

    Independent runs may execute on a process pool; per-run results do not
    depend on the worker count.
    """
    grid = grid or SweepGrid()
    scenarios = grid.scenarios(seed)
    jobs = [(sc, model, unit_mode.value) for sc in scenarios]
    if workers <= 1:
        reports = [_sweep_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_sweep_worker, jobs))
    if out_dir is not None:
        emit_csv(reports, out_dir)
    return reports


# --- CSV / report emission --------------------------------------------------

def _fmt_opt_int(value: int | None) -> str:
    return "" if value is None else str(value)


def _fmt_opt_pct(value: float | None) -> str:
    return "" if value is None else f"{value:.1f}"


def _category_sort_key(category: str) -> tuple[int, str]:
    try:
        return (CATEGORY_ORDER.index(category), category)
    except ValueError:
        return (len(CATEGORY_ORDER), category)


def runs_csv_text(reports: list[RunReport]) -> str:
    lines = [RUNS_CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.run_id},{r.scenario},{r.protocol},{r.payload_bytes},"
            f"{r.freq_hz:.3f},{r.nodes},{r.sim_duration_s:.3f},"
            f"{round(r.wall_ms)},{_fmt_opt_int(r.peak_rss_bytes)},"
            f"{_fmt_opt_pct(r.cpu_avg_pct)},{_fmt_opt_pct(r.cpu_max_pct)},"
            f"{r.events},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def energy_csv_text(reports: list[RunReport]) -> str:
    lines = [ENERGY_CSV_HEADER]
    for r in reports:
        if r.interval_buckets_aj is None:
            continue
        for node_id in sorted(r.interval_buckets_aj):
            per_cat = r.interval_buckets_aj[node_id]
            for category in sorted(per_cat, key=_category_sort_key):
                buckets = per_cat[category]
                for idx in sorted(buckets):
                    energy = aj_to_j(buckets[idx])
                    lines.append(
                        f"{r.run_id},{node_id},{r.model},{category},{idx},{energy:.12g}"
                    )
    return "\n".join(lines) + "\n"


def emit_csv(reports: list[RunReport], out_dir: str | Path) -> tuple[Path, Path]:
    """Write runs.csv and energy.csv; returns their paths.

    Emission is deterministic: identical reports produce byte-identical
    files ('\\n' line endings, '.' decimal separator, fixed digit counts).
    """
    if not reports:
        raise ValueError("no reports to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs_path = out / "runs.csv"
    energy_path = out / "energy.csv"
    runs_path.write_text(runs_csv_text(reports), encoding="utf-8", newline="")
    energy_path.write_text(energy_csv_text(reports), encoding="utf-8", newline="")
    return runs_path, energy_path


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out_lines = []
    for k, row in enumerate(rows):
        out_lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if k == 0:
            out_lines.append("  ".join("-" * w for w in widths))
    return "\n".join(out_lines)


def report_text(reports: list[RunReport]) -> str:
    """Human-readable run tables plus plot-ready data blocks."""
    if not reports:
        raise ValueError("no reports to render")
    sections = []
    rows = [["run_id", "nodes", "events", "wall_ms", "cpu_avg%", "rss_peak", "energy_J"]]
    for r in reports:
        rows.append([
            r.run_id, str(r.nodes), str(r.events), f"{r.wall_ms:.1f}",
            "-" if r.cpu_avg_pct is None else f"{r.cpu_avg_pct:.1f}",
            "-" if r.peak_rss_bytes is None else str(r.peak_rss_bytes),
            f"{r.total_j():.6g}",
        ])
    sections.append("== runs ==\n" + _table(rows))

    energy_rows = [["run_id", "node_id", "per_interval_J", "total_J"]]
    for r in reports:
        intervals = max(1, int(r.sim_duration_s * r.freq_hz + 1e-9))
        for node_id in sorted(r.energy_totals_aj):
            total = aj_to_j(sum(r.energy_totals_aj[node_id].values()))
            energy_rows.append([
                r.run_id, str(node_id), f"{total / intervals:.6g}", f"{total:.6g}",
            ])
    sections.append("== energy ==\n" + _table(energy_rows))

    # gnuplot/spreadsheet block: wall time and events per run
    block = ["# block: events vs wall time (one row per run)",
             "# columns: events wall_ms run_id"]
    for r in reports:
        block.append(f"{r.events} {r.wall_ms:.3f} {r.run_id}")
    sections.append("\n".join(block))

    # gnuplot block: payload sweep of per-interval node-0 energy
    by_series: dict[tuple[str, float, str], dict[int, float]] = {}
    for r in reports:
        if 0 not in r.energy_totals_aj:
            continue
        intervals = max(1, int(r.sim_duration_s * r.freq_hz + 1e-9))
        key = (r.protocol, r.freq_hz, r.model)
        per_interval = aj_to_j(sum(r.energy_totals_aj[0].values())) / intervals
        by_series.setdefault(key, {})[r.payload_bytes] = per_interval
    if by_series:
        block = ["# block: per-interval sender energy vs payload (J)",
                 "# columns: payload_bytes " + " ".join(
                     f"{proto}@{freq:g}Hz/{model}" for proto, freq, model in sorted(by_series))]
        payloads = sorted({p for series in by_series.values() for p in series})
        for p in payloads:
            cells = [str(p)]
            for key in sorted(by_series):
                val = by_series[key].get(p)
                cells.append("-" if val is None else f"{val:.9g}")
            block.append(" ".join(cells))
        sections.append("\n".join(block))

    return "\n\n".join(sections) + "\n"


def emit_report(reports: list[RunReport], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_text(reports), encoding="utf-8", newline="")
    return path


def report_from_dir(out_dir: str | Path) -> str:
    """Render a report from previously emitted CSV files."""
    out = Path(out_dir)
    runs_path = out / "runs.csv"
    if not runs_path.exists():
        raise FileNotFoundError(f"{runs_path} not found")
    with open(runs_path, newline="", encoding="utf-8") as fh:
        runs = list(csv.DictReader(fh))
    energy_by_run: dict[str, dict[int, float]] = {}
    energy_path = out / "energy.csv"
    if energy_path.exists():
        with open(energy_path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                per_node = energy_by_run.setdefault(row["run_id"], {})
                node = int(row["node_id"])
                per_node[node] = per_node.get(node, 0.0) + float(row["energy_j"])
    sections = []
    header = ["run_id", "scenario", "protocol", "payload", "freq_hz", "nodes",
              "events", "wall_ms", "cpu_avg%", "rss_peak"]
    rows = [header]
    for r in runs:
        rows.append([
            r["run_id"], r["scenario"], r["protocol"], r["payload_bytes"],
            r["freq_hz"], r["nodes"], r["events"], r["wall_ms"],
            r["cpu_avg_pct"] or "-", r["peak_rss_bytes"] or "-",
        ])
    sections.append("== runs ==\n" + _table(rows))
    if energy_by_run:
        rows = [["run_id", "node_id", "energy_J"]]
        for run_id in sorted(energy_by_run):
            for node in sorted(energy_by_run[run_id]):
                rows.append([run_id, str(node), f"{energy_by_run[run_id][node]:.9g}"])
        sections.append("== energy totals (from energy.csv) ==\n" + _table(rows))
    return "\n\n".join(sections) + "\n"


def linear_fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Least-squares line through (xs, ys); returns (slope, intercept, R^2)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def default_output_dir(cli_value: str | None) -> Path:
    """Resolve the output directory: CLI flag, then env override, then cwd."""
    if cli_value:
        return Path(cli_value)
    env = os.environ.get(OUTPUT_DIR_ENV)
    return Path(env) if env else Path("wsnsim-out")
