"""wsnsim: deterministic WSN simulation with interchangeable energy models.

The package is organised around seven pieces: the discrete-event engine
(`core`), wireless propagation (`medium`), CSMA/CA airtimes and exchange
timelines (`mac`), the three energy-model architectures (`energy`),
scenario builders and echo traffic (`scenario`), the benchmark harness
(`harness`), and qualitative simulator descriptors (`evalkit`).
"""

from .core import Engine, Event, EventKind, RngStream, SimTime, node_stream
from .energy import (
    ComponentAccountingModel,
    EnergyBinding,
    EnergyTrace,
    HierarchicalModel,
    RadioPowerTable,
    RadioState,
    StateMachineModel,
    UnitMode,
    attach_model,
    energy_report,
)
from .evalkit import (
    ComparisonReport,
    SimulatorDescriptor,
    comparison_table,
    load_bundled,
    load_descriptor,
)
from .harness import (
    RunReport,
    SweepGrid,
    bench_scale,
    emit_csv,
    emit_report,
    run_scenario,
    sample_host_metrics,
    sweep_energy,
)
from .mac import (
    ExchangeTimeline,
    FrameSpec,
    PhyProfile,
    PROFILES,
    build_cca_exchange,
    build_rts_cts_exchange,
    compute_airtime,
    draw_backoff,
    fit_frame_overhead,
    get_profile,
)
from .medium import (
    LinkBudget,
    PathLossModel,
    PathLossParams,
    free_space_rx_power,
    in_range,
    link_budget,
    log_normal_path_loss_db,
    propagation_delay,
    two_ray_ground_rx_power,
)
from .scenario import (
    MeshScenario,
    PingScenario,
    Topology,
    build_mesh,
    build_ping_pair,
    load_scenario,
    mesh_traffic_plan,
    save_scenario,
)

__version__ = "0.1.0"
