"""Experiment scenarios: meshed-topology scaling and two-node echo traffic.

Two scenario families are provided:

* :class:`MeshScenario` — a mesh built from 4-node "basic components", each
  a 10x10 m square, tiled on a grid.  Every round, every node sends one
  echo request to every other node and each receiver replies with the same
  message, so one run processes exactly ``2 * rounds * N * (N-1)`` message
  events.
* :class:`PingScenario` — two nodes 10 m apart; node 0 periodically sends
  an echo request, node 1 replies with an identical-length message.

Echo traffic is abstract: a message is just ``payload + protocol overhead``
bytes pushed through one MAC exchange; there is no header parsing.  Node
start offsets in the mesh stagger transmissions (guard gap = twice the
exchange duration) so runs are collision-free and event counts analytic.

Scenario files are YAML documents mirroring the scenario dataclasses; see
``load_scenario`` for the schema.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Iterator

import yaml

from . import medium
from .core import Engine, Event, EventKind, NS_PER_S, SimTime, node_stream, seconds
from .energy import (
    ComponentAccountingModel,
    EnergyBinding,
    RadioPowerTable,
    UnitMode,
    attach_model,
    default_power_table,
    role_energy_aj,
)
from .mac import Direction, PhyProfile, build_exchange, draw_backoff_slots, get_profile

PAYLOAD_CHOICES = tuple(range(10, 100, 10))

# The mesh scaling scenario pins its traffic shape; only the topology size
# varies between runs.
MESH_PROTOCOL = "dot11b/ns2"
MESH_PAYLOAD_BYTES = 10

BC_SIDE_M = 10.0     # basic-component square side
BC_GAP_M = 10.0      # gap between adjacent squares
BC_COUNTS = (1, 2, 4, 8, 16, 32, 64, 128)


class ScenarioError(ValueError):
    """Scenario construction or file problem, with field context."""


@dataclass(frozen=True)
class NodeSite:
    node_id: int
    x: float
    y: float


@dataclass(frozen=True)
class Topology:
    nodes: tuple[NodeSite, ...]

    def __post_init__(self):
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ScenarioError("node ids must be unique")
        for n in self.nodes:
            if not (math.isfinite(n.x) and math.isfinite(n.y)):
                raise ScenarioError(f"node {n.node_id} has a non-finite position")

    def __len__(self) -> int:
        return len(self.nodes)

    def distance(self, a: int, b: int) -> float:
        na, nb = self.nodes[a], self.nodes[b]
        return math.hypot(na.x - nb.x, na.y - nb.y)


def build_mesh(bc_count: int) -> Topology:
    """Tile ``bc_count`` 4-node squares on a row-major grid.

    Square k sits at grid cell (k % cols, k // cols) with a 10 m gap between
    adjacent squares; its nodes occupy the four vertices.  Positions are a
    pure function of ``bc_count``.
    """
    if bc_count < 1:
        raise ScenarioError("bc_count must be >= 1")
    cols = math.ceil(math.sqrt(bc_count))
    pitch = BC_SIDE_M + BC_GAP_M
    nodes = []
    for k in range(bc_count):
        ox = (k % cols) * pitch
        oy = (k // cols) * pitch
        base = 4 * k
        nodes.append(NodeSite(base, ox, oy))
        nodes.append(NodeSite(base + 1, ox + BC_SIDE_M, oy))
        nodes.append(NodeSite(base + 2, ox, oy + BC_SIDE_M))
        nodes.append(NodeSite(base + 3, ox + BC_SIDE_M, oy + BC_SIDE_M))
    return Topology(tuple(nodes))


@dataclass
class PingScenario:
    """Two-node periodic echo-request/reply scenario."""

    protocol: str = "dot11b/ns2"
    payload_bytes: int = 10
    frequency_hz: float = 1.0
    duration_s: float = 100.0
    distance_m: float = 10.0
    seed: int = 1
    name: str = "ping"
    power: RadioPowerTable | None = None
    activity_costs: dict[str, float] | None = None  # "component.activity" -> J

    kind = "ping"

    def __post_init__(self):
        get_profile(self.protocol)
        if self.payload_bytes not in PAYLOAD_CHOICES:
            raise ScenarioError(
                f"payload_bytes must be one of {PAYLOAD_CHOICES}, got {self.payload_bytes}"
            )
        if self.frequency_hz <= 0:
            raise ScenarioError("frequency_hz must be > 0")
        if self.duration_s < 0:
            raise ScenarioError("duration_s must be >= 0")
        if self.distance_m <= 0:
            raise ScenarioError("distance_m must be > 0")
        for key, cost in (self.activity_costs or {}).items():
            if "." not in key:
                raise ScenarioError(
                    f"activity_costs key {key!r} must look like 'component.activity'"
                )
            if cost < 0:
                raise ScenarioError(f"activity_costs[{key!r}] must be >= 0")

    def activity_cost_table(self) -> dict[tuple[str, str], float] | None:
        if self.activity_costs is None:
            return None
        return {
            tuple(key.split(".", 1)): cost for key, cost in self.activity_costs.items()
        }

    def power_table(self) -> RadioPowerTable:
        return self.power or default_power_table(self.protocol)

    @property
    def period_ns(self) -> int:
        return round(NS_PER_S / self.frequency_hz)

    @property
    def request_count(self) -> int:
        return int(self.duration_s * self.frequency_hz + 1e-9)


@dataclass
class MeshScenario:
    """All-pairs echo traffic over a tiled basic-component mesh."""

    bc_count: int = 1
    frequency_hz: float = 1.0
    duration_s: float = 100.0
    rounds: int = 100
    seed: int = 1
    name: str = ""

    kind = "mesh"

    def __post_init__(self):
        if self.bc_count < 1:
            raise ScenarioError("bc_count must be >= 1")
        if self.frequency_hz <= 0:
            raise ScenarioError("frequency_hz must be > 0")
        if self.rounds < 1:
            raise ScenarioError("rounds must be >= 1")
        if self.rounds > self.duration_s * self.frequency_hz + 1e-9:
            raise ScenarioError(
                f"{self.rounds} rounds at {self.frequency_hz} Hz do not fit in "
                f"{self.duration_s} s"
            )
        if not self.name:
            self.name = f"mesh-bc{self.bc_count}"

    @property
    def node_count(self) -> int:
        return 4 * self.bc_count

    @property
    def round_period_ns(self) -> int:
        return round(NS_PER_S / self.frequency_hz)


Scenario = PingScenario | MeshScenario


@dataclass(frozen=True)
class PingPlan:
    """Topology plus the request schedule of a ping scenario."""

    topology: Topology
    request_times_ns: tuple[int, ...]
    exchange_worst_ns: int
    propagation_ns: int


def build_ping_pair(scenario: PingScenario) -> PingPlan:
    """Node 0 at the origin, node 1 ``distance_m`` away on the x axis.

    Fails when a request/reply pair (with worst-case backoff) cannot fit in
    one period, or when the receiver is out of range under the default
    free-space model and sensitivity.
    """
    topo = Topology((NodeSite(0, 0.0, 0.0), NodeSite(1, scenario.distance_m, 0.0)))
    profile = get_profile(scenario.protocol)
    worst = build_exchange(profile, scenario.payload_bytes, profile.cw_min).total_ns
    prop = medium.propagation_delay_ns(scenario.distance_m)
    if 2 * worst + prop > scenario.period_ns:
        raise ScenarioError(
            f"request/reply pair ({2 * worst + prop} ns worst case) exceeds the "
            f"{scenario.period_ns} ns period at {scenario.frequency_hz} Hz"
        )
    params = medium.PathLossParams()
    if not medium.in_range(scenario.power_table().tx_w, params, scenario.distance_m):
        raise ScenarioError(f"receiver at {scenario.distance_m} m is out of radio range")
    times = tuple(k * scenario.period_ns for k in range(scenario.request_count))
    return PingPlan(topo, times, worst, prop)


@dataclass(frozen=True)
class MeshPlan:
    """Deterministic all-pairs echo schedule for one mesh run."""

    topology: Topology
    rounds: int
    round_period_ns: int
    guard_gap_ns: int
    exchange_ns: int

    @property
    def expected_messages(self) -> int:
        n = len(self.topology)
        return 2 * self.rounds * n * (n - 1)

    def iter_requests(self) -> Iterator[Event]:
        n = len(self.topology)
        for r in range(self.rounds):
            base = r * self.round_period_ns
            for i in range(n):
                t = base + i * self.guard_gap_ns
                for j in range(n):
                    if j != i:
                        yield Event(t, EventKind.APP_SEND, i, (j, False))


def mesh_traffic_plan(topology: Topology, rounds: int, frequency_hz: float) -> MeshPlan:
    """Per round, every node sends one echo request to every other node.

    Node i's requests start ``i * guard_gap`` into the round, with the guard
    gap set to twice the exchange duration so consecutive senders never
    overlap; every receiver replies with the same message one exchange
    later.
    """
    if rounds < 1:
        raise ScenarioError("rounds must be >= 1")
    if frequency_hz <= 0:
        raise ScenarioError("frequency_hz must be > 0")
    profile = get_profile(MESH_PROTOCOL)
    exchange_ns = build_exchange(profile, MESH_PAYLOAD_BYTES, 0).total_ns
    guard = 2 * exchange_ns
    period_ns = round(NS_PER_S / frequency_hz)
    n = len(topology)
    if (n - 1) * guard + 2 * exchange_ns > period_ns:
        raise ScenarioError(
            f"{n} staggered senders do not fit in a {period_ns} ns round"
        )
    return MeshPlan(topology, rounds, period_ns, guard, exchange_ns)


class PingApp:
    """Echo request/reply application for the two-node scenario.

    Each message occupies one engine event; the full MAC exchange it
    triggers is charged to both nodes' energy bindings phase by phase.  The
    reply starts one propagation delay after the request exchange ends.
    """

    def __init__(
        self,
        engine: Engine,
        scenario: PingScenario,
        model_kind: str = "sm",
        unit_mode: UnitMode = UnitMode.POWER_ENERGY,
        detailed_trace: bool = True,
        initial_energy_j: float | None = None,
    ):
        self.engine = engine
        self.scenario = scenario
        self.plan = build_ping_pair(scenario)
        self.profile: PhyProfile = get_profile(scenario.protocol)
        self.power = scenario.power_table()
        self.model_kind = model_kind
        kwargs: dict[str, Any] = {"power": self.power, "unit_mode": unit_mode,
                                  "detailed_trace": detailed_trace}
        if model_kind == "comp":
            kwargs = {"detailed_trace": detailed_trace,
                      "activity_costs": scenario.activity_cost_table()}
        if initial_energy_j is not None and model_kind != "comp":
            kwargs["initial_energy_j"] = initial_energy_j
        self.bindings: dict[int, EnergyBinding] = {
            node: attach_model(node, model_kind, **kwargs) for node in (0, 1)
        }
        self.rngs = {node: node_stream(scenario.seed, node) for node in (0, 1)}
        engine.on_fast(EventKind.APP_SEND, self._handle)
        engine.add_source(
            Event(t, EventKind.APP_SEND, 0, None) for t in self.plan.request_times_ns
        )

    def _handle(self, engine: Engine, time: SimTime, node: int, payload: Any) -> None:
        is_reply = payload is not None
        peer = 1 - node
        if not self.bindings[node].can_transmit():
            return
        slots = draw_backoff_slots(self.profile, self.rngs[node])
        timeline = build_exchange(self.profile, self.scenario.payload_bytes, slots)
        self.bindings[node].apply_exchange(timeline, time, "sender")
        self.bindings[peer].apply_exchange(timeline, time, "receiver")
        if not is_reply:
            engine.schedule_at(
                time + timeline.total_ns + self.plan.propagation_ns,
                EventKind.APP_SEND, peer, "reply",
            )

    def finish(self) -> None:
        end = seconds(self.scenario.duration_s)
        for binding in self.bindings.values():
            binding.close(end)


# Fixed category layout of the aggregate mesh accounting: [tx, rx, idle]
# for the time-based models, [send, receive] for component accounting.
_MESH_CATS_TIME = ("tx", "rx", "idle")
_MESH_CATS_COMP = ("radio.send", "radio.receive")


class MeshApp:
    """All-pairs echo traffic over a mesh, with aggregate energy accounting.

    Mesh exchanges from different senders may overlap in time (the traffic
    is abstract), so per-transition state machines do not apply; instead the
    exact per-role, per-category charges of the shared exchange timeline are
    computed once with the same arithmetic the bindings use, and every
    message event adds them to its two endpoints.  Idle energy outside
    exchange timelines is not accounted here.
    """

    def __init__(
        self,
        engine: Engine,
        scenario: MeshScenario,
        model_kind: str = "sm",
        track_intervals: bool = False,
    ):
        self.engine = engine
        self.scenario = scenario
        self.topology = build_mesh(scenario.bc_count)
        self.plan = mesh_traffic_plan(self.topology, scenario.rounds, scenario.frequency_hz)
        self.model_kind = model_kind
        self.profile = get_profile(MESH_PROTOCOL)
        self.power = default_power_table(MESH_PROTOCOL)
        timeline = build_exchange(self.profile, MESH_PAYLOAD_BYTES, 0)
        if model_kind == "comp":
            model = ComponentAccountingModel()
            n_frames = len(timeline.frames())
            # The exchange initiator transmits the frames its side drives.
            sends = sum(1 for p in timeline.phases if p.frame and p.direction is Direction.SENDER)
            recvs = n_frames - sends
            send_cost = model.costs_aj[("radio", "send")]
            recv_cost = model.costs_aj[("radio", "receive")]
            self.categories = _MESH_CATS_COMP
            self._sender_row = (send_cost * sends, recv_cost * recvs)
            self._receiver_row = (send_cost * recvs, recv_cost * sends)
        else:
            sender, receiver = role_energy_aj(timeline, self.power)
            self.categories = _MESH_CATS_TIME
            self._sender_row = tuple(sender.get(c, 0) for c in self.categories)
            self._receiver_row = tuple(receiver.get(c, 0) for c in self.categories)
        n = len(self.topology)
        width = len(self.categories)
        self._acc = [[0] * width for _ in range(n)]
        self._buckets: list[dict[int, list[int]]] | None = None
        if track_intervals:
            self._buckets = [{} for _ in range(n)]
        engine.on_fast(EventKind.APP_SEND, self._handle)
        engine.add_source(self.plan.iter_requests())

    def _handle(self, engine: Engine, time: SimTime, node: int, payload: Any) -> None:
        peer, is_reply = payload
        src_row = self._acc[node]
        dst_row = self._acc[peer]
        s_charges = self._sender_row
        r_charges = self._receiver_row
        for k, (s, r) in enumerate(zip(s_charges, r_charges)):
            src_row[k] += s
            dst_row[k] += r
        if self._buckets is not None:
            idx = time // self.plan.round_period_ns
            width = len(s_charges)
            for node_id, charges in ((node, s_charges), (peer, r_charges)):
                per_node = self._buckets[node_id]
                row = per_node.get(idx)
                if row is None:
                    row = per_node[idx] = [0] * width
                for k in range(width):
                    row[k] += charges[k]
        if not is_reply:
            engine.schedule_at(
                time + self.plan.exchange_ns, EventKind.APP_SEND, peer, (node, True)
            )

    def totals_aj(self) -> dict[int, dict[str, int]]:
        return {
            site.node_id: dict(zip(self.categories, self._acc[site.node_id]))
            for site in self.topology.nodes
        }

    def interval_buckets_aj(self) -> dict[int, dict[str, dict[int, int]]]:
        if self._buckets is None:
            raise ValueError("interval tracking was not enabled for this run")
        out: dict[int, dict[str, dict[int, int]]] = {}
        for site in self.topology.nodes:
            per_cat: dict[str, dict[int, int]] = {c: {} for c in self.categories}
            for idx, row in self._buckets[site.node_id].items():
                for k, cat in enumerate(self.categories):
                    if row[k]:
                        per_cat[cat][idx] = row[k]
            out[site.node_id] = per_cat
        return out


# --- scenario files ---------------------------------------------------------

_PING_FIELDS = {"kind", "name", "protocol", "payload_bytes", "frequency_hz",
                "duration_s", "distance_m", "seed", "power", "activity_costs"}
_MESH_FIELDS = {"kind", "name", "bc_count", "frequency_hz", "duration_s",
                "rounds", "seed"}
_POWER_FIELDS = {"tx_w", "rx_w", "idle_w", "sleep_w"}


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    data: dict[str, Any] = {"kind": scenario.kind}
    if isinstance(scenario, PingScenario):
        data.update(
            name=scenario.name,
            protocol=scenario.protocol,
            payload_bytes=scenario.payload_bytes,
            frequency_hz=scenario.frequency_hz,
            duration_s=scenario.duration_s,
            distance_m=scenario.distance_m,
            seed=scenario.seed,
        )
        if scenario.power is not None:
            data["power"] = asdict(scenario.power)
        if scenario.activity_costs is not None:
            data["activity_costs"] = dict(scenario.activity_costs)
    else:
        data.update(
            name=scenario.name,
            bc_count=scenario.bc_count,
            frequency_hz=scenario.frequency_hz,
            duration_s=scenario.duration_s,
            rounds=scenario.rounds,
            seed=scenario.seed,
        )
    return data


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_dict(scenario), fh, sort_keys=False)


def scenario_from_dict(data: Any, source: str = "<dict>") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError(f"{source}: expected a mapping at the top level")
    kind = data.get("kind")
    if kind not in ("ping", "mesh"):
        raise ScenarioError(f"{source}: field 'kind': expected 'ping' or 'mesh', got {kind!r}")
    allowed = _PING_FIELDS if kind == "ping" else _MESH_FIELDS
    for key in data:
        if key not in allowed:
            raise ScenarioError(f"{source}: field {key!r} is not valid for a {kind} scenario")
    try:
        if kind == "ping":
            power = None
            if "power" in data:
                pdata = data["power"]
                if not isinstance(pdata, dict) or set(pdata) != _POWER_FIELDS:
                    raise ScenarioError(
                        f"{source}: field 'power': expected keys {sorted(_POWER_FIELDS)}"
                    )
                power = RadioPowerTable(**pdata)
            return PingScenario(
                protocol=data.get("protocol", "dot11b/ns2"),
                payload_bytes=data.get("payload_bytes", 10),
                frequency_hz=data.get("frequency_hz", 1.0),
                duration_s=data.get("duration_s", 100.0),
                distance_m=data.get("distance_m", 10.0),
                seed=data.get("seed", 1),
                name=data.get("name", "ping"),
                power=power,
                activity_costs=data.get("activity_costs"),
            )
        return MeshScenario(
            bc_count=data.get("bc_count", 1),
            frequency_hz=data.get("frequency_hz", 1.0),
            duration_s=data.get("duration_s", 100.0),
            rounds=data.get("rounds", 100),
            seed=data.get("seed", 1),
            name=data.get("name", ""),
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{source}: {exc}") from exc


def load_scenario(path: str) -> Scenario:
    """Parse a YAML scenario file; errors carry the file name and field."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: not valid YAML: {exc}") from exc
    return scenario_from_dict(data, source=path)
