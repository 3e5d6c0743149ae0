"""Three interchangeable energy-model architectures plus per-node tracing.

All three models consume the same stream of radio activity and differ only
in how they account for it:

* :class:`StateMachineModel` — one power level per radio state; energy is
  power times dwell time, charged on each state transition.
* :class:`HierarchicalModel` — a storage element plus parallel consumers
  and generators, stepped over time.  Built in one of two unit systems,
  power/energy (W, J) or charge/current (A, C), fixed at construction.
* :class:`ComponentAccountingModel` — fixed energy charged per activity
  occurrence per hardware component (MCU, LEDs, radio, memory), with no
  storage at all, so its totals cannot depend on payload size or bitrate.

Internally the state-machine and the power/energy hierarchical paths keep
energy as integer attojoules (1 aJ = 1e-18 J = 1 nW * 1 ns).  Power tables
are held as integer nanowatts and dwell times as integer nanoseconds, so
charge arithmetic is exact: conservation holds to the last unit and energy
totals do not depend on summation order.  The charge/current path uses
floats, mirroring how the two unit systems are kept as separate code paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import NS_PER_S, SimTime
from .mac import Direction, ExchangeTimeline, PhaseKind

AJ_PER_J = 10**18


def j_to_aj(joules: float) -> int:
    return round(joules * AJ_PER_J)


def aj_to_j(aj: int) -> float:
    return aj / AJ_PER_J


def w_to_nw(watts: float) -> int:
    return round(watts * 1e9)


class RadioState(Enum):
    TX = "tx"
    RX = "rx"
    IDLE = "idle"
    SLEEP = "sleep"


@dataclass(frozen=True)
class RadioPowerTable:
    """Radio power draw per state, in watts.

    No ordering between the states is assumed: 802.15.4 transceivers draw
    more in receive than in transmit.
    """

    tx_w: float
    rx_w: float
    idle_w: float
    sleep_w: float

    def __post_init__(self):
        for name in ("tx_w", "rx_w", "idle_w", "sleep_w"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    def nanowatts(self) -> dict[RadioState, int]:
        return {
            RadioState.TX: w_to_nw(self.tx_w),
            RadioState.RX: w_to_nw(self.rx_w),
            RadioState.IDLE: w_to_nw(self.idle_w),
            RadioState.SLEEP: w_to_nw(self.sleep_w),
        }


# Power parameters of the two evaluation scenarios: HDG204 (802.11b) and
# CC2420 (802.15.4) RF modules.
DOT11B_POWER = RadioPowerTable(tx_w=0.750, rx_w=0.220, idle_w=0.0002, sleep_w=0.0002)
DOT154_POWER = RadioPowerTable(tx_w=0.052, rx_w=0.059, idle_w=0.00006, sleep_w=0.00006)


def default_power_table(profile_id: str) -> RadioPowerTable:
    return DOT154_POWER if profile_id.startswith("dot154") else DOT11B_POWER


# Phase -> (state while sending-side, state while receiving-side).
# Inter-frame spaces, backoff and turnaround are idle on both sides; CCA is
# an energy-detect listen, so the performing side sits in receive.
_PHASE_STATES: dict[PhaseKind, tuple[RadioState, RadioState]] = {
    PhaseKind.DIFS: (RadioState.IDLE, RadioState.IDLE),
    PhaseKind.SIFS: (RadioState.IDLE, RadioState.IDLE),
    PhaseKind.BACKOFF: (RadioState.IDLE, RadioState.IDLE),
    PhaseKind.TURNAROUND: (RadioState.IDLE, RadioState.IDLE),
    PhaseKind.CCA: (RadioState.RX, RadioState.IDLE),
    PhaseKind.TX: (RadioState.TX, RadioState.RX),
    PhaseKind.RX: (RadioState.RX, RadioState.TX),
}

SENDER = "sender"
RECEIVER = "receiver"


def phase_state(kind: PhaseKind, role: str) -> RadioState:
    """Radio state of one side of an exchange during a phase."""
    pair = _PHASE_STATES[kind]
    return pair[0] if role == SENDER else pair[1]


def role_energy_aj(timeline: ExchangeTimeline, power: RadioPowerTable) -> tuple[dict[str, int], dict[str, int]]:
    """Exact per-category energy of one exchange, for each role.

    Returns ``(sender_charges, receiver_charges)`` keyed by radio-state
    category name, in attojoules.  This is the single source of truth that
    both the per-transition bindings and the aggregate mesh accounting use.
    """
    nw = power.nanowatts()
    charges: tuple[dict[str, int], dict[str, int]] = ({}, {})
    for phase in timeline.phases:
        states = _PHASE_STATES[phase.kind]
        for side in (0, 1):
            cat = states[side].value
            charges[side][cat] = charges[side].get(cat, 0) + nw[states[side]] * phase.duration_ns
    return charges


class EnergyTrace:
    """Per-node energy bookkeeping: category totals plus optional deltas.

    ``entries`` holds ``(time_ns, category, delta_aj)`` tuples when detailed
    tracing is on; totals are maintained either way and always equal the sum
    of the recorded deltas per category.
    """

    def __init__(self, node_id: int, detailed: bool = True):
        self.node_id = node_id
        self.detailed = detailed
        self.entries: list[tuple[SimTime, str, int]] = []
        self.totals_aj: dict[str, int] = {}
        self.closed = False

    def add(self, time_ns: SimTime, category: str, delta_aj: int) -> None:
        if self.closed:
            raise ValueError("trace is closed")
        if delta_aj < 0:
            raise ValueError("energy deltas must be >= 0")
        self.totals_aj[category] = self.totals_aj.get(category, 0) + delta_aj
        if self.detailed:
            self.entries.append((time_ns, category, delta_aj))

    def close(self) -> None:
        self.closed = True

    @property
    def total_aj(self) -> int:
        return sum(self.totals_aj.values())

    def totals_j(self) -> dict[str, float]:
        return {cat: aj_to_j(v) for cat, v in self.totals_aj.items()}


def energy_report(trace: EnergyTrace, interval_s: float) -> dict[str, dict[int, int]]:
    """Bucket a closed trace's deltas by reporting interval.

    Returns ``{category: {interval_index: aJ}}``.  Deltas are assigned to
    the interval containing their start time; the sum over all buckets
    equals the trace totals exactly.
    """
    if not trace.closed:
        raise ValueError("energy_report requires a closed trace (run ended)")
    if interval_s <= 0:
        raise ValueError("interval must be > 0")
    if not trace.detailed:
        raise ValueError("per-interval report requires a detailed trace")
    interval_ns = round(interval_s * NS_PER_S)
    buckets: dict[str, dict[int, int]] = {}
    for time_ns, category, delta in trace.entries:
        per_cat = buckets.setdefault(category, {})
        idx = time_ns // interval_ns
        per_cat[idx] = per_cat.get(idx, 0) + delta
    return buckets


DEFAULT_INITIAL_ENERGY_J = 1000.0


class StateMachineModel:
    """Per-state power accounting charged on transitions.

    The radio is always in exactly one of four states; on every transition
    the energy ``power(old_state) * dwell_time`` is added to the old state's
    accumulator.  A transition into the current state is a legal self-loop.
    When a charge would drive the residual negative it is clamped and the
    node is marked depleted.
    """

    def __init__(
        self,
        power: RadioPowerTable,
        initial_energy_j: float = DEFAULT_INITIAL_ENERGY_J,
        start_state: RadioState = RadioState.IDLE,
    ):
        self.power = power
        self._nw = power.nanowatts()
        self.initial_aj = j_to_aj(initial_energy_j)
        self.state = start_state
        self.entry_ns: SimTime = 0
        self.acc_aj: dict[RadioState, int] = {s: 0 for s in RadioState}
        self.aux_aj = 0
        self.depleted_at: SimTime | None = None

    @property
    def consumed_aj(self) -> int:
        return sum(self.acc_aj.values()) + self.aux_aj

    @property
    def residual_aj(self) -> int:
        return self.initial_aj - self.consumed_aj

    @property
    def depleted(self) -> bool:
        return self.depleted_at is not None

    def transition(self, new_state: RadioState, now_ns: SimTime) -> int:
        """Enter ``new_state`` at ``now_ns``; returns the aJ charged to the old state."""
        if now_ns < self.entry_ns:
            raise ValueError(
                f"transition at t={now_ns} ns is before state entry at {self.entry_ns} ns"
            )
        charge = self._nw[self.state] * (now_ns - self.entry_ns)
        residual = self.residual_aj
        if charge > residual:
            charge = residual
            if self.depleted_at is None:
                self.depleted_at = now_ns
        self.acc_aj[self.state] += charge
        self.state = new_state
        self.entry_ns = now_ns
        return charge

    def charge_aux(self, delta_aj: int) -> int:
        """Charge the constant-power auxiliary consumer (MCU/sensor share)."""
        residual = self.residual_aj
        if delta_aj > residual:
            delta_aj = residual
            if self.depleted_at is None:
                self.depleted_at = self.entry_ns
        self.aux_aj += delta_aj
        return delta_aj


class UnitMode(Enum):
    POWER_ENERGY = "power-energy"
    CHARGE_CURRENT = "charge-current"


class HierarchicalModel:
    """Storage + parallel consumers and generators.

    The unit system is fixed at construction and cannot be switched later;
    the two systems are deliberately separate code paths whose agreement
    (via E = Q * V at constant nominal voltage) is a checked property rather
    than a conversion.

    Power/energy mode holds capacity and residual in integer attojoules and
    the consumer/generator flows in integer nanowatts.  Charge/current mode
    holds coulombs and amperes as floats.
    """

    def __init__(
        self,
        capacity_j: float = DEFAULT_INITIAL_ENERGY_J,
        unit_mode: UnitMode = UnitMode.POWER_ENERGY,
        nominal_voltage: float = 3.0,
        efficiency: float = 1.0,
    ):
        if capacity_j <= 0:
            raise ValueError("capacity must be > 0")
        if nominal_voltage <= 0:
            raise ValueError("nominal voltage must be > 0")
        if not 0 < efficiency <= 1.0:
            raise ValueError("efficiency must be in (0, 1]")
        self.unit_mode = unit_mode
        self.nominal_voltage = nominal_voltage
        self.efficiency = efficiency
        self.elapsed_ns: SimTime = 0
        self.depleted_at: SimTime | None = None
        self.full_at: SimTime | None = None
        if unit_mode is UnitMode.POWER_ENERGY:
            self.capacity_aj = j_to_aj(capacity_j)
            self.residual_aj = self.capacity_aj
            self.consumers_nw: dict[str, int] = {}
            self.generators_nw: dict[str, int] = {}
            self.consumed_aj = 0
            self.generated_aj = 0
        else:
            self.capacity_c = capacity_j / nominal_voltage
            self.residual_c = self.capacity_c
            self.consumers_a: dict[str, float] = {}
            self.generators_a: dict[str, float] = {}
            self.consumed_c = 0.0
            self.generated_c = 0.0

    @property
    def depleted(self) -> bool:
        return self.depleted_at is not None

    def set_consumer(self, consumer_id: str, demand: float) -> None:
        """Set a consumer's draw: watts in power mode, amperes in charge mode."""
        if demand < 0:
            raise ValueError("consumer demand must be >= 0")
        if self.unit_mode is UnitMode.POWER_ENERGY:
            self.consumers_nw[consumer_id] = w_to_nw(demand)
        else:
            self.consumers_a[consumer_id] = demand

    def set_generator(self, generator_id: str, supply: float) -> None:
        """Set a generator's supply: watts in power mode, amperes in charge mode."""
        if supply < 0:
            raise ValueError("generator supply must be >= 0")
        if self.unit_mode is UnitMode.POWER_ENERGY:
            self.generators_nw[generator_id] = w_to_nw(supply)
        else:
            self.generators_a[generator_id] = supply

    def step_ns(self, dt_ns: int) -> float:
        """Advance ``dt_ns`` nanoseconds; returns the residual (J or C)."""
        if dt_ns < 0:
            raise ValueError("dt must be >= 0")
        self.elapsed_ns += dt_ns
        if self.unit_mode is UnitMode.POWER_ENERGY:
            demand = sum(self.consumers_nw.values()) * dt_ns
            if self.efficiency != 1.0:
                demand = round(demand / self.efficiency)
            supply = sum(self.generators_nw.values()) * dt_ns
            self._apply_int(demand, supply)
            return aj_to_j(self.residual_aj)
        dt_s = dt_ns / NS_PER_S
        demand = sum(self.consumers_a.values()) * dt_s / self.efficiency
        supply = sum(self.generators_a.values()) * dt_s
        self._apply_float(demand, supply)
        return self.residual_c

    def step(self, dt_s: float) -> float:
        """Advance ``dt_s`` seconds; returns the residual (J or C)."""
        return self.step_ns(round(dt_s * NS_PER_S))

    def _apply_int(self, demand_aj: int, supply_aj: int) -> None:
        new = self.residual_aj - demand_aj + supply_aj
        if new < 0:
            # Deliver what is left; the shortfall is never consumed.
            demand_aj = self.residual_aj + supply_aj
            new = 0
            if self.depleted_at is None:
                self.depleted_at = self.elapsed_ns
        if new > self.capacity_aj:
            supply_aj -= new - self.capacity_aj
            new = self.capacity_aj
            if self.full_at is None:
                self.full_at = self.elapsed_ns
        self.consumed_aj += demand_aj
        self.generated_aj += supply_aj
        self.residual_aj = new

    def _apply_float(self, demand_c: float, supply_c: float) -> None:
        new = self.residual_c - demand_c + supply_c
        if new < 0:
            demand_c = self.residual_c + supply_c
            new = 0.0
            if self.depleted_at is None:
                self.depleted_at = self.elapsed_ns
        if new > self.capacity_c:
            supply_c -= new - self.capacity_c
            new = self.capacity_c
            if self.full_at is None:
                self.full_at = self.elapsed_ns
        self.consumed_c += demand_c
        self.generated_c += supply_c
        self.residual_c = new

    def consumed_j(self) -> float:
        if self.unit_mode is UnitMode.POWER_ENERGY:
            return aj_to_j(self.consumed_aj)
        return self.consumed_c * self.nominal_voltage


# (component, activity) -> nominal cost in joules per occurrence.  The MCU
# entries name its operating states; LEDs are charged per blink; the radio
# is charged per frame handled, independent of the frame's size.
DEFAULT_ACTIVITY_COSTS: dict[tuple[str, str], float] = {
    ("mcu", "idle"): 1e-6,
    ("mcu", "standby"): 1e-7,
    ("mcu", "extended-standby"): 5e-8,
    ("mcu", "energy-saving"): 2e-8,
    ("mcu", "on"): 5e-6,
    ("mcu", "down"): 0.0,
    ("mcu", "adc"): 2e-6,
    ("led", "led0"): 3e-6,
    ("led", "led1"): 3e-6,
    ("led", "led2"): 3e-6,
    ("radio", "send"): 100e-6,
    ("radio", "receive"): 50e-6,
    ("radio", "synchronize"): 10e-6,
    ("memory", "read"): 1e-6,
    ("memory", "write"): 2e-6,
}


class ComponentAccountingModel:
    """Fixed cost per activity occurrence, accumulated per component.

    There is no storage element: the model only traces what was consumed.
    Costs are per occurrence, so totals depend on activity counts alone --
    never on payload sizes, bitrates or node positions.
    """

    def __init__(self, costs: dict[tuple[str, str], float] | None = None):
        table = dict(DEFAULT_ACTIVITY_COSTS)
        if costs:
            table.update(costs)
        for key, cost in table.items():
            if cost < 0:
                raise ValueError(f"activity cost for {key} must be >= 0")
        self.costs_aj = {key: j_to_aj(cost) for key, cost in table.items()}
        self.acc_aj: dict[tuple[str, str], int] = {key: 0 for key in self.costs_aj}

    def charge(self, component: str, activity: str, count: int = 1) -> int:
        """Charge ``count`` occurrences; returns the aJ charged."""
        if count < 0:
            raise ValueError("count must be >= 0")
        key = (component, activity)
        if key not in self.costs_aj:
            raise ValueError(f"unknown activity {activity!r} for component {component!r}")
        delta = self.costs_aj[key] * count
        self.acc_aj[key] += delta
        return delta

    @property
    def total_aj(self) -> int:
        return sum(self.acc_aj.values())

    def component_totals_aj(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for (component, _), aj in self.acc_aj.items():
            out[component] = out.get(component, 0) + aj
        return out


class EnergyBinding:
    """Drives one node's energy model from exchange timelines.

    ``apply_exchange`` walks the phase sequence in one role and charges the
    bound model; ``close`` settles the idle tail (and the auxiliary
    consumer) up to the end of the run and closes the trace.
    """

    kind = "base"

    def __init__(self, node_id: int, detailed_trace: bool = True):
        self.node_id = node_id
        self.trace = EnergyTrace(node_id, detailed=detailed_trace)

    def can_transmit(self) -> bool:
        return True

    def apply_exchange(self, timeline: ExchangeTimeline, start_ns: SimTime, role: str) -> None:
        raise NotImplementedError

    def close(self, end_ns: SimTime) -> None:
        raise NotImplementedError

    def totals_aj(self) -> dict[str, int]:
        return dict(self.trace.totals_aj)

    @property
    def total_aj(self) -> int:
        return self.trace.total_aj


class StateMachineBinding(EnergyBinding):
    kind = "sm"

    def __init__(
        self,
        node_id: int,
        power: RadioPowerTable,
        initial_energy_j: float = DEFAULT_INITIAL_ENERGY_J,
        aux_power_w: float = 0.0,
        detailed_trace: bool = True,
    ):
        super().__init__(node_id, detailed_trace)
        self.model = StateMachineModel(power, initial_energy_j)
        self.aux_nw = w_to_nw(aux_power_w)

    def can_transmit(self) -> bool:
        return not self.model.depleted

    def _transition(self, state: RadioState, now_ns: SimTime) -> None:
        dwell_start = self.model.entry_ns
        old_state = self.model.state
        charged = self.model.transition(state, now_ns)
        if charged or now_ns > dwell_start:
            self.trace.add(dwell_start, old_state.value, charged)

    def apply_exchange(self, timeline: ExchangeTimeline, start_ns: SimTime, role: str) -> None:
        t = start_ns
        for phase in timeline.phases:
            self._transition(phase_state(phase.kind, role), t)
            t += phase.duration_ns
        self._transition(RadioState.IDLE, t)

    def close(self, end_ns: SimTime) -> None:
        self._transition(RadioState.IDLE, end_ns)
        if self.aux_nw:
            delta = self.model.charge_aux(self.aux_nw * end_ns)
            self.trace.add(0, "aux", delta)
        self.trace.close()


class HierarchicalBinding(EnergyBinding):
    kind = "hier"

    def __init__(
        self,
        node_id: int,
        power: RadioPowerTable,
        capacity_j: float = DEFAULT_INITIAL_ENERGY_J,
        unit_mode: UnitMode = UnitMode.POWER_ENERGY,
        nominal_voltage: float = 3.0,
        aux_power_w: float = 0.0,
        harvest_w: float = 0.0,
        efficiency: float = 1.0,
        detailed_trace: bool = True,
    ):
        super().__init__(node_id, detailed_trace)
        self.power = power
        self.model = HierarchicalModel(capacity_j, unit_mode, nominal_voltage, efficiency)
        self.aux_power_w = aux_power_w
        if aux_power_w:
            self.model.set_consumer("aux", self._flow(aux_power_w))
        if harvest_w:
            self.model.set_generator("harvester", self._flow(harvest_w))
        self._cursor: SimTime = 0
        self._aux_aj_per_ns_num = w_to_nw(aux_power_w)  # aJ per ns, as nW

    def _flow(self, watts: float) -> float:
        """A power demand expressed in the model's flow unit (W or A)."""
        if self.model.unit_mode is UnitMode.POWER_ENERGY:
            return watts
        return watts / self.model.nominal_voltage

    def can_transmit(self) -> bool:
        return not self.model.depleted

    def _dwell(self, state: RadioState, t0: SimTime, t1: SimTime) -> None:
        if t1 < t0:
            raise ValueError("dwell interval end precedes its start")
        if t1 == t0:
            return
        dt = t1 - t0
        power_w = getattr(self.power, f"{state.value}_w")
        self.model.set_consumer("radio", self._flow(power_w))
        if self.model.unit_mode is UnitMode.POWER_ENERGY:
            before = self.model.consumed_aj
            self.model.step_ns(dt)
            consumed = self.model.consumed_aj - before
            aux = self._aux_aj_per_ns_num * dt
        else:
            before = self.model.consumed_c
            self.model.step_ns(dt)
            consumed = j_to_aj((self.model.consumed_c - before) * self.model.nominal_voltage)
            aux = j_to_aj(self.aux_power_w * dt / NS_PER_S)
        radio = consumed - aux
        if radio > 0:
            self.trace.add(t0, state.value, radio)
        if aux > 0:
            self.trace.add(t0, "aux", aux)

    def apply_exchange(self, timeline: ExchangeTimeline, start_ns: SimTime, role: str) -> None:
        if start_ns > self._cursor:
            self._dwell(RadioState.IDLE, self._cursor, start_ns)
        t = start_ns
        for phase in timeline.phases:
            self._dwell(phase_state(phase.kind, role), t, t + phase.duration_ns)
            t += phase.duration_ns
        self._cursor = t

    def close(self, end_ns: SimTime) -> None:
        if end_ns > self._cursor:
            self._dwell(RadioState.IDLE, self._cursor, end_ns)
            self._cursor = end_ns
        self.trace.close()


class ComponentBinding(EnergyBinding):
    kind = "comp"

    def __init__(
        self,
        node_id: int,
        costs: dict[tuple[str, str], float] | None = None,
        detailed_trace: bool = True,
    ):
        super().__init__(node_id, detailed_trace)
        self.model = ComponentAccountingModel(costs)

    def apply_exchange(self, timeline: ExchangeTimeline, start_ns: SimTime, role: str) -> None:
        own = Direction.SENDER if role == SENDER else Direction.RECEIVER
        sends = receives = 0
        for phase in timeline.phases:
            if phase.frame is None:
                continue
            if phase.direction is own:
                sends += 1
            else:
                receives += 1
        if sends:
            self.trace.add(start_ns, "radio.send", self.model.charge("radio", "send", sends))
        if receives:
            self.trace.add(start_ns, "radio.receive", self.model.charge("radio", "receive", receives))

    def close(self, end_ns: SimTime) -> None:
        self.trace.close()


MODEL_KINDS = ("sm", "hier", "comp")


def attach_model(
    node_id: int,
    kind: str,
    power: RadioPowerTable | None = None,
    initial_energy_j: float = DEFAULT_INITIAL_ENERGY_J,
    aux_power_w: float = 0.0,
    harvest_w: float = 0.0,
    unit_mode: UnitMode = UnitMode.POWER_ENERGY,
    nominal_voltage: float = 3.0,
    efficiency: float = 1.0,
    activity_costs: dict[tuple[str, str], float] | None = None,
    detailed_trace: bool = True,
) -> EnergyBinding:
    """Create a node's energy binding of the requested model kind.

    State-machine and component-accounting models cannot model harvesting;
    passing ``harvest_w`` > 0 for those kinds is an error.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r} (expected one of {MODEL_KINDS})")
    if harvest_w < 0:
        raise ValueError("harvest_w must be >= 0")
    if kind == "sm":
        if harvest_w:
            raise ValueError("state-machine model cannot model energy harvester units")
        if power is None:
            raise ValueError("state-machine model requires a power table")
        return StateMachineBinding(node_id, power, initial_energy_j, aux_power_w, detailed_trace)
    if kind == "hier":
        if power is None:
            raise ValueError("hierarchical model requires a power table")
        return HierarchicalBinding(
            node_id, power, initial_energy_j, unit_mode, nominal_voltage,
            aux_power_w, harvest_w, efficiency, detailed_trace,
        )
    if harvest_w:
        raise ValueError("component-accounting model cannot model energy harvester units")
    return ComponentBinding(node_id, activity_costs, detailed_trace)
