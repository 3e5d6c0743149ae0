"""Machine-readable qualitative descriptors of WSN simulators.

A :class:`SimulatorDescriptor` captures the qualitative evaluation criteria
for one simulator: nature, engine type, license, UI, platforms,
heterogeneity, design philosophy, modelling and mobility support, wireless
medium models, the energy model's shape, and the protocol stack.  Three
descriptors for widely used simulators (NS2, TOSSIM, OMNeT++/INET) ship as
YAML data and serve as fixtures.

``comparison_table`` renders any set of descriptors as a
criterion-by-simulator matrix with a fixed row order, so comparisons do not
depend on input order.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml


class DescriptorError(ValueError):
    """Descriptor schema violation, reported with its field path."""


class Nature(Enum):
    SIMULATOR = "simulator"
    EMULATOR = "emulator"


class SimType(Enum):
    DISCRETE_EVENT = "discrete-event"
    CONTINUOUS = "continuous"
    HYBRID = "hybrid"


class DesignPhilosophy(Enum):
    """How far simulated parameter interactions reach across abstraction levels.

    Levels, highest first: abstract algorithms, high-level protocols,
    low-level protocols, hardware.  Interactions confined to one level make
    a single-level simulator; interactions between adjacent levels a
    multi-level one; interactions spreading across all levels a cross-level
    one.
    """

    SINGLE_LEVEL = "single-level"
    MULTI_LEVEL = "multi-level"
    CROSS_LEVEL = "cross-level"


class BatterySupport(Enum):
    NONE = "none"
    IDEAL = "ideal"
    FULL = "full"


@dataclass(frozen=True)
class UiSupport:
    gui: bool
    languages: tuple[str, ...]


@dataclass(frozen=True)
class EnergySupport:
    battery: BatterySupport
    rf_states: bool
    harvester: bool
    limitations: str = ""


@dataclass(frozen=True)
class SimulatorDescriptor:
    name: str
    nature: Nature
    sim_type: SimType
    license: str
    ui: UiSupport
    platforms: tuple[str, ...]
    heterogeneity: bool
    design_philosophy: DesignPhilosophy
    modelling: bool
    mobility: bool
    medium_models: tuple[str, ...]
    energy: EnergySupport
    protocols: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            raise DescriptorError("name: must not be empty")
        if self.energy.harvester and "harvest" in self.energy.limitations.lower():
            raise DescriptorError(
                "energy.harvester: must be false when the limitations mention "
                "missing harvester support"
            )


def _expect(data: dict, key: str, types, source: str):
    if key not in data:
        raise DescriptorError(f"{source}: {key}: missing required field")
    value = data[key]
    if not isinstance(value, types):
        raise DescriptorError(
            f"{source}: {key}: expected {getattr(types, '__name__', types)}, got {type(value).__name__}"
        )
    return value


def _enum(data: dict, key: str, enum_cls, source: str):
    raw = _expect(data, key, str, source)
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = "|".join(m.value for m in enum_cls)
        raise DescriptorError(
            f"{source}: {key}: unknown value {raw!r} (expected {allowed})"
        ) from None


def _str_list(data: dict, key: str, source: str) -> tuple[str, ...]:
    raw = _expect(data, key, list, source)
    for i, item in enumerate(raw):
        if not isinstance(item, str):
            raise DescriptorError(f"{source}: {key}[{i}]: expected a string")
    return tuple(raw)


def descriptor_from_dict(data, source: str = "<dict>") -> SimulatorDescriptor:
    if not isinstance(data, dict):
        raise DescriptorError(f"{source}: expected a mapping at the top level")
    ui_data = _expect(data, "ui", dict, source)
    energy_data = _expect(data, "energy", dict, source)
    protocols_data = data.get("protocols", {})
    if not isinstance(protocols_data, dict):
        raise DescriptorError(f"{source}: protocols: expected a mapping of layer -> list")
    protocols = {}
    for layer, entries in protocols_data.items():
        if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
            raise DescriptorError(f"{source}: protocols.{layer}: expected a list of strings")
        protocols[str(layer)] = tuple(entries)
    try:
        return SimulatorDescriptor(
            name=_expect(data, "name", str, source),
            nature=_enum(data, "nature", Nature, source),
            sim_type=_enum(data, "sim_type", SimType, source),
            license=_expect(data, "license", str, source),
            ui=UiSupport(
                gui=_expect(ui_data, "gui", bool, f"{source}: ui"),
                languages=_str_list(ui_data, "languages", f"{source}: ui"),
            ),
            platforms=_str_list(data, "platforms", source),
            heterogeneity=_expect(data, "heterogeneity", bool, source),
            design_philosophy=_enum(data, "design_philosophy", DesignPhilosophy, source),
            modelling=_expect(data, "modelling", bool, source),
            mobility=_expect(data, "mobility", bool, source),
            medium_models=_str_list(data, "medium_models", source),
            energy=EnergySupport(
                battery=_enum(energy_data, "battery", BatterySupport, f"{source}: energy"),
                rf_states=_expect(energy_data, "rf_states", bool, f"{source}: energy"),
                harvester=_expect(energy_data, "harvester", bool, f"{source}: energy"),
                limitations=str(energy_data.get("limitations", "")),
            ),
            protocols=protocols,
        )
    except DescriptorError:
        raise
    except (TypeError, ValueError) as exc:
        raise DescriptorError(f"{source}: {exc}") from exc


def descriptor_to_dict(descriptor: SimulatorDescriptor) -> dict:
    return {
        "name": descriptor.name,
        "nature": descriptor.nature.value,
        "sim_type": descriptor.sim_type.value,
        "license": descriptor.license,
        "ui": {"gui": descriptor.ui.gui, "languages": list(descriptor.ui.languages)},
        "platforms": list(descriptor.platforms),
        "heterogeneity": descriptor.heterogeneity,
        "design_philosophy": descriptor.design_philosophy.value,
        "modelling": descriptor.modelling,
        "mobility": descriptor.mobility,
        "medium_models": list(descriptor.medium_models),
        "energy": {
            "battery": descriptor.energy.battery.value,
            "rf_states": descriptor.energy.rf_states,
            "harvester": descriptor.energy.harvester,
            "limitations": descriptor.energy.limitations,
        },
        "protocols": {layer: list(v) for layer, v in descriptor.protocols.items()},
    }


def load_descriptor(path: str | Path) -> SimulatorDescriptor:
    """Load and validate a YAML descriptor file."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise DescriptorError(f"{path}: not valid YAML: {exc}") from exc
    return descriptor_from_dict(data, source=str(path))


def save_descriptor(descriptor: SimulatorDescriptor, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(descriptor_to_dict(descriptor), fh, sort_keys=False)


BUNDLED_DESCRIPTORS = ("ns2", "tossim", "omnetpp-inet")


def bundled_descriptor_path(name: str) -> Path:
    """Path of one of the descriptors shipped with the package."""
    if name not in BUNDLED_DESCRIPTORS:
        raise DescriptorError(
            f"no bundled descriptor {name!r} (have: {', '.join(BUNDLED_DESCRIPTORS)})"
        )
    resource = importlib.resources.files("wsnsim") / "data" / "descriptors" / f"{name}.yaml"
    return Path(str(resource))


def load_bundled(name: str) -> SimulatorDescriptor:
    return load_descriptor(bundled_descriptor_path(name))


# Fixed criteria row order of the comparison matrix.
CRITERIA = (
    "Nature of the simulator",
    "Type of the simulator",
    "License",
    "User Interface",
    "Supported platforms",
    "Heterogeneity",
    "Design philosophy",
    "Modelling",
    "Mobility model",
    "Wireless medium model",
    "Energy model",
    "Supported technology and protocols",
)

_PROTOCOL_LAYER_ORDER = ("application", "transport", "network", "link", "routing")

_BATTERY_CELL = {
    BatterySupport.NONE: "No",
    BatterySupport.IDEAL: "Only for ideal battery",
    BatterySupport.FULL: "Yes",
}


def _yes_no(flag: bool) -> str:
    return "Yes" if flag else "No"


def _cell(descriptor: SimulatorDescriptor, criterion: str) -> str:
    d = descriptor
    if criterion == "Nature of the simulator":
        return d.nature.value.capitalize()
    if criterion == "Type of the simulator":
        return d.sim_type.value
    if criterion == "License":
        return d.license
    if criterion == "User Interface":
        gui = "yes" if d.ui.gui else "no"
        return f"GUI: {gui}; languages: {', '.join(d.ui.languages)}"
    if criterion == "Supported platforms":
        return ", ".join(d.platforms)
    if criterion == "Heterogeneity":
        return _yes_no(d.heterogeneity)
    if criterion == "Design philosophy":
        return d.design_philosophy.value
    if criterion == "Modelling":
        return "Available" if d.modelling else "Not available"
    if criterion == "Mobility model":
        return _yes_no(d.mobility)
    if criterion == "Wireless medium model":
        return ", ".join(d.medium_models)
    if criterion == "Energy model":
        return (
            f"Battery model: {_BATTERY_CELL[d.energy.battery]}; "
            f"RF states: {_yes_no(d.energy.rf_states)}; "
            f"Limitations: {d.energy.limitations or 'none stated'}"
        )
    if criterion == "Supported technology and protocols":
        layers = [l for l in _PROTOCOL_LAYER_ORDER if l in d.protocols]
        layers += sorted(set(d.protocols) - set(_PROTOCOL_LAYER_ORDER))
        if not layers:
            return "none stated"
        return "; ".join(f"{layer}: {', '.join(d.protocols[layer])}" for layer in layers)
    raise KeyError(criterion)


@dataclass(frozen=True)
class ComparisonReport:
    """Criterion-by-simulator matrix with structured cell access."""

    names: tuple[str, ...]
    rows: tuple[tuple[str, tuple[str, ...]], ...]  # (criterion, cells)

    def cell(self, criterion: str, name: str) -> str:
        col = self.names.index(name)
        for crit, cells in self.rows:
            if crit == criterion:
                return cells[col]
        raise KeyError(criterion)

    def text(self) -> str:
        header = ["Criterion", *self.names]
        table = [header] + [[crit, *cells] for crit, cells in self.rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = []
        for k, row in enumerate(table):
            lines.append(" | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if k == 0:
                lines.append("-+-".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:  # pragma: no cover
        return self.text()


def comparison_table(descriptors: list[SimulatorDescriptor]) -> ComparisonReport:
    """Build the comparison matrix; requires at least two descriptors."""
    if len(descriptors) < 2:
        raise DescriptorError("comparison requires at least two descriptors")
    names = tuple(d.name for d in descriptors)
    rows = tuple(
        (criterion, tuple(_cell(d, criterion) for d in descriptors))
        for criterion in CRITERIA
    )
    return ComparisonReport(names, rows)
