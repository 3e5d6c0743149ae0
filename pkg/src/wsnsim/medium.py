"""Wireless propagation: received power, path loss, delay, reachability.

Three path-loss models are supported:

* free space (Friis):      Pr = Pt * Gt * Gr * (lambda / (4 pi d))^2
* two-ray ground:          Pr = Pt * Gt * Gr * ht^2 * hr^2 / d^4
* log-normal shadowing:    PL(d) = PL(d0) + 10 n log10(d / d0) + X_sigma  [dB]

All functions are pure; the Gaussian shadowing draw is passed in explicitly
so callers control how it is frozen (here: one draw per link per run).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .core import RngStream, link_stream

SPEED_OF_LIGHT = 299_792_458.0  # m/s

DEFAULT_FREQUENCY_HZ = 2.4e9  # shared by the 802.11b and 802.15.4 bands
DEFAULT_SENSITIVITY_DBM = -85.0


class PathLossModel(Enum):
    FREE_SPACE = "free-space"
    TWO_RAY_GROUND = "two-ray-ground"
    LOG_NORMAL_SHADOWING = "log-normal-shadowing"


@dataclass(frozen=True)
class PathLossParams:
    """Parameters for the propagation models.

    ``ht_m``/``hr_m`` apply to two-ray ground only; ``d0_m``, ``pl_d0_db``,
    ``exponent`` and ``sigma_db`` apply to log-normal shadowing only.  When
    ``pl_d0_db`` is None, the reference loss is the free-space loss at
    ``d0_m`` for ``frequency_hz``.
    """

    model: PathLossModel = PathLossModel.FREE_SPACE
    tx_gain: float = 1.0
    rx_gain: float = 1.0
    frequency_hz: float = DEFAULT_FREQUENCY_HZ
    ht_m: float = 1.0
    hr_m: float = 1.0
    d0_m: float = 1.0
    pl_d0_db: float | None = None
    exponent: float = 2.0
    sigma_db: float = 0.0

    def __post_init__(self):
        if self.frequency_hz <= 0:
            raise ValueError("frequency must be > 0")
        if self.tx_gain <= 0 or self.rx_gain <= 0:
            raise ValueError("antenna gains must be > 0")
        if self.d0_m <= 0:
            raise ValueError("reference distance d0 must be > 0")
        if self.exponent <= 0:
            raise ValueError("path-loss exponent must be > 0")
        if self.sigma_db < 0:
            raise ValueError("shadowing sigma must be >= 0")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    def reference_loss_db(self) -> float:
        """PL(d0) in dB; free-space loss at d0 when not given explicitly."""
        if self.pl_d0_db is not None:
            return self.pl_d0_db
        return 20.0 * math.log10(4.0 * math.pi * self.d0_m / self.wavelength_m)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("power must be > 0 to express in dBm")
    return 10.0 * math.log10(watts * 1000.0)


DEFAULT_SENSITIVITY_W = dbm_to_watts(DEFAULT_SENSITIVITY_DBM)


@dataclass(frozen=True)
class LinkBudget:
    """Power and timing of one link at a given distance."""

    tx_power_w: float
    rx_power_w: float
    distance_m: float
    delay_s: float


def link_budget(
    tx_power_w: float,
    params: PathLossParams,
    distance_m: float,
    shadowing_draw_db: float = 0.0,
) -> LinkBudget:
    """Evaluate the selected model plus line-of-sight delay for one link."""
    return LinkBudget(
        tx_power_w=tx_power_w,
        rx_power_w=rx_power(tx_power_w, params, distance_m, shadowing_draw_db),
        distance_m=distance_m,
        delay_s=propagation_delay(distance_m),
    )


def free_space_rx_power(tx_power_w: float, params: PathLossParams, distance_m: float) -> float:
    """Friis received power in watts."""
    if distance_m <= 0:
        raise ValueError("free-space model is singular at distance 0")
    factor = params.wavelength_m / (4.0 * math.pi * distance_m)
    return tx_power_w * params.tx_gain * params.rx_gain * factor * factor


def two_ray_ground_rx_power(tx_power_w: float, params: PathLossParams, distance_m: float) -> float:
    """Two-ray ground reflection received power in watts (d^-4 law)."""
    if distance_m <= 0:
        raise ValueError("two-ray model is singular at distance 0")
    num = tx_power_w * params.tx_gain * params.rx_gain * params.ht_m**2 * params.hr_m**2
    return num / distance_m**4


def crossover_distance(params: PathLossParams) -> float:
    """Distance where the two-ray formula crosses the free-space one."""
    return 4.0 * math.pi * params.ht_m * params.hr_m / params.wavelength_m


def log_normal_path_loss_db(
    params: PathLossParams, distance_m: float, shadowing_draw_db: float = 0.0
) -> float:
    """Log-distance path loss plus a shadowing term, in dB.

    ``shadowing_draw_db`` is the frozen Gaussian draw for the link; with a
    zero draw (or sigma 0) this reduces exactly to the deterministic
    log-distance model.
    """
    if distance_m < params.d0_m:
        raise ValueError(
            f"log-normal model is only valid for distance >= d0 ({params.d0_m} m)"
        )
    return (
        params.reference_loss_db()
        + 10.0 * params.exponent * math.log10(distance_m / params.d0_m)
        + shadowing_draw_db
    )


def log_normal_rx_power(
    tx_power_w: float, params: PathLossParams, distance_m: float, shadowing_draw_db: float = 0.0
) -> float:
    pl_db = log_normal_path_loss_db(params, distance_m, shadowing_draw_db)
    return tx_power_w * params.tx_gain * params.rx_gain * 10.0 ** (-pl_db / 10.0)


def rx_power(
    tx_power_w: float,
    params: PathLossParams,
    distance_m: float,
    shadowing_draw_db: float = 0.0,
) -> float:
    """Received power under the model selected in ``params``."""
    if params.model is PathLossModel.FREE_SPACE:
        return free_space_rx_power(tx_power_w, params, distance_m)
    if params.model is PathLossModel.TWO_RAY_GROUND:
        return two_ray_ground_rx_power(tx_power_w, params, distance_m)
    return log_normal_rx_power(tx_power_w, params, distance_m, shadowing_draw_db)


def propagation_delay(distance_m: float) -> float:
    """Line-of-sight propagation delay in seconds."""
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    return distance_m / SPEED_OF_LIGHT


def propagation_delay_ns(distance_m: float) -> int:
    """Propagation delay as integer nanoseconds (round half up)."""
    return int(distance_m / SPEED_OF_LIGHT * 1e9 + 0.5)


def shadowing_draw_db(params: PathLossParams, run_seed: int, node_a: int, node_b: int) -> float:
    """Gaussian shadowing draw frozen per (link, run).

    The draw is derived from the run seed and the unordered node pair, so it
    is identical for every frame on the link within a run and symmetric in
    direction.
    """
    if params.sigma_db == 0.0:
        return 0.0
    stream: RngStream = link_stream(run_seed, node_a, node_b)
    return stream.gauss(0.0, params.sigma_db)


def in_range(
    tx_power_w: float,
    params: PathLossParams,
    distance_m: float,
    sensitivity_w: float = DEFAULT_SENSITIVITY_W,
    shadowing_draw_db: float = 0.0,
) -> bool:
    """True when the received power meets the receiver sensitivity."""
    return rx_power(tx_power_w, params, distance_m, shadowing_draw_db) >= sensitivity_w
