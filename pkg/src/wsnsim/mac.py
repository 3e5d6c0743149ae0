"""Frame airtimes and CSMA/CA channel-access timelines.

Two PHY/MAC families are modelled:

* 802.11b DCF with RTS/CTS handshaking.  Long PLCP preamble + header
  (192 us) and all frames at 11 Mbit/s, so a frame of B bytes is on air for
  192 + 8*B/11 microseconds.  SIFS 10 us, DIFS 50 us, slot 20 us,
  CWmin/CWmax 31/1023.
* 802.15.4 (2.4 GHz O-QPSK) unslotted CSMA-CA with CCA.  62.5 ksym/s gives
  32 us per byte; SHR+PHR 192 us (6 bytes); CCA 8 symbols (128 us), unit
  backoff period 20 symbols (320 us), turnaround 12 symbols (192 us).

Airtime math is carried in exact integer nanoseconds inside timelines;
``compute_airtime`` returns the unrounded microsecond value and rounding to
whole microseconds happens only when a value is reported.

The ``dot11b/ns2`` and ``dot11b/omnet`` presets differ only in the number of
protocol overhead bytes added to an application payload to form the data
frame (55 vs 65).  ``fit_frame_overhead`` re-derives these presets by brute
force from a table of reported data-frame airtimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .core import NS_PER_US, RngStream

# 802.11b control frame MAC sizes (bytes, including FCS)
RTS_BYTES = 20
CTS_BYTES = 14
ACK_BYTES = 14
# 802.15.4 immediate acknowledgement MPDU (bytes)
ACK_BYTES_154 = 11


class Phy(Enum):
    DOT11B = "dot11b"
    DOT154 = "dot154"


class FrameRole(Enum):
    RTS = "rts"
    CTS = "cts"
    DATA = "data"
    ACK = "ack"


@dataclass(frozen=True)
class PhyProfile:
    """Timing parameters of one PHY/MAC preset.

    ``sifs_us``/``difs_us`` apply to 802.11b; ``cca_us``/``turnaround_us``
    to 802.15.4.  ``backoff_unit_us`` is the backoff slot duration for both
    families.  ``overhead_bytes`` is added to the application payload to
    form the data frame.
    """

    profile_id: str
    phy: Phy
    bitrate_bps: int
    preamble_plus_phy_header_us: int
    overhead_bytes: int
    ack_bytes: int
    rts_bytes: int = 0
    cts_bytes: int = 0
    sifs_us: int = 0
    difs_us: int = 0
    backoff_unit_us: int = 0
    cca_us: int = 0
    turnaround_us: int = 0
    cw_min: int = 0
    cw_max: int = 0

    def __post_init__(self):
        if self.bitrate_bps <= 0:
            raise ValueError("bitrate must be > 0")
        if self.overhead_bytes <= 0:
            raise ValueError("overhead_bytes must be > 0")
        for name in ("preamble_plus_phy_header_us", "sifs_us", "difs_us",
                     "backoff_unit_us", "cca_us", "turnaround_us"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


DOT11B_NS2 = PhyProfile(
    profile_id="dot11b/ns2",
    phy=Phy.DOT11B,
    bitrate_bps=11_000_000,
    preamble_plus_phy_header_us=192,
    overhead_bytes=55,
    ack_bytes=ACK_BYTES,
    rts_bytes=RTS_BYTES,
    cts_bytes=CTS_BYTES,
    sifs_us=10,
    difs_us=50,
    backoff_unit_us=20,
    cw_min=31,
    cw_max=1023,
)

DOT11B_OMNET = PhyProfile(
    profile_id="dot11b/omnet",
    phy=Phy.DOT11B,
    bitrate_bps=11_000_000,
    preamble_plus_phy_header_us=192,
    overhead_bytes=65,
    ack_bytes=ACK_BYTES,
    rts_bytes=RTS_BYTES,
    cts_bytes=CTS_BYTES,
    sifs_us=10,
    difs_us=50,
    backoff_unit_us=20,
    cw_min=31,
    cw_max=1023,
)

DOT154_DEFAULT = PhyProfile(
    profile_id="dot154/default",
    phy=Phy.DOT154,
    bitrate_bps=250_000,
    preamble_plus_phy_header_us=192,
    overhead_bytes=16,
    ack_bytes=ACK_BYTES_154,
    backoff_unit_us=320,
    cca_us=128,
    turnaround_us=192,
    cw_min=7,   # 2^macMinBE - 1
    cw_max=31,  # 2^macMaxBE - 1
)

PROFILES: dict[str, PhyProfile] = {
    p.profile_id: p for p in (DOT11B_NS2, DOT11B_OMNET, DOT154_DEFAULT)
}


def get_profile(profile_id: str) -> PhyProfile:
    try:
        return PROFILES[profile_id]
    except KeyError:
        known = ", ".join(sorted(PROFILES))
        raise ValueError(f"unknown PHY profile {profile_id!r} (known: {known})") from None


def compute_airtime(profile: PhyProfile, frame_bytes: int) -> float:
    """On-air duration of a frame in microseconds, unrounded."""
    if frame_bytes <= 0:
        raise ValueError("frame_bytes must be > 0")
    return profile.preamble_plus_phy_header_us + 8.0 * frame_bytes / (profile.bitrate_bps / 1e6)


def airtime_ns(profile: PhyProfile, frame_bytes: int) -> int:
    """Exact integer-nanosecond airtime (payload term rounded half up)."""
    if frame_bytes <= 0:
        raise ValueError("frame_bytes must be > 0")
    num = 8 * frame_bytes * 1_000_000_000
    return profile.preamble_plus_phy_header_us * NS_PER_US + (num + profile.bitrate_bps // 2) // profile.bitrate_bps


def reported_airtime_us(profile: PhyProfile, frame_bytes: int) -> int:
    """Report-time airtime: whole microseconds, floored."""
    return int(compute_airtime(profile, frame_bytes))


@dataclass(frozen=True)
class FrameSpec:
    role: FrameRole
    total_bytes: int
    airtime_us: float

    @classmethod
    def build(cls, profile: PhyProfile, role: FrameRole, total_bytes: int) -> "FrameSpec":
        return cls(role, total_bytes, compute_airtime(profile, total_bytes))


class PhaseKind(Enum):
    DIFS = "difs"
    BACKOFF = "backoff"
    TX = "tx"
    RX = "rx"
    SIFS = "sifs"
    TURNAROUND = "turnaround"
    CCA = "cca"


class Direction(Enum):
    """Which side of the exchange drives a phase.

    ``SENDER``/``RECEIVER`` name the transmitting side of a frame phase
    (the other side is receiving); ``BOTH_IDLE`` marks gaps where neither
    radio is active.
    """

    SENDER = "sender"
    RECEIVER = "receiver"
    BOTH_IDLE = "both-idle"


@dataclass(frozen=True)
class Phase:
    kind: PhaseKind
    duration_ns: int
    direction: Direction
    frame: FrameSpec | None = None

    @property
    def duration_us(self) -> float:
        return self.duration_ns / NS_PER_US


@dataclass(frozen=True)
class ExchangeTimeline:
    """The timed phase sequence of one channel-access exchange."""

    profile_id: str
    phases: tuple[Phase, ...]
    total_ns: int

    def __post_init__(self):
        if self.total_ns != sum(p.duration_ns for p in self.phases):
            raise ValueError("timeline total does not equal the sum of its phases")

    @property
    def total_us(self) -> float:
        return self.total_ns / NS_PER_US

    def frames(self) -> list[FrameSpec]:
        return [p.frame for p in self.phases if p.frame is not None]


def _timeline(profile: PhyProfile, phases: list[Phase]) -> ExchangeTimeline:
    return ExchangeTimeline(profile.profile_id, tuple(phases), sum(p.duration_ns for p in phases))


def build_rts_cts_exchange(
    profile: PhyProfile, payload_bytes: int, backoff_us: float = 0.0
) -> ExchangeTimeline:
    """802.11b DCF exchange: DIFS, backoff, RTS, SIFS, CTS, SIFS, DATA, SIFS, ACK.

    The data frame carries ``profile.overhead_bytes + payload_bytes``.
    """
    if profile.phy is not Phy.DOT11B:
        raise ValueError(f"RTS/CTS exchange requires a dot11b profile, got {profile.profile_id}")
    if payload_bytes <= 0:
        raise ValueError("payload_bytes must be > 0")
    if backoff_us < 0:
        raise ValueError("backoff must be >= 0")
    data_bytes = profile.overhead_bytes + payload_bytes
    rts = FrameSpec.build(profile, FrameRole.RTS, profile.rts_bytes)
    cts = FrameSpec.build(profile, FrameRole.CTS, profile.cts_bytes)
    data = FrameSpec.build(profile, FrameRole.DATA, data_bytes)
    ack = FrameSpec.build(profile, FrameRole.ACK, profile.ack_bytes)
    sifs = profile.sifs_us * NS_PER_US
    phases = [
        Phase(PhaseKind.DIFS, profile.difs_us * NS_PER_US, Direction.BOTH_IDLE),
        Phase(PhaseKind.BACKOFF, int(backoff_us * NS_PER_US + 0.5), Direction.BOTH_IDLE),
        Phase(PhaseKind.TX, airtime_ns(profile, profile.rts_bytes), Direction.SENDER, rts),
        Phase(PhaseKind.SIFS, sifs, Direction.BOTH_IDLE),
        Phase(PhaseKind.RX, airtime_ns(profile, profile.cts_bytes), Direction.RECEIVER, cts),
        Phase(PhaseKind.SIFS, sifs, Direction.BOTH_IDLE),
        Phase(PhaseKind.TX, airtime_ns(profile, data_bytes), Direction.SENDER, data),
        Phase(PhaseKind.SIFS, sifs, Direction.BOTH_IDLE),
        Phase(PhaseKind.RX, airtime_ns(profile, profile.ack_bytes), Direction.RECEIVER, ack),
    ]
    return _timeline(profile, phases)


def build_cca_exchange(
    profile: PhyProfile, payload_bytes: int, backoff_periods: int = 0
) -> ExchangeTimeline:
    """Unslotted 802.15.4 exchange: backoff, CCA, turnaround, DATA, turnaround, ACK."""
    if profile.phy is not Phy.DOT154:
        raise ValueError(f"CCA exchange requires a dot154 profile, got {profile.profile_id}")
    if payload_bytes <= 0:
        raise ValueError("payload_bytes must be > 0")
    if backoff_periods < 0:
        raise ValueError("backoff_periods must be >= 0")
    mpdu_bytes = profile.overhead_bytes + payload_bytes
    data = FrameSpec.build(profile, FrameRole.DATA, mpdu_bytes)
    ack = FrameSpec.build(profile, FrameRole.ACK, profile.ack_bytes)
    turnaround = profile.turnaround_us * NS_PER_US
    phases = [
        Phase(PhaseKind.BACKOFF, backoff_periods * profile.backoff_unit_us * NS_PER_US,
              Direction.BOTH_IDLE),
        Phase(PhaseKind.CCA, profile.cca_us * NS_PER_US, Direction.SENDER),
        Phase(PhaseKind.TURNAROUND, turnaround, Direction.BOTH_IDLE),
        Phase(PhaseKind.TX, airtime_ns(profile, mpdu_bytes), Direction.SENDER, data),
        Phase(PhaseKind.TURNAROUND, turnaround, Direction.BOTH_IDLE),
        Phase(PhaseKind.RX, airtime_ns(profile, profile.ack_bytes), Direction.RECEIVER, ack),
    ]
    return _timeline(profile, phases)


def build_exchange(profile: PhyProfile, payload_bytes: int, backoff_slots: int = 0) -> ExchangeTimeline:
    """Build the family-appropriate exchange for ``backoff_slots`` slots."""
    if profile.phy is Phy.DOT11B:
        return build_rts_cts_exchange(profile, payload_bytes, backoff_slots * profile.backoff_unit_us)
    return build_cca_exchange(profile, payload_bytes, backoff_slots)


def contention_window(profile: PhyProfile, attempt: int) -> int:
    """CW after ``attempt`` failed attempts: doubles from cw_min, capped at cw_max."""
    if attempt < 0:
        raise ValueError("attempt must be >= 0")
    return min((profile.cw_min + 1) * 2**attempt - 1, profile.cw_max)


def draw_backoff_slots(profile: PhyProfile, rng: RngStream, attempt: int = 0) -> int:
    """Uniform integer backoff in [0, CW(attempt)] slots."""
    return rng.randint(0, contention_window(profile, attempt))


def draw_backoff(profile: PhyProfile, rng: RngStream, attempt: int = 0) -> float:
    """Random backoff duration in microseconds."""
    return draw_backoff_slots(profile, rng, attempt) * profile.backoff_unit_us


@dataclass(frozen=True)
class OverheadFit:
    overhead_bytes: int
    rounding: str  # "floor" or "round"
    total_deviation_us: int


def fit_frame_overhead(
    payloads: list[int],
    reported_us: list[int],
    bitrate_bps: int = 11_000_000,
    preamble_us: int = 192,
    overhead_range: tuple[int, int] = (1, 200),
) -> OverheadFit:
    """Brute-force the overhead-bytes preset from reported data-frame airtimes.

    Searches every overhead in ``overhead_range`` (inclusive) combined with
    floor and round-half-up reporting, and returns the combination with the
    least total absolute deviation from ``reported_us``.  Deviation ties
    prefer floor (this artifact's report rounding), then the smaller
    overhead; more than one exact fit can exist since floor at B+1 bytes and
    round at B bytes may agree on every table cell.
    """
    if len(payloads) != len(reported_us) or not payloads:
        raise ValueError("payloads and reported_us must be equal-length, non-empty lists")
    mbps = bitrate_bps / 1e6
    candidates: list[tuple[int, int, int, OverheadFit]] = []
    for overhead in range(overhead_range[0], overhead_range[1] + 1):
        exact = [preamble_us + 8.0 * (overhead + p) / mbps for p in payloads]
        for pref, rounding in enumerate(("floor", "round")):
            if rounding == "floor":
                fitted = [math.floor(t) for t in exact]
            else:
                fitted = [math.floor(t + 0.5) for t in exact]
            deviation = sum(abs(f - r) for f, r in zip(fitted, reported_us))
            candidates.append((deviation, pref, overhead, OverheadFit(overhead, rounding, deviation)))
    return min(candidates)[3]
