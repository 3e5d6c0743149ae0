"""Deterministic discrete-event engine: virtual clock, event queue, seeded RNG.

Simulation time is an integer number of nanoseconds since run start, so
microsecond-level protocol timings are exact and event ordering never
depends on float rounding.  Events are dequeued in ascending ``(time, seq)``
order, where ``seq`` is the insertion sequence number; two events can never
compare equal, which makes every run fully reproducible.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from enum import IntEnum
from typing import Any, Callable, Iterator

SimTime = int  # nanoseconds since simulation start

NS_PER_US = 1_000
NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000


def seconds(value: float) -> SimTime:
    """Seconds to integer nanoseconds (round half up)."""
    return int(value * NS_PER_S + 0.5)


class EventKind(IntEnum):
    FRAME_TX_START = 0
    FRAME_RX_END = 1
    TIMER = 2
    APP_SEND = 3
    ENERGY_SAMPLE = 4
    RUN_END = 5


@dataclass(slots=True)
class Event:
    """A timestamped simulation event.

    ``seq`` is assigned by the engine at insertion; ``(time, seq)`` is unique
    per run and defines the processing order.
    """

    time: SimTime
    kind: EventKind
    node: int = -1
    payload: Any = None
    seq: int = -1


_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """Seeded deterministic random stream.

    Backed by CPython's Mersenne Twister (``random.Random``), whose output
    for a given seed is identical on every platform and Python version we
    target.  The same seed therefore always yields the same draw sequence.
    """

    ALGORITHM = "mt19937"

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._rng = random.Random(self.seed)

    def random(self) -> float:
        return self._rng.random()

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both ends inclusive."""
        return self._rng.randint(low, high)

    def gauss(self, mu: float, sigma: float) -> float:
        return self._rng.gauss(mu, sigma)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed:#018x}, algorithm={self.ALGORITHM})"


def node_stream(run_seed: int, node_id: int) -> RngStream:
    """Derive the per-node stream for a run.

    The stream seed is ``splitmix64(splitmix64(node_id) XOR run_seed)``, so
    each node gets an independent stream that does not depend on how many
    other nodes exist.
    """
    return RngStream(_splitmix64(_splitmix64(node_id & _MASK64) ^ (run_seed & _MASK64)))


def link_stream(run_seed: int, node_a: int, node_b: int) -> RngStream:
    """Derive a per-link stream, symmetric in the two node ids."""
    lo, hi = sorted((node_a, node_b))
    return RngStream(_splitmix64(_splitmix64(lo * 0x1_0000_0001 + hi) ^ (run_seed & _MASK64)))


Handler = Callable[["Engine", Event], None]
RawHandler = Callable[["Engine", SimTime, int, Any], None]


class Engine:
    """Single-threaded discrete-event run loop.

    Dynamic events go through :meth:`schedule`; bulk periodic traffic can be
    fed from a pre-sorted iterator via :meth:`add_source` so that very large
    scenarios never hold their whole schedule in memory.  Source events are
    materialised (and given their ``seq``) lazily, just before any
    equal-or-later heap event would be popped, which keeps the global
    ``(time, seq)`` dequeue order well defined.

    An engine instance is confined to one thread; run several instances for
    parallelism.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.now: SimTime = 0
        self.processed = 0
        self._heap: list[tuple[SimTime, int, EventKind, int, Any]] = []
        self._seq = 0
        self._source: Iterator[Event] | None = None
        self._source_head: Event | None = None
        self._source_attached = False
        self._handlers: dict[int, tuple[Callable, bool]] = {}
        self.record_trace = False
        self.trace: list[tuple[SimTime, int, int, int]] = []

    def on(self, kind: EventKind, handler: Handler) -> None:
        """Register a handler called as ``handler(engine, event)``."""
        self._handlers[int(kind)] = (handler, False)

    def on_fast(self, kind: EventKind, handler: RawHandler) -> None:
        """Register a handler called as ``handler(engine, time, node, payload)``.

        Skips Event construction in the run loop; meant for high-volume
        event kinds in large scenarios.
        """
        self._handlers[int(kind)] = (handler, True)

    def schedule(self, event: Event) -> int:
        """Enqueue ``event``; returns its insertion handle (the seq number).

        Raises ``ValueError`` when the event lies in the simulated past.
        """
        if event.time < self.now:
            raise ValueError(
                f"cannot schedule event at t={event.time} ns: clock is already at {self.now} ns"
            )
        seq = self._seq
        self._seq = seq + 1
        event.seq = seq
        heapq.heappush(self._heap, (event.time, seq, event.kind, event.node, event.payload))
        return seq

    def schedule_at(self, time: SimTime, kind: EventKind, node: int = -1, payload: Any = None) -> int:
        """Fast-path schedule without building an :class:`Event` first."""
        if time < self.now:
            raise ValueError(
                f"cannot schedule event at t={time} ns: clock is already at {self.now} ns"
            )
        seq = self._seq
        self._seq = seq + 1
        heapq.heappush(self._heap, (time, seq, kind, node, payload))
        return seq

    def add_source(self, events: Iterator[Event]) -> None:
        """Attach a pre-sorted (non-decreasing time) lazy event stream."""
        if self._source_attached:
            raise ValueError("engine already has an event source attached")
        self._source_attached = True
        self._source = iter(events)
        self._advance_source()

    def _advance_source(self) -> None:
        assert self._source is not None
        try:
            self._source_head = next(self._source)
        except StopIteration:
            self._source = None
            self._source_head = None

    def pending(self) -> int:
        return len(self._heap) + (1 if self._source_head is not None else 0)

    def run_until(self, end: SimTime) -> int:
        """Process every event with ``time <= end``; leave the clock at ``end``.

        Returns the number of events processed by this call.  An empty queue
        simply terminates early with the clock advanced to ``end``.
        """
        if end < self.now:
            raise ValueError(f"run_until({end}) is before current clock {self.now}")
        heap = self._heap
        handlers = self._handlers
        processed = 0
        last_time = self.now
        last_seq = -1
        while True:
            # Pull source events into the heap while they are due no later
            # than the earliest heap entry (or the heap is empty).
            head = self._source_head
            while head is not None and (not heap or head.time <= heap[0][0]):
                if head.time > end:
                    break
                self.schedule(head)
                self._advance_source()
                head = self._source_head
            if not heap or heap[0][0] > end:
                break
            time, seq, kind, node, payload = heapq.heappop(heap)
            if __debug__:
                assert (time, seq) > (last_time, last_seq), "events out of (time, seq) order"
                last_time, last_seq = time, seq
            self.now = time
            processed += 1
            if self.record_trace:
                self.trace.append((time, seq, int(kind), node))
            entry = handlers.get(kind)  # EventKind hashes as its int value
            if entry is not None:
                handler, raw = entry
                if raw:
                    handler(self, time, node, payload)
                else:
                    handler(self, Event(time, EventKind(kind), node, payload, seq))
        self.now = end
        self.processed += processed
        return processed
