"""Frame-level model of the aggregator-to-band polling bus.

The aggregator polls every band address in order each tick; healthy nodes
answer with a fixed-layout reading frame, failed nodes stay silent and the
aggregator records the tick as missing for them.  Frames carry a 7-bit
address, a kind byte, a length byte, the payload, and a trailing checksum
equal to the sum of all preceding bytes modulo 256.

Reading payload layout (little-endian):
  [0]     band index (uint8)
  [1:73]  9 float64: qw qx qy qz t0 t1 t2 t3 humidity
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum

from .errors import AddressCollision, FrameError
from .orientation import UnitOrientation

# Reserved I2C ranges are excluded.
ADDR_MIN = 8
ADDR_MAX = 119

THERMISTOR_COUNT = 4

_READING = struct.Struct("<B9d")


class FrameKind(IntEnum):
    POLL = 0
    READING = 1
    ERROR = 2


# Fixed payload length per kind.
PAYLOAD_LENGTH = {
    FrameKind.POLL: 0,
    FrameKind.READING: _READING.size,
    FrameKind.ERROR: 1,
}


@dataclass(frozen=True)
class Frame:
    address: int
    kind: FrameKind
    payload: bytes = b""

    def __post_init__(self):
        if not ADDR_MIN <= self.address <= ADDR_MAX:
            raise FrameError(f"address {self.address} outside [{ADDR_MIN}, {ADDR_MAX}]")
        kind = FrameKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if len(self.payload) != PAYLOAD_LENGTH[kind]:
            raise FrameError(
                f"{kind.name} payload must be {PAYLOAD_LENGTH[kind]} bytes, "
                f"got {len(self.payload)}"
            )

    def encode(self) -> bytes:
        body = bytes([self.address, self.kind, len(self.payload)]) + self.payload
        return body + bytes([sum(body) % 256])


def decode_frame(data: bytes) -> Frame:
    if len(data) < 4:
        raise FrameError("frame shorter than minimum 4 bytes")
    body, checksum = data[:-1], data[-1]
    if sum(body) % 256 != checksum:
        raise FrameError("checksum mismatch")
    address, kind_byte, length = body[0], body[1], body[2]
    try:
        kind = FrameKind(kind_byte)
    except ValueError:
        raise FrameError(f"unknown frame kind {kind_byte}") from None
    payload = body[3:]
    if length != len(payload) or length != PAYLOAD_LENGTH[kind]:
        raise FrameError("payload length inconsistent with kind")
    return Frame(address, kind, bytes(payload))


@dataclass
class SensorState:
    """Latest readings held by one band node."""

    orientation: UnitOrientation
    thermistors: tuple
    humidity: float


@dataclass
class BandNode:
    address: int
    band_index: int
    failed: bool = False
    sensor_state: SensorState | None = None

    def __post_init__(self):
        if not ADDR_MIN <= self.address <= ADDR_MAX:
            raise AddressCollision(
                f"address {self.address} outside [{ADDR_MIN}, {ADDR_MAX}]"
            )


def pack_reading(band_index: int, state: SensorState) -> bytes:
    q = state.orientation
    if len(state.thermistors) != THERMISTOR_COUNT:
        raise FrameError(
            f"expected {THERMISTOR_COUNT} thermistor values, got "
            f"{len(state.thermistors)}"
        )
    return _READING.pack(
        band_index, q.w, q.x, q.y, q.z, *state.thermistors, state.humidity
    )


def unpack_reading(payload: bytes):
    vals = _READING.unpack(payload)
    band_index = vals[0]
    orientation = UnitOrientation(*vals[1:5])
    thermistors = tuple(vals[5:9])
    humidity = vals[9]
    return band_index, SensorState(orientation, thermistors, humidity)


@dataclass(frozen=True)
class TelemetryRecord:
    tick: int
    time_s: float
    band_id: int
    status: str  # "ok" or "missing"
    orientation: UnitOrientation | None = None
    thermistors: tuple | None = None
    humidity: float | None = None


@dataclass
class TelemetryLog:
    """Append-only record stream produced by the simulator or hardware."""

    records: list = field(default_factory=list)

    def ticks(self) -> list:
        seen = sorted({r.tick for r in self.records})
        return seen

    def records_at_tick(self, tick: int) -> list:
        return [r for r in self.records if r.tick == tick]

    def band_ids(self) -> list:
        return sorted({r.band_id for r in self.records})

    def thermistor_series(self, band_id: int, channel: int):
        from .sensing import ScalarSeries

        rows = [
            r
            for r in self.records
            if r.band_id == band_id and r.status == "ok"
        ]
        return ScalarSeries(
            [r.time_s for r in rows],
            [r.thermistors[channel] for r in rows],
            band_id,
            channel,
        )

    def humidity_series(self, band_id: int):
        from .sensing import ScalarSeries

        rows = [
            r
            for r in self.records
            if r.band_id == band_id and r.status == "ok"
        ]
        return ScalarSeries(
            [r.time_s for r in rows],
            [r.humidity for r in rows],
            band_id,
            "humidity",
        )

    def orientations_at_tick(self, tick: int) -> list:
        from .errors import MissingBands

        rows = {r.band_id: r for r in self.records_at_tick(tick)}
        missing = sorted(
            b for b, r in rows.items() if r.status != "ok"
        )
        if missing:
            raise MissingBands(missing)
        return [rows[b].orientation for b in sorted(rows)]


def poll_cycle(nodes, tick: int, time_s: float):
    """One aggregator polling pass over all nodes, in address order.

    Returns ``(frames, records)``.  Reading payloads are decoded back out of
    the frame bytes so the log provably round-trips the wire format.
    """
    addresses = [n.address for n in nodes]
    if len(set(addresses)) != len(addresses):
        dupes = sorted({a for a in addresses if addresses.count(a) > 1})
        raise AddressCollision(f"duplicate addresses {dupes}")
    frames = []
    records = []
    for node in sorted(nodes, key=lambda n: n.address):
        frames.append(Frame(node.address, FrameKind.POLL))
        if node.failed or node.sensor_state is None:
            records.append(
                TelemetryRecord(tick, time_s, node.band_index, "missing")
            )
            continue
        frame = Frame(
            node.address,
            FrameKind.READING,
            pack_reading(node.band_index, node.sensor_state),
        )
        frames.append(frame)
        decoded = decode_frame(frame.encode())
        band_index, state = unpack_reading(decoded.payload)
        records.append(
            TelemetryRecord(
                tick,
                time_s,
                band_index,
                "ok",
                state.orientation,
                state.thermistors,
                state.humidity,
            )
        )
    return frames, records
