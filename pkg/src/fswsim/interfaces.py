"""Shared interface definitions: MIDs, function codes, and payload layouts.

This is the simulator's analog of a vendor interface-control header: any
application that imports this module obtains, by name, everything needed
to construct packets that are bit-compatible with the star tracker's.
The rogue component imports it too; that is the point.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .spacepacket import MessageId

# Star tracker
ST_CMD_MID = MessageId.command(0x060)
ST_DATA_TLM_MID = MessageId.telemetry(0x061)
ST_HK_TLM_MID = MessageId.telemetry(0x062)

# System events (cyber-safe-mode transitions)
EVENT_TLM_MID = MessageId.telemetry(0x070)

ST_MIDS = (ST_CMD_MID, ST_DATA_TLM_MID, ST_HK_TLM_MID)


class StFunctionCode:
    NOOP = 0
    RESET_COUNTERS = 1
    ENABLE = 2
    DISABLE = 3
    REQ_HK = 4
    REQ_DATA = 5

    ALL = (NOOP, RESET_COUNTERS, ENABLE, DISABLE, REQ_HK, REQ_DATA)

    NAMES = {
        NOOP: "NOOP",
        RESET_COUNTERS: "RESET_COUNTERS",
        ENABLE: "ENABLE",
        DISABLE: "DISABLE",
        REQ_HK: "REQ_HK",
        REQ_DATA: "REQ_DATA",
    }


class EventCode:
    CYBER_SAFE_ENTERED = 1


_DATA_FMT = ">ddddI"   # q_x, q_y, q_z, q_w, status_word
_HK_FMT = ">IIB"       # cmd_count, cmd_error_count, enabled
_EVENT_FMT = ">I"      # event_code

DATA_PAYLOAD_LEN = struct.calcsize(_DATA_FMT)
HK_PAYLOAD_LEN = struct.calcsize(_HK_FMT)


def pack_data_tlm(q: np.ndarray, status_word: int = 0) -> bytes:
    x, y, z, w = (float(v) for v in q)
    return struct.pack(_DATA_FMT, x, y, z, w, status_word)


def unpack_data_tlm(payload: bytes) -> tuple[np.ndarray, int]:
    x, y, z, w, status = struct.unpack(_DATA_FMT, payload)
    return np.array([x, y, z, w]), status


def pack_hk_tlm(cmd_count: int, cmd_error_count: int, enabled: int) -> bytes:
    return struct.pack(_HK_FMT, cmd_count, cmd_error_count, enabled)


def unpack_hk_tlm(payload: bytes) -> tuple[int, int, int]:
    return struct.unpack(_HK_FMT, payload)


def pack_event_tlm(event_code: int) -> bytes:
    return struct.pack(_EVENT_FMT, event_code)


def unpack_event_tlm(payload: bytes) -> tuple[int]:
    return struct.unpack(_EVENT_FMT, payload)


# Ground-side field layout definitions (the XTCE-subset schema format).
# offset is relative to the payload, after primary + telemetry secondary headers.

@dataclass(frozen=True)
class SchemaField:
    name: str
    offset: int
    type: str  # U8 | U16 | U32 | F64
    units: str = ""


@dataclass(frozen=True)
class TelemetrySchema:
    mid: MessageId
    name: str
    fields: tuple[SchemaField, ...]

    def __post_init__(self):
        spans = sorted((f.offset, f.offset + FIELD_SIZES[f.type]) for f in self.fields)
        for (_, end), (start, _) in zip(spans, spans[1:]):
            if start < end:
                raise ValueError(f"overlapping fields in schema {self.name}")

    @property
    def payload_length(self) -> int:
        return max((f.offset + FIELD_SIZES[f.type] for f in self.fields), default=0)


FIELD_SIZES = {"U8": 1, "U16": 2, "U32": 4, "F64": 8}
FIELD_FMTS = {"U8": ">B", "U16": ">H", "U32": ">I", "F64": ">d"}

QUATERNION_FIELDS = ("q_x", "q_y", "q_z", "q_w")

ST_DATA_SCHEMA = TelemetrySchema(
    mid=ST_DATA_TLM_MID,
    name="STAR_TRACKER_DATA",
    fields=(
        SchemaField("q_x", 0, "F64"),
        SchemaField("q_y", 8, "F64"),
        SchemaField("q_z", 16, "F64"),
        SchemaField("q_w", 24, "F64"),
        SchemaField("status_word", 32, "U32"),
    ),
)

ST_HK_SCHEMA = TelemetrySchema(
    mid=ST_HK_TLM_MID,
    name="STAR_TRACKER_HK",
    fields=(
        SchemaField("cmd_count", 0, "U32"),
        SchemaField("cmd_error_count", 4, "U32"),
        SchemaField("enabled", 8, "U8"),
    ),
)

EVENT_SCHEMA = TelemetrySchema(
    mid=EVENT_TLM_MID,
    name="SYS_EVENT",
    fields=(SchemaField("event_code", 0, "U32"),),
)

DEFAULT_SCHEMAS = (ST_DATA_SCHEMA, ST_HK_SCHEMA, EVENT_SCHEMA)

# Command definitions the ground station knows how to build.
GROUND_COMMANDS = {
    "ST": {"mid": ST_CMD_MID, "codes": dict(StFunctionCode.NAMES)},
}

# Simulation time base: one tick is 100 ms.
TICKS_PER_SECOND = 10


def tick_to_timestamp(tick: int) -> tuple[int, int]:
    """Mission-elapsed (seconds, 1/65536-s subseconds) for a tick."""
    seconds, rem = divmod(tick, TICKS_PER_SECOND)
    return seconds, rem * 65536 // TICKS_PER_SECOND


def tick_to_time(tick: int) -> float:
    return tick / TICKS_PER_SECOND
