"""Ground station: schema-driven telemetry parsing, displays, and logs.

Attribution is by MID only: a packet's display name comes from the
registered schema, never from any notion of which onboard application
produced it.  The command log records ground-originated commands and
nothing else, and the telemetry archive stores downlinked bytes
verbatim; both blind spots are deliberate.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from . import interfaces as ifc
from .downlink import FrameError, deframe, frame
from .interfaces import FIELD_FMTS, FIELD_SIZES, TelemetrySchema
from .spacepacket import (
    DecodeError,
    MessageId,
    TelemetrySecondaryHeader,
    decode_packet,
    encode_packet,
    make_command,
    split_stream,
)


@dataclass(frozen=True)
class ParsedRecord:
    row: int
    tick: int          # derived from the packet timestamp
    mid: MessageId
    name: str
    sequence: int
    fields: dict

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "tick": self.tick,
            "mid": str(self.mid),
            "name": self.name,
            "sequence": self.sequence,
            "fields": self.fields,
        }


@dataclass(frozen=True)
class CommandLogRecord:
    wall_tick: int
    mid: MessageId
    function_code: int
    name: str
    origin: str = "GROUND"  # the log cannot record anything else

    def to_dict(self) -> dict:
        return {
            "wall_tick": self.wall_tick,
            "mid": str(self.mid),
            "function_code": self.function_code,
            "name": self.name,
            "origin": self.origin,
        }


class CommandError(Exception):
    pass


class GroundStation:
    def __init__(self, schemas: Iterable[TelemetrySchema] = ifc.DEFAULT_SCHEMAS,
                 uplink: Callable[[bytes], None] | None = None):
        self._schemas: dict[MessageId, TelemetrySchema] = {s.mid: s for s in schemas}
        self._uplink = uplink
        self._archive = bytearray()
        self._index: list[ParsedRecord] = []
        self._cmdlog: list[CommandLogRecord] = []
        self._hk_latest: dict[str, dict] = {}
        self._hk_history: list[dict] = []
        self._cmd_seq: dict[MessageId, int] = {}
        self._rx_buffer = b""
        self.format_violations: list[str] = []
        self.unmapped_count = 0
        self.listeners: list[Callable[[ParsedRecord], None]] = []

    def set_uplink(self, uplink: Callable[[bytes], None]) -> None:
        self._uplink = uplink

    # -- telemetry ingest --------------------------------------------------

    def ingest_stream(self, data: bytes) -> None:
        """Feed raw link bytes; parses every complete frame in the buffer."""
        self._rx_buffer += data
        while True:
            try:
                body, rest = deframe(self._rx_buffer)
            except FrameError:
                return
            self._rx_buffer = rest
            self.parse_telemetry(body)

    def ingest_frame(self, frame_bytes: bytes) -> None:
        self.ingest_stream(frame_bytes)

    def parse_telemetry(self, packet_bytes: bytes) -> ParsedRecord | None:
        try:
            packet = decode_packet(packet_bytes)
            if packet.is_command or not isinstance(
                    packet.secondary, TelemetrySecondaryHeader):
                raise DecodeError("not a telemetry packet")
            schema = self._schemas.get(packet.mid)
            if schema is None:
                self.unmapped_count += 1
                return None
            fields = self._extract(schema, packet.payload)
        except (DecodeError, struct.error) as exc:
            self.format_violations.append(str(exc))
            return None

        tick = packet.secondary.seconds * ifc.TICKS_PER_SECOND + \
            round(packet.secondary.subseconds * ifc.TICKS_PER_SECOND / 65536)
        record = ParsedRecord(
            row=len(self._index), tick=tick, mid=packet.mid, name=schema.name,
            sequence=packet.primary.sequence_count, fields=fields,
        )
        self._archive += packet_bytes
        self._index.append(record)
        if schema.name.endswith("_HK"):
            self._hk_latest[schema.name] = {"tick": tick, **fields}
            self._hk_history.append({"tick": tick, "name": schema.name, **fields})
        for listener in self.listeners:
            listener(record)
        return record

    def _extract(self, schema: TelemetrySchema, payload: bytes) -> dict:
        if len(payload) < schema.payload_length:
            raise DecodeError(
                f"payload too short for schema {schema.name}: {len(payload)}")
        fields = {}
        for f in schema.fields:
            (value,) = struct.unpack_from(FIELD_FMTS[f.type], payload, f.offset)
            fields[f.name] = value
        return fields

    # -- commanding --------------------------------------------------------

    def send_command(self, device: str, code_name: str, wall_tick: int = 0) -> bytes:
        defn = ifc.GROUND_COMMANDS.get(device)
        if defn is None:
            raise CommandError(f"unknown device: {device}")
        codes = {v: k for k, v in defn["codes"].items()}
        if code_name not in codes:
            raise CommandError(f"unknown command {code_name} for {device}")
        mid = defn["mid"]
        seq = self._cmd_seq.get(mid, 0)
        self._cmd_seq[mid] = (seq + 1) % 16384
        packet = make_command(mid, seq, codes[code_name])
        frame_bytes = frame(encode_packet(packet))
        if self._uplink is not None:
            self._uplink(frame_bytes)
        self._cmdlog.append(CommandLogRecord(
            wall_tick=wall_tick, mid=mid, function_code=codes[code_name],
            name=code_name))
        return frame_bytes

    # -- views -------------------------------------------------------------

    def archive_bytes(self) -> bytes:
        return bytes(self._archive)

    def archive_index(self) -> tuple[ParsedRecord, ...]:
        return tuple(self._index)

    def command_log(self) -> tuple[CommandLogRecord, ...]:
        return tuple(self._cmdlog)

    def hk_view(self) -> dict[str, dict]:
        return dict(self._hk_latest)

    def hk_history(self) -> list[dict]:
        return list(self._hk_history)

    def raw_bytes_view(self, row: int) -> str:
        """Hex dump of one archived packet, 16 bytes per line."""
        if not 0 <= row < len(self._index):
            raise IndexError(f"archive row out of range: {row}")
        data = split_stream(self.archive_bytes())[row]
        lines = []
        for i in range(0, len(data), 16):
            chunk = data[i:i + 16]
            lines.append(" ".join(f"{b:02x}" for b in chunk))
        return "\n".join(lines)

    # -- persistence -------------------------------------------------------

    def write_artifacts(self, out_dir: Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "archive.bin").write_bytes(self.archive_bytes())
        with open(out_dir / "archive_index.jsonl", "w") as fh:
            for rec in self._index:
                fh.write(json.dumps(rec.to_dict()) + "\n")
        with open(out_dir / "cmdlog.jsonl", "w") as fh:
            for cmd in self._cmdlog:
                fh.write(json.dumps(cmd.to_dict()) + "\n")
        with open(out_dir / "hk_history.jsonl", "w") as fh:
            for row in self._hk_history:
                fh.write(json.dumps(row) + "\n")
        with open(out_dir / "ground_errors.json", "w") as fh:
            json.dump({
                "format_violations": self.format_violations,
                "unmapped_count": self.unmapped_count,
            }, fh, indent=2)
