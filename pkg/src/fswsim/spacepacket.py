"""CCSDS-style space packet encoding and decoding.

Wire format (big-endian throughout, documented in docs/wire-format.md):

  primary header, 6 bytes:
    bytes 0-1  message ID: 3 version bits (0), 1 type bit (1=command),
               1 secondary-header flag (always 1), 11-bit APID
    byte  2-3  2-bit sequence flags (always 0b11) + 14-bit sequence count
    bytes 4-5  length field = total packet bytes - 7

  telemetry secondary header, 6 bytes:
    u32 mission-elapsed seconds, u16 subseconds (1/65536 s)

  command secondary header, 2 bytes:
    u8 function code (7-bit), u8 XOR checksum over the whole packet
    with the checksum byte zeroed

Validation here is purely syntactic: truncation, length-field
consistency, and the command checksum.  Nothing in this layer knows or
cares who produced the bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

PRIMARY_HEADER_LEN = 6
TLM_SECONDARY_LEN = 6
CMD_SECONDARY_LEN = 2
MAX_PAYLOAD = 65528
MAX_SEQUENCE = 1 << 14

TYPE_BIT = 0x1000
SECHDR_BIT = 0x0800
APID_MASK = 0x07FF
SEQ_FLAGS = 0xC000  # "unsegmented", fixed


class PacketError(Exception):
    """Base for all codec failures."""


class EncodeError(PacketError):
    pass


class DecodeError(PacketError):
    """Base for parse failures; subclasses are the distinct syntactic checks."""


class TruncatedPacket(DecodeError):
    pass


class LengthMismatch(DecodeError):
    pass


class ChecksumError(DecodeError):
    pass


@dataclass(frozen=True)
class MessageId:
    """16-bit message identifier; the type bit separates commands from telemetry."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value <= 0xFFFF:
            raise ValueError(f"MID out of range: {self.value:#x}")

    @property
    def apid(self) -> int:
        return self.value & APID_MASK

    @property
    def is_command(self) -> bool:
        return bool(self.value & TYPE_BIT)

    @classmethod
    def command(cls, apid: int) -> "MessageId":
        return cls(TYPE_BIT | SECHDR_BIT | (apid & APID_MASK))

    @classmethod
    def telemetry(cls, apid: int) -> "MessageId":
        return cls(SECHDR_BIT | (apid & APID_MASK))

    def __str__(self) -> str:
        return f"0x{self.value:04X}"


@dataclass(frozen=True)
class PrimaryHeader:
    mid: MessageId
    sequence_count: int
    length_field: int = 0  # recomputed on encode


@dataclass(frozen=True)
class TelemetrySecondaryHeader:
    seconds: int
    subseconds: int = 0

    @property
    def time(self) -> float:
        return self.seconds + self.subseconds / 65536.0


@dataclass(frozen=True)
class CommandSecondaryHeader:
    function_code: int
    checksum: int = 0  # recomputed on encode


@dataclass(frozen=True)
class SpacePacket:
    primary: PrimaryHeader
    secondary: TelemetrySecondaryHeader | CommandSecondaryHeader
    payload: bytes = b""

    @property
    def mid(self) -> MessageId:
        return self.primary.mid

    @property
    def is_command(self) -> bool:
        return self.primary.mid.is_command


def make_telemetry(mid: MessageId, sequence: int, seconds: int, subseconds: int,
                   payload: bytes) -> SpacePacket:
    """Build a telemetry packet with its length field already populated."""
    return decode_packet(encode_packet(SpacePacket(
        primary=PrimaryHeader(mid=mid, sequence_count=sequence),
        secondary=TelemetrySecondaryHeader(seconds=seconds, subseconds=subseconds),
        payload=bytes(payload),
    )))


def make_command(mid: MessageId, sequence: int, function_code: int,
                 payload: bytes = b"") -> SpacePacket:
    """Build a command packet with length field and checksum populated."""
    return decode_packet(encode_packet(SpacePacket(
        primary=PrimaryHeader(mid=mid, sequence_count=sequence),
        secondary=CommandSecondaryHeader(function_code=function_code),
        payload=bytes(payload),
    )))


def xor_checksum(data: bytes) -> int:
    c = 0
    for b in data:
        c ^= b
    return c


def encode_packet(packet: SpacePacket) -> bytes:
    """Serialize a packet, recomputing the length field and command checksum."""
    mid = packet.primary.mid
    if len(packet.payload) > MAX_PAYLOAD:
        raise EncodeError(f"payload too large: {len(packet.payload)} bytes")
    if not 0 <= packet.primary.sequence_count < MAX_SEQUENCE:
        raise EncodeError(f"sequence count out of range: {packet.primary.sequence_count}")
    if mid.is_command != isinstance(packet.secondary, CommandSecondaryHeader):
        raise EncodeError("secondary header kind does not match the MID type bit")

    if mid.is_command:
        sec = packet.secondary
        if not 0 <= sec.function_code < 128:
            raise EncodeError(f"function code out of range: {sec.function_code}")
        sec_bytes = struct.pack(">BB", sec.function_code, 0)
    else:
        sec = packet.secondary
        if not (0 <= sec.seconds <= 0xFFFFFFFF and 0 <= sec.subseconds <= 0xFFFF):
            raise EncodeError("timestamp out of range")
        sec_bytes = struct.pack(">IH", sec.seconds, sec.subseconds)

    total = PRIMARY_HEADER_LEN + len(sec_bytes) + len(packet.payload)
    header = struct.pack(
        ">HHH",
        mid.value | SECHDR_BIT,
        SEQ_FLAGS | packet.primary.sequence_count,
        total - 7,
    )
    raw = bytearray(header + sec_bytes + packet.payload)
    if mid.is_command:
        raw[7] = xor_checksum(bytes(raw))
    return bytes(raw)


def decode_packet(data: bytes) -> SpacePacket:
    """Parse bytes into a packet, applying the syntactic checks and no others."""
    if len(data) < PRIMARY_HEADER_LEN:
        raise TruncatedPacket(f"need {PRIMARY_HEADER_LEN} header bytes, got {len(data)}")
    mid_raw, seq_raw, length_field = struct.unpack(">HHH", data[:PRIMARY_HEADER_LEN])
    if not mid_raw & SECHDR_BIT:
        raise DecodeError("secondary-header flag not set")
    if seq_raw & SEQ_FLAGS != SEQ_FLAGS:
        raise DecodeError("unsupported sequence flags")
    total = length_field + 7
    if len(data) < total:
        raise TruncatedPacket(f"length field implies {total} bytes, got {len(data)}")
    if len(data) > total:
        raise LengthMismatch(f"length field implies {total} bytes, got {len(data)}")

    mid = MessageId(mid_raw)
    sec_len = CMD_SECONDARY_LEN if mid.is_command else TLM_SECONDARY_LEN
    if total < PRIMARY_HEADER_LEN + sec_len:
        raise LengthMismatch("length field shorter than the secondary header")

    sec_bytes = data[PRIMARY_HEADER_LEN:PRIMARY_HEADER_LEN + sec_len]
    payload = data[PRIMARY_HEADER_LEN + sec_len:total]
    if mid.is_command:
        function_code, checksum = struct.unpack(">BB", sec_bytes)
        if function_code >= 128:
            raise DecodeError(f"function code out of range: {function_code}")
        zeroed = bytearray(data[:total])
        zeroed[7] = 0
        if xor_checksum(bytes(zeroed)) != checksum:
            raise ChecksumError("command checksum mismatch")
        secondary: TelemetrySecondaryHeader | CommandSecondaryHeader = \
            CommandSecondaryHeader(function_code=function_code, checksum=checksum)
    else:
        seconds, subseconds = struct.unpack(">IH", sec_bytes)
        secondary = TelemetrySecondaryHeader(seconds=seconds, subseconds=subseconds)

    return SpacePacket(
        primary=PrimaryHeader(
            mid=mid,
            sequence_count=seq_raw & (MAX_SEQUENCE - 1),
            length_field=length_field,
        ),
        secondary=secondary,
        payload=bytes(payload),
    )


def split_stream(data: bytes) -> list[bytes]:
    """Split concatenated encoded packets using each length field."""
    out = []
    i = 0
    while i < len(data):
        if len(data) - i < PRIMARY_HEADER_LEN:
            raise TruncatedPacket("trailing bytes shorter than a primary header")
        length_field = struct.unpack(">H", data[i + 4:i + 6])[0]
        total = length_field + 7
        if len(data) - i < total:
            raise TruncatedPacket("trailing bytes shorter than the declared packet")
        out.append(data[i:i + total])
        i += total
    return out
