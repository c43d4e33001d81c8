"""Radio application and ground link framing.

Frames are a 4-byte big-endian length prefix followed by one encoded
space packet, self-delimiting over any byte stream.  The radio forwards
telemetry MIDs from the bus to the ground link without inspecting or
modifying them, and publishes uplinked command frames onto the bus with
the GROUND route tag.
"""

from __future__ import annotations

import socket
import struct
from typing import Callable, Iterable

from .softbus import AppId, Route, SoftwareBus
from .spacepacket import DecodeError, MessageId, SpacePacket, decode_packet, encode_packet

LENGTH_PREFIX = struct.Struct(">I")


class FrameError(Exception):
    pass


def frame(packet_bytes: bytes) -> bytes:
    return LENGTH_PREFIX.pack(len(packet_bytes)) + packet_bytes


def deframe(data: bytes) -> tuple[bytes, bytes]:
    """Split one frame off the front of a buffer; returns (body, rest)."""
    if len(data) < LENGTH_PREFIX.size:
        raise FrameError("short length prefix")
    (length,) = LENGTH_PREFIX.unpack(data[:LENGTH_PREFIX.size])
    end = LENGTH_PREFIX.size + length
    if len(data) < end:
        raise FrameError("incomplete frame body")
    return data[LENGTH_PREFIX.size:end], data[end:]


def deframe_all(data: bytes) -> list[bytes]:
    out = []
    while data:
        body, data = deframe(data)
        out.append(body)
    return out


class GroundLink:
    """Transport interface the radio writes downlink frames to."""

    def send(self, frame_bytes: bytes) -> bool:
        raise NotImplementedError


class LoopbackLink(GroundLink):
    """In-process link delivering frames straight to a callback."""

    def __init__(self, sink: Callable[[bytes], None]):
        self._sink = sink

    def send(self, frame_bytes: bytes) -> bool:
        self._sink(frame_bytes)
        return True


class TcpLink(GroundLink):
    """Client side of the ground link; FIFO per connection."""

    def __init__(self, host: str = "127.0.0.1", port: int = 52100):
        self._sock = socket.create_connection((host, port))

    def send(self, frame_bytes: bytes) -> bool:
        try:
            self._sock.sendall(frame_bytes)
            return True
        except OSError:
            return False

    def close(self) -> None:
        self._sock.close()


class RadioApp:
    """Forwards filtered telemetry to the ground and uplinks ground commands."""

    def __init__(self, bus: SoftwareBus, link: GroundLink,
                 downlink_mids: Iterable[MessageId], buffer_depth: int = 64,
                 name: str = "RADIO"):
        self._bus = bus
        self._link = link
        self.app = bus.register_app(name)
        bus.set_handler(self.app, self.forward_telemetry)
        for mid in downlink_mids:
            bus.subscribe(self.app, mid)
        self._buffer: list[bytes] = []
        self._buffer_depth = buffer_depth
        self.dropped_frames = 0
        self.uplink_rejects = 0

    # -- downlink ----------------------------------------------------------

    def forward_telemetry(self, packet: SpacePacket, tick: int) -> None:
        self._send(frame(encode_packet(packet)))

    def _send(self, frame_bytes: bytes) -> None:
        while self._buffer:
            if self._link.send(self._buffer[0]):
                self._buffer.pop(0)
            else:
                break
        if self._buffer or not self._link.send(frame_bytes):
            if len(self._buffer) < self._buffer_depth:
                self._buffer.append(frame_bytes)
            else:
                self.dropped_frames += 1

    # -- uplink ------------------------------------------------------------

    def uplink_command(self, frame_bytes: bytes) -> int:
        """Publish one uplinked frame onto the bus, tagged as ground-originated."""
        try:
            body, rest = deframe(frame_bytes)
            if rest:
                raise FrameError("trailing bytes after frame")
            packet = decode_packet(body)
            if not packet.is_command:
                raise FrameError("uplink frame is not a command packet")
        except (FrameError, DecodeError) as exc:
            self.uplink_rejects += 1
            raise FrameError(str(exc)) from exc
        return self._bus.publish(self.app, packet, route=Route.GROUND)
