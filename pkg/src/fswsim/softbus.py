"""Onboard publish/subscribe software bus.

Routing is keyed on the message ID alone.  The bus performs syntactic
validation (can the packet be encoded/decoded?) and nothing else: it
never checks who is publishing.  The true sender of every publication
is recorded in an omniscient ledger that exists for the test harness
and the bus-resident defenses; ordinary applications cannot read it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from .spacepacket import (
    DecodeError,
    MessageId,
    SpacePacket,
    decode_packet,
    encode_packet,
)


class Route(str, Enum):
    GROUND = "GROUND"
    ONBOARD = "ONBOARD"


@dataclass(frozen=True)
class AppId:
    value: int
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BusRecord:
    tick: int
    true_sender: AppId
    route: Route
    packet: SpacePacket
    raw: bytes
    delivered: bool
    deliveries: int

    def to_json(self) -> str:
        return json.dumps({
            "tick": self.tick,
            "sender": self.true_sender.name,
            "route": self.route.value,
            "mid": str(self.packet.mid),
            "delivered": self.delivered,
            "deliveries": self.deliveries,
            "bytes": self.raw.hex(),
        })


class BusError(Exception):
    pass


class UnregisteredApp(BusError):
    pass


class PublishRejected(BusError):
    """Structural (syntactic) validation failure; the bus's only rejection."""


Handler = Callable[[SpacePacket, int], None]


class SoftwareBus:
    def __init__(self):
        self._apps: dict[AppId, Handler] = {}
        self._subs: dict[MessageId, list[AppId]] = {}
        self._ledger: list[BusRecord] = []
        self._next_app = 1
        self._tick = 0
        self.defenses = None  # optional DefenseSuite, attached by the harness

    # -- registration / subscription -------------------------------------

    def register_app(self, name: str, handler: Handler | None = None) -> AppId:
        if any(a.name == name for a in self._apps):
            raise BusError(f"app name already registered: {name}")
        app = AppId(self._next_app, name)
        self._next_app += 1
        self._apps[app] = handler or (lambda packet, tick: None)
        return app

    def set_handler(self, app: AppId, handler: Handler) -> None:
        if app not in self._apps:
            raise UnregisteredApp(app.name)
        self._apps[app] = handler

    def subscribe(self, app: AppId, mid: MessageId) -> None:
        if app not in self._apps:
            raise UnregisteredApp(app.name)
        subs = self._subs.setdefault(mid, [])
        if app not in subs:
            subs.append(app)

    def subscribers(self, mid: MessageId) -> tuple[AppId, ...]:
        return tuple(self._subs.get(mid, ()))

    # -- publication ------------------------------------------------------

    def set_tick(self, tick: int) -> None:
        self._tick = tick

    @property
    def tick(self) -> int:
        return self._tick

    def publish(self, sender: AppId, packet: SpacePacket | bytes,
                route: Route = Route.ONBOARD) -> int:
        """Route a packet to every subscriber of its MID except the sender.

        Returns the delivery count.  Raises PublishRejected on syntactic
        failure; defense layers drop silently (count 0) and raise alerts
        through their own sinks.
        """
        if sender not in self._apps:
            raise UnregisteredApp(sender.name)
        try:
            if isinstance(packet, (bytes, bytearray)):
                raw = bytes(packet)
                packet = decode_packet(raw)
            else:
                raw = encode_packet(packet)
                packet = decode_packet(raw)  # normalized view (checksum, length)
        except DecodeError as exc:
            raise PublishRejected(str(exc)) from exc

        deliver = True
        if self.defenses is not None:
            deliver = self.defenses.filter_publish(self._tick, sender, packet, raw, route)

        count = 0
        record = BusRecord(
            tick=self._tick, true_sender=sender, route=route,
            packet=packet, raw=raw, delivered=deliver, deliveries=0,
        )
        self._ledger.append(record)
        idx = len(self._ledger) - 1

        if deliver:
            if self.defenses is not None:
                self.defenses.observe_delivery(self._tick, sender, packet, route)
            for app in self.subscribers(packet.mid):
                if app == sender:
                    continue
                count += 1
                self._apps[app](packet, self._tick)
            self._ledger[idx] = BusRecord(
                tick=record.tick, true_sender=record.true_sender, route=record.route,
                packet=record.packet, raw=record.raw, delivered=True, deliveries=count,
            )
        return count

    # -- omniscient ledger (harness / defense use only) -------------------

    def ledger(self) -> tuple[BusRecord, ...]:
        return tuple(self._ledger)

    def export_ledger(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self._ledger:
                fh.write(rec.to_json() + "\n")


def records_from(ledger: Iterable[BusRecord], sender: str | None = None,
                 mid: MessageId | None = None) -> list[BusRecord]:
    """Ledger filter helper for oracles and reports."""
    out = []
    for rec in ledger:
        if sender is not None and rec.true_sender.name != sender:
            continue
        if mid is not None and rec.packet.mid != mid:
            continue
        out.append(rec)
    return out
