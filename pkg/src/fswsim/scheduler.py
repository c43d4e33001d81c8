"""Periodic wakeup scheduler: the source of all telemetry cadence.

Each entry publishes a command packet (a wakeup such as REQ_DATA or
REQ_HK) on its target MID whenever (tick - phase) % period == 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .softbus import AppId, Route, SoftwareBus
from .spacepacket import MessageId, SpacePacket, make_command


@dataclass(frozen=True)
class ScheduleEntry:
    target_mid: MessageId
    function_code: int
    period_ticks: int
    phase_ticks: int = 0

    def __post_init__(self):
        if self.period_ticks <= 0:
            raise ValueError("period_ticks must be positive")
        if not 0 <= self.phase_ticks < self.period_ticks:
            raise ValueError("phase_ticks must be in [0, period_ticks)")

    def due(self, tick: int) -> bool:
        return (tick - self.phase_ticks) % self.period_ticks == 0


class Scheduler:
    def __init__(self, bus: SoftwareBus, app: AppId, entries: list[ScheduleEntry]):
        self._bus = bus
        self._app = app
        self._entries = list(entries)
        self._seq: dict[MessageId, int] = {}
        self._last_tick: int | None = None

    @property
    def entries(self) -> tuple[ScheduleEntry, ...]:
        return tuple(self._entries)

    def tick(self, t: int) -> list[SpacePacket]:
        if self._last_tick is not None and t != self._last_tick + 1:
            raise ValueError(f"non-monotonic tick: {self._last_tick} -> {t}")
        self._last_tick = t
        published = []
        for entry in self._entries:
            if not entry.due(t):
                continue
            seq = self._seq.get(entry.target_mid, 0)
            self._seq[entry.target_mid] = (seq + 1) % 16384
            packet = make_command(entry.target_mid, seq, entry.function_code)
            self._bus.publish(self._app, packet, route=Route.ONBOARD)
            published.append(packet)
        return published
