"""The genuine star-tracker application.

Answers scheduler wakeups with quaternion data telemetry sampled from
the truth model, answers housekeeping requests, and honors
ENABLE/DISABLE commands.  While disabled the device is silent: it keeps
counting commands but publishes neither data nor housekeeping.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import interfaces as ifc
from .attitude import canonicalize, small_angle_noise
from .softbus import AppId, Route, SoftwareBus
from .spacepacket import CommandSecondaryHeader, SpacePacket, make_telemetry

TruthProvider = Callable[[float], np.ndarray]


class StarTrackerApp:
    def __init__(self, bus: SoftwareBus, truth: TruthProvider,
                 noise_sigma: float = 0.0, seed: int = 0, name: str = "ST"):
        self._bus = bus
        self._truth = truth
        self._noise_sigma = noise_sigma
        self._rng = np.random.default_rng(seed)
        self.app = bus.register_app(name)
        bus.set_handler(self.app, self.handle_command)
        bus.subscribe(self.app, ifc.ST_CMD_MID)

        self.enabled = False  # boots disabled; requires an operator ENABLE
        self.cmd_count = 0
        self.cmd_error_count = 0
        self._data_seq = 0
        self._hk_seq = 0

    # -- command handling --------------------------------------------------

    def handle_command(self, packet: SpacePacket, tick: int) -> None:
        if packet.mid != ifc.ST_CMD_MID or not isinstance(
                packet.secondary, CommandSecondaryHeader):
            return
        code = packet.secondary.function_code
        fc = ifc.StFunctionCode
        if code not in fc.ALL:
            self.cmd_error_count += 1
            return
        self.cmd_count += 1
        if code == fc.NOOP:
            pass
        elif code == fc.RESET_COUNTERS:
            self.cmd_count = 0
            self.cmd_error_count = 0
        elif code == fc.ENABLE:
            self.enabled = True
        elif code == fc.DISABLE:
            self.enabled = False
        elif code == fc.REQ_HK:
            if self.enabled:
                self._publish_hk(tick)
        elif code == fc.REQ_DATA:
            if self.enabled:
                self._publish_data(tick)

    # -- telemetry ---------------------------------------------------------

    def sample_telemetry(self, tick: int) -> SpacePacket:
        if not self.enabled:
            raise RuntimeError("sampled while disabled")
        q = canonicalize(self._truth(ifc.tick_to_time(tick)))
        q = small_angle_noise(q, self._noise_sigma, self._rng)
        seconds, subseconds = ifc.tick_to_timestamp(tick)
        packet = make_telemetry(
            ifc.ST_DATA_TLM_MID, self._data_seq, seconds, subseconds,
            ifc.pack_data_tlm(q, status_word=0),
        )
        self._data_seq = (self._data_seq + 1) % 16384
        return packet

    def _publish_data(self, tick: int) -> None:
        self._bus.publish(self.app, self.sample_telemetry(tick), route=Route.ONBOARD)

    def _publish_hk(self, tick: int) -> None:
        seconds, subseconds = ifc.tick_to_timestamp(tick)
        packet = make_telemetry(
            ifc.ST_HK_TLM_MID, self._hk_seq, seconds, subseconds,
            ifc.pack_hk_tlm(self.cmd_count, self.cmd_error_count, int(self.enabled)),
        )
        self._hk_seq = (self._hk_seq + 1) % 16384
        self._bus.publish(self.app, packet, route=Route.ONBOARD)
