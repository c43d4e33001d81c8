"""The rogue vendor component ("SOLO").

A third-party application that imports the star tracker's interface
definitions, lies dormant through an activation delay, and on observing
an operator ENABLE either replaces the genuine device (suppressing it
with an internally generated DISABLE and continuing its telemetry
stream) or publishes biased telemetry alongside it.

The component never errors and never publishes on any star-tracker MID
before activation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import interfaces as ifc
from .attitude import AttitudeState, attitude_at, canonicalize, rotate_by
from .softbus import AppId, Route, SoftwareBus
from .spacepacket import CommandSecondaryHeader, SpacePacket, make_command, make_telemetry

TruthProvider = Callable[[float], np.ndarray]


class ImplantMode(str, Enum):
    BIAS = "BIAS"
    REPLACEMENT = "REPLACEMENT"


class SpoofProfile(str, Enum):
    FROZEN = "FROZEN"
    DRIFT = "DRIFT"
    TRACK_TRUTH_WITH_BIAS = "TRACK_TRUTH_WITH_BIAS"


class Phase(str, Enum):
    DORMANT = "DORMANT"
    MONITORING = "MONITORING"
    ACTIVE = "ACTIVE"


@dataclass(frozen=True)
class ImplantConfig:
    activation_delay: int = 300  # ticks of guaranteed-benign uptime
    mode: ImplantMode = ImplantMode.REPLACEMENT
    spoof_profile: SpoofProfile = SpoofProfile.FROZEN
    bias_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    bias_angle: float = 0.0     # rad, TRACK_TRUTH_WITH_BIAS offset
    bias_rate: float = 0.0      # rad/s, DRIFT profile rate

    def __post_init__(self):
        if self.activation_delay < 0:
            raise ValueError("activation_delay must be >= 0")
        if not np.all(np.isfinite([self.bias_angle, self.bias_rate])):
            raise ValueError("bias parameters must be finite")
        if np.linalg.norm(self.bias_axis) == 0:
            raise ValueError("bias_axis must be nonzero")


class ImplantApp:
    def __init__(self, bus: SoftwareBus, config: ImplantConfig,
                 truth: TruthProvider, name: str = "SOLO"):
        self._bus = bus
        self.config = config
        self._truth = truth
        self.app = bus.register_app(name)
        bus.set_handler(self.app, self.observe)
        for mid in ifc.ST_MIDS:
            bus.subscribe(self.app, mid)

        self.phase = Phase.DORMANT
        self.disable_counter = 0  # net operator enable(+)/disable(-) intent
        self._operator_enabled = False
        # mirrors of the genuine device's externally visible state
        self._sim_cmd_count = 0
        self._sim_err_count = 0
        self._data_seq: int | None = None  # continue the tracker's numbering
        self._hk_seq: int | None = None
        self._last_genuine_q: np.ndarray | None = None
        self._spoof_anchor: AttitudeState | None = None

    # -- bus observation ---------------------------------------------------

    def observe(self, packet: SpacePacket, tick: int) -> None:
        if self.phase == Phase.DORMANT and tick >= self.config.activation_delay:
            self.phase = Phase.MONITORING

        if packet.mid == ifc.ST_DATA_TLM_MID:
            q, _ = ifc.unpack_data_tlm(packet.payload)
            self._last_genuine_q = q
            self._data_seq = packet.primary.sequence_count
            return
        if packet.mid == ifc.ST_HK_TLM_MID:
            self._hk_seq = packet.primary.sequence_count
            return
        if packet.mid != ifc.ST_CMD_MID or not isinstance(
                packet.secondary, CommandSecondaryHeader):
            return

        code = packet.secondary.function_code
        fc = ifc.StFunctionCode
        self._track_command(code)

        if self.phase == Phase.DORMANT:
            return
        if self.phase == Phase.MONITORING:
            if code == fc.ENABLE:
                self._activate(tick)
            return

        # ACTIVE
        if code == fc.ENABLE:
            self.disable_counter += 1
            self._operator_enabled = True
            if self.config.mode is ImplantMode.REPLACEMENT:
                self._suppress_genuine()  # keep the real device off
        elif code == fc.DISABLE:
            self.disable_counter -= 1
            self._operator_enabled = False
        elif code == fc.REQ_DATA:
            if self._operator_enabled:
                self._publish_spoofed_data(tick)
        elif code == fc.REQ_HK:
            if self.config.mode is ImplantMode.REPLACEMENT and self._operator_enabled:
                self._publish_spoofed_hk(tick)

    def _track_command(self, code: int) -> None:
        # mirror the genuine device's counters from observed traffic
        if code in ifc.StFunctionCode.ALL:
            self._sim_cmd_count += 1
            if code == ifc.StFunctionCode.RESET_COUNTERS:
                self._sim_cmd_count = 0
                self._sim_err_count = 0
        else:
            self._sim_err_count += 1

    def _activate(self, tick: int) -> None:
        self.phase = Phase.ACTIVE
        self.disable_counter = 1
        self._operator_enabled = True
        t = ifc.tick_to_time(tick)
        base_q = self._last_genuine_q if self._last_genuine_q is not None \
            else canonicalize(self._truth(t))
        axis = np.asarray(self.config.bias_axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        self._spoof_anchor = AttitudeState(
            q=base_q, omega=axis * self.config.bias_rate, t=t)
        if self.config.mode is ImplantMode.REPLACEMENT:
            self._suppress_genuine()

    def _suppress_genuine(self) -> None:
        self._bus.publish(
            self.app,
            make_command(ifc.ST_CMD_MID, 0, ifc.StFunctionCode.DISABLE),
            route=Route.ONBOARD,
        )

    # -- telemetry fabrication --------------------------------------------

    def fabricate_quaternion(self, t: float) -> np.ndarray:
        profile = self.config.spoof_profile
        if profile is SpoofProfile.FROZEN:
            return self._spoof_anchor.q
        if profile is SpoofProfile.DRIFT:
            return attitude_at(self._spoof_anchor, t).q
        axis = np.asarray(self.config.bias_axis, dtype=float)
        return rotate_by(canonicalize(self._truth(t)), axis, self.config.bias_angle)

    def _next_data_seq(self) -> int:
        self._data_seq = 0 if self._data_seq is None else (self._data_seq + 1) % 16384
        return self._data_seq

    def _next_hk_seq(self) -> int:
        self._hk_seq = 0 if self._hk_seq is None else (self._hk_seq + 1) % 16384
        return self._hk_seq

    def fabricate_telemetry(self, tick: int) -> SpacePacket:
        seconds, subseconds = ifc.tick_to_timestamp(tick)
        q = self.fabricate_quaternion(ifc.tick_to_time(tick))
        return make_telemetry(
            ifc.ST_DATA_TLM_MID, self._next_data_seq(), seconds, subseconds,
            ifc.pack_data_tlm(q, status_word=0),
        )

    def _publish_spoofed_data(self, tick: int) -> None:
        self._bus.publish(self.app, self.fabricate_telemetry(tick), route=Route.ONBOARD)

    def _publish_spoofed_hk(self, tick: int) -> None:
        seconds, subseconds = ifc.tick_to_timestamp(tick)
        packet = make_telemetry(
            ifc.ST_HK_TLM_MID, self._next_hk_seq(), seconds, subseconds,
            ifc.pack_hk_tlm(self._sim_cmd_count, self._sim_err_count,
                            int(self._operator_enabled)),
        )
        self._bus.publish(self.app, packet, route=Route.ONBOARD)
