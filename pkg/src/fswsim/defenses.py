"""Bus-resident countermeasures, each independently toggleable.

* authenticated publish: every packet carries a keyed tag computed over
  its encoded bytes; the bus verifies the tag and that the sender is an
  authorized publisher for the MID before routing.  Tags live only on
  the bus; downlinked bytes are unchanged.
* runtime IDS: duplicate-publisher, onboard-device-command, and
  message-rate rules over the bus delivery stream, with access to the
  route tag and the true publisher endpoint (it runs inside the bus).
* model-based verification: reported star-tracker quaternions checked
  against a propagated prediction.
* cyber-safe mode: after a triggering alert, only an allowlisted
  baseline of applications may publish.
"""

from __future__ import annotations

import hashlib
import hmac
import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import interfaces as ifc
from .attitude import AttitudeState, angular_distance, attitude_at
from .softbus import AppId, Route, SoftwareBus
from .spacepacket import MessageId, SpacePacket, make_telemetry

TAG_LEN = 16


class AlertRule(str, Enum):
    DUP_PUBLISHER = "DUP_PUBLISHER"
    ONBOARD_DEVICE_COMMAND = "ONBOARD_DEVICE_COMMAND"
    RATE_ANOMALY = "RATE_ANOMALY"
    MODEL_INCONSISTENT = "MODEL_INCONSISTENT"
    AUTH_REJECT = "AUTH_REJECT"


@dataclass(frozen=True)
class Alert:
    tick: int
    rule: AlertRule
    mid: str
    detail: str

    def to_dict(self) -> dict:
        return {"tick": self.tick, "rule": self.rule.value,
                "mid": self.mid, "detail": self.detail}


def derive_key(app_name: str, seed: int) -> bytes:
    """Deterministic 32-byte per-app key for reproducible scenarios."""
    return hashlib.sha256(f"fswsim-key:{seed}:{app_name}".encode()).digest()


def compute_tag(key: bytes, packet_bytes: bytes) -> bytes:
    return hmac.new(key, packet_bytes, hashlib.sha256).digest()[:TAG_LEN]


def verify_tag(key: bytes, packet_bytes: bytes, tag: bytes) -> bool:
    return hmac.compare_digest(compute_tag(key, packet_bytes), tag)


@dataclass
class DefenseConfig:
    auth: bool = False
    ids: bool = False
    model_check: bool = False
    cyber_safe: bool = False
    theta_max: float = 0.05            # rad, model-check attitude gate
    omega_max: float = 1.0             # rad/s, model-check implied-rate gate
    rate_factor: float = 2.0           # IDS over-rate multiplier
    rate_window: int = 100             # ticks, IDS rate window
    dup_window: int = 10               # ticks, duplicate-publisher window
    cyber_safe_allowlist: tuple = ("ST", "SCHED", "RADIO", "SYS")
    # (app, function_code) pairs allowed to command devices from onboard
    onboard_command_allow: tuple = (
        ("SCHED", ifc.StFunctionCode.REQ_HK),
        ("SCHED", ifc.StFunctionCode.REQ_DATA),
    )

    @property
    def any_enabled(self) -> bool:
        return self.auth or self.ids or self.model_check or self.cyber_safe


class AuthKeyTable:
    """Per-app secret keys plus per-MID authorized publisher sets."""

    def __init__(self, seed: int = 0):
        self._keys: dict[str, bytes] = {}
        self._authorized: dict[MessageId, set[str]] = {}
        self._seed = seed

    def issue_key(self, app_name: str) -> bytes:
        key = derive_key(app_name, self._seed)
        self._keys[app_name] = key
        return key

    def key_for(self, app_name: str) -> bytes | None:
        return self._keys.get(app_name)

    def authorize(self, mid: MessageId, app_name: str) -> None:
        self._authorized.setdefault(mid, set()).add(app_name)

    def is_authorized(self, mid: MessageId, app_name: str) -> bool:
        return app_name in self._authorized.get(mid, set())


def default_key_table(seed: int = 0) -> AuthKeyTable:
    table = AuthKeyTable(seed)
    for name in ("ST", "SCHED", "RADIO", "SYS", "SOLO"):
        table.issue_key(name)  # SOLO gets a vendor key; no tracker authority
    table.authorize(ifc.ST_DATA_TLM_MID, "ST")
    table.authorize(ifc.ST_HK_TLM_MID, "ST")
    table.authorize(ifc.ST_CMD_MID, "SCHED")
    table.authorize(ifc.ST_CMD_MID, "RADIO")
    table.authorize(ifc.EVENT_TLM_MID, "SYS")
    return table


class ModelChecker:
    """Physics-consistency check over star-tracker attitude reports."""

    def __init__(self, known_omega: np.ndarray, theta_max: float, omega_max: float):
        self._omega = np.asarray(known_omega, dtype=float)
        self._theta_max = theta_max
        self._omega_max = omega_max
        self._anchor: AttitudeState | None = None
        self._last_q: np.ndarray | None = None
        self._last_t: float | None = None

    def check(self, q: np.ndarray, t: float) -> str | None:
        """Returns an inconsistency description, or None if accepted."""
        norm_err = abs(float(np.linalg.norm(q)) - 1.0)
        if norm_err > 1e-6:
            return f"non-unit quaternion (|1-norm|={norm_err:.3g})"

        verdict = None
        if self._last_q is not None and self._last_t is not None and t > self._last_t:
            implied = angular_distance(q, self._last_q) / (t - self._last_t)
            if implied > self._omega_max:
                verdict = f"implied rate {implied:.4f} rad/s exceeds {self._omega_max}"
        self._last_q, self._last_t = q, t

        if verdict is None and self._anchor is not None:
            predicted = self._anchor if t <= self._anchor.t else \
                attitude_at(self._anchor, t)
            dist = angular_distance(q, predicted.q)
            if dist > self._theta_max:
                verdict = f"attitude {dist:.4f} rad from prediction (> {self._theta_max})"

        if verdict is None:
            self._anchor = AttitudeState(q=q, omega=self._omega, t=t)
        return verdict


class DefenseSuite:
    """Hooks into the bus publish path; owns the alert log and safe mode."""

    def __init__(self, bus: SoftwareBus, config: DefenseConfig,
                 key_table: AuthKeyTable | None = None,
                 known_omega=(0.0, 0.0, 0.0),
                 expected_periods: dict[MessageId, int] | None = None,
                 device_command_mids: tuple = (ifc.ST_CMD_MID,)):
        self.config = config
        self.keys = key_table or default_key_table()
        self.alerts: list[Alert] = []
        self.safe_mode_active = False
        self.safe_mode_drops = 0
        self._bus = bus
        self._device_cmd_mids = set(device_command_mids)
        self._expected_periods = dict(expected_periods or {})
        self._recent_pubs: dict[MessageId, deque] = {}
        self._rate_hist: dict[MessageId, deque] = {}
        self._event_seq = 0
        self._model = ModelChecker(known_omega, config.theta_max, config.omega_max) \
            if config.model_check else None
        self.app = bus.register_app("SYS")
        bus.defenses = self

    # -- publish-path hooks ------------------------------------------------

    def filter_publish(self, tick: int, sender: AppId, packet: SpacePacket,
                       raw: bytes, route: Route) -> bool:
        if sender == self.app:
            return True  # the event publisher is part of the bus itself
        if self.config.auth and not self._auth_ok(tick, sender, packet, raw):
            return False
        if self.safe_mode_active and sender.name not in self.config.cyber_safe_allowlist:
            self.safe_mode_drops += 1
            return False
        return True

    def _auth_ok(self, tick: int, sender: AppId, packet: SpacePacket,
                 raw: bytes) -> bool:
        key = self.keys.key_for(sender.name)
        if key is None:
            self._alert(tick, AlertRule.AUTH_REJECT, packet.mid,
                        f"unkeyed sender {sender.name}")
            return False
        tag = compute_tag(key, raw)
        if not verify_tag(key, raw, tag):
            self._alert(tick, AlertRule.AUTH_REJECT, packet.mid,
                        f"bad tag from {sender.name}")
            return False
        if not self.keys.is_authorized(packet.mid, sender.name):
            self._alert(tick, AlertRule.AUTH_REJECT, packet.mid,
                        f"{sender.name} not an authorized publisher")
            return False
        return True

    def observe_delivery(self, tick: int, sender: AppId, packet: SpacePacket,
                         route: Route) -> None:
        if sender == self.app:
            return
        if self.config.ids:
            self._ids_inspect(tick, sender, packet, route)
        if self._model is not None and packet.mid == ifc.ST_DATA_TLM_MID:
            q, _ = ifc.unpack_data_tlm(packet.payload)
            verdict = self._model.check(q, packet.secondary.time)
            if verdict is not None:
                self._alert(tick, AlertRule.MODEL_INCONSISTENT, packet.mid, verdict)

    # -- IDS rules ---------------------------------------------------------

    def _ids_inspect(self, tick: int, sender: AppId, packet: SpacePacket,
                     route: Route) -> None:
        mid = packet.mid
        if packet.is_command and mid in self._device_cmd_mids:
            if route is Route.ONBOARD:
                pair = (sender.name, packet.secondary.function_code)
                if pair not in self.config.onboard_command_allow:
                    self._alert(
                        tick, AlertRule.ONBOARD_DEVICE_COMMAND, mid,
                        f"{sender.name} sent function code "
                        f"{packet.secondary.function_code} from onboard")
            return

        # telemetry rules
        recent = self._recent_pubs.setdefault(mid, deque())
        while recent and tick - recent[0][0] >= self.config.dup_window:
            recent.popleft()
        others = {name for t, name in recent if name != sender.name}
        recent.append((tick, sender.name))
        if others:
            self._alert(tick, AlertRule.DUP_PUBLISHER, mid,
                        f"{sender.name} and {sorted(others)} within "
                        f"{self.config.dup_window} ticks")

        period = self._expected_periods.get(mid)
        if period:
            hist = self._rate_hist.setdefault(mid, deque())
            while hist and tick - hist[0] >= self.config.rate_window:
                hist.popleft()
            hist.append(tick)
            expected = self.config.rate_window / period
            if len(hist) > self.config.rate_factor * expected:
                self._alert(tick, AlertRule.RATE_ANOMALY, mid,
                            f"{len(hist)} packets in {self.config.rate_window} "
                            f"ticks, expected ~{expected:.0f}")

    # -- alerts and cyber-safe mode ---------------------------------------

    def _alert(self, tick: int, rule: AlertRule, mid: MessageId, detail: str) -> None:
        self.alerts.append(Alert(tick=tick, rule=rule, mid=str(mid), detail=detail))
        if self.config.cyber_safe and not self.safe_mode_active \
                and rule is not AlertRule.AUTH_REJECT:
            self._enter_safe_mode(tick)

    def _enter_safe_mode(self, tick: int) -> None:
        self.safe_mode_active = True
        seconds, subseconds = ifc.tick_to_timestamp(tick)
        event = make_telemetry(
            ifc.EVENT_TLM_MID, self._event_seq, seconds, subseconds,
            ifc.pack_event_tlm(ifc.EventCode.CYBER_SAFE_ENTERED))
        self._event_seq += 1
        self._bus.publish(self.app, event, route=Route.ONBOARD)

    def export_alerts(self, path) -> None:
        with open(path, "w") as fh:
            for alert in self.alerts:
                fh.write(json.dumps(alert.to_dict()) + "\n")
