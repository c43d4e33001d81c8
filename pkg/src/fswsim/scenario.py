"""Scenario configuration: a JSON file fully determines a run.

A scenario fixes the seed, duration, schedule table, initial attitude,
optional implant configuration, defense toggles, the operator command
script, and optional assertions evaluated after the run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import interfaces as ifc
from .attitude import AttitudeState
from .defenses import DefenseConfig
from .implant import ImplantConfig, ImplantMode, SpoofProfile
from .scheduler import ScheduleEntry
from .spacepacket import MessageId

MID_NAMES = {
    "ST_CMD": ifc.ST_CMD_MID,
    "ST_DATA": ifc.ST_DATA_TLM_MID,
    "ST_HK": ifc.ST_HK_TLM_MID,
    "EVENT": ifc.EVENT_TLM_MID,
}

DEFAULT_DOWNLINK = ("ST_DATA", "ST_HK", "EVENT")


class ScenarioError(Exception):
    pass


@dataclass(frozen=True)
class OperatorCommand:
    tick: int
    device: str
    command: str


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    duration_ticks: int
    schedule: tuple[ScheduleEntry, ...]
    initial_attitude: AttitudeState
    noise_sigma: float
    implant: ImplantConfig | None
    defenses: DefenseConfig
    operator_script: tuple[OperatorCommand, ...]
    downlink_mids: tuple[MessageId, ...]
    assertions: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def script_at(self, tick: int) -> list[OperatorCommand]:
        return [c for c in self.operator_script if c.tick == tick]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ScenarioError(msg)


def scenario_from_dict(data: dict) -> Scenario:
    _require("name" in data, "scenario missing 'name'")
    _require(isinstance(data.get("duration_ticks"), int) and data["duration_ticks"] > 0,
             "duration_ticks must be a positive integer")

    schedule = []
    for entry in data.get("schedule", []):
        _require(entry.get("target") in MID_NAMES, f"unknown schedule target: {entry}")
        code = getattr(ifc.StFunctionCode, entry.get("function", ""), None)
        _require(code is not None, f"unknown schedule function: {entry}")
        schedule.append(ScheduleEntry(
            target_mid=MID_NAMES[entry["target"]],
            function_code=code,
            period_ticks=entry["period"],
            phase_ticks=entry.get("phase", 0),
        ))

    att = data.get("initial_attitude", {})
    initial = AttitudeState(
        q=np.asarray(att.get("q", [0, 0, 0, 1]), dtype=float),
        omega=np.asarray(att.get("omega", [0, 0, 0]), dtype=float),
        t=0.0,
    )

    implant = None
    if data.get("implant"):
        imp = data["implant"]
        try:
            implant = ImplantConfig(
                activation_delay=imp.get("activation_delay", 300),
                mode=ImplantMode(imp.get("mode", "REPLACEMENT")),
                spoof_profile=SpoofProfile(imp.get("spoof_profile", "FROZEN")),
                bias_axis=tuple(imp.get("bias_axis", (0.0, 0.0, 1.0))),
                bias_angle=imp.get("bias_angle", 0.0),
                bias_rate=imp.get("bias_rate", 0.0),
            )
        except ValueError as exc:
            raise ScenarioError(f"invalid implant config: {exc}") from exc

    dfn = data.get("defenses", {})
    defenses = DefenseConfig(
        auth=dfn.get("auth", False),
        ids=dfn.get("ids", False),
        model_check=dfn.get("model_check", False),
        cyber_safe=dfn.get("cyber_safe", False),
        theta_max=dfn.get("theta_max", 0.05),
        omega_max=dfn.get("omega_max", 1.0),
        rate_factor=dfn.get("rate_factor", 2.0),
        rate_window=dfn.get("rate_window", 100),
        dup_window=dfn.get("dup_window", 10),
        cyber_safe_allowlist=tuple(
            dfn.get("cyber_safe_allowlist", ("ST", "SCHED", "RADIO", "SYS"))),
    )

    script = []
    for cmd in data.get("operator_script", []):
        _require(cmd.get("device") in ifc.GROUND_COMMANDS,
                 f"unknown device in operator script: {cmd}")
        _require(cmd.get("command") in ifc.GROUND_COMMANDS[cmd["device"]]["codes"].values(),
                 f"unknown command in operator script: {cmd}")
        _require(0 <= cmd.get("tick", -1) < data["duration_ticks"],
                 f"operator command tick out of range: {cmd}")
        script.append(OperatorCommand(cmd["tick"], cmd["device"], cmd["command"]))
    script.sort(key=lambda c: c.tick)

    downlink_names = data.get("downlink_mids", list(DEFAULT_DOWNLINK))
    for name in downlink_names:
        _require(name in MID_NAMES, f"unknown downlink MID name: {name}")

    return Scenario(
        name=data["name"],
        seed=data.get("seed", 0),
        duration_ticks=data["duration_ticks"],
        schedule=tuple(schedule),
        initial_attitude=initial,
        noise_sigma=data.get("noise_sigma", 0.0),
        implant=implant,
        defenses=defenses,
        operator_script=tuple(script),
        downlink_mids=tuple(MID_NAMES[n] for n in downlink_names),
        assertions=data.get("assertions", {}),
        raw=data,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(data)
