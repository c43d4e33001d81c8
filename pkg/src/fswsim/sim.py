"""Simulation harness: wires the flight stack together and steps the loop.

One logical event loop; within a tick, operator commands are uplinked
first, then the scheduler fires, and every publish is delivered
synchronously before the tick advances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import interfaces as ifc
from .attitude import AttitudeState, attitude_at
from .defenses import DefenseSuite, default_key_table
from .downlink import LoopbackLink, RadioApp
from .groundstation import GroundStation
from .implant import ImplantApp
from .scenario import Scenario
from .scheduler import Scheduler
from .softbus import SoftwareBus
from .spacepacket import MessageId
from .star_tracker import StarTrackerApp


@dataclass
class SimStack:
    scenario: Scenario
    bus: SoftwareBus
    tracker: StarTrackerApp
    implant: ImplantApp | None
    scheduler: Scheduler
    radio: RadioApp
    ground: GroundStation
    defenses: DefenseSuite | None

    def truth_at(self, tick: int) -> np.ndarray:
        state = self.scenario.initial_attitude
        t = ifc.tick_to_time(tick)
        return attitude_at(state, t).q


def expected_telemetry_periods(scenario: Scenario) -> dict[MessageId, int]:
    """Telemetry cadence implied by the wakeup schedule, for the IDS rate rule."""
    wakeup_to_tlm = {
        ifc.StFunctionCode.REQ_DATA: ifc.ST_DATA_TLM_MID,
        ifc.StFunctionCode.REQ_HK: ifc.ST_HK_TLM_MID,
    }
    periods = {}
    for entry in scenario.schedule:
        tlm_mid = wakeup_to_tlm.get(entry.function_code)
        if tlm_mid is not None:
            periods[tlm_mid] = entry.period_ticks
    return periods


def build_stack(scenario: Scenario, ground: GroundStation | None = None) -> SimStack:
    bus = SoftwareBus()

    def truth(t: float) -> np.ndarray:
        return attitude_at(scenario.initial_attitude, t).q

    tracker = StarTrackerApp(bus, truth, noise_sigma=scenario.noise_sigma,
                             seed=scenario.seed)
    implant = ImplantApp(bus, scenario.implant, truth) if scenario.implant else None

    sched_app = bus.register_app("SCHED")
    scheduler = Scheduler(bus, sched_app, list(scenario.schedule))

    if ground is None:
        ground = GroundStation()
    link = LoopbackLink(ground.ingest_frame)
    radio = RadioApp(bus, link, scenario.downlink_mids)
    ground.set_uplink(radio.uplink_command)

    defenses = None
    if scenario.defenses.any_enabled:
        defenses = DefenseSuite(
            bus, scenario.defenses,
            key_table=default_key_table(scenario.seed),
            known_omega=scenario.initial_attitude.omega,
            expected_periods=expected_telemetry_periods(scenario),
        )

    return SimStack(scenario=scenario, bus=bus, tracker=tracker, implant=implant,
                    scheduler=scheduler, radio=radio, ground=ground,
                    defenses=defenses)


def run_simulation(scenario: Scenario, ground: GroundStation | None = None,
                   on_tick=None) -> SimStack:
    stack = build_stack(scenario, ground=ground)
    for tick in range(scenario.duration_ticks):
        stack.bus.set_tick(tick)
        for cmd in scenario.script_at(tick):
            stack.ground.send_command(cmd.device, cmd.command, wall_tick=tick)
        stack.scheduler.tick(tick)
        if on_tick is not None:
            on_tick(stack, tick)
    return stack


def write_artifacts(stack: SimStack, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stack.bus.export_ledger(out_dir / "ledger.jsonl")
    stack.ground.write_artifacts(out_dir)
    if stack.defenses is not None:
        stack.defenses.export_alerts(out_dir / "alerts.jsonl")
    else:
        (out_dir / "alerts.jsonl").write_text("")
    (out_dir / "scenario.json").write_text(
        json.dumps(stack.scenario.raw, indent=2, sort_keys=True) + "\n")
    return out_dir
