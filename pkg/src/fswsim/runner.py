"""Run reporting, cross-run comparison, and scenario assertions.

Everything here is recomputable from the persisted artifacts of a run:
the bus ledger, the ground archive + index, the command log, the
housekeeping history, and the alert log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import interfaces as ifc
from .attitude import angular_distance, attitude_at, canonicalize
from .scenario import Scenario, scenario_from_dict
from .sim import SimStack, run_simulation, write_artifacts
from .softbus import records_from
from .spacepacket import decode_packet

ROGUE_APP = "SOLO"


class CompareError(Exception):
    pass


# -- report ---------------------------------------------------------------

def activation_tick(stack: SimStack) -> int | None:
    """First tick the rogue app touched a star-tracker MID, from the ledger."""
    for rec in stack.bus.ledger():
        if rec.true_sender.name == ROGUE_APP and rec.packet.mid in ifc.ST_MIDS:
            return rec.tick
    return None


def genuine_enabled_timeline(stack: SimStack) -> list[bool]:
    """Replay delivered tracker commands to recover the device's real state."""
    enabled = False
    timeline = []
    records = [r for r in stack.bus.ledger()
               if r.delivered and r.packet.mid == ifc.ST_CMD_MID]
    i = 0
    for tick in range(stack.scenario.duration_ticks):
        while i < len(records) and records[i].tick <= tick:
            code = records[i].packet.secondary.function_code
            if code == ifc.StFunctionCode.ENABLE:
                enabled = True
            elif code == ifc.StFunctionCode.DISABLE:
                enabled = False
            i += 1
        timeline.append(enabled)
    return timeline


def believed_attitudes(stack: SimStack) -> dict[int, np.ndarray]:
    """Ground-believed quaternion per tick: the last archived data row wins."""
    believed = {}
    for rec in stack.ground.archive_index():
        if rec.name == "STAR_TRACKER_DATA":
            q = np.array([rec.fields["q_x"], rec.fields["q_y"],
                          rec.fields["q_z"], rec.fields["q_w"]])
            believed[rec.tick] = q
    return believed


def deception_metrics(stack: SimStack) -> dict:
    act = activation_tick(stack)
    believed = believed_attitudes(stack)
    window = {t: q for t, q in believed.items() if act is None or t >= act}
    errors = []
    for tick, q in sorted(window.items()):
        truth_q = canonicalize(stack.truth_at(tick))
        errors.append(angular_distance(canonicalize(q), truth_q))
    return {
        "activation_tick": act,
        "samples": len(errors),
        "mean_angular_error_rad": float(np.mean(errors)) if errors else 0.0,
        "max_angular_error_rad": float(np.max(errors)) if errors else 0.0,
    }


def time_to_detection(stack: SimStack) -> dict[str, int]:
    act = activation_tick(stack)
    out = {}
    if stack.defenses is None or act is None:
        return out
    for alert in stack.defenses.alerts:
        if alert.tick >= act and alert.rule.value not in out:
            out[alert.rule.value] = alert.tick - act
    return out


def build_report(stack: SimStack) -> dict:
    counts: dict[str, int] = {}
    for rec in stack.ground.archive_index():
        counts[rec.name] = counts.get(rec.name, 0) + 1
    alert_counts: dict[str, int] = {}
    alerts = stack.defenses.alerts if stack.defenses else []
    for alert in alerts:
        alert_counts[alert.rule.value] = alert_counts.get(alert.rule.value, 0) + 1
    return {
        "scenario": stack.scenario.name,
        "duration_ticks": stack.scenario.duration_ticks,
        "packet_counts": counts,
        "parse_errors": len(stack.ground.format_violations),
        "unmapped_packets": stack.ground.unmapped_count,
        "alerts_total": len(alerts),
        "alert_counts": alert_counts,
        "time_to_detection_ticks": time_to_detection(stack),
        "deception": deception_metrics(stack),
        "safe_mode_active": bool(stack.defenses and stack.defenses.safe_mode_active),
        "safe_mode_drops": stack.defenses.safe_mode_drops if stack.defenses else 0,
        "uplink_rejects": stack.radio.uplink_rejects,
    }


def run_scenario(scenario: Scenario, out_dir: str | Path | None = None
                 ) -> tuple[SimStack, dict]:
    stack = run_simulation(scenario)
    report = build_report(stack)
    if out_dir is not None:
        out = write_artifacts(stack, out_dir)
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    return stack, report


# -- cross-run comparison -------------------------------------------------

def _load_jsonl(path: Path) -> list[dict]:
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def _masked_index(rows: list[dict], mask_fields: tuple[str, ...]) -> list[dict]:
    out = []
    for row in rows:
        fields = {k: ("<masked>" if k in mask_fields else v)
                  for k, v in row["fields"].items()}
        out.append({**row, "fields": fields})
    return out


def compare_runs(dir_a: str | Path, dir_b: str | Path,
                 mask_fields: tuple[str, ...] = ()) -> dict:
    """Field-wise diff of the operator-visible ground record of two runs."""
    dir_a, dir_b = Path(dir_a), Path(dir_b)
    scn_a = json.loads((dir_a / "scenario.json").read_text())
    scn_b = json.loads((dir_b / "scenario.json").read_text())
    if scn_a.get("operator_script") != scn_b.get("operator_script"):
        raise CompareError("operator scripts differ; runs are not comparable")

    diffs = []

    def diff_lists(label: str, a: list, b: list) -> None:
        if len(a) != len(b):
            diffs.append(f"{label}: {len(a)} vs {len(b)} rows")
        for i, (ra, rb) in enumerate(zip(a, b)):
            if ra != rb:
                diffs.append(f"{label}[{i}]: {ra} != {rb}")

    diff_lists("command_log",
               _load_jsonl(dir_a / "cmdlog.jsonl"),
               _load_jsonl(dir_b / "cmdlog.jsonl"))
    diff_lists("hk_history",
               _load_jsonl(dir_a / "hk_history.jsonl"),
               _load_jsonl(dir_b / "hk_history.jsonl"))
    diff_lists("archive_index",
               _masked_index(_load_jsonl(dir_a / "archive_index.jsonl"), mask_fields),
               _masked_index(_load_jsonl(dir_b / "archive_index.jsonl"), mask_fields))

    return {
        "verdict": "INDISTINGUISHABLE" if not diffs else "DISTINGUISHABLE",
        "masked_fields": list(mask_fields),
        "diffs": diffs,
    }


# -- assertions -----------------------------------------------------------

def _data_rows(stack: SimStack) -> list:
    return [r for r in stack.ground.archive_index()
            if r.name == "STAR_TRACKER_DATA"]


def evaluate_assertions(stack: SimStack, report: dict) -> list[tuple[str, bool, str]]:
    """Evaluate the scenario's declarative assertions; (name, ok, detail) rows."""
    results = []
    asserts = stack.scenario.assertions

    def check(name: str, ok: bool, detail: str) -> None:
        results.append((name, bool(ok), detail))

    if "alerts_total" in asserts:
        want = asserts["alerts_total"]
        got = report["alerts_total"]
        check("alerts_total", got == want, f"want {want}, got {got}")

    if "parse_errors" in asserts:
        want = asserts["parse_errors"]
        got = report["parse_errors"]
        check("parse_errors", got == want, f"want {want}, got {got}")

    for name, want in asserts.get("archive_counts", {}).items():
        got = report["packet_counts"].get(name, 0)
        check(f"archive_counts[{name}]", got == want, f"want {want}, got {got}")

    if "rogue_records_on_tracker_mids" in asserts:
        want = asserts["rogue_records_on_tracker_mids"]
        got = sum(1 for rec in stack.bus.ledger()
                  if rec.true_sender.name == ROGUE_APP
                  and rec.packet.mid in ifc.ST_MIDS)
        check("rogue_records_on_tracker_mids", got == want, f"want {want}, got {got}")

    if "rogue_deliveries" in asserts:
        want = asserts["rogue_deliveries"]
        got = sum(1 for rec in stack.bus.ledger()
                  if rec.true_sender.name == ROGUE_APP and rec.delivered)
        check("rogue_deliveries", got == want, f"want {want}, got {got}")

    if asserts.get("genuine_all_delivered"):
        records = records_from(stack.bus.ledger(), sender="ST")
        bad = [r for r in records if not r.delivered]
        check("genuine_all_delivered", not bad, f"{len(bad)} dropped of {len(records)}")

    if "data_interarrival_ticks" in asserts:
        want = asserts["data_interarrival_ticks"]
        ticks = [r.tick for r in _data_rows(stack)]
        gaps = sorted({b - a for a, b in zip(ticks, ticks[1:])})
        check("data_interarrival_ticks", gaps in ([], [want]),
              f"want uniform {want}, got gaps {gaps}")

    if asserts.get("cadence_pre_post_equal"):
        act = report["deception"]["activation_tick"]
        ticks = [r.tick for r in _data_rows(stack)]
        pre = {b - a for a, b in zip(ticks, ticks[1:]) if b < act}
        post = {b - a for a, b in zip(ticks, ticks[1:]) if a >= act}
        check("cadence_pre_post_equal", act is not None and pre == post,
              f"activation {act}, pre gaps {sorted(pre)}, post gaps {sorted(post)}")

    if "data_unit_norm_tol" in asserts:
        tol = asserts["data_unit_norm_tol"]
        worst = 0.0
        for row in _data_rows(stack):
            q = np.array([row.fields[k] for k in ifc.QUATERNION_FIELDS])
            worst = max(worst, abs(float(np.linalg.norm(q)) - 1.0))
        check("data_unit_norm_tol", worst <= tol, f"worst |1-norm| {worst:.3g}")

    if "data_timestamp_spacing_s" in asserts:
        want = asserts["data_timestamp_spacing_s"]
        packets = [decode_packet(raw) for raw in
                   _archive_packets(stack) if not decode_packet(raw).is_command]
        times = [p.secondary.time for p in packets
                 if p.mid == ifc.ST_DATA_TLM_MID]
        spacings = sorted({round(b - a, 9) for a, b in zip(times, times[1:])})
        check("data_timestamp_spacing_s", spacings in ([], [want]),
              f"want uniform {want}, got {spacings}")

    if "mean_attitude_error" in asserts:
        want = asserts["mean_attitude_error"]
        got = report["deception"]["mean_angular_error_rad"]
        ok = abs(got - want["value"]) <= want["tol"]
        check("mean_attitude_error", ok, f"want {want['value']}±{want['tol']}, got {got}")

    if asserts.get("hk_deception"):
        params = asserts["hk_deception"]
        act = report["deception"]["activation_tick"]
        timeline = genuine_enabled_timeline(stack)
        hk = [row for row in stack.ground.hk_history() if act is not None
              and row["tick"] >= act and row["name"] == "STAR_TRACKER_HK"]
        shown_enabled = sum(1 for row in hk if row["enabled"] == 1)
        actually_enabled = sum(1 for row in hk if timeline[row["tick"]])
        frac = shown_enabled / len(hk) if hk else 0.0
        ok = bool(hk) and frac >= params["min_enabled_fraction"] \
            and actually_enabled == 0
        check("hk_deception", ok,
              f"shown-enabled fraction {frac:.3f} over {len(hk)} cycles, "
              f"device actually enabled in {actually_enabled}")

    for want in asserts.get("require_alerts", []):
        alerts = stack.defenses.alerts if stack.defenses else []
        matches = [a for a in alerts if a.rule.value == want["rule"]]
        ok = bool(matches)
        detail = f"{len(matches)} {want['rule']} alerts"
        if ok and "max_ticks_after_activation" in want:
            act = report["deception"]["activation_tick"]
            delay = min(a.tick for a in matches) - (act or 0)
            ok = act is not None and delay <= want["max_ticks_after_activation"]
            detail += f", first {delay} ticks after activation"
        check(f"require_alert[{want['rule']}]", ok, detail)

    for rule in asserts.get("forbid_alert_rules", []):
        alerts = stack.defenses.alerts if stack.defenses else []
        got = sum(1 for a in alerts if a.rule.value == rule)
        check(f"forbid_alert[{rule}]", got == 0, f"{got} alerts")

    if asserts.get("safe_mode_entered") is not None:
        want = asserts["safe_mode_entered"]
        got = report["safe_mode_active"]
        check("safe_mode_entered", got == want, f"want {want}, got {got}")

    return results


def _archive_packets(stack: SimStack) -> list[bytes]:
    from .spacepacket import split_stream
    return split_stream(stack.ground.archive_bytes())
