import json

import numpy as np
import pytest

from fswsim.runner import (
    CompareError,
    activation_tick,
    believed_attitudes,
    build_report,
    compare_runs,
    deception_metrics,
    evaluate_assertions,
    genuine_enabled_timeline,
    run_scenario,
)
from fswsim.sim import run_simulation

from conftest import small_scenario


def implant_cfg(**over):
    cfg = {"activation_delay": 30, "mode": "REPLACEMENT", "spoof_profile": "FROZEN"}
    cfg.update(over)
    return cfg


def test_baseline_report_counts():
    stack = run_simulation(small_scenario())
    report = build_report(stack)
    # ENABLE at tick 3; REQ_DATA at 10,20,...,90 and REQ_HK at 5,15,...,95
    assert report["packet_counts"]["STAR_TRACKER_DATA"] == 9
    assert report["packet_counts"]["STAR_TRACKER_HK"] == 10
    assert report["parse_errors"] == 0
    assert report["alerts_total"] == 0
    assert report["deception"]["activation_tick"] is None
    assert report["deception"]["max_angular_error_rad"] < 1e-9


def test_activation_tick_and_timeline():
    scenario = small_scenario(
        implant=implant_cfg(),
        operator_script=[{"tick": 3, "device": "ST", "command": "ENABLE"},
                         {"tick": 40, "device": "ST", "command": "ENABLE"}])
    stack = run_simulation(scenario)
    assert activation_tick(stack) == 40  # the implant's suppressing DISABLE
    timeline = genuine_enabled_timeline(stack)
    assert timeline[3] and timeline[39]
    assert not any(timeline[40:])


def test_deception_metrics_frozen_replacement():
    scenario = small_scenario(
        implant=implant_cfg(),
        operator_script=[{"tick": 3, "device": "ST", "command": "ENABLE"},
                         {"tick": 40, "device": "ST", "command": "ENABLE"}])
    stack = run_simulation(scenario)
    metrics = deception_metrics(stack)
    assert metrics["activation_tick"] == 40
    assert metrics["samples"] == 6  # data ticks 40..90 carry spoofed rows
    # frozen at the tick-30 sample while truth rotates 0.1 rad/s
    assert metrics["max_angular_error_rad"] > 0.3
    believed = believed_attitudes(stack)
    assert set(believed) == {10, 20, 30, 40, 50, 60, 70, 80, 90}


def test_run_scenario_persists_artifacts(tmp_path):
    out = tmp_path / "run"
    stack, report = run_scenario(small_scenario(), out_dir=out)
    expected = {"ledger.jsonl", "archive.bin", "archive_index.jsonl",
                "cmdlog.jsonl", "hk_history.jsonl", "alerts.jsonl",
                "ground_errors.json", "scenario.json", "report.json"}
    assert expected <= {p.name for p in out.iterdir()}
    assert json.loads((out / "report.json").read_text()) == report
    assert (out / "archive.bin").read_bytes() == stack.ground.archive_bytes()


def test_compare_identical_runs(tmp_path):
    run_scenario(small_scenario(), out_dir=tmp_path / "a")
    run_scenario(small_scenario(), out_dir=tmp_path / "b")
    result = compare_runs(tmp_path / "a", tmp_path / "b")
    assert result["verdict"] == "INDISTINGUISHABLE"
    assert result["diffs"] == []


def test_compare_detects_field_difference(tmp_path):
    run_scenario(small_scenario(), out_dir=tmp_path / "a")
    run_scenario(small_scenario(initial_attitude={
        "q": [0, 0, 0, 1], "omega": [0.0, 0.0, 0.2]}), out_dir=tmp_path / "b")
    result = compare_runs(tmp_path / "a", tmp_path / "b")
    assert result["verdict"] == "DISTINGUISHABLE"
    masked = compare_runs(tmp_path / "a", tmp_path / "b",
                          mask_fields=("q_x", "q_y", "q_z", "q_w"))
    assert masked["verdict"] == "INDISTINGUISHABLE"


def test_compare_rejects_different_scripts(tmp_path):
    run_scenario(small_scenario(), out_dir=tmp_path / "a")
    run_scenario(small_scenario(operator_script=[]), out_dir=tmp_path / "b")
    with pytest.raises(CompareError):
        compare_runs(tmp_path / "a", tmp_path / "b")


def test_evaluate_assertions_pass_and_fail():
    scenario = small_scenario(assertions={
        "alerts_total": 0,
        "parse_errors": 0,
        "archive_counts": {"STAR_TRACKER_DATA": 9, "STAR_TRACKER_HK": 99},
        "data_interarrival_ticks": 10,
        "data_unit_norm_tol": 1e-9,
        "data_timestamp_spacing_s": 1.0,
    })
    stack = run_simulation(scenario)
    results = {name: ok for name, ok, _ in
               evaluate_assertions(stack, build_report(stack))}
    assert results["alerts_total"]
    assert results["data_interarrival_ticks"]
    assert results["data_unit_norm_tol"]
    assert results["data_timestamp_spacing_s"]
    assert results["archive_counts[STAR_TRACKER_DATA]"]
    assert not results["archive_counts[STAR_TRACKER_HK]"]  # 99 is wrong on purpose


def test_determinism_byte_identical_artifacts(tmp_path):
    scenario = small_scenario(implant=implant_cfg(), noise_sigma=1e-4)
    run_scenario(scenario, out_dir=tmp_path / "a")
    run_scenario(scenario, out_dir=tmp_path / "b")
    for name in ("ledger.jsonl", "archive.bin", "archive_index.jsonl",
                 "cmdlog.jsonl", "hk_history.jsonl", "alerts.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes(), name
