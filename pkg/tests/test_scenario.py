import pytest

from fswsim import interfaces as ifc
from fswsim.implant import ImplantMode, SpoofProfile
from fswsim.scenario import ScenarioError, load_scenario, scenario_from_dict

from conftest import SCENARIO_DIR, shipped_dict, small_scenario


def test_small_scenario_parses():
    s = small_scenario()
    assert s.duration_ticks == 100
    assert len(s.schedule) == 2
    assert s.schedule[0].target_mid == ifc.ST_CMD_MID
    assert s.schedule[0].function_code == ifc.StFunctionCode.REQ_DATA
    assert s.implant is None
    assert not s.defenses.any_enabled
    assert [c.tick for c in s.operator_script] == [3]


def test_implant_and_defense_parsing():
    s = small_scenario(
        implant={"activation_delay": 30, "mode": "BIAS",
                 "spoof_profile": "TRACK_TRUTH_WITH_BIAS",
                 "bias_axis": [1, 0, 0], "bias_angle": 0.01},
        defenses={"model_check": True, "theta_max": 0.02})
    assert s.implant.mode is ImplantMode.BIAS
    assert s.implant.spoof_profile is SpoofProfile.TRACK_TRUTH_WITH_BIAS
    assert s.implant.bias_angle == 0.01
    assert s.defenses.model_check and s.defenses.theta_max == 0.02
    assert s.defenses.any_enabled


def test_script_at():
    s = small_scenario(operator_script=[
        {"tick": 5, "device": "ST", "command": "ENABLE"},
        {"tick": 5, "device": "ST", "command": "REQ_HK"},
        {"tick": 9, "device": "ST", "command": "DISABLE"},
    ])
    assert [c.command for c in s.script_at(5)] == ["ENABLE", "REQ_HK"]
    assert s.script_at(4) == []


@pytest.mark.parametrize("broken", [
    {"name": None},
    {"duration_ticks": 0},
    {"duration_ticks": "100"},
    {"schedule": [{"target": "NOPE", "function": "REQ_DATA", "period": 10}]},
    {"schedule": [{"target": "ST_CMD", "function": "LAUNCH", "period": 10}]},
    {"operator_script": [{"tick": 5, "device": "GPS", "command": "ENABLE"}]},
    {"operator_script": [{"tick": 5, "device": "ST", "command": "FRY"}]},
    {"operator_script": [{"tick": 500, "device": "ST", "command": "ENABLE"}]},
    {"implant": {"activation_delay": -1}},
    {"implant": {"mode": "STEALTH"}},
    {"downlink_mids": ["ST_DATA", "BOGUS"]},
])
def test_validation_errors(broken):
    base = {
        "name": "x", "duration_ticks": 100,
        "schedule": [], "operator_script": [],
    }
    base.update(broken)
    if base["name"] is None:
        del base["name"]
    with pytest.raises(ScenarioError):
        scenario_from_dict(base)


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_scenario(bad)


def test_all_shipped_scenarios_load():
    paths = sorted(SCENARIO_DIR.glob("*.json"))
    assert len(paths) >= 10
    for path in paths:
        s = load_scenario(path)
        assert s.name == path.stem
        assert s.raw == shipped_dict(path.stem)
