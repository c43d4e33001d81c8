import json

import pytest
from fastapi.testclient import TestClient

from fswsim.runner import run_scenario
from fswsim.service import alerts_from_dir, create_app, rehydrate_ground
from fswsim.sim import run_simulation

from conftest import small_scenario


@pytest.fixture
def live_client():
    stack = run_simulation(small_scenario())
    alerts = [{"tick": 3, "rule": "DUP_PUBLISHER", "mid": "0x0861", "detail": "x"}]
    app = create_app(stack.ground, alerts=lambda: alerts)
    return TestClient(app), stack


def test_hk_endpoint(live_client):
    client, stack = live_client
    hk = client.get("/hk").json()
    assert hk["STAR_TRACKER_HK"]["enabled"] == 1
    assert hk["STAR_TRACKER_HK"]["tick"] == 95  # last HK cycle


def test_archive_endpoint_with_start(live_client):
    client, stack = live_client
    rows = client.get("/archive").json()
    assert len(rows) == len(stack.ground.archive_index()) == 19
    assert rows[0]["row"] == 0
    tail = client.get("/archive", params={"start": 17}).json()
    assert [r["row"] for r in tail] == [17, 18]


def test_cmdlog_endpoint(live_client):
    client, _ = live_client
    log = client.get("/cmdlog").json()
    assert [c["name"] for c in log] == ["ENABLE"]
    assert log[0]["origin"] == "GROUND"


def test_alerts_endpoint(live_client):
    client, _ = live_client
    assert client.get("/alerts").json()[0]["rule"] == "DUP_PUBLISHER"


def test_raw_endpoint(live_client):
    client, stack = live_client
    body = client.get("/raw/0").json()
    assert body == {"row": 0, "hex": stack.ground.raw_bytes_view(0)}
    assert client.get("/raw/999").status_code == 404


def test_cmd_endpoint_logs_and_validates(live_client):
    client, stack = live_client
    before = len(stack.ground.command_log())
    resp = client.post("/cmd", json={"device": "ST", "command": "NOOP"})
    assert resp.status_code == 200
    assert resp.json()["log"]["name"] == "NOOP"
    assert len(stack.ground.command_log()) == before + 1
    assert client.post("/cmd", json={"device": "ST"}).status_code == 400
    assert client.post(
        "/cmd", json={"device": "ST", "command": "FRY"}).status_code == 400


def test_websocket_stream_pushes_records(live_client):
    client, stack = live_client
    from fswsim import interfaces as ifc
    from fswsim.downlink import frame
    from fswsim.spacepacket import encode_packet, make_telemetry
    with client.websocket_connect("/stream") as ws:
        seconds, subseconds = ifc.tick_to_timestamp(200)
        packet = make_telemetry(ifc.ST_HK_TLM_MID, 99, seconds, subseconds,
                                ifc.pack_hk_tlm(5, 0, 1))
        stack.ground.ingest_frame(frame(encode_packet(packet)))
        msg = json.loads(ws.receive_text())
    assert msg["name"] == "STAR_TRACKER_HK"
    assert msg["tick"] == 200
    assert msg["sequence"] == 99


def test_rehydrated_service_matches_live_run(tmp_path):
    scenario = small_scenario()
    stack, _ = run_scenario(scenario, out_dir=tmp_path)
    ground = rehydrate_ground(tmp_path)
    live = create_app(stack.ground)
    rehydrated = create_app(ground, alerts=alerts_from_dir(tmp_path))
    with TestClient(live) as a, TestClient(rehydrated) as b:
        assert a.get("/archive").json() == b.get("/archive").json()
        assert a.get("/hk").json() == b.get("/hk").json()
        assert a.get("/cmdlog").json() == b.get("/cmdlog").json()
        assert b.get("/alerts").json() == []
