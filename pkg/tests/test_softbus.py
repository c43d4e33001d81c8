import pytest

from fswsim.softbus import (
    BusError,
    PublishRejected,
    Route,
    SoftwareBus,
    UnregisteredApp,
    records_from,
)
from fswsim.spacepacket import MessageId, encode_packet, make_command, make_telemetry


def tlm(apid=0x061, seq=0, payload=b""):
    return make_telemetry(MessageId.telemetry(apid), seq, 0, 0, payload)


def test_delivery_to_subscribers_only():
    bus = SoftwareBus()
    got = []
    sender = bus.register_app("sender")
    sub = bus.register_app("sub", lambda p, t: got.append((p.mid.apid, t)))
    bus.register_app("bystander", lambda p, t: got.append("wrong"))
    bus.subscribe(sub, MessageId.telemetry(0x061))

    bus.set_tick(4)
    count = bus.publish(sender, tlm())
    assert count == 1
    assert got == [(0x061, 4)]


def test_no_self_delivery():
    bus = SoftwareBus()
    got = []
    app = bus.register_app("loop", lambda p, t: got.append(p))
    bus.subscribe(app, MessageId.telemetry(0x061))
    assert bus.publish(app, tlm()) == 0
    assert got == []


def test_delivery_in_subscription_order():
    bus = SoftwareBus()
    order = []
    sender = bus.register_app("sender")
    for name in ("b", "a", "c"):
        app = bus.register_app(name, lambda p, t, name=name: order.append(name))
        bus.subscribe(app, MessageId.telemetry(0x061))
    bus.publish(sender, tlm())
    assert order == ["b", "a", "c"]


def test_mid_only_routing_ignores_sender_identity():
    # the core trust flaw: any registered app may publish on any MID
    bus = SoftwareBus()
    got = []
    rogue = bus.register_app("rogue")
    sub = bus.register_app("sub", lambda p, t: got.append(p))
    bus.subscribe(sub, MessageId.telemetry(0x061))
    assert bus.publish(rogue, tlm()) == 1
    assert len(got) == 1


def test_publish_accepts_raw_bytes():
    bus = SoftwareBus()
    got = []
    sender = bus.register_app("sender")
    sub = bus.register_app("sub", lambda p, t: got.append(p))
    bus.subscribe(sub, MessageId.telemetry(0x061))
    raw = encode_packet(tlm(payload=b"xyz"))
    bus.publish(sender, raw)
    assert got[0].payload == b"xyz"


def test_syntactic_rejection():
    bus = SoftwareBus()
    sender = bus.register_app("sender")
    raw = bytearray(encode_packet(make_command(MessageId.command(0x060), 0, 2)))
    raw[7] ^= 0xFF  # corrupt the checksum
    with pytest.raises(PublishRejected):
        bus.publish(sender, bytes(raw))
    assert bus.ledger() == ()  # rejected packets never reach the ledger


def test_unregistered_sender_and_duplicate_name():
    bus = SoftwareBus()
    app = bus.register_app("one")
    with pytest.raises(BusError):
        bus.register_app("one")
    other = SoftwareBus().register_app("foreign")
    with pytest.raises(UnregisteredApp):
        bus.publish(other, tlm())
    with pytest.raises(UnregisteredApp):
        bus.subscribe(other, MessageId.telemetry(0x061))
    assert app.name == "one"


def test_ledger_records_true_sender_route_and_bytes():
    bus = SoftwareBus()
    rogue = bus.register_app("rogue")
    sub = bus.register_app("sub", lambda p, t: None)
    bus.subscribe(sub, MessageId.telemetry(0x061))

    bus.set_tick(12)
    packet = tlm(seq=7, payload=b"\x01")
    bus.publish(rogue, packet, route=Route.ONBOARD)
    ground = bus.register_app("GROUND_IO")
    bus.publish(ground, make_command(MessageId.command(0x060), 0, 2),
                route=Route.GROUND)

    records = bus.ledger()
    assert len(records) == 2
    first, second = records
    assert first.true_sender.name == "rogue"
    assert first.route is Route.ONBOARD
    assert first.tick == 12
    assert first.raw == encode_packet(packet)
    assert first.delivered and first.deliveries == 1
    assert second.route is Route.GROUND
    assert second.deliveries == 0  # no subscriber for the command MID


def test_records_from_filters():
    bus = SoftwareBus()
    a = bus.register_app("a")
    b = bus.register_app("b")
    bus.publish(a, tlm(apid=0x061))
    bus.publish(b, tlm(apid=0x062))
    bus.publish(a, tlm(apid=0x062))
    ledger = bus.ledger()
    assert len(records_from(ledger, sender="a")) == 2
    assert len(records_from(ledger, mid=MessageId.telemetry(0x062))) == 2
    assert len(records_from(ledger, sender="a",
                            mid=MessageId.telemetry(0x062))) == 1


def test_export_ledger_is_jsonl(tmp_path):
    import json
    bus = SoftwareBus()
    a = bus.register_app("a")
    bus.publish(a, tlm())
    path = tmp_path / "ledger.jsonl"
    bus.export_ledger(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    row = json.loads(lines[0])
    assert row["sender"] == "a"
    assert bytes.fromhex(row["bytes"]) == encode_packet(tlm())
