"""Ground-station service API: REST snapshots plus a live WebSocket stream.

Both the CLI and the operator console consume this API; the console
holds no state of its own.  The service can wrap a live GroundStation
(fed by a running simulation) or one rehydrated from a run directory.
"""

from __future__ import annotations

import asyncio
import json
import queue
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .groundstation import CommandError, GroundStation, ParsedRecord


def create_app(ground: GroundStation,
               alerts: Callable[[], list[dict]] = lambda: []) -> FastAPI:
    app = FastAPI(title="fswsim ground station")
    clients: list[queue.Queue] = []

    def on_record(record: ParsedRecord) -> None:
        payload = record.to_dict()
        for q in clients:
            q.put(payload)

    ground.listeners.append(on_record)

    @app.get("/hk")
    def hk():
        return ground.hk_view()

    @app.get("/archive")
    def archive(start: int = 0):
        return [r.to_dict() for r in ground.archive_index()[start:]]

    @app.get("/cmdlog")
    def cmdlog():
        return [c.to_dict() for c in ground.command_log()]

    @app.get("/alerts")
    def alert_list():
        return alerts()

    @app.get("/raw/{row}")
    def raw(row: int):
        try:
            return {"row": row, "hex": ground.raw_bytes_view(row)}
        except IndexError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/cmd")
    def cmd(body: dict):
        device = body.get("device")
        command = body.get("command")
        if device is None or command is None:
            raise HTTPException(status_code=400, detail="need device and command")
        try:
            ground.send_command(device, command, wall_tick=body.get("wall_tick", 0))
        except CommandError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"ok": True, "log": ground.command_log()[-1].to_dict()}

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        q: queue.Queue = queue.Queue()
        clients.append(q)
        try:
            while True:
                try:
                    payload = q.get_nowait()
                except queue.Empty:
                    await asyncio.sleep(0.05)
                    continue
                await ws.send_text(json.dumps(payload))
        except WebSocketDisconnect:
            pass
        finally:
            clients.remove(q)

    return app


def rehydrate_ground(run_dir: str | Path) -> GroundStation:
    """Rebuild a GroundStation's views from a persisted run directory."""
    run_dir = Path(run_dir)
    ground = GroundStation()
    data = (run_dir / "archive.bin").read_bytes()
    from .spacepacket import split_stream
    from .downlink import frame
    for packet_bytes in split_stream(data):
        ground.ingest_frame(frame(packet_bytes))
    with open(run_dir / "cmdlog.jsonl") as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                ground.send_command(
                    "ST", row["name"], wall_tick=row["wall_tick"])
    return ground


def alerts_from_dir(run_dir: str | Path) -> Callable[[], list[dict]]:
    path = Path(run_dir) / "alerts.jsonl"

    def load() -> list[dict]:
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text().splitlines()
                if line.strip()]

    return load
