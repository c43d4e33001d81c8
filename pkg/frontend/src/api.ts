/** Thin typed client over the ground-station REST API.
 *
 * The HTTP transport is injected so the client runs identically in the
 * browser (fetch) and under test (replayed traces).
 */

import type {
  Alert,
  ArchiveRecord,
  CommandLogEntry,
  HkView,
  RawView,
  Snapshot,
} from "./types.js";

export interface HttpTransport {
  get(path: string): Promise<unknown>;
  post(path: string, body: unknown): Promise<unknown>;
}

/** Default transport over the global fetch. */
export function fetchTransport(baseUrl: string): HttpTransport {
  const url = (path: string) => baseUrl.replace(/\/$/, "") + path;
  const parse = async (resp: Response): Promise<unknown> => {
    const body = await resp.json();
    if (!resp.ok) {
      const detail = (body as { detail?: string }).detail ?? resp.statusText;
      throw new Error(`${resp.status}: ${detail}`);
    }
    return body;
  };
  return {
    get: (path) => fetch(url(path)).then(parse),
    post: (path, body) =>
      fetch(url(path), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }).then(parse),
  };
}

export class GroundStationClient {
  constructor(private readonly http: HttpTransport) {}

  hk(): Promise<HkView> {
    return this.http.get("/hk") as Promise<HkView>;
  }

  archive(start = 0): Promise<ArchiveRecord[]> {
    const query = start > 0 ? `?start=${start}` : "";
    return this.http.get(`/archive${query}`) as Promise<ArchiveRecord[]>;
  }

  cmdlog(): Promise<CommandLogEntry[]> {
    return this.http.get("/cmdlog") as Promise<CommandLogEntry[]>;
  }

  alerts(): Promise<Alert[]> {
    return this.http.get("/alerts") as Promise<Alert[]>;
  }

  raw(row: number): Promise<RawView> {
    return this.http.get(`/raw/${row}`) as Promise<RawView>;
  }

  async snapshot(): Promise<Snapshot> {
    const [hk, archive, cmdlog, alerts] = await Promise.all([
      this.hk(),
      this.archive(),
      this.cmdlog(),
      this.alerts(),
    ]);
    return { hk, archive, cmdlog, alerts };
  }

  /** `POST /cmd`; resolves to the server-acknowledged log entry. */
  async sendCommand(device: string, command: string): Promise<CommandLogEntry> {
    const ack = (await this.http.post("/cmd", { device, command })) as {
      ok: boolean;
      log: CommandLogEntry;
    };
    return ack.log;
  }
}
