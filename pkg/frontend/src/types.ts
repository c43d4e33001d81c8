/** Payload shapes of the ground-station HTTP + WebSocket API. */

/** One parsed, archived telemetry packet (`GET /archive`, WS `/stream`). */
export interface ArchiveRecord {
  row: number;
  tick: number;
  mid: string;
  name: string;
  sequence: number;
  fields: Record<string, number>;
}

/** Latest housekeeping values per packet name (`GET /hk`). */
export type HkView = Record<string, Record<string, number>>;

/** One ground-originated command (`GET /cmdlog`, `POST /cmd` ack). */
export interface CommandLogEntry {
  wall_tick: number;
  mid: string;
  function_code: number;
  name: string;
  origin: string;
}

/** One defense alert (`GET /alerts`). */
export interface Alert {
  tick: number;
  rule: string;
  mid: string;
  detail: string;
}

/** Hex dump of one archived packet (`GET /raw/{row}`). */
export interface RawView {
  row: number;
  hex: string;
}

/** REST snapshots the console hydrates from on connect/reconnect. */
export interface Snapshot {
  hk: HkView;
  archive: ArchiveRecord[];
  cmdlog: CommandLogEntry[];
  alerts: Alert[];
}
