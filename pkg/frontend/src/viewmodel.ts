/** Console view model: pure state derived from API payloads.
 *
 * Every value here originates from the ground-station API; the console
 * holds no simulation state of its own.  Applying the same record or
 * snapshot twice is a no-op (rows are keyed by archive row number), so
 * re-hydration after a reconnect is idempotent.
 */

import type {
  Alert,
  ArchiveRecord,
  CommandLogEntry,
  HkView,
  RawView,
  Snapshot,
} from "./types.js";

const TICKS_PER_SECOND = 10;

/** One live-telemetry table row: last values plus cadence stats per MID. */
export interface TelemetryRow {
  mid: string;
  name: string;
  count: number;
  lastTick: number;
  lastSequence: number;
  fields: Record<string, number>;
  /** Packets per second over the observed stream, 0 until two packets seen. */
  rateHz: number;
}

export type ConnectionState = "disconnected" | "connected";

export class ConsoleViewModel {
  private byMid = new Map<string, TelemetryRow>();
  private ticksByMid = new Map<string, number[]>();
  private seenRows = new Set<number>();
  private hk: HkView = {};
  private commands: CommandLogEntry[] = [];
  private alerts: Alert[] = [];
  private raw: RawView | null = null;
  connection: ConnectionState = "disconnected";
  commandError: string | null = null;

  /** Hydrate all panels from REST snapshots (connect or reconnect). */
  applySnapshot(snapshot: Snapshot): void {
    this.hk = snapshot.hk;
    this.commands = [...snapshot.cmdlog];
    this.alerts = [...snapshot.alerts];
    for (const record of snapshot.archive) {
      this.applyRecord(record);
    }
  }

  /** Fold in one record from the WebSocket stream (or the archive). */
  applyRecord(record: ArchiveRecord): void {
    if (this.seenRows.has(record.row)) {
      return;
    }
    this.seenRows.add(record.row);

    const ticks = this.ticksByMid.get(record.mid) ?? [];
    ticks.push(record.tick);
    this.ticksByMid.set(record.mid, ticks);

    const prev = this.byMid.get(record.mid);
    this.byMid.set(record.mid, {
      mid: record.mid,
      name: record.name,
      count: (prev?.count ?? 0) + 1,
      lastTick: record.tick,
      lastSequence: record.sequence,
      fields: record.fields,
      rateHz: meanRateHz(ticks),
    });

    if (record.name.endsWith("_HK")) {
      this.hk[record.name] = { tick: record.tick, ...record.fields };
    }
  }

  appendCommand(entry: CommandLogEntry): void {
    this.commands.push(entry);
    this.commandError = null;
  }

  setCommandError(message: string): void {
    this.commandError = message;
  }

  setAlerts(alerts: Alert[]): void {
    this.alerts = [...alerts];
  }

  selectRaw(raw: RawView): void {
    this.raw = raw;
  }

  telemetryTable(): TelemetryRow[] {
    return [...this.byMid.values()].sort((a, b) => a.mid.localeCompare(b.mid));
  }

  hkPanel(): HkView {
    return this.hk;
  }

  commandHistory(): CommandLogEntry[] {
    return [...this.commands];
  }

  alertList(): Alert[] {
    return [...this.alerts];
  }

  /** The banner is visible only when defenses emitted alerts. */
  alertBannerVisible(): boolean {
    return this.alerts.length > 0;
  }

  rawInspector(): RawView | null {
    return this.raw;
  }
}

function meanRateHz(ticks: number[]): number {
  if (ticks.length < 2) {
    return 0;
  }
  const spanSeconds =
    (ticks[ticks.length - 1] - ticks[0]) / TICKS_PER_SECOND;
  return spanSeconds > 0 ? (ticks.length - 1) / spanSeconds : 0;
}
