/** Live session: REST hydration plus the WebSocket stream.
 *
 * One socket; on any disconnect the console shows a disconnected state
 * and retries, re-hydrating from REST snapshots (idempotent, so
 * records seen on both paths are not double-counted).
 */

import { GroundStationClient } from "./api.js";
import { ConsoleViewModel } from "./viewmodel.js";
import type { ArchiveRecord } from "./types.js";

export interface StreamSocket {
  onMessage(handler: (payload: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export type SocketFactory = (url: string) => Promise<StreamSocket>;

export interface SessionOptions {
  streamUrl: string;
  retryMs?: number;
  /** Injected scheduler, overridable in tests. */
  schedule?: (fn: () => void, ms: number) => void;
}

export class ConsoleSession {
  readonly vm = new ConsoleViewModel();
  private socket: StreamSocket | null = null;
  private stopped = false;

  constructor(
    private readonly client: GroundStationClient,
    private readonly openSocket: SocketFactory,
    private readonly options: SessionOptions,
  ) {}

  async connect(): Promise<void> {
    try {
      const snapshot = await this.client.snapshot();
      const socket = await this.openSocket(this.options.streamUrl);
      this.vm.applySnapshot(snapshot);
      this.vm.connection = "connected";
      this.socket = socket;
      socket.onMessage((payload) => {
        this.vm.applyRecord(JSON.parse(payload) as ArchiveRecord);
      });
      socket.onClose(() => this.handleDisconnect());
    } catch {
      this.handleDisconnect();
    }
  }

  /** `POST /cmd`; history appends only from the server acknowledgement. */
  async issueCommand(device: string, command: string): Promise<void> {
    try {
      const ack = await this.client.sendCommand(device, command);
      this.vm.appendCommand(ack);
    } catch (error) {
      this.vm.setCommandError(
        error instanceof Error ? error.message : String(error),
      );
    }
  }

  async inspectRaw(row: number): Promise<void> {
    this.vm.selectRaw(await this.client.raw(row));
  }

  async refreshAlerts(): Promise<void> {
    this.vm.setAlerts(await this.client.alerts());
  }

  close(): void {
    this.stopped = true;
    this.socket?.close();
    this.socket = null;
  }

  private handleDisconnect(): void {
    if (this.stopped) {
      return;
    }
    this.vm.connection = "disconnected";
    this.socket = null;
    const schedule = this.options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    schedule(() => {
      if (!this.stopped) {
        void this.connect();
      }
    }, this.options.retryMs ?? 1000);
  }
}
