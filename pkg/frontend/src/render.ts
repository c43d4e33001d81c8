/** Plain-HTML renderers for each console panel.
 *
 * Renderers are pure functions of the view model so the snapshot tests
 * can compare displayed values against API payloads directly.
 */

import type { ConsoleViewModel } from "./viewmodel.js";

const escape = (value: unknown): string =>
  String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");

const formatValue = (value: number): string =>
  Number.isInteger(value) ? String(value) : value.toFixed(9);

export function renderTelemetryTable(vm: ConsoleViewModel): string {
  const rows = vm.telemetryTable().map((row) => {
    const fields = Object.entries(row.fields)
      .map(([key, value]) => `${escape(key)}=${formatValue(value)}`)
      .join(" ");
    return (
      `<tr><td>${escape(row.mid)}</td><td>${escape(row.name)}</td>` +
      `<td>${row.count}</td><td>${row.rateHz.toFixed(2)} Hz</td>` +
      `<td>${row.lastTick}</td><td>${row.lastSequence}</td>` +
      `<td>${fields}</td></tr>`
    );
  });
  return (
    `<table class="telemetry">` +
    `<tr><th>MID</th><th>packet</th><th>count</th><th>rate</th>` +
    `<th>tick</th><th>seq</th><th>last values</th></tr>` +
    rows.join("") +
    `</table>`
  );
}

export function renderHkPanel(vm: ConsoleViewModel): string {
  const panels = Object.entries(vm.hkPanel()).map(([name, values]) => {
    const rows = Object.entries(values)
      .map(
        ([key, value]) =>
          `<tr><td>${escape(key)}</td><td>${formatValue(value)}</td></tr>`,
      )
      .join("");
    return `<section class="hk"><h3>${escape(name)}</h3><table>${rows}</table></section>`;
  });
  return panels.join("") || `<section class="hk empty">no housekeeping yet</section>`;
}

export function renderCommandHistory(vm: ConsoleViewModel): string {
  const rows = vm
    .commandHistory()
    .map(
      (cmd) =>
        `<tr><td>${cmd.wall_tick}</td><td>${escape(cmd.mid)}</td>` +
        `<td>${escape(cmd.name)}</td><td>${cmd.function_code}</td>` +
        `<td>${escape(cmd.origin)}</td></tr>`,
    );
  const error = vm.commandError
    ? `<p class="cmd-error">${escape(vm.commandError)}</p>`
    : "";
  return (
    `<table class="cmdlog">` +
    `<tr><th>tick</th><th>MID</th><th>command</th><th>code</th><th>origin</th></tr>` +
    rows.join("") +
    `</table>` +
    error
  );
}

export function renderAlertBanner(vm: ConsoleViewModel): string {
  if (!vm.alertBannerVisible()) {
    return "";
  }
  const items = vm
    .alertList()
    .map(
      (alert) =>
        `<li>tick ${alert.tick} ${escape(alert.rule)} on ${escape(alert.mid)}: ` +
        `${escape(alert.detail)}</li>`,
    );
  return `<div class="alert-banner"><ul>${items.join("")}</ul></div>`;
}

export function renderRawInspector(vm: ConsoleViewModel): string {
  const raw = vm.rawInspector();
  if (raw === null) {
    return `<pre class="raw empty">select an archive row</pre>`;
  }
  return `<pre class="raw" data-row="${raw.row}">${escape(raw.hex)}</pre>`;
}

export function renderConnectionBanner(vm: ConsoleViewModel): string {
  return vm.connection === "connected"
    ? ""
    : `<div class="disconnected-banner">disconnected — retrying</div>`;
}

export function renderConsole(vm: ConsoleViewModel): string {
  return [
    renderConnectionBanner(vm),
    renderAlertBanner(vm),
    renderTelemetryTable(vm),
    renderHkPanel(vm),
    renderCommandHistory(vm),
    renderRawInspector(vm),
  ]
    .filter((part) => part !== "")
    .join("\n");
}
