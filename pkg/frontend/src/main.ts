/** Browser entry: wires the view models to a minimal operator page.
 * Expects the service at the same origin or VITE-style override via
 * window.FLEXQNET_API. */

import { ApiClient } from "./client.js";
import { buildComparison } from "./planCompare.js";
import { buildSpectrumMap, renderSvg } from "./spectrumMap.js";
import { ConsoleState } from "./state.js";
import type { LinkPair, PlanRequest } from "./types.js";

declare global {
  interface Window {
    FLEXQNET_API?: string;
  }
}

const client = new ApiClient(window.FLEXQNET_API ?? "");
const state = new ConsoleState(client);

const el = (id: string) => document.getElementById(id)!;

function drawMap(): void {
  if (!state.scenario) return;
  const model = buildSpectrumMap(state.scenario, state.effectiveAllocation());
  el("map").innerHTML = renderSvg(model);
  el("version").textContent = `scenario v${state.version}`;
  el("refresh-banner").hidden = !state.refreshNeeded;
}

function drawDeltas(): void {
  const rows = state.lastDeltas
    .map(
      (d) =>
        `<tr><td>${d.link}</td><td>${d.before.toFixed(3)}</td>` +
        `<td>${d.after.toFixed(3)}</td><td>${d.delta >= 0 ? "+" : ""}${d.delta.toFixed(3)}</td></tr>`,
    )
    .join("");
  el("deltas").innerHTML =
    `<tr><th>link</th><th>before /s</th><th>after /s</th><th>delta</th></tr>${rows}`;
}

function drawComparison(): void {
  const view = buildComparison(state.slots);
  const table = el("compare");
  if (view.disabled) {
    table.innerHTML = `<tr><td>${view.hint}</td></tr>`;
    return;
  }
  const header =
    "<tr><th>link</th>" +
    view.columns
      .map((c, i) => `<th class="${i === view.bestIndex ? "best" : ""}">${c.label}</th>`)
      .join("") +
    "</tr>";
  const meta =
    "<tr><td>balance / active</td>" +
    view.columns
      .map(
        (c, i) =>
          `<td class="${i === view.bestIndex ? "best" : ""}">` +
          `${c.balanceScore === null ? "n/a" : c.balanceScore.toFixed(2)} / ${c.activeLinkCount}</td>`,
      )
      .join("") +
    "</tr>";
  const body = view.links
    .map(
      (link) =>
        `<tr><td>${link}</td>` +
        view.columns.map((c) => `<td>${c.rates[link]!.toFixed(3)}</td>`).join("") +
        "</tr>",
    )
    .join("");
  table.innerHTML = header + meta + body;
}

function fillSelectors(): void {
  if (!state.scenario) return;
  const channels = el("edit-channel") as HTMLSelectElement;
  channels.innerHTML = "";
  for (let i = 1; i <= state.scenario.grid.channel_count; i += 1) {
    channels.add(new Option(`channel ${i}`, String(i)));
  }
  const linkSelect = el("edit-link") as HTMLSelectElement;
  linkSelect.innerHTML = "";
  const names = state.scenario.users.map((u) => u.name).sort();
  linkSelect.add(new Option("unassign", ""));
  for (let i = 0; i < names.length; i += 1) {
    for (let j = i + 1; j < names.length; j += 1) {
      linkSelect.add(new Option(`${names[i]}-${names[j]}`, `${names[i]}|${names[j]}`));
    }
  }
}

async function requestPlan(kind: "alphabetical" | "balanced" | "flex", slot: number) {
  if (state.version === null) return;
  state.selectedPolicy = {
    variant: kind === "flex" ? "full_flex" : "fixed_grid",
    group_size: state.scenario?.grid_policy.group_size ?? 2,
  };
  state.selectedObjective = { variant: "equalize" };
  const request: PlanRequest = {
    version: state.version,
    policy: state.selectedPolicy,
    objective: state.selectedObjective,
    allow_drop: kind === "flex",
    alphabetical: kind === "alphabetical",
  };
  const envelope = await client.plan(request);
  state.setSlot(slot, { label: kind, plan: envelope.plan, version: envelope.version });
  drawComparison();
}

async function boot() {
  await state.load();
  fillSelectors();
  await state.refreshBaseline();
  drawMap();
  drawDeltas();

  el("stage").addEventListener("click", async () => {
    const channel = Number((el("edit-channel") as HTMLSelectElement).value);
    const raw = (el("edit-link") as HTMLSelectElement).value;
    const link = raw === "" ? null : (raw.split("|") as LinkPair);
    await state.stageEdit({ channel, link });
    drawMap();
    drawDeltas();
  });
  el("commit").addEventListener("click", async () => {
    await state.commit();
    await state.load();
    await state.refreshBaseline();
    drawMap();
    drawDeltas();
  });
  el("reload").addEventListener("click", async () => {
    await state.load();
    await state.refreshBaseline();
    drawMap();
    drawDeltas();
  });
  (["alphabetical", "balanced", "flex"] as const).forEach((kind, index) => {
    el(`plan-${kind}`).addEventListener("click", () => void requestPlan(kind, index));
  });
}

boot().catch((error) => {
  el("map").textContent = `failed to reach the provisioning service: ${error}`;
});
