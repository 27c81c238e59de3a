import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/client.js";
import { ConsoleState, applyEdits, computeDeltas } from "../src/state.js";
import type { PlanEnvelope, RateReport } from "../src/types.js";
import { StubServer, loadFixture } from "./stubServer.js";

const alphabeticalAllocation = (loadFixture("plan-alphabetical").response.body as PlanEnvelope)
  .plan.allocation;

function stateWith(stub: StubServer): ConsoleState {
  return new ConsoleState(new ApiClient("", stub.fetch));
}

async function loadedState(stub: StubServer): Promise<ConsoleState> {
  const state = stateWith(stub);
  await state.load();
  // operator works from the recorded alphabetical layout
  state.scenario!.allocation = { ...alphabeticalAllocation };
  await state.refreshBaseline();
  return state;
}

describe("what-if editing", () => {
  it("round-trips a reassignment and shows service-evaluated deltas quickly", async () => {
    const stub = new StubServer(["scenario-v1", "predict-alphabetical", "predict-moved"]);
    const state = await loadedState(stub);

    const started = performance.now();
    const deltas = await state.stageEdit({ channel: 1, link: ["Charlie", "Dave"] });
    const elapsed = performance.now() - started;

    expect(elapsed).toBeLessThan(500);
    const byLink = Object.fromEntries(deltas.map((d) => [d.link, d]));
    expect(byLink["Alice-Bob"]!.delta).toBeLessThan(0);
    expect(byLink["Charlie-Dave"]!.delta).toBeGreaterThan(0);
    // every displayed number traces to an API response
    expect(byLink["Alice-Bob"]!.after).toBe(
      (loadFixture("predict-moved").response.body as { report: RateReport }).report.links[
        "Alice-Bob"
      ]!.coincidence,
    );
    // the edit stays uncommitted: no PUT was issued
    expect(stub.requests.every((r) => r.method !== "PUT")).toBe(true);
    expect(state.pendingEdits).toHaveLength(1);
  });

  it("treats a no-op reassignment as zero deltas", async () => {
    const stub = new StubServer(["scenario-v1", "predict-alphabetical", "predict-noop"]);
    const state = await loadedState(stub);
    const deltas = await state.stageEdit({ channel: 1, link: ["Alice", "Bob"] });
    expect(deltas.every((d) => d.delta === 0)).toBe(true);
  });

  it("commits pending edits and reflects them after reload", async () => {
    const stub = new StubServer([
      "scenario-v1",
      "predict-alphabetical",
      "predict-moved",
      "scenario-commit",
      "scenario-v2",
    ]);
    const state = await loadedState(stub);
    await state.stageEdit({ channel: 1, link: ["Charlie", "Dave"] });

    const version = await state.commit();
    expect(version).toBe(2);
    expect(state.pendingEdits).toHaveLength(0);

    await state.load();
    expect(state.version).toBe(2);
    expect(state.scenario!.allocation!["1"]).toEqual(["Charlie", "Dave"]);
  });

  it("routes concurrent conflicts into the reload flow", async () => {
    const stub = new StubServer([
      "scenario-v1",
      "predict-alphabetical",
      "predict-moved",
      "scenario-commit-conflict",
    ]);
    const state = await loadedState(stub);
    await state.stageEdit({ channel: 1, link: ["Charlie", "Dave"] });

    const version = await state.commit();
    expect(version).toBeNull();
    expect(state.refreshNeeded).toBe(true);
  });

  it("discards stale responses that arrive after a fresher one", async () => {
    const reportA = (loadFixture("predict-alphabetical").response.body as { report: RateReport })
      .report;
    const reportB = (loadFixture("predict-moved").response.body as { report: RateReport }).report;
    let release: (() => void) | null = null;
    let call = 0;
    const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
      if (url.endsWith("/scenario")) {
        return new Response(JSON.stringify(loadFixture("scenario-v1").response.body), {
          status: 200,
        });
      }
      call += 1;
      if (call === 1) {
        // first prediction stalls until after the second resolves
        await new Promise<void>((resolve) => {
          release = resolve;
        });
        return new Response(JSON.stringify({ schema_version: 1, version: 1, report: reportA }), {
          status: 200,
        });
      }
      return new Response(JSON.stringify({ schema_version: 1, version: 1, report: reportB }), {
        status: 200,
      });
    };
    const state = new ConsoleState(new ApiClient("", fetchImpl));
    await state.load();
    state.scenario!.allocation = { ...alphabeticalAllocation };

    const slow = state.refreshBaseline();
    const fast = state.refreshBaseline();
    await fast;
    expect(state.lastReport).toEqual(reportB);
    release!();
    await slow;
    // the slow (older) response must not overwrite the fresher view
    expect(state.lastReport).toEqual(reportB);
  });
});

describe("view state", () => {
  it("adopts the scenario's policy and objective on load", async () => {
    const stub = new StubServer(["scenario-v1"]);
    const state = stateWith(stub);
    await state.load();
    expect(state.selectedPolicy.variant).toBe("full_flex");
    expect(state.selectedObjective.variant).toBe("equalize");
    expect(state.pendingBaseVersion).toBe(state.version);
  });
});

describe("edit helpers", () => {
  it("applies reassignments and unassignments over a base allocation", () => {
    const base = { "1": ["Alice", "Bob"], "2": ["Alice", "Charlie"] } as const;
    const merged = applyEdits(
      { ...base } as never,
      [
        { channel: 1, link: ["Charlie", "Dave"] },
        { channel: 2, link: null },
      ],
    );
    expect(merged).toEqual({ "1": ["Charlie", "Dave"] });
  });

  it("computes per-link deltas between two reports", () => {
    const before = (loadFixture("predict-alphabetical").response.body as { report: RateReport })
      .report;
    const after = (loadFixture("predict-moved").response.body as { report: RateReport }).report;
    const deltas = computeDeltas(before, after);
    expect(deltas.map((d) => d.link)).toEqual(Object.keys(before.links).sort());
    for (const delta of deltas) {
      expect(delta.delta).toBeCloseTo(delta.after - delta.before, 12);
    }
  });
});
