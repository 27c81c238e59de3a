import { describe, expect, it } from "vitest";

import { buildComparison } from "../src/planCompare.js";
import { COMPARE_SLOTS, ConsoleState } from "../src/state.js";
import { ApiClient } from "../src/client.js";
import type { PlanEnvelope } from "../src/types.js";
import { loadFixture } from "./stubServer.js";

function slotFrom(name: string, label: string) {
  const envelope = loadFixture(name).response.body as PlanEnvelope;
  return { label, plan: envelope.plan, version: envelope.version };
}

const alphabetical = slotFrom("plan-alphabetical", "alphabetical");
const balanced = slotFrom("plan-balanced", "balanced");
const flex = slotFrom("plan-flex", "full-flex");

describe("plan comparison", () => {
  it("shows strictly decreasing balance scores across the three recorded plans", () => {
    const view = buildComparison([alphabetical, balanced, flex]);
    expect(view.disabled).toBe(false);
    if (view.disabled) return;
    const scores = view.columns.map((c) => c.balanceScore!);
    expect(scores[0]!).toBeGreaterThan(scores[1]!);
    expect(scores[1]!).toBeGreaterThan(scores[2]!);
    expect(scores[0]!).toBeGreaterThan(100);
    expect(scores[2]!).toBeLessThanOrEqual(2);
    expect(view.bestIndex).toBe(2);
    expect(view.columns[2]!.activeLinkCount).toBe(5);
    expect(view.columns[0]!.activeLinkCount).toBe(6);
  });

  it("renders identical columns for identical plans", () => {
    const view = buildComparison([alphabetical, { ...alphabetical, label: "alphabetical" }]);
    expect(view.disabled).toBe(false);
    if (view.disabled) return;
    expect(view.columns[0]).toEqual(view.columns[1]);
  });

  it("is disabled with a hint until two slots are filled", () => {
    const single = buildComparison([alphabetical, null, null]);
    expect(single.disabled).toBe(true);
    if (single.disabled) {
      expect(single.hint).toMatch(/two comparison slots/);
    }
    const none = buildComparison([null, null, null]);
    expect(none.disabled).toBe(true);
  });

  it("caps the comparison at three slots", () => {
    const state = new ConsoleState(new ApiClient("", async () => new Response("{}")));
    expect(COMPARE_SLOTS).toBe(3);
    expect(() => state.setSlot(3, alphabetical)).toThrow(/3 slots/);
    state.setSlot(0, alphabetical);
    state.setSlot(2, flex);
    expect(state.slots.filter(Boolean)).toHaveLength(2);
  });
});
