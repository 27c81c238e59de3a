import { describe, expect, it } from "vitest";

import { buildSpectrumMap, renderSvg, UNASSIGNED_FILL } from "../src/spectrumMap.js";
import type { AllocationDoc, PlanEnvelope, ScenarioDoc, ScenarioEnvelope } from "../src/types.js";
import { loadFixture } from "./stubServer.js";

const scenario = (loadFixture("scenario-v1").response.body as ScenarioEnvelope).scenario;
const alphabetical = (loadFixture("plan-alphabetical").response.body as PlanEnvelope).plan;
const flex = (loadFixture("plan-flex").response.body as PlanEnvelope).plan;

describe("spectrum map", () => {
  it("renders the alphabetical layout as six color pairs ordered center-out", () => {
    const model = buildSpectrumMap(scenario, alphabetical.allocation);
    expect(model.cells).toHaveLength(24); // 12 signal + 12 idler slices
    expect(model.legend.map((e) => e.link)).toEqual([
      "Alice-Bob",
      "Alice-Charlie",
      "Alice-Dave",
      "Bob-Charlie",
      "Bob-Dave",
      "Charlie-Dave",
    ]);
    expect(new Set(model.legend.map((e) => e.fill)).size).toBe(6);

    // innermost pair of channels belongs to Alice-Bob, outermost to Charlie-Dave
    const signals = model.cells.filter((c) => c.kind === "signal");
    expect(signals.map((c) => c.channel)).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]);
    expect(signals[0]!.link).toBe("Alice-Bob");
    expect(signals[1]!.link).toBe("Alice-Bob");
    expect(signals[10]!.link).toBe("Charlie-Dave");
    expect(signals[11]!.link).toBe("Charlie-Dave");
    // center-out group order follows the alphabetical link order
    expect(signals.map((c) => c.link)).toEqual(
      [
        "Alice-Bob", "Alice-Bob",
        "Alice-Charlie", "Alice-Charlie",
        "Alice-Dave", "Alice-Dave",
        "Bob-Charlie", "Bob-Charlie",
        "Bob-Dave", "Bob-Dave",
        "Charlie-Dave", "Charlie-Dave",
      ],
    );
  });

  it("mirrors every idler slice about zero detuning", () => {
    const model = buildSpectrumMap(scenario, alphabetical.allocation);
    const byChannel = new Map<number, { signal?: [number, number]; idler?: [number, number] }>();
    for (const cell of model.cells) {
      const entry = byChannel.get(cell.channel) ?? {};
      entry[cell.kind] = [cell.lowerGhz, cell.upperGhz];
      byChannel.set(cell.channel, entry);
    }
    for (const { signal, idler } of byChannel.values()) {
      expect(idler![0]).toBeCloseTo(-signal![1], 9);
      expect(idler![1]).toBeCloseTo(-signal![0], 9);
    }
    // the stopband sits in the middle of the strip
    expect(model.stopbandHalfwidthGhz).toBeGreaterThan(0);
    const sorted = model.cells.map((c) => c.lowerGhz);
    expect(sorted).toEqual([...sorted].sort((a, b) => a - b));
  });

  it("renders an empty allocation entirely unassigned", () => {
    const model = buildSpectrumMap(scenario, {});
    expect(model.legend).toEqual([]);
    expect(model.cells.every((c) => c.link === null && c.hatched)).toBe(true);
    expect(model.cells.every((c) => c.fill === UNASSIGNED_FILL)).toBe(true);
  });

  it("omits dropped links from the active legend", () => {
    const model = buildSpectrumMap(scenario, flex.allocation);
    expect(model.legend.map((e) => e.link)).not.toContain("Charlie-Dave");
    expect(flex.active_links).not.toContain("Charlie-Dave");
    expect(model.legend).toHaveLength(5);
  });

  it("is a pure view: identical inputs give identical markup", () => {
    const a = buildSpectrumMap(scenario, alphabetical.allocation);
    const b = buildSpectrumMap(scenario, alphabetical.allocation);
    expect(a).toEqual(b);
    expect(renderSvg(a)).toBe(renderSvg(b));
    const svg = renderSvg(a);
    expect(svg).toContain("data-role=\"stopband\"");
    expect(svg.match(/<rect/g)!.length).toBeGreaterThanOrEqual(24);
  });
});

// type-only sanity: the fixtures parse into the declared wire shapes
const _scenarioDoc: ScenarioDoc = scenario;
const _allocation: AllocationDoc = alphabetical.allocation;
