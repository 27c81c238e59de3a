/** Side-by-side comparison of up to three persisted plans. */

import type { PlanSlot } from "./state.js";

export interface ComparisonColumn {
  label: string;
  balanceScore: number | null;
  activeLinkCount: number;
  rates: Record<string, number>;
}

export type ComparisonView =
  | { disabled: true; hint: string }
  | { disabled: false; links: string[]; columns: ComparisonColumn[]; bestIndex: number };

export function buildComparison(slots: (PlanSlot | null)[]): ComparisonView {
  const filled = slots.filter((slot): slot is PlanSlot => slot !== null);
  if (filled.length < 2) {
    return {
      disabled: true,
      hint: "fill at least two comparison slots to compare plans",
    };
  }
  const links = Array.from(
    new Set(filled.flatMap((slot) => Object.keys(slot.plan.report.links))),
  ).sort();
  const columns = filled.map((slot) => ({
    label: slot.label,
    balanceScore: slot.plan.report.balance.score,
    activeLinkCount: slot.plan.active_links.length,
    rates: Object.fromEntries(
      links.map((link) => [link, slot.plan.report.links[link]?.coincidence ?? 0]),
    ),
  }));
  let bestIndex = 0;
  for (let i = 1; i < columns.length; i += 1) {
    const best = columns[bestIndex]!.balanceScore;
    const candidate = columns[i]!.balanceScore;
    if (candidate !== null && (best === null || candidate < best)) {
      bestIndex = i;
    }
  }
  return { disabled: false, links, columns, bestIndex };
}
