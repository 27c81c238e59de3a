/** Console view state: scenario version tracking, pending what-if edits,
 * and plan comparison slots.
 *
 * Pending edits are always expressed against a known scenario version and
 * stay client-side until committed; every evaluation is requested from
 * the service, and a response tagged with an older request sequence than
 * the newest applied one is discarded, so a slow reply can never
 * overwrite a fresher view.
 */

import { ApiClient, ConflictError } from "./client.js";
import type {
  AllocationDoc,
  LinkPair,
  PlanPayload,
  RateReport,
  ScenarioDoc,
} from "./types.js";

export interface AllocationEdit {
  channel: number;
  link: LinkPair | null; // null unassigns the channel
}

export interface LinkDelta {
  link: string;
  before: number;
  after: number;
  delta: number;
}

export const COMPARE_SLOTS = 3;

export interface PlanSlot {
  label: string;
  plan: PlanPayload;
  version: number;
}

export function applyEdits(
  base: AllocationDoc | null,
  edits: AllocationEdit[],
): AllocationDoc {
  const result: AllocationDoc = { ...(base ?? {}) };
  for (const edit of edits) {
    if (edit.link === null) {
      delete result[String(edit.channel)];
    } else {
      result[String(edit.channel)] = edit.link;
    }
  }
  return result;
}

export function computeDeltas(before: RateReport, after: RateReport): LinkDelta[] {
  return Object.keys(before.links)
    .sort()
    .map((link) => {
      const b = before.links[link]!.coincidence;
      const a = after.links[link]?.coincidence ?? 0;
      return { link, before: b, after: a, delta: a - b };
    });
}

export class ConsoleState {
  version: number | null = null;
  scenario: ScenarioDoc | null = null;
  selectedPolicy: { variant: string; group_size: number } = {
    variant: "full_flex",
    group_size: 2,
  };
  selectedObjective: { variant: string } = { variant: "equalize" };
  pendingEdits: AllocationEdit[] = [];
  pendingBaseVersion: number | null = null;
  baselineReport: RateReport | null = null;
  lastReport: RateReport | null = null;
  lastDeltas: LinkDelta[] = [];
  refreshNeeded = false;
  slots: (PlanSlot | null)[] = new Array(COMPARE_SLOTS).fill(null);

  private requestSeq = 0;
  private appliedSeq = 0;

  constructor(private readonly client: ApiClient) {}

  private nextSeq(): number {
    this.requestSeq += 1;
    return this.requestSeq;
  }

  private accept(seq: number): boolean {
    if (seq <= this.appliedSeq) {
      return false; // a newer response already landed
    }
    this.appliedSeq = seq;
    return true;
  }

  async load(): Promise<void> {
    const seq = this.nextSeq();
    const envelope = await this.client.getScenario();
    if (!this.accept(seq)) return;
    this.version = envelope.version;
    this.scenario = envelope.scenario;
    this.selectedPolicy = {
      variant: envelope.scenario.grid_policy.variant,
      group_size: envelope.scenario.grid_policy.group_size,
    };
    this.selectedObjective = { variant: envelope.scenario.objective.variant };
    this.pendingEdits = [];
    this.pendingBaseVersion = envelope.version;
    this.baselineReport = null;
    this.lastReport = null;
    this.lastDeltas = [];
    this.refreshNeeded = false;
  }

  effectiveAllocation(): AllocationDoc {
    return applyEdits(this.scenario?.allocation ?? null, this.pendingEdits);
  }

  /** Fetch the service's report for the current pending allocation. */
  async refreshBaseline(): Promise<RateReport> {
    if (this.version === null) throw new Error("no scenario loaded");
    const seq = this.nextSeq();
    const envelope = await this.client.predict(this.version, this.effectiveAllocation());
    if (this.accept(seq)) {
      this.baselineReport = envelope.report;
      this.lastReport = envelope.report;
      this.lastDeltas = [];
    }
    return envelope.report;
  }

  /** Stage an uncommitted edit and show service-evaluated deltas. */
  async stageEdit(edit: AllocationEdit): Promise<LinkDelta[]> {
    if (this.version === null || this.scenario === null) {
      throw new Error("no scenario loaded");
    }
    if (this.baselineReport === null) {
      await this.refreshBaseline();
    }
    const candidate = [...this.pendingEdits, edit];
    const allocation = applyEdits(this.scenario.allocation, candidate);
    const seq = this.nextSeq();
    const envelope = await this.client.predict(this.version, allocation);
    if (!this.accept(seq)) {
      return this.lastDeltas;
    }
    this.pendingEdits = candidate;
    this.pendingBaseVersion = this.version;
    this.lastReport = envelope.report;
    this.lastDeltas = computeDeltas(this.baselineReport!, envelope.report);
    return this.lastDeltas;
  }

  /** Commit pending edits; on conflict the console flags a reload. */
  async commit(): Promise<number | null> {
    if (this.version === null || this.scenario === null) {
      throw new Error("no scenario loaded");
    }
    if (this.pendingBaseVersion !== this.version) {
      this.refreshNeeded = true;
      return null;
    }
    const edited: ScenarioDoc = {
      ...this.scenario,
      allocation: this.effectiveAllocation(),
    };
    try {
      const result = await this.client.putScenario(this.version, edited);
      this.version = result.version;
      this.scenario = edited;
      this.pendingEdits = [];
      this.pendingBaseVersion = result.version;
      return result.version;
    } catch (error) {
      if (error instanceof ConflictError) {
        this.refreshNeeded = true;
        return null;
      }
      throw error;
    }
  }

  setSlot(index: number, slot: PlanSlot): void {
    if (index < 0 || index >= COMPARE_SLOTS) {
      throw new Error(`comparison is limited to ${COMPARE_SLOTS} slots`);
    }
    this.slots[index] = slot;
  }

  clearSlot(index: number): void {
    if (index >= 0 && index < COMPARE_SLOTS) {
      this.slots[index] = null;
    }
  }
}
