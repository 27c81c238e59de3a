/** Wire types mirroring the service API (docs/api.md, schema_version 1). */

export type LinkPair = [string, string];

/** Channel index (as a string key) to link assignment. */
export type AllocationDoc = Record<string, LinkPair>;

export interface SpectrumDoc {
  first_null_detuning_ghz: number;
  stopband_halfwidth_ghz: number;
  total_pair_flux: number;
}

export interface GridDoc {
  slice_width_ghz: number;
  channel_count: number;
}

export interface UserDoc {
  name: string;
  detector: {
    efficiency: number;
    duty_cycle: number;
    dark_rate: number;
    jitter_fwhm_ps: number;
  };
  path_loss_db: number;
}

export interface ScenarioDoc {
  schema_version: number;
  name: string;
  spectrum: SpectrumDoc;
  grid: GridDoc;
  wss: Record<string, number>;
  dwdm: Record<string, unknown>;
  users: UserDoc[];
  gating: string;
  coincidence: {
    window_ps: number;
    histogram_span_ps: number;
    offsets_ps: Record<string, number>;
  };
  objective: { variant: string; [key: string]: unknown };
  grid_policy: { variant: string; group_size: number };
  allocation: AllocationDoc | null;
  seeds: Record<string, number>;
}

export interface ScenarioEnvelope {
  schema_version: number;
  version: number;
  scenario: ScenarioDoc;
}

export interface LinkRates {
  coincidence: number;
  accidental: number;
  car: number | null;
}

export interface RateReport {
  singles: Record<string, number>;
  links: Record<string, LinkRates>;
  active_links: string[];
  balance: {
    max_rate: number | null;
    min_rate: number | null;
    score: number | null;
  };
}

export interface PlanPayload {
  allocation: AllocationDoc;
  active_links: string[];
  objective_value: number;
  report: RateReport;
  diagnostics: Record<string, unknown>;
}

export interface PlanEnvelope {
  schema_version: number;
  version: number;
  plan: PlanPayload;
}

export interface PredictEnvelope {
  schema_version: number;
  version: number;
  report: RateReport;
}

export interface PlanRequest {
  version: number;
  policy: { variant: string; group_size: number };
  objective: { variant: string };
  allow_drop: boolean;
  alphabetical: boolean;
}

export function linkLabel(pair: LinkPair): string {
  const [a, b] = pair;
  return a < b ? `${a}-${b}` : `${b}-${a}`;
}
