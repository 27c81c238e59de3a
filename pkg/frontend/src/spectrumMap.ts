/** Spectrum allocation map: mirror-symmetric channel strip.
 *
 * Idler slices sit at negative detunings on the left, signal slices at
 * positive detunings on the right, the stopband in the center. Cells are
 * colored by owning link; unassigned channels render hatched gray. A pure
 * function of its inputs: the same scenario and allocation always yield
 * the identical model and markup.
 */

import type { AllocationDoc, ScenarioDoc } from "./types.js";
import { linkLabel } from "./types.js";

export const LINK_PALETTE = [
  "#4269d0",
  "#efb118",
  "#3ca951",
  "#ff585d",
  "#a463f2",
  "#9c6b4e",
  "#ff8ab7",
  "#97bbf5",
  "#9498a0",
  "#6cc5b0",
] as const;

export const UNASSIGNED_FILL = "#d9d9d9";

export interface MapCell {
  channel: number;
  kind: "signal" | "idler";
  lowerGhz: number;
  upperGhz: number;
  link: string | null;
  fill: string;
  hatched: boolean;
}

export interface LegendEntry {
  link: string;
  fill: string;
}

export interface SpectrumMapModel {
  cells: MapCell[];
  legend: LegendEntry[];
  stopbandHalfwidthGhz: number;
  edgeGhz: number;
}

export function buildSpectrumMap(
  scenario: ScenarioDoc,
  allocation: AllocationDoc,
): SpectrumMapModel {
  const width = scenario.grid.slice_width_ghz;
  const count = scenario.grid.channel_count;
  const stopband = scenario.spectrum.stopband_halfwidth_ghz;

  const assignedLinks = Array.from(
    new Set(Object.values(allocation).map(linkLabel)),
  ).sort();
  const fillOf = new Map(
    assignedLinks.map((link, i) => [link, LINK_PALETTE[i % LINK_PALETTE.length]!]),
  );

  const cells: MapCell[] = [];
  for (let index = 1; index <= count; index += 1) {
    const lower = stopband + (index - 1) * width;
    const upper = stopband + index * width;
    const pair = allocation[String(index)];
    const link = pair ? linkLabel(pair) : null;
    const fill = link ? fillOf.get(link)! : UNASSIGNED_FILL;
    cells.push({
      channel: index,
      kind: "idler",
      lowerGhz: -upper,
      upperGhz: -lower,
      link,
      fill,
      hatched: link === null,
    });
    cells.push({
      channel: index,
      kind: "signal",
      lowerGhz: lower,
      upperGhz: upper,
      link,
      fill,
      hatched: link === null,
    });
  }
  cells.sort((a, b) => a.lowerGhz - b.lowerGhz);

  return {
    cells,
    legend: assignedLinks.map((link) => ({ link, fill: fillOf.get(link)! })),
    stopbandHalfwidthGhz: stopband,
    edgeGhz: stopband + count * width,
  };
}

const SVG_WIDTH = 760;
const STRIP_HEIGHT = 46;

export function renderSvg(model: SpectrumMapModel): string {
  const scale = SVG_WIDTH / (2 * model.edgeGhz);
  const toX = (ghz: number) => (ghz + model.edgeGhz) * scale;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${SVG_WIDTH} ${STRIP_HEIGHT + 26}" role="img">`,
    `<defs><pattern id="hatch" width="6" height="6" patternTransform="rotate(45)" patternUnits="userSpaceOnUse">` +
      `<line x1="0" y1="0" x2="0" y2="6" stroke="#9a9a9a" stroke-width="1.5"/></pattern></defs>`,
  );
  for (const cell of model.cells) {
    const x = toX(cell.lowerGhz);
    const w = (cell.upperGhz - cell.lowerGhz) * scale;
    const title = cell.link
      ? `channel ${cell.channel} ${cell.kind}: ${cell.link}`
      : `channel ${cell.channel} ${cell.kind}: unassigned`;
    parts.push(
      `<rect x="${x.toFixed(2)}" y="4" width="${w.toFixed(2)}" height="${STRIP_HEIGHT}"` +
        ` fill="${cell.fill}" stroke="#ffffff" stroke-width="0.5"` +
        ` data-channel="${cell.channel}" data-kind="${cell.kind}"><title>${title}</title></rect>`,
    );
    if (cell.hatched) {
      parts.push(
        `<rect x="${x.toFixed(2)}" y="4" width="${w.toFixed(2)}" height="${STRIP_HEIGHT}" fill="url(#hatch)"/>`,
      );
    }
  }
  if (model.stopbandHalfwidthGhz > 0) {
    const x = toX(-model.stopbandHalfwidthGhz);
    const w = 2 * model.stopbandHalfwidthGhz * scale;
    parts.push(
      `<rect x="${x.toFixed(2)}" y="4" width="${w.toFixed(2)}" height="${STRIP_HEIGHT}" fill="#222222" opacity="0.8" data-role="stopband"/>`,
    );
  }
  let legendX = 4;
  for (const entry of model.legend) {
    parts.push(
      `<rect x="${legendX}" y="${STRIP_HEIGHT + 10}" width="10" height="10" fill="${entry.fill}"/>`,
      `<text x="${legendX + 14}" y="${STRIP_HEIGHT + 19}" font-size="10" font-family="sans-serif">${entry.link}</text>`,
    );
    legendX += 14 + 8 * entry.link.length + 14;
  }
  parts.push("</svg>");
  return parts.join("");
}
