// SVG builders for the solution-space plot and the query-bound band.
// All geometry comes from service-provided numbers: boundary polylines,
// inequality coefficients, and bound-curve samples.

import type {
  AlphaReportPayload,
  BoundsCurvePayload,
  ParamRef,
  SolutionSpacePayload,
} from "./types.js";

export interface Scale {
  (value: number): number;
}

export function scaleLinear(domain: [number, number], range: [number, number]): Scale {
  const span = domain[1] - domain[0] || 1;
  return (value) => range[0] + ((value - domain[0]) / span) * (range[1] - range[0]);
}

export function polylinePath(points: [number, number][], sx: Scale, sy: Scale): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${sx(x).toFixed(2)},${sy(y).toFixed(2)}`)
    .join(" ");
}

function sameParam(a: ParamRef, b: ParamRef): boolean {
  if (a.variable !== b.variable || a.state !== b.state) return false;
  const ka = Object.entries(a.parents).sort().toString();
  const kb = Object.entries(b.parents).sort().toString();
  return ka === kb;
}

/** Evaluate the report's inequality at a delta pair for the two boundary
 * parameters; true means the constraint would hold after that change. */
export function classifyDelta(space: SolutionSpacePayload, d1: number, d2: number): boolean {
  if (!space.boundary) throw new Error("no boundary parameters in this report");
  const { param_1, param_2 } = space.boundary;
  const alpha1 = space.alphas.find((a) => sameParam(a.param, param_1));
  const alpha2 = space.alphas.find((a) => sameParam(a.param, param_2));
  if (!alpha1 || !alpha2) throw new Error("boundary parameters missing from report");
  let value = alpha1.alpha * d1 + alpha2.alpha * d2;
  for (const cross of space.cross_alphas ?? []) {
    if (sameParam(cross.param_x, param_1) && sameParam(cross.param_y, param_2)) {
      value += cross.alpha * d1 * d2;
    }
  }
  return value >= space.rhs;
}

export interface SolutionSpacePlotOptions {
  width?: number;
  height?: number;
  shadingCells?: number;
  optimal?: { d1: number; d2: number } | null;
}

/** Boundary line/curve with feasible-region shading and an optional marker
 * for the optimal point. Domain = the delta ranges of the two parameters. */
export function solutionSpaceSvg(
  space: SolutionSpacePayload,
  options: SolutionSpacePlotOptions = {},
): string {
  const { width = 360, height = 280, shadingCells = 24, optimal = null } = options;
  if (!space.boundary) {
    return `<svg class="plot" width="${width}" height="${height}"></svg>`;
  }
  const pts = space.boundary.points;
  const d1s = pts.map((p) => p[0]).concat(optimal ? [optimal.d1] : []);
  const d2s = pts.map((p) => p[1]).concat(optimal ? [optimal.d2] : []);
  const pad = 0.08;
  const lo1 = Math.min(...d1s, 0), hi1 = Math.max(...d1s, 0);
  const lo2 = Math.min(...d2s, 0), hi2 = Math.max(...d2s, 0);
  const span1 = (hi1 - lo1) || 1, span2 = (hi2 - lo2) || 1;
  const dom1: [number, number] = [lo1 - pad * span1, hi1 + pad * span1];
  const dom2: [number, number] = [lo2 - pad * span2, hi2 + pad * span2];
  const sx = scaleLinear(dom1, [40, width - 10]);
  const sy = scaleLinear(dom2, [height - 30, 10]);

  const cells: string[] = [];
  const cw = (width - 50) / shadingCells;
  const ch = (height - 40) / shadingCells;
  for (let i = 0; i < shadingCells; i++) {
    for (let j = 0; j < shadingCells; j++) {
      const d1 = dom1[0] + ((i + 0.5) / shadingCells) * (dom1[1] - dom1[0]);
      const d2 = dom2[0] + ((j + 0.5) / shadingCells) * (dom2[1] - dom2[0]);
      if (classifyDelta(space, d1, d2)) {
        cells.push(
          `<rect x="${(sx(d1) - cw / 2).toFixed(2)}" y="${(sy(d2) - ch / 2).toFixed(2)}" ` +
            `width="${cw.toFixed(2)}" height="${ch.toFixed(2)}" class="feasible"/>`,
        );
      }
    }
  }

  const axis =
    `<line x1="${sx(dom1[0])}" y1="${sy(0).toFixed(2)}" x2="${sx(dom1[1])}" y2="${sy(0).toFixed(2)}" class="axis"/>` +
    `<line x1="${sx(0).toFixed(2)}" y1="${sy(dom2[0])}" x2="${sx(0).toFixed(2)}" y2="${sy(dom2[1])}" class="axis"/>`;
  const boundary = `<path d="${polylinePath(pts, sx, sy)}" class="boundary"/>`;
  const marker = optimal
    ? `<circle cx="${sx(optimal.d1).toFixed(2)}" cy="${sy(optimal.d2).toFixed(2)}" r="4" class="optimal"/>`
    : "";
  return (
    `<svg class="plot" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">` +
    cells.join("") +
    axis +
    boundary +
    marker +
    `</svg>`
  );
}

/** Band of reachable query values (lower/upper vs original value) for a
 * given distance, with an optional marker at the current query value. */
export function boundBandSvg(
  curve: BoundsCurvePayload,
  width = 220,
  height = 120,
  marker: number | null = null,
): string {
  const sx = scaleLinear([0, 1], [28, width - 6]);
  const sy = scaleLinear([0, 1], [height - 16, 6]);
  const lower: [number, number][] = curve.points.map(([p, lo]) => [p, lo]);
  const upper: [number, number][] = curve.points.map(([p, , hi]) => [p, hi]);
  const band =
    polylinePath(upper, sx, sy) +
    " " +
    lower
      .slice()
      .reverse()
      .map(([x, y]) => `L${sx(x).toFixed(2)},${sy(y).toFixed(2)}`)
      .join(" ") +
    " Z";
  const diagonal: [number, number][] = [
    [0, 0],
    [1, 1],
  ];
  const markerLine = marker === null
    ? ""
    : `<line x1="${sx(marker).toFixed(2)}" y1="${sy(0)}" x2="${sx(marker).toFixed(2)}" y2="${sy(1)}" class="marker"/>`;
  return (
    `<svg class="plot band" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<path d="${band}" class="band-fill"/>` +
    `<path d="${polylinePath(diagonal, sx, sy)}" class="diagonal"/>` +
    markerLine +
    `</svg>`
  );
}

export type { AlphaReportPayload };
