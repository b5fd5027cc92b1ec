import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Parsed geometry of a rendered plot: the data<->pixel affine maps. */
export interface PlotArea {
  xDomain: [number, number];
  yDomain: [number, number];
  xRange: [number, number];
  yRange: [number, number];
  invertX(pixel: number): number;
  invertY(pixel: number): number;
  /** Worst-case data-space error of a curve gap from pixel rounding. */
  gapQuantization: number;
}

export interface ParsedCurve {
  points: Array<[number, number]>;
  dashed: boolean;
}

function pair(raw: string): [number, number] {
  const parts = raw.split(" ").map(Number);
  if (parts.length !== 2 || parts.some((v) => !Number.isFinite(v))) {
    throw new Error(`expected two numbers, got '${raw}'`);
  }
  return [parts[0]!, parts[1]!];
}

export function parsePlotArea(svg: string): PlotArea {
  const match =
    /<g class="plot-area" data-x-domain="([^"]+)" data-y-domain="([^"]+)" data-x-range="([^"]+)" data-y-range="([^"]+)">/.exec(
      svg,
    );
  if (match === null) throw new Error("no plot-area group found in SVG");
  const xDomain = pair(match[1]!);
  const yDomain = pair(match[2]!);
  const xRange = pair(match[3]!);
  const yRange = pair(match[4]!);
  const invert = (domain: [number, number], range: [number, number]) => (pixel: number) =>
    domain[0] + ((pixel - range[0]) / (range[1] - range[0])) * (domain[1] - domain[0]);
  // coordinates are written with 3 decimals: each is off by <= 5e-4 px, a
  // two-curve gap by <= 1e-3 px; half again as much is a safe bound
  const gapQuantization =
    (1.5e-3 * Math.abs(yDomain[1] - yDomain[0])) / Math.abs(yRange[1] - yRange[0]);
  return {
    xDomain,
    yDomain,
    xRange,
    yRange,
    invertX: invert(xDomain, xRange),
    invertY: invert(yDomain, yRange),
    gapQuantization,
  };
}

export function parseCurves(svg: string): Record<string, ParsedCurve> {
  const curves: Record<string, ParsedCurve> = {};
  const pattern = /<polyline class="curve" data-label="([^"]+)" points="([^"]+)"([^/]*)\/>/g;
  for (const match of svg.matchAll(pattern)) {
    const points = match[2]!
      .split(" ")
      .map((p) => p.split(",").map(Number) as [number, number]);
    curves[match[1]!] = { points, dashed: match[3]!.includes("stroke-dasharray") };
  }
  return curves;
}

/** All text content in the SVG, tag markup stripped. */
export function parseTexts(svg: string): string[] {
  return [...svg.matchAll(/<text[^>]*>([^<]*)<\/text>/g)].map((m) => m[1]!);
}

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}
