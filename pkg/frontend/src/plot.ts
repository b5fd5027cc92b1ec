import { el, polylinePoints, px, svgDocument, text } from "./svg.js";
import { formatTick, linearScale, niceTicks } from "./scale.js";

export interface SeriesSpec {
  label: string;
  x: readonly number[];
  y: readonly number[];
  color: string;
  dashed?: boolean;
}

export interface LinePlotSpec {
  title: string;
  /** Short tag drawn in the top-left corner of the plot area, e.g. "(a)". */
  cornerTag?: string;
  xLabel: string;
  yLabel: string;
  series: SeriesSpec[];
  /** Defaults to true when there is more than one series. */
  legend?: boolean;
}

export const PLOT_WIDTH = 640;
export const PLOT_HEIGHT = 440;
const MARGIN = { left: 68, right: 18, top: 40, bottom: 52 };
const DASH_PATTERN = "6 4";

interface Extent {
  x: [number, number];
  y: [number, number];
}

function dataExtent(series: readonly SeriesSpec[]): Extent {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of series) {
    if (s.x.length !== s.y.length) {
      throw new Error(`series '${s.label}': ${s.x.length} x values vs ${s.y.length} y values`);
    }
    if (s.x.length === 0) throw new Error(`series '${s.label}' is empty`);
    for (const v of s.x) {
      if (v < xMin) xMin = v;
      if (v > xMax) xMax = v;
    }
    for (const v of s.y) {
      if (v < yMin) yMin = v;
      if (v > yMax) yMax = v;
    }
  }
  if (xMin === xMax) {
    xMin -= 0.5;
    xMax += 0.5;
  }
  // anchor at zero for non-negative data; pad the top so curves clear the frame
  let y0 = Math.min(0, yMin);
  let y1 = yMax;
  if (y1 <= y0) y1 = y0 + 1;
  const pad = 0.05 * (y1 - y0);
  y1 += pad;
  if (yMin < 0) y0 -= pad;
  return { x: [xMin, xMax], y: [y0, y1] };
}

/**
 * Render a line plot as a standalone SVG document.
 *
 * The plot-area group carries `data-x-domain`, `data-y-domain`,
 * `data-x-range`, and `data-y-range` attributes so that curve pixel
 * coordinates can be mapped back to data coordinates exactly.
 */
export function renderLinePlot(spec: LinePlotSpec): string {
  if (spec.series.length === 0) throw new Error("a plot needs at least one series");
  const extent = dataExtent(spec.series);
  const left = MARGIN.left;
  const right = PLOT_WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = PLOT_HEIGHT - MARGIN.bottom;
  const xScale = linearScale(extent.x, [left, right]);
  const yScale = linearScale(extent.y, [bottom, top]);

  const parts: string[] = [];
  parts.push(el("rect", { x: 0, y: 0, width: PLOT_WIDTH, height: PLOT_HEIGHT, fill: "#ffffff" }));
  parts.push(
    text(
      { x: PLOT_WIDTH / 2, y: 24, "text-anchor": "middle", "font-size": 15, fill: "#111111" },
      spec.title,
    ),
  );

  // grid and tick marks
  const gridParts: string[] = [];
  const labelParts: string[] = [];
  for (const tick of niceTicks(extent.x[0], extent.x[1], 6)) {
    const xPix = px(xScale.map(tick));
    gridParts.push(
      el("line", { x1: xPix, y1: px(top), x2: xPix, y2: px(bottom), stroke: "#dddddd", "stroke-width": 1 }),
    );
    labelParts.push(
      text(
        { x: xPix, y: px(bottom + 16), "text-anchor": "middle", "font-size": 11, fill: "#333333" },
        formatTick(tick),
      ),
    );
  }
  for (const tick of niceTicks(extent.y[0], extent.y[1], 5)) {
    const yPix = px(yScale.map(tick));
    gridParts.push(
      el("line", { x1: px(left), y1: yPix, x2: px(right), y2: yPix, stroke: "#dddddd", "stroke-width": 1 }),
    );
    labelParts.push(
      text(
        { x: px(left - 7), y: px(yScale.map(tick) + 3.5), "text-anchor": "end", "font-size": 11, fill: "#333333" },
        formatTick(tick),
      ),
    );
  }
  parts.push(el("g", { class: "grid" }, ...gridParts));
  parts.push(el("g", { class: "tick-labels" }, ...labelParts));

  // curves, inside the invertible plot-area group
  const curves = spec.series.map((s) => {
    const attrs: Record<string, string | number> = {
      class: "curve",
      "data-label": s.label,
      points: polylinePoints(
        s.x.map((v) => xScale.map(v)),
        s.y.map((v) => yScale.map(v)),
      ),
      fill: "none",
      stroke: s.color,
      "stroke-width": 2,
      "stroke-linejoin": "round",
    };
    if (s.dashed) attrs["stroke-dasharray"] = DASH_PATTERN;
    return el("polyline", attrs);
  });
  parts.push(
    el(
      "g",
      {
        class: "plot-area",
        "data-x-domain": `${extent.x[0]} ${extent.x[1]}`,
        "data-y-domain": `${extent.y[0]} ${extent.y[1]}`,
        "data-x-range": `${left} ${right}`,
        "data-y-range": `${bottom} ${top}`,
      },
      ...curves,
    ),
  );

  // frame above the curves so boundary points are not painted over the axes
  parts.push(
    el("rect", {
      x: left,
      y: top,
      width: right - left,
      height: bottom - top,
      fill: "none",
      stroke: "#333333",
      "stroke-width": 1,
    }),
  );

  if (spec.cornerTag !== undefined) {
    parts.push(
      text(
        { x: px(left + 9), y: px(top + 19), "font-size": 13, "font-weight": "bold", fill: "#111111" },
        spec.cornerTag,
      ),
    );
  }

  const showLegend = spec.legend ?? spec.series.length > 1;
  if (showLegend) {
    const legendParts: string[] = [];
    const x0 = right - 128;
    spec.series.forEach((s, i) => {
      const y = top + 17 + 19 * i;
      const lineAttrs: Record<string, string | number> = {
        x1: px(x0),
        y1: px(y - 4),
        x2: px(x0 + 26),
        y2: px(y - 4),
        stroke: s.color,
        "stroke-width": 2,
      };
      if (s.dashed) lineAttrs["stroke-dasharray"] = DASH_PATTERN;
      legendParts.push(el("line", lineAttrs));
      legendParts.push(
        text({ x: px(x0 + 33), y: px(y), "font-size": 12, fill: "#111111" }, s.label),
      );
    });
    parts.push(el("g", { class: "legend" }, ...legendParts));
  }

  parts.push(
    text(
      {
        x: (left + right) / 2,
        y: PLOT_HEIGHT - 14,
        "text-anchor": "middle",
        "font-size": 12.5,
        fill: "#111111",
      },
      spec.xLabel,
    ),
  );
  parts.push(
    el(
      "g",
      { transform: `translate(17 ${(top + bottom) / 2}) rotate(-90)` },
      text({ x: 0, y: 0, "text-anchor": "middle", "font-size": 12.5, fill: "#111111" }, spec.yLabel),
    ),
  );

  return svgDocument(PLOT_WIDTH, PLOT_HEIGHT, parts.join("\n"));
}
