import { mkdirSync, readdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { CsvError, readColumns } from "./csv.js";
import { renderLinePlot, type SeriesSpec } from "./plot.js";

export const DENSITY_COLUMNS = ["time", "x", "u_estimated", "u_exact"] as const;
export const ERROR_COLUMNS = ["time", "l2", "linf", "mass"] as const;

const EXACT_COLOR = "#1f77b4";
const NUMERICAL_COLOR = "#d95f02";
const ERROR_COLOR = "#333333";

/** Error in the run directory's structure (as opposed to a single CSV's content). */
export class RenderError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "RenderError";
  }
}

export interface DensityPanel {
  /** Snapshot time token exactly as it appears in the file name, e.g. "0.5". */
  timeToken: string;
  time: number;
  csvFile: string;
  outputName: string;
}

/** The figure a run directory describes: which CSVs feed which panels. */
export interface FigureSpec {
  runDir: string;
  densityPanels: DensityPanel[];
  errorCsv: string;
  errorOutputName: string;
}

function panelLetter(index: number): string {
  return index < 26 ? String.fromCharCode(97 + index) : `x${index}`;
}

/**
 * Scan a run directory for density snapshot CSVs (density_t*.csv) and the
 * error history CSV, and assign output panel names in snapshot-time order.
 */
export function discoverFigure(runDir: string): FigureSpec {
  let entries: string[];
  try {
    entries = readdirSync(runDir);
  } catch {
    throw new RenderError(`run directory missing or unreadable: ${runDir}`);
  }

  const panels: DensityPanel[] = [];
  for (const name of entries) {
    const match = /^density_t(.+)\.csv$/.exec(name);
    if (match === null) continue;
    const token = match[1]!;
    const time = Number(token);
    if (!Number.isFinite(time)) {
      throw new CsvError(join(runDir, name), `snapshot time token '${token}' is not numeric`);
    }
    panels.push({ timeToken: token, time, csvFile: join(runDir, name), outputName: "" });
  }
  if (panels.length === 0) {
    throw new RenderError(`no density CSV files (density_t*.csv) found in ${runDir}`);
  }
  panels.sort((a, b) => a.time - b.time);
  panels.forEach((p, i) => {
    p.outputName = `panel_${panelLetter(i)}_density_t${p.timeToken}.svg`;
  });

  return {
    runDir,
    densityPanels: panels,
    errorCsv: join(runDir, "errors.csv"),
    errorOutputName: `panel_${panelLetter(panels.length)}_error.svg`,
  };
}

interface DensityData {
  x: number[];
  uExact: number[];
  uEstimated: number[];
}

function readDensityCsv(filePath: string, expectedTime: number): DensityData {
  const table = readColumns(filePath, DENSITY_COLUMNS);
  if (table.rows < 2) {
    throw new CsvError(filePath, `has ${table.rows} data rows, need at least 2 to draw a curve`);
  }
  const times = table.columns["time"]!;
  const tol = 1e-9 * Math.max(1, Math.abs(expectedTime));
  for (const t of times) {
    if (Math.abs(t - expectedTime) > tol) {
      throw new CsvError(filePath, `time column holds ${t}, expected ${expectedTime} from the file name`);
    }
  }
  const xs = table.columns["x"]!;
  for (let i = 1; i < xs.length; i++) {
    if (!(xs[i]! > xs[i - 1]!)) {
      throw new CsvError(filePath, `x grid not strictly increasing at row ${i + 2}`);
    }
  }
  return { x: xs, uExact: table.columns["u_exact"]!, uEstimated: table.columns["u_estimated"]! };
}

export interface RenderResult {
  /** Absolute paths of the SVG files written, in panel order. */
  written: string[];
  warnings: string[];
}

/**
 * Render every panel a run directory describes into `outDir`.
 *
 * Density snapshots become overlay panels (exact solid, numerical dashed);
 * the error history becomes one error-vs-time panel, skipped with a warning
 * when the error CSV is header-only. The run directory is never written to,
 * and re-rendering the same inputs produces byte-identical files.
 */
export function renderRun(runDir: string, outDir: string): RenderResult {
  const figure = discoverFigure(runDir);

  // read and validate every input before writing any output
  const densities = figure.densityPanels.map((p) => readDensityCsv(p.csvFile, p.time));
  const errorTable = readColumns(figure.errorCsv, ERROR_COLUMNS);

  const warnings: string[] = [];
  const documents: Array<{ name: string; svg: string }> = [];

  figure.densityPanels.forEach((panel, i) => {
    const data = densities[i]!;
    const series: SeriesSpec[] = [
      { label: "exact", x: data.x, y: data.uExact, color: EXACT_COLOR },
      { label: "numerical", x: data.x, y: data.uEstimated, color: NUMERICAL_COLOR, dashed: true },
    ];
    documents.push({
      name: panel.outputName,
      svg: renderLinePlot({
        title: `t = ${panel.timeToken}`,
        cornerTag: `(${panelLetter(i)})`,
        xLabel: "x",
        yLabel: "density",
        series,
      }),
    });
  });

  if (errorTable.rows === 0) {
    warnings.push(`${figure.errorCsv} is header-only; skipping the error panel`);
  } else {
    documents.push({
      name: figure.errorOutputName,
      svg: renderLinePlot({
        title: "L² error",
        cornerTag: `(${panelLetter(figure.densityPanels.length)})`,
        xLabel: "t",
        yLabel: "L² error",
        series: [
          {
            label: "l2",
            x: errorTable.columns["time"]!,
            y: errorTable.columns["l2"]!,
            color: ERROR_COLOR,
          },
        ],
      }),
    });
  }

  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const doc of documents) {
    const target = join(outDir, doc.name);
    writeFileSync(target, doc.svg, "utf8");
    written.push(target);
  }
  return { written, warnings };
}
