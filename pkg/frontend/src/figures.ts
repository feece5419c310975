import { basename } from "node:path";
import { CsvError, column, parseCsv } from "./csv.js";

export const FIGURE_KINDS = [
  "ber_vs_power",
  "ber_vs_distance",
  "snr_profile",
  "bit_loading",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

/** Pre-FEC threshold of the staircase code assumed throughout the link. */
export const FEC_LIMIT = 4.4e-3;

/**
 * Error-free measurement points carry BER = 0 and cannot sit on a log axis.
 * They are drawn at this floor with a distinct open marker, and flagged in
 * the sidecar so downstream consumers can tell a floor from a measurement.
 */
export const BER_FLOOR = 1e-6;

export interface Series {
  label: string;
  x: number[];
  y: number[];
  /** Present on BER figures: true where y was floored from an exact zero. */
  floored?: boolean[];
}

export interface Figure {
  kind: FigureKind;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  fecLimit?: number;
  series: Series[];
}

export function isFigureKind(s: string): s is FigureKind {
  return (FIGURE_KINDS as readonly string[]).includes(s);
}

function defaultLabel(path: string): string {
  return basename(path).replace(/\.csv$/i, "");
}

function berSeries(path: string, label: string): Series {
  const table = parseCsv(path);
  const xs = column(table, "x");
  const bers = column(table, "pre_fec_ber");
  const x: number[] = [];
  const y: number[] = [];
  const floored: boolean[] = [];
  for (let i = 0; i < xs.length; i++) {
    const ber = bers[i]!;
    // NaN marks a point where the link never synchronized; nothing to plot.
    if (!Number.isFinite(xs[i]!) || !Number.isFinite(ber)) continue;
    x.push(xs[i]!);
    if (ber === 0) {
      y.push(BER_FLOOR);
      floored.push(true);
    } else {
      y.push(ber);
      floored.push(false);
    }
  }
  return { label, x, y, floored };
}

function profileSeries(path: string, label: string, field: string): Series {
  const table = parseCsv(path);
  return { label, x: column(table, "index"), y: column(table, field) };
}

/**
 * Load one series per CSV and assemble the figure for the requested kind.
 * Labels default to the file stem; an explicit list must match the CSV count.
 */
export function buildFigure(
  kind: FigureKind,
  csvPaths: readonly string[],
  labels?: readonly string[],
): Figure {
  if (csvPaths.length === 0) {
    throw new CsvError("no input CSV given");
  }
  if (labels !== undefined && labels.length !== csvPaths.length) {
    throw new CsvError(
      `got ${labels.length} labels for ${csvPaths.length} CSV files`,
    );
  }
  const name = (i: number) => labels?.[i] ?? defaultLabel(csvPaths[i]!);
  switch (kind) {
    case "ber_vs_power":
      return {
        kind,
        xLabel: "received optical power [dBm]",
        yLabel: "pre-FEC BER",
        logY: true,
        fecLimit: FEC_LIMIT,
        series: csvPaths.map((p, i) => berSeries(p, name(i))),
      };
    case "ber_vs_distance":
      return {
        kind,
        xLabel: "fiber length [km]",
        yLabel: "pre-FEC BER",
        logY: true,
        fecLimit: FEC_LIMIT,
        series: csvPaths.map((p, i) => berSeries(p, name(i))),
      };
    case "snr_profile":
      return {
        kind,
        xLabel: "subcarrier index",
        yLabel: "SNR [dB]",
        logY: false,
        series: csvPaths.map((p, i) => profileSeries(p, name(i), "snr_db")),
      };
    case "bit_loading":
      return {
        kind,
        xLabel: "subcarrier index",
        yLabel: "bits per symbol",
        logY: false,
        series: csvPaths.map((p, i) => profileSeries(p, name(i), "bits")),
      };
  }
}
