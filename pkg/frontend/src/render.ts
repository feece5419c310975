import { writeFileSync } from "node:fs";
import type { Figure, FigureKind, Series } from "./figures.js";
import { BER_FLOOR, buildFigure } from "./figures.js";
import {
  circleMarker,
  decadeTicks,
  esc,
  flooredMarker,
  fmt,
  linearTicks,
  polylinePath,
  seriesColor,
  tag,
  tickLabel,
} from "./svg.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  title?: string;
}

interface Box {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

function dataRange(series: Series[], pick: (s: Series) => number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of pick(s)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) throw new Error("nothing to plot: every point was dropped");
  return [lo, hi];
}

function xDomain(fig: Figure): [number, number] {
  let [lo, hi] = dataRange(fig.series, (s) => s.x);
  if (fig.kind === "snr_profile" || fig.kind === "bit_loading") {
    // tone index axis: leave one tone of headroom so edge bars stay inside
    return [Math.min(0, lo - 1), hi + 1];
  }
  if (hi === lo) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.04;
  return [lo - pad, hi + pad];
}

function yDomainLog(fig: Figure): [number, number] {
  const [lo, hi] = dataRange(fig.series, (s) => s.y);
  const top = Math.max(hi, fig.fecLimit ?? hi);
  return [
    Math.pow(10, Math.floor(Math.log10(Math.min(lo, BER_FLOOR)) + 1e-9)),
    Math.pow(10, Math.ceil(Math.log10(top) - 1e-9)),
  ];
}

function yDomainLinear(fig: Figure): [number, number] {
  let [lo, hi] = dataRange(fig.series, (s) => s.y);
  if (fig.kind === "bit_loading") {
    // bars grow from zero; keep half a bit of headroom
    return [0, hi + 0.5];
  }
  if (hi === lo) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.08;
  lo = Math.min(0, lo - pad);
  return [lo, hi + pad];
}

/** Render a figure to a standalone SVG string. Output is byte-deterministic. */
export function renderFigure(fig: Figure, opts: RenderOptions = {}): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const box: Box = {
    left: 70,
    right: width - 18,
    top: opts.title !== undefined ? 44 : 24,
    bottom: height - 52,
  };
  const plotW = box.right - box.left;
  const plotH = box.bottom - box.top;

  const [x0, x1] = xDomain(fig);
  const [y0, y1] = fig.logY ? yDomainLog(fig) : yDomainLinear(fig);
  const sx = (v: number) => box.left + ((v - x0) / (x1 - x0)) * plotW;
  const ly0 = Math.log10(y0);
  const ly1 = Math.log10(y1);
  const sy = fig.logY
    ? (v: number) => box.bottom - ((Math.log10(v) - ly0) / (ly1 - ly0)) * plotH
    : (v: number) => box.bottom - ((v - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(tag("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }));
  if (opts.title !== undefined) {
    parts.push(
      tag(
        "text",
        { x: (box.left + box.right) / 2, y: 20, "text-anchor": "middle", "font-size": 14 },
        esc(opts.title),
      ),
    );
  }

  // gridlines and ticks
  const grid: string[] = [];
  const tickText: string[] = [];
  for (const t of linearTicks(x0, x1, 7)) {
    const px = sx(t);
    grid.push(
      tag("line", { x1: px, y1: box.top, x2: px, y2: box.bottom, stroke: "#dddddd", "stroke-width": 0.6 }),
    );
    tickText.push(
      tag(
        "text",
        { x: px, y: box.bottom + 16, "text-anchor": "middle", "font-size": 11 },
        esc(tickLabel(t)),
      ),
    );
  }
  if (fig.logY) {
    for (const k of decadeTicks(y0, y1)) {
      const py = sy(Math.pow(10, k));
      grid.push(
        tag("line", { x1: box.left, y1: py, x2: box.right, y2: py, stroke: "#dddddd", "stroke-width": 0.6 }),
      );
      tickText.push(
        tag(
          "text",
          { x: box.left - 6, y: py + 3.5, "text-anchor": "end", "font-size": 11 },
          `1e${k}`,
        ),
      );
    }
  } else {
    for (const t of linearTicks(y0, y1, 6)) {
      const py = sy(t);
      grid.push(
        tag("line", { x1: box.left, y1: py, x2: box.right, y2: py, stroke: "#dddddd", "stroke-width": 0.6 }),
      );
      tickText.push(
        tag(
          "text",
          { x: box.left - 6, y: py + 3.5, "text-anchor": "end", "font-size": 11 },
          esc(tickLabel(t)),
        ),
      );
    }
  }
  parts.push(tag("g", { class: "grid" }, grid.join("")));
  parts.push(tag("g", { class: "ticks", fill: "#333333" }, tickText.join("")));

  // axes frame
  parts.push(
    tag("rect", {
      class: "frame",
      x: box.left,
      y: box.top,
      width: plotW,
      height: plotH,
      fill: "none",
      stroke: "#333333",
      "stroke-width": 1,
    }),
  );
  parts.push(
    tag(
      "text",
      {
        class: "xlabel",
        x: (box.left + box.right) / 2,
        y: height - 14,
        "text-anchor": "middle",
        "font-size": 12,
      },
      esc(fig.xLabel),
    ),
  );
  parts.push(
    tag(
      "text",
      {
        class: "ylabel",
        x: 0,
        y: 0,
        transform: `translate(16 ${fmt((box.top + box.bottom) / 2)}) rotate(-90)`,
        "text-anchor": "middle",
        "font-size": 12,
      },
      esc(fig.yLabel),
    ),
  );

  if (fig.fecLimit !== undefined) {
    const py = sy(fig.fecLimit);
    parts.push(
      tag("line", {
        class: "fec-limit",
        x1: box.left,
        y1: py,
        x2: box.right,
        y2: py,
        stroke: "#555555",
        "stroke-width": 1.2,
        "stroke-dasharray": "6 4",
      }),
    );
    parts.push(
      tag(
        "text",
        { x: box.right - 4, y: py - 5, "text-anchor": "end", "font-size": 11, fill: "#555555" },
        `FEC limit ${fig.fecLimit.toExponential(1)}`,
      ),
    );
  }

  for (let i = 0; i < fig.series.length; i++) {
    const s = fig.series[i]!;
    const color = seriesColor(i);
    const body: string[] = [];
    if (fig.kind === "bit_loading") {
      // grouped bars, one group slot per series
      const slot = (plotW / (x1 - x0)) * 0.9;
      const w = slot / fig.series.length;
      for (let j = 0; j < s.x.length; j++) {
        const top = sy(s.y[j]!);
        if (s.y[j]! <= 0) continue;
        body.push(
          tag("rect", {
            class: "bar",
            x: sx(s.x[j]!) - slot / 2 + i * w,
            y: top,
            width: w,
            height: sy(0) - top,
            fill: color,
          }),
        );
      }
    } else {
      const px = s.x.map(sx);
      const py = s.y.map(sy);
      body.push(
        tag("path", {
          class: "line",
          d: polylinePath(px, py),
          fill: "none",
          stroke: color,
          "stroke-width": 1.6,
        }),
      );
      if (fig.kind !== "snr_profile") {
        for (let j = 0; j < px.length; j++) {
          body.push(
            s.floored?.[j] === true
              ? flooredMarker(px[j]!, py[j]!, color)
              : circleMarker(px[j]!, py[j]!, color),
          );
        }
      }
    }
    parts.push(tag("g", { class: "series", "data-label": s.label }, body.join("")));
  }

  if (fig.series.length > 1) {
    const rows: string[] = [];
    for (let i = 0; i < fig.series.length; i++) {
      const y = box.top + 14 + i * 16;
      rows.push(
        tag("line", {
          x1: box.left + 10,
          y1: y - 4,
          x2: box.left + 30,
          y2: y - 4,
          stroke: seriesColor(i),
          "stroke-width": 2,
        }),
      );
      rows.push(
        tag("text", { x: box.left + 36, y, "font-size": 11 }, esc(fig.series[i]!.label)),
      );
    }
    parts.push(tag("g", { class: "legend" }, rows.join("")));
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/**
 * Sidecar payload: exactly the arrays that were plotted, after NaN rows were
 * dropped and zero BER was floored. Serialized with a fixed field order so
 * repeated runs produce identical bytes.
 */
export function sidecar(fig: Figure): string {
  const series = fig.series.map((s) => {
    const entry: Record<string, unknown> = { label: s.label, x: s.x, y: s.y };
    if (s.floored !== undefined) entry["floored"] = s.floored;
    return entry;
  });
  const payload: Record<string, unknown> = { kind: fig.kind };
  if (fig.fecLimit !== undefined) {
    payload["fec_limit"] = fig.fecLimit;
    payload["ber_floor"] = BER_FLOOR;
  }
  payload["series"] = series;
  return JSON.stringify(payload, null, 2) + "\n";
}

export function sidecarPath(outPath: string): string {
  const stripped = outPath.replace(/\.[^./\\]+$/, "");
  return `${stripped}.sidecar.json`;
}

export interface RenderResult {
  svgPath: string;
  sidecarPath: string;
}

/** Build the figure from CSVs, then write the SVG and its sidecar JSON. */
export function renderToFiles(
  kind: FigureKind,
  csvPaths: readonly string[],
  outPath: string,
  labels?: readonly string[],
  opts: RenderOptions = {},
): RenderResult {
  const fig = buildFigure(kind, csvPaths, labels);
  const svg = renderFigure(fig, opts);
  const side = sidecarPath(outPath);
  writeFileSync(outPath, svg);
  writeFileSync(side, sidecar(fig));
  return { svgPath: outPath, sidecarPath: side };
}
