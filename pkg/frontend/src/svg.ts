/** Low-level SVG helpers. Everything here must be byte-deterministic. */

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Coordinate formatter: at most 3 decimals, no trailing zeros, no "-0". */
export function fmt(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`non-finite coordinate: ${v}`);
  }
  let s = v.toFixed(3);
  if (s.includes(".")) {
    s = s.replace(/0+$/, "").replace(/\.$/, "");
  }
  return s === "-0" ? "0" : s;
}

/** 1-2-5 tick positions covering [lo, hi], aiming for about `target` ticks. */
export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(1, target);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = 10 * mag;
  for (const m of [1, 2, 5]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  const first = Math.ceil(lo / step - 1e-9);
  const last = Math.floor(hi / step + 1e-9);
  for (let k = first; k <= last; k++) {
    ticks.push(Number((k * step).toPrecision(12)));
  }
  return ticks;
}

/** Decade exponents k with lo <= 10^k <= hi. */
export function decadeTicks(lo: number, hi: number): number[] {
  const ks: number[] = [];
  const first = Math.ceil(Math.log10(lo) - 1e-9);
  const last = Math.floor(Math.log10(hi) + 1e-9);
  for (let k = first; k <= last; k++) ks.push(k);
  return ks;
}

export function tickLabel(v: number): string {
  // axis values here are decimal-friendly; fall back to exponent form
  const a = Math.abs(v);
  if (v !== 0 && (a >= 1e5 || a < 1e-3)) return v.toExponential(0);
  return fmt(v);
}

export const PALETTE = [
  "#1965b0",
  "#dc050c",
  "#4eb265",
  "#f4a736",
  "#882e72",
  "#4d4d4d",
] as const;

export function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length]!;
}

export interface Tag {
  name: string;
  attrs: Record<string, string | number>;
  body?: string;
}

export function tag(name: string, attrs: Record<string, string | number>, body?: string): string {
  const parts = Object.entries(attrs).map(
    ([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`,
  );
  const head = parts.length > 0 ? `<${name} ${parts.join(" ")}` : `<${name}`;
  return body === undefined ? `${head}/>` : `${head}>${body}</${name}>`;
}

export function polylinePath(px: number[], py: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < px.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${fmt(px[i]!)} ${fmt(py[i]!)}`);
  }
  return parts.join(" ");
}

export function circleMarker(x: number, y: number, color: string): string {
  return tag("circle", { class: "pt", cx: x, cy: y, r: 2.8, fill: color });
}

/** Open diamond: marks a BER value that was floored from an exact zero. */
export function flooredMarker(x: number, y: number, color: string): string {
  const r = 3.6;
  const d = `M${fmt(x)} ${fmt(y - r)} L${fmt(x + r)} ${fmt(y)} L${fmt(x)} ${fmt(y + r)} L${fmt(x - r)} ${fmt(y)} Z`;
  return tag("path", {
    class: "pt floored",
    d,
    fill: "#ffffff",
    stroke: color,
    "stroke-width": 1.2,
  });
}
