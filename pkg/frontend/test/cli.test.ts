import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { main, type CliIo } from "../src/cli.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`../fixtures/${name}`, import.meta.url));

const DIST_CLI = fileURLToPath(new URL("../dist/cli.js", import.meta.url));

const tmp = mkdtempSync(join(tmpdir(), "dmtplots-cli-"));

function run(...argv: string[]): { code: number; out: string[]; err: string[] } {
  const out: string[] = [];
  const err: string[] = [];
  const io: CliIo = { out: (l) => out.push(l), err: (l) => err.push(l) };
  const code = main(argv, io);
  return { code, out, err };
}

describe("dmtplots main", () => {
  it("renders a figure and its sidecar, reporting both paths", () => {
    const outPath = join(tmp, "power.svg");
    const r = run("ber_vs_power", "--csv", fixture("ber_vs_power_O25.csv"), "--out", outPath);
    expect(r.code).toBe(0);
    expect(r.err).toEqual([]);
    expect(r.out).toEqual([`wrote ${outPath}`, `wrote ${join(tmp, "power.sidecar.json")}`]);
    expect(readFileSync(outPath, "utf8")).toContain("</svg>");
    expect(existsSync(join(tmp, "power.sidecar.json"))).toBe(true);
  });

  it("accepts repeated --csv and --label", () => {
    const outPath = join(tmp, "both.svg");
    const r = run(
      "snr_profile",
      "--csv", fixture("loading_C100_2p2.csv"),
      "--csv", fixture("loading_C100_2p2.csv"),
      "--label", "run A",
      "--label", "run B",
      "--out", outPath,
      "--title", "C-band loading",
    );
    expect(r.code).toBe(0);
    const svg = readFileSync(outPath, "utf8");
    expect(svg).toContain("run A");
    expect(svg).toContain("C-band loading");
  });

  it("prints usage and fails when called bare", () => {
    const r = run();
    expect(r.code).toBe(1);
    expect(r.out.join("\n")).toContain("usage: dmtplots");
  });

  it("prints usage and succeeds on --help", () => {
    expect(run("--help").code).toBe(0);
  });

  it("rejects an unknown figure kind", () => {
    const r = run("ber_vs_time", "--csv", "x.csv", "--out", "x.svg");
    expect(r.code).toBe(1);
    expect(r.err.join("\n")).toContain("unknown figure kind 'ber_vs_time'");
  });

  it("requires --csv and --out", () => {
    expect(run("ber_vs_power", "--out", "x.svg").code).toBe(1);
    expect(run("ber_vs_power", "--csv", "x.csv").code).toBe(1);
  });

  it("empty CSV exits nonzero with a parse error", () => {
    const empty = join(tmp, "empty.csv");
    writeFileSync(empty, "");
    const r = run("ber_vs_power", "--csv", empty, "--out", join(tmp, "e.svg"));
    expect(r.code).toBe(1);
    expect(r.err.join("\n")).toMatch(/empty/);
  });

  it("missing column exits nonzero naming column and file", () => {
    const bad = join(tmp, "bad.csv");
    writeFileSync(bad, "index,foo\n1,2\n");
    const r = run("bit_loading", "--csv", bad, "--out", join(tmp, "bad.svg"));
    expect(r.code).toBe(1);
    const msg = r.err.join("\n");
    expect(msg).toContain("bits");
    expect(msg).toContain(bad);
  });

  it("rejects a non-integer --width", () => {
    const r = run(
      "ber_vs_power",
      "--csv", fixture("ber_vs_power_O25.csv"),
      "--out", join(tmp, "w.svg"),
      "--width", "wide",
    );
    expect(r.code).toBe(1);
    expect(r.err.join("\n")).toContain("--width");
  });
});

describe("dmtplots as a process", () => {
  it("built cli.js exits 1 on an empty CSV", () => {
    expect(existsSync(DIST_CLI), "dist/cli.js missing: run `npm run build` first").toBe(true);
    const empty = join(tmp, "proc-empty.csv");
    writeFileSync(empty, "");
    const r = spawnSync(process.execPath, [DIST_CLI, "ber_vs_power", "--csv", empty, "--out", join(tmp, "p.svg")], { encoding: "utf8" });
    expect(r.status).toBe(1);
    expect(r.stderr).toMatch(/empty/);
  });

  it("built cli.js renders the distance fixture end to end", () => {
    const outPath = join(tmp, "proc.svg");
    const r = spawnSync(
      process.execPath,
      [DIST_CLI, "ber_vs_distance", "--csv", fixture("ber_vs_distance_C50.csv"), "--out", outPath],
      { encoding: "utf8" },
    );
    expect(r.status).toBe(0);
    expect(readFileSync(outPath, "utf8")).toContain("FEC limit 4.4e-3");
    const side = JSON.parse(readFileSync(join(tmp, "proc.sidecar.json"), "utf8"));
    expect(side.series[0].floored.filter(Boolean)).toHaveLength(2);
  });
});
