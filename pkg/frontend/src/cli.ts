#!/usr/bin/env node
import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";
import { CsvError } from "./csv.js";
import { FIGURE_KINDS, isFigureKind } from "./figures.js";
import { renderToFiles } from "./render.js";

const USAGE = `usage: dmtplots <figure-kind> --csv <file> [--csv <file> ...] --out <figure.svg>
                [--label <text> ...] [--title <text>] [--width <px>] [--height <px>]

figure kinds: ${FIGURE_KINDS.join(", ")}

Renders dmtlink CSV output (sweep or loading files) to a standalone SVG and
writes the plotted arrays next to it as <figure>.sidecar.json.`;

export interface CliIo {
  out: (line: string) => void;
  err: (line: string) => void;
}

const defaultIo: CliIo = {
  out: (line) => process.stdout.write(line + "\n"),
  err: (line) => process.stderr.write(line + "\n"),
};

function positiveInt(name: string, raw: string): number {
  const v = Number(raw);
  if (!Number.isInteger(v) || v <= 0) {
    throw new CsvError(`--${name} must be a positive integer, got '${raw}'`);
  }
  return v;
}

/** Entry point; returns the process exit code instead of calling exit. */
export function main(argv: readonly string[], io: CliIo = defaultIo): number {
  const kind = argv[0];
  if (kind === undefined || kind === "-h" || kind === "--help") {
    io.out(USAGE);
    return kind === undefined ? 1 : 0;
  }
  if (!isFigureKind(kind)) {
    io.err(`error: unknown figure kind '${kind}' (expected one of: ${FIGURE_KINDS.join(", ")})`);
    return 1;
  }
  let parsed;
  try {
    parsed = parseArgs({
      args: argv.slice(1) as string[],
      options: {
        csv: { type: "string", multiple: true },
        out: { type: "string" },
        label: { type: "string", multiple: true },
        title: { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
      },
      allowPositionals: false,
    });
  } catch (err) {
    io.err(`error: ${(err as Error).message}`);
    return 1;
  }
  const { values } = parsed;
  const csvPaths = values.csv ?? [];
  if (csvPaths.length === 0) {
    io.err("error: at least one --csv <file> is required");
    return 1;
  }
  if (values.out === undefined) {
    io.err("error: --out <figure.svg> is required");
    return 1;
  }
  try {
    const result = renderToFiles(kind, csvPaths, values.out, values.label, {
      title: values.title,
      width: values.width === undefined ? undefined : positiveInt("width", values.width),
      height: values.height === undefined ? undefined : positiveInt("height", values.height),
    });
    io.out(`wrote ${result.svgPath}`);
    io.out(`wrote ${result.sidecarPath}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError || err instanceof Error) {
      io.err(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

let invokedDirectly = false;
try {
  invokedDirectly =
    process.argv[1] !== undefined &&
    import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
} catch {
  invokedDirectly = false;
}
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
