#!/usr/bin/env node
/**
 * plot_figures <kind> <csv...> -o <out.svg> [--dip-marker X] [--superatom-n N]
 *
 * Reads simulator CSVs and writes an SVG figure.  Rendering is read-only
 * over the inputs and writes the output only after a successful render.
 */
import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { FIGURE_KINDS, FigureKind, FigureRequest } from "./figures.js";
import { parseDynamicsCsv, parseSweepCsv, SchemaError } from "./schema.js";
import { renderSvg } from "./render.js";

export function buildRequest(
  kind: FigureKind,
  csvPaths: string[],
  flags: { dipMarker?: number; superatomN?: number; title?: string },
): FigureRequest {
  const request: FigureRequest = {
    kind,
    dipMarker: flags.dipMarker,
    superatomN: flags.superatomN,
    title: flags.title,
  };
  if (kind === "dynamics") {
    request.dynamics = csvPaths.map((p) =>
      parseDynamicsCsv(readFileSync(p, "utf-8"), basename(p)),
    );
  } else {
    request.sweeps = csvPaths.map((p) =>
      parseSweepCsv(readFileSync(p, "utf-8"), basename(p)),
    );
  }
  return request;
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("$0 <kind> <csv...>", "render a figure from simulator CSVs")
    .positional("kind", { choices: FIGURE_KINDS, demandOption: true })
    .positional("csv", { array: true, type: "string", demandOption: true })
    .option("out", { alias: "o", type: "string", demandOption: true, describe: "output SVG path" })
    .option("dip-marker", { type: "number", describe: "vertical marker (um) on distance figures" })
    .option("superatom-n", { type: "number", describe: "overlay the ideal blockaded-ensemble curve for N atoms" })
    .option("title", { type: "string" })
    .option("width", { type: "number", default: 760 })
    .option("height", { type: "number", default: 480 })
    .strict()
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parse();

  const request = buildRequest(args.kind as FigureKind, args.csv as string[], {
    dipMarker: args.dipMarker,
    superatomN: args.superatomN,
    title: args.title,
  });
  const svg = renderSvg(request, { width: args.width, height: args.height });
  writeFileSync(args.out, svg, "utf-8");
  console.error(`wrote ${args.out}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;

if (invokedDirectly) {
  main(hideBin(process.argv))
    .then((code) => process.exit(code))
    .catch((err) => {
      const prefix = err instanceof SchemaError ? "schema error" : "error";
      console.error(`${prefix}: ${err.message}`);
      process.exit(1);
    });
}
