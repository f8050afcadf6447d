#!/usr/bin/env node
/**
 * pon5g-plot: render the toolkit's result CSVs to SVG figures.
 *
 * Exit codes: 0 success, 2 input problem (bad CSV schema, malformed cell,
 * empty file, unknown figure kind), 1 anything else.
 */

import { resolve } from "node:path";
import { fileURLToPath } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures.js";
import { SchemaError } from "./schema.js";

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("pon5g-plot")
    .command(
      "$0 <kind> <inputs..>",
      "Render result CSVs to an SVG figure",
      (y) => y
        .positional("kind", {
          describe: "figure kind",
          choices: FIGURE_KINDS,
          demandOption: true,
        })
        .positional("inputs", {
          describe: "input CSV file(s)",
          type: "string",
          array: true,
          demandOption: true,
        })
        .option("out", {
          alias: "o",
          describe: "output SVG path",
          type: "string",
          demandOption: true,
        }),
    )
    .strict()
    .exitProcess(false)
    .fail(false)
    .help();

  let args;
  try {
    args = await parser.parse();
  } catch (err) {
    process.stderr.write(`pon5g-plot: ${(err as Error).message}\n`);
    return 2;
  }
  if (args.help || args.version) return 0;

  try {
    renderFigure({
      kind: args.kind as FigureKind,
      inputs: args.inputs as string[],
      output: args.out as string,
    });
    process.stderr.write(`wrote ${args.out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`pon5g-plot: ${(err as Error).message}\n`);
    const missingInput =
      (err as NodeJS.ErrnoException).code === "ENOENT";
    return err instanceof SchemaError || missingInput ? 2 : 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  fileURLToPath(import.meta.url) === resolve(process.argv[1]);
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
