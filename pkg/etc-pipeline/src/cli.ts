#!/usr/bin/env node
/** Command line entry: one shot from raw logs to a dataset directory.
 *
 * Exit codes: 0 on success, 2 on any validation failure (bad arguments,
 * unreadable or malformed inputs, broken invariants), 1 on unexpected bugs.
 */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { PipelineError } from './errors';
import { PipelineOptions, runPipeline } from './pipeline';

function parseSpeedBand(text: string): [number, number] {
  const parts = text.split(',').map((p) => Number(p.trim()));
  const [min, max] = parts;
  if (parts.length !== 2 || !Number.isFinite(min) || !Number.isFinite(max)) {
    throw new PipelineError(`--speed-band must be 'MIN,MAX' in km/h, got '${text}'`);
  }
  return [min!, max!];
}

function buildOptions(argv: string[]): PipelineOptions {
  const args = yargs(argv)
    .usage(
      'etc-pipeline --gantries F --transactions F --spec F --interval-sec N --start T --end T --out DIR'
    )
    .option('gantries', { type: 'string', demandOption: true, describe: 'gantry table CSV' })
    .option('transactions', { type: 'string', demandOption: true, describe: 'transaction log CSV' })
    .option('spec', { type: 'string', demandOption: true, describe: 'interchange spec JSON' })
    .option('interval-sec', { type: 'number', demandOption: true, describe: 'window length in seconds' })
    .option('start', { type: 'string', demandOption: true, describe: 'study period start (ISO, inclusive)' })
    .option('end', { type: 'string', demandOption: true, describe: 'study period end (ISO, exclusive)' })
    .option('out', { type: 'string', demandOption: true, describe: 'dataset output directory' })
    .option('max-transit-min', { type: 'number', default: 30, describe: 'longest plausible ramp transit' })
    .option('speed-band', { type: 'string', default: '5,180', describe: 'plausible speeds as MIN,MAX km/h' })
    .strict()
    .fail((msg, err) => {
      throw err ?? new PipelineError(msg);
    })
    .parseSync(); // throws through .fail on bad usage

  return {
    gantriesPath: args.gantries,
    transactionsPath: args.transactions,
    specPath: args.spec,
    intervalSec: args.intervalSec,
    start: args.start,
    end: args.end,
    outDir: args.out,
    maxTransitMin: args.maxTransitMin,
    speedBand: parseSpeedBand(args.speedBand),
    warn: (message) => console.error(`warning: ${message}`),
  };
}

function main(argv: string[]): number {
  const result = runPipeline(buildOptions(argv));
  const { parsed, clean, grid, spec } = result;
  console.log(
    `[parse] ${parsed.totalRows} transaction rows: ${parsed.passages.length} joined, ` +
      `${parsed.rejects.length} logged`
  );
  console.log(
    `[clean] ${clean.records.length} records kept ` +
      `(${clean.droppedOutOfPeriod} outside period, ${clean.droppedDuplicates} duplicates, ` +
      `${result.tally.ambiguousTies} ambiguous orderings)`
  );
  console.log(
    `[export] ${result.paths.metaPath}: ${grid.nWindows}x${spec.directions.length} mainline cells, ` +
      `${grid.nWindows}x${spec.movements.length} ramp cells, ${parsed.rejects.length} reject entries`
  );
  return 0;
}

try {
  process.exit(main(hideBin(process.argv)));
} catch (err) {
  if (err instanceof PipelineError) {
    console.error(`error: ${err.message}`);
    process.exit(2);
  }
  console.error(err);
  process.exit(1);
}
