/** End-to-end orchestration: parse, clean, match, aggregate, export.
 *
 * Everything stateful lives in this module's call graph; each stage is a
 * pure function over the previous stage's output, so callers can also run
 * the stages individually (the tests and the shard path do).
 */

import { writeFileSync } from 'fs';
import { join } from 'path';
import {
  DEFAULT_SPEED_KMH,
  MatchOptions,
  Tally,
  WindowSeries,
  deriveTally,
  finalizeRamps,
  finalizeSpeeds,
  finalizeVolumes,
} from './aggregate';
import { CleanResult, cleanRecords } from './clean';
import { PipelineError } from './errors';
import { DatasetPaths, RenderedDataset, renderDataset, writeDataset } from './exportDataset';
import { ParsedInputs, parseInputs, readText } from './parse';
import { Segment, deriveSegments } from './segments';
import { WindowGrid, makeGrid, parseIsoSeconds } from './time';
import { Gantry, InterchangeSpec, Reject, validateSpec } from './types';

export const DEFAULT_MAX_TRANSIT_MIN = 30;
export const DEFAULT_SPEED_BAND: readonly [number, number] = [5, 180];

export interface PipelineOptions {
  gantriesPath: string;
  transactionsPath: string;
  specPath: string;
  intervalSec: number;
  start: string;
  end: string;
  outDir: string;
  maxTransitMin?: number;
  speedBand?: readonly [number, number];
  warn?: (message: string) => void;
}

export interface PipelineResult {
  grid: WindowGrid;
  spec: InterchangeSpec;
  gantries: Gantry[];
  segments: Segment[];
  parsed: ParsedInputs;
  clean: CleanResult;
  tally: Tally;
  volumes: WindowSeries;
  speeds: WindowSeries;
  ramps: WindowSeries;
  rendered: RenderedDataset;
  paths: DatasetPaths & { rejectsPath: string };
}

function parsePeriodBound(text: string, which: string): number {
  const sec = parseIsoSeconds(text);
  if (sec === null) {
    throw new PipelineError(`--${which} must be an ISO timestamp like 2020-09-07T08:00:00, got '${text}'`);
  }
  return sec;
}

/** Load the interchange spec JSON and check it against the gantry table. */
export function loadSpec(specPath: string, gantryIds: ReadonlySet<string>): InterchangeSpec {
  let doc: unknown;
  try {
    doc = JSON.parse(readText(specPath));
  } catch (err) {
    if (err instanceof PipelineError) {
      throw err;
    }
    throw new PipelineError(`${specPath}: not valid JSON: ${(err as Error).message}`);
  }
  const spec = validateSpec(doc, specPath);
  const missing = spec.directions.filter((d) => !gantryIds.has(d));
  if (missing.length > 0) {
    throw new PipelineError(
      `${specPath}: directions [${missing.join(', ')}] are absent from the gantry table`
    );
  }
  return spec;
}

/** Serialize the rejection log as line-delimited JSON. */
export function renderRejects(rejects: readonly Reject[]): string {
  return rejects.map((r) => JSON.stringify(r) + '\n').join('');
}

/** Run the whole pipeline and write the dataset directory. */
export function runPipeline(opts: PipelineOptions): PipelineResult {
  const warn = opts.warn ?? (() => undefined);
  const maxTransitMin = opts.maxTransitMin ?? DEFAULT_MAX_TRANSIT_MIN;
  const [minSpeedKmh, maxSpeedKmh] = opts.speedBand ?? DEFAULT_SPEED_BAND;
  if (!(maxTransitMin > 0)) {
    throw new PipelineError(`--max-transit-min must be positive, got ${maxTransitMin}`);
  }
  if (!(minSpeedKmh > 0) || !(maxSpeedKmh > minSpeedKmh)) {
    throw new PipelineError(
      `speed band must satisfy 0 < min < max, got [${minSpeedKmh}, ${maxSpeedKmh}]`
    );
  }
  const matchOpts: MatchOptions = {
    maxTransitSec: maxTransitMin * 60,
    minSpeedKmh,
    maxSpeedKmh,
  };

  const grid = makeGrid(
    parsePeriodBound(opts.start, 'start'),
    parsePeriodBound(opts.end, 'end'),
    opts.intervalSec
  );
  const parsed = parseInputs(opts.gantriesPath, opts.transactionsPath);
  const gantryIds = parsed.gantries.map((g) => g.gantryId);
  const spec = loadSpec(opts.specPath, new Set(gantryIds));
  if (spec.intervalSec !== grid.intervalSec) {
    warn(
      `spec file says ${spec.intervalSec} s windows but the run uses ${grid.intervalSec} s; using ${grid.intervalSec}`
    );
  }

  const clean = cleanRecords(parsed.passages, grid);
  const segments = deriveSegments(parsed.gantries);
  const tally = deriveTally(clean.records, grid, gantryIds, segments, spec.movements, matchOpts);
  const volumes = finalizeVolumes(tally);
  const speeds = finalizeSpeeds(tally, DEFAULT_SPEED_KMH, warn);
  const ramps = finalizeRamps(tally);
  const rendered = renderDataset(spec, grid, volumes, speeds, ramps, segments, DEFAULT_SPEED_KMH, warn);

  const datasetPaths = writeDataset(opts.outDir, rendered);
  const rejectsPath = join(opts.outDir, 'rejects.jsonl');
  writeFileSync(rejectsPath, renderRejects(parsed.rejects), 'utf-8');

  return {
    grid,
    spec,
    gantries: parsed.gantries,
    segments,
    parsed,
    clean,
    tally,
    volumes,
    speeds,
    ramps,
    rendered,
    paths: { ...datasetPaths, rejectsPath },
  };
}

export { DEFAULT_SPEED_KMH, deriveTally, emptyTally, finalizeRamps, finalizeSpeeds, finalizeVolumes, mergeTallies, shardByPlate } from './aggregate';
export type { MatchOptions, Tally, WindowSeries } from './aggregate';
export { cleanRecords, mergeCleaned } from './clean';
export type { CleanResult } from './clean';
export { PipelineError } from './errors';
export { renderDataset, writeDataset } from './exportDataset';
export type { DatasetPaths, RenderedDataset } from './exportDataset';
export { parseGantries, parseInputs, parseTransactions } from './parse';
export type { ParsedInputs, ParsedTransactions } from './parse';
export { deriveSegments } from './segments';
export type { Segment } from './segments';
export { formatIso, inPeriod, makeGrid, parseIsoSeconds, sameGrid, windowIndex, windowStarts } from './time';
export type { WindowGrid } from './time';
export { validateSpec } from './types';
export type { Gantry, InterchangeSpec, Movement, Passage, Reject } from './types';
