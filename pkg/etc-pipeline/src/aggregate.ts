/** Windowed derivations from cleaned records: gantry volumes, plate-matched
 * segment speeds, and upstream/downstream ramp movement counts.
 *
 * Derivation produces a Tally of raw per-window accumulators. Tallies from
 * plate-complete record shards merge by elementwise addition (associative and
 * commutative), and only the finalize step turns accumulators into series, so
 * sharded and single-shot processing give identical output.
 */

import { PipelineError } from './errors';
import { Segment } from './segments';
import { WindowGrid, sameGrid, windowIndex } from './time';
import { Movement, Passage } from './types';

export interface MatchOptions {
  maxTransitSec: number;
  minSpeedKmh: number;
  maxSpeedKmh: number;
}

/** Speed written where no vehicle was ever matched: leading gaps and dead segments. */
export const DEFAULT_SPEED_KMH = 100;

/** Raw per-window accumulators, keyed by gantry, segment, and movement id. */
export interface Tally {
  grid: WindowGrid;
  volumes: Map<string, Float64Array>;
  speedSums: Map<string, Float64Array>;
  speedCounts: Map<string, Float64Array>;
  rampCounts: Map<string, Float64Array>;
  /** Same-plate same-second passage pairs whose order was settled by gantry id. */
  ambiguousTies: number;
}

function bump(arr: Float64Array, w: number, by: number): void {
  arr[w] = arr[w]! + by;
}

export function emptyTally(
  grid: WindowGrid,
  gantryIds: readonly string[],
  segments: readonly Segment[],
  movements: readonly Movement[]
): Tally {
  const zeros = () => new Float64Array(grid.nWindows);
  return {
    grid,
    volumes: new Map(gantryIds.map((g) => [g, zeros()])),
    speedSums: new Map(segments.map((s) => [s.id, zeros()])),
    speedCounts: new Map(segments.map((s) => [s.id, zeros()])),
    rampCounts: new Map(movements.map((m) => [m.id, zeros()])),
    ambiguousTies: 0,
  };
}

/** Derive all accumulators in one pass over cleaned records.
 *
 * Records must be clean output: in-period, deduplicated, and sorted by
 * (plate, time, gantry) so each plate's passages form one contiguous chain.
 * When sharding, split by plate so chains stay whole.
 */
export function deriveTally(
  records: readonly Passage[],
  grid: WindowGrid,
  gantryIds: readonly string[],
  segments: readonly Segment[],
  movements: readonly Movement[],
  opts: MatchOptions
): Tally {
  const tally = emptyTally(grid, gantryIds, segments, movements);
  const segmentByPair = new Map(segments.map((s) => [`${s.fromId}|${s.toId}`, s]));
  const movementByPair = new Map(movements.map((m) => [`${m.upstream}|${m.downstream}`, m]));

  for (const r of records) {
    const counts = tally.volumes.get(r.gantryId);
    if (counts === undefined) {
      throw new PipelineError(`record references gantry '${r.gantryId}' missing from the table`);
    }
    bump(counts, windowIndex(grid, r.epochSec), 1);
  }

  for (let i = 0; i + 1 < records.length; i++) {
    const a = records[i]!;
    const b = records[i + 1]!;
    if (a.plateHash !== b.plateHash) {
      continue; // chain boundary
    }
    if (a.epochSec === b.epochSec) {
      tally.ambiguousTies += 1;
    }
    const pair = `${a.gantryId}|${b.gantryId}`;
    const dtSec = b.epochSec - a.epochSec;

    const segment = segmentByPair.get(pair);
    if (segment !== undefined) {
      // dt of zero gives Infinity (or NaN on zero-length segments); the band drops both
      const speedKmh = (segment.lengthKm * 3600) / dtSec;
      if (speedKmh >= opts.minSpeedKmh && speedKmh <= opts.maxSpeedKmh) {
        const w = windowIndex(grid, b.epochSec); // attributed downstream
        bump(tally.speedSums.get(segment.id)!, w, speedKmh);
        bump(tally.speedCounts.get(segment.id)!, w, 1);
      }
    }

    const movement = movementByPair.get(pair);
    if (movement !== undefined && dtSec <= opts.maxTransitSec) {
      // consecutive passages by construction, so no other gantry intervened;
      // counted where the vehicle entered the movement
      bump(tally.rampCounts.get(movement.id)!, windowIndex(grid, a.epochSec), 1);
    }
  }
  return tally;
}

function addInto(target: Map<string, Float64Array>, source: Map<string, Float64Array>): void {
  for (const [key, values] of source) {
    const acc = target.get(key);
    if (acc === undefined) {
      throw new PipelineError(`cannot merge tallies with different key sets ('${key}')`);
    }
    for (let w = 0; w < values.length; w++) {
      bump(acc, w, values[w]!);
    }
  }
}

/** Merge two tallies over the same grid and key sets by elementwise addition. */
export function mergeTallies(a: Tally, b: Tally): Tally {
  if (!sameGrid(a.grid, b.grid)) {
    throw new PipelineError('cannot merge tallies computed on different window grids');
  }
  for (const [name, left, right] of [
    ['volumes', a.volumes, b.volumes],
    ['speedSums', a.speedSums, b.speedSums],
    ['speedCounts', a.speedCounts, b.speedCounts],
    ['rampCounts', a.rampCounts, b.rampCounts],
  ] as const) {
    if (left.size !== right.size) {
      throw new PipelineError(`cannot merge tallies with different ${name} key sets`);
    }
  }
  const merged = structuredClone(a);
  addInto(merged.volumes, b.volumes);
  addInto(merged.speedSums, b.speedSums);
  addInto(merged.speedCounts, b.speedCounts);
  addInto(merged.rampCounts, b.rampCounts);
  merged.ambiguousTies = a.ambiguousTies + b.ambiguousTies;
  return merged;
}

/** Dense per-id window series, every cell present. */
export interface WindowSeries {
  grid: WindowGrid;
  values: Map<string, number[]>;
}

export function finalizeVolumes(tally: Tally): WindowSeries {
  const values = new Map<string, number[]>();
  for (const [gantryId, counts] of tally.volumes) {
    values.set(gantryId, Array.from(counts));
  }
  return { grid: tally.grid, values };
}

/** Per-window mean of matched vehicle speeds; empty windows carry the last
 * seen mean forward and leading gaps get the default speed. */
export function finalizeSpeeds(
  tally: Tally,
  defaultSpeedKmh: number = DEFAULT_SPEED_KMH,
  warn: (message: string) => void = () => undefined
): WindowSeries {
  const values = new Map<string, number[]>();
  for (const [segmentId, sums] of tally.speedSums) {
    const counts = tally.speedCounts.get(segmentId)!;
    const series = new Array<number>(tally.grid.nWindows);
    let last = defaultSpeedKmh;
    let matched = false;
    for (let w = 0; w < series.length; w++) {
      if (counts[w]! > 0) {
        last = sums[w]! / counts[w]!;
        matched = true;
      }
      series[w] = last;
    }
    if (!matched) {
      warn(`segment ${segmentId} matched no vehicles; writing ${defaultSpeedKmh} km/h throughout`);
    }
    values.set(segmentId, series);
  }
  return { grid: tally.grid, values };
}

export function finalizeRamps(tally: Tally): WindowSeries {
  const values = new Map<string, number[]>();
  for (const [movementId, counts] of tally.rampCounts) {
    values.set(movementId, Array.from(counts));
  }
  return { grid: tally.grid, values };
}

/** Split cleaned records into plate-complete shards for parallel derivation. */
export function shardByPlate(records: readonly Passage[], nShards: number): Passage[][] {
  if (!Number.isInteger(nShards) || nShards <= 0) {
    throw new PipelineError(`shard count must be a positive integer, got ${nShards}`);
  }
  const shards: Passage[][] = Array.from({ length: nShards }, () => []);
  for (const r of records) {
    let hash = 5381;
    for (let i = 0; i < r.plateHash.length; i++) {
      hash = ((hash << 5) + hash + r.plateHash.charCodeAt(i)) | 0;
    }
    shards[Math.abs(hash) % nShards]!.push(r);
  }
  return shards;
}
