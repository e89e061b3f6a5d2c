/** Dataset directory output: meta.json plus dense long-format CSV grids.
 *
 * The layout matches the forecasting library's dataset loader: one
 * mainline.csv row per (timestamp, gantry) with volume and speed columns,
 * one ramp.csv row per (timestamp, movement) with volume, timestamps in
 * second-precision ISO form without a zone suffix.
 */

import { mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';
import { WindowSeries } from './aggregate';
import { PipelineError } from './errors';
import { Segment } from './segments';
import { WindowGrid, formatIso, sameGrid, windowStarts } from './time';
import { InterchangeSpec } from './types';

export interface RenderedDataset {
  meta: string;
  mainline: string;
  ramp: string;
}

/** Map each gantry to the segment series that describes traffic at it:
 * the segment arriving at the gantry, else the one leaving it. */
function gantrySegment(gantryId: string, segments: readonly Segment[]): Segment | undefined {
  return (
    segments.find((s) => s.toId === gantryId) ?? segments.find((s) => s.fromId === gantryId)
  );
}

/** Render the three dataset files as strings; all series must share the grid. */
export function renderDataset(
  spec: InterchangeSpec,
  grid: WindowGrid,
  volumes: WindowSeries,
  speeds: WindowSeries,
  ramps: WindowSeries,
  segments: readonly Segment[],
  defaultSpeedKmh: number,
  warn: (message: string) => void = () => undefined
): RenderedDataset {
  for (const [name, series] of [
    ['volume', volumes],
    ['speed', speeds],
    ['ramp', ramps],
  ] as const) {
    if (!sameGrid(series.grid, grid)) {
      throw new PipelineError(`cannot export: ${name} series was computed on a different grid`);
    }
  }
  for (const g of spec.directions) {
    if (!volumes.values.has(g)) {
      throw new PipelineError(`cannot export: no volume series for direction '${g}'`);
    }
  }
  for (const m of spec.movements) {
    if (!ramps.values.has(m.id)) {
      throw new PipelineError(`cannot export: no ramp series for movement '${m.id}'`);
    }
  }

  const defaultRow = new Array<number>(grid.nWindows).fill(defaultSpeedKmh);
  const speedByGantry = new Map<string, number[]>();
  for (const g of spec.directions) {
    const segment = gantrySegment(g, segments);
    const series = segment === undefined ? undefined : speeds.values.get(segment.id);
    if (series === undefined) {
      warn(`gantry ${g} lies on no segment; writing ${defaultSpeedKmh} km/h throughout`);
      speedByGantry.set(g, defaultRow);
    } else {
      speedByGantry.set(g, series);
    }
  }

  const meta = {
    interchange: {
      name: spec.name,
      interval_sec: grid.intervalSec,
      directions: spec.directions,
      movements: spec.movements.map((m) => ({
        id: m.id,
        upstream: m.upstream,
        downstream: m.downstream,
        label: m.label,
      })),
    },
    interval_sec: grid.intervalSec,
    channels: ['volume', 'speed', 'time_of_day', 'day_of_week'],
  };

  const stamps = windowStarts(grid).map(formatIso);
  const mainline = ['timestamp,gantry_id,volume,speed'];
  for (let w = 0; w < grid.nWindows; w++) {
    for (const g of spec.directions) {
      mainline.push(`${stamps[w]},${g},${volumes.values.get(g)![w]},${speedByGantry.get(g)![w]}`);
    }
  }
  const ramp = ['timestamp,movement_id,volume'];
  for (let w = 0; w < grid.nWindows; w++) {
    for (const m of spec.movements) {
      ramp.push(`${stamps[w]},${m.id},${ramps.values.get(m.id)![w]}`);
    }
  }
  return {
    meta: JSON.stringify(meta, null, 2) + '\n',
    mainline: mainline.join('\n') + '\n',
    ramp: ramp.join('\n') + '\n',
  };
}

export interface DatasetPaths {
  metaPath: string;
  mainlinePath: string;
  rampPath: string;
}

/** Write a rendered dataset into outDir, creating it if needed. */
export function writeDataset(outDir: string, rendered: RenderedDataset): DatasetPaths {
  mkdirSync(outDir, { recursive: true });
  const paths = {
    metaPath: join(outDir, 'meta.json'),
    mainlinePath: join(outDir, 'mainline.csv'),
    rampPath: join(outDir, 'ramp.csv'),
  };
  writeFileSync(paths.metaPath, rendered.meta, 'utf-8');
  writeFileSync(paths.mainlinePath, rendered.mainline, 'utf-8');
  writeFileSync(paths.rampPath, rendered.ramp, 'utf-8');
  return paths;
}
