/** Second-precision UTC timestamps and the fixed analysis window grid. */

import { PipelineError } from './errors';

// date and clock parts, 'T' or ' ' separator, optional trailing 'Z'
const ISO_RE = /^(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2}):(\d{2})Z?$/;

/** Parse an ISO-8601 second-precision timestamp to epoch seconds, or null. */
export function parseIsoSeconds(text: string): number | null {
  const m = ISO_RE.exec(text.trim());
  if (m === null) {
    return null;
  }
  const year = Number(m[1]);
  const month = Number(m[2]);
  const day = Number(m[3]);
  const hour = Number(m[4]);
  const minute = Number(m[5]);
  const second = Number(m[6]);
  if (hour > 23 || minute > 59 || second > 59) {
    return null;
  }
  const epochMs = Date.UTC(year, month - 1, day, hour, minute, second);
  // Date.UTC rolls impossible dates over (Feb 30 becomes Mar 1); reject those
  const roundTrip = new Date(epochMs);
  if (
    roundTrip.getUTCFullYear() !== year ||
    roundTrip.getUTCMonth() !== month - 1 ||
    roundTrip.getUTCDate() !== day
  ) {
    return null;
  }
  return epochMs / 1000;
}

/** Format epoch seconds as YYYY-MM-DDTHH:MM:SS (UTC, no zone suffix). */
export function formatIso(epochSec: number): string {
  const d = new Date(epochSec * 1000);
  const pad = (n: number) => String(n).padStart(2, '0');
  const date = `${d.getUTCFullYear()}-${pad(d.getUTCMonth() + 1)}-${pad(d.getUTCDate())}`;
  const clock = `${pad(d.getUTCHours())}:${pad(d.getUTCMinutes())}:${pad(d.getUTCSeconds())}`;
  return `${date}T${clock}`;
}

/** Left-closed right-open windows tiling [startSec, endSec) at a fixed step. */
export interface WindowGrid {
  readonly startSec: number;
  readonly endSec: number;
  readonly intervalSec: number;
  readonly nWindows: number;
}

export function makeGrid(startSec: number, endSec: number, intervalSec: number): WindowGrid {
  if (!Number.isInteger(intervalSec) || intervalSec <= 0) {
    throw new PipelineError(`interval must be a positive whole number of seconds, got ${intervalSec}`);
  }
  if (endSec <= startSec) {
    throw new PipelineError('study period must end after it starts');
  }
  const span = endSec - startSec;
  if (span % intervalSec !== 0) {
    throw new PipelineError(
      `study period of ${span} s is not a whole number of ${intervalSec} s windows`
    );
  }
  return { startSec, endSec, intervalSec, nWindows: span / intervalSec };
}

/** Window index of an in-period instant; the boundary belongs to the window it opens. */
export function windowIndex(grid: WindowGrid, epochSec: number): number {
  return Math.floor((epochSec - grid.startSec) / grid.intervalSec);
}

export function inPeriod(grid: WindowGrid, epochSec: number): boolean {
  return epochSec >= grid.startSec && epochSec < grid.endSec;
}

export function windowStarts(grid: WindowGrid): number[] {
  const starts = new Array<number>(grid.nWindows);
  for (let w = 0; w < grid.nWindows; w++) {
    starts[w] = grid.startSec + w * grid.intervalSec;
  }
  return starts;
}

export function sameGrid(a: WindowGrid, b: WindowGrid): boolean {
  return a.startSec === b.startSec && a.endSec === b.endSec && a.intervalSec === b.intervalSec;
}
