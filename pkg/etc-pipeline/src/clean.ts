/** Record cleaning: study-period filter, same-second dedup, canonical order.
 *
 * Cleaning is idempotent, so merging independently cleaned shards is just
 * concatenating them and cleaning once more.
 */

import { Passage } from './types';
import { WindowGrid, inPeriod } from './time';

export interface CleanResult {
  records: Passage[];
  droppedOutOfPeriod: number;
  droppedDuplicates: number;
}

function byPlateTimeGantry(a: Passage, b: Passage): number {
  if (a.plateHash !== b.plateHash) {
    return a.plateHash < b.plateHash ? -1 : 1;
  }
  if (a.epochSec !== b.epochSec) {
    return a.epochSec - b.epochSec;
  }
  // same-second ties get a deterministic order so reruns and shards agree
  if (a.gantryId !== b.gantryId) {
    return a.gantryId < b.gantryId ? -1 : 1;
  }
  return 0;
}

/** Drop out-of-period records, collapse (plate, gantry, second) duplicates,
 * and sort by (plate, passage time). */
export function cleanRecords(records: readonly Passage[], grid: WindowGrid): CleanResult {
  const inside = records.filter((r) => inPeriod(grid, r.epochSec));
  const droppedOutOfPeriod = records.length - inside.length;
  inside.sort(byPlateTimeGantry);
  const kept: Passage[] = [];
  for (const r of inside) {
    const prev = kept[kept.length - 1];
    const isDuplicate =
      prev !== undefined &&
      prev.plateHash === r.plateHash &&
      prev.gantryId === r.gantryId &&
      prev.epochSec === r.epochSec;
    if (!isDuplicate) {
      kept.push(r);
    }
  }
  return {
    records: kept,
    droppedOutOfPeriod,
    droppedDuplicates: inside.length - kept.length,
  };
}

/** Merge independently parsed or cleaned record batches into one clean set. */
export function mergeCleaned(batches: readonly (readonly Passage[])[], grid: WindowGrid): CleanResult {
  return cleanRecords(batches.flat(), grid);
}
