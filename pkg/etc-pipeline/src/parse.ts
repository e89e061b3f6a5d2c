/** Input parsing: the gantry table and the raw transaction log.
 *
 * Gantry rows are reference data, so any malformed row is a hard failure.
 * Transaction rows are field data: each bad row goes to the rejection log
 * with a reason and parsing carries on, unless more than half the rows are
 * bad, which points at a malformed file rather than noisy data.
 */

import { readFileSync } from 'fs';
import Papa from 'papaparse';
import { PipelineError } from './errors';
import { parseIsoSeconds } from './time';
import { Gantry, GantryRowSchema, Passage, Reject, describeIssues } from './types';

export function readText(path: string): string {
  try {
    return readFileSync(path, 'utf-8');
  } catch (err) {
    throw new PipelineError(`cannot read ${path}: ${(err as Error).message}`);
  }
}

interface RawTable {
  fields: string[];
  rows: Record<string, string | undefined>[];
}

function parseCsv(text: string, source: string): RawTable {
  const result = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: 'greedy',
  });
  const fatal = result.errors.find((e) => e.type === 'Delimiter');
  if (fatal !== undefined || result.meta.fields === undefined) {
    throw new PipelineError(`${source}: cannot parse as CSV`);
  }
  return { fields: result.meta.fields, rows: result.data };
}

function checkHeader(fields: string[], expected: string[], source: string): void {
  const got = new Set(fields);
  const want = new Set(expected);
  const missing = expected.filter((f) => !got.has(f));
  const extra = fields.filter((f) => !want.has(f));
  if (missing.length > 0 || extra.length > 0) {
    const parts: string[] = [];
    if (missing.length > 0) parts.push(`missing columns [${missing.join(', ')}]`);
    if (extra.length > 0) parts.push(`unexpected columns [${extra.join(', ')}]`);
    throw new PipelineError(`${source}: header does not match schema: ${parts.join('; ')}`);
  }
}

const GANTRY_FIELDS = ['gantry_id', 'name', 'road_id', 'direction', 'km_marker', 'lat', 'lon', 'operator'];

/** Parse gantries.csv text into a validated table. */
export function parseGantries(text: string, source = 'gantries.csv'): Gantry[] {
  const { fields, rows } = parseCsv(text, source);
  checkHeader(fields, GANTRY_FIELDS, source);
  const gantries: Gantry[] = [];
  const seen = new Set<string>();
  rows.forEach((row, i) => {
    const parsed = GantryRowSchema.safeParse(row);
    if (!parsed.success) {
      throw new PipelineError(`${source} row ${i + 1}: ${describeIssues(parsed.error)}`);
    }
    const g = parsed.data;
    if (seen.has(g.gantry_id)) {
      throw new PipelineError(`${source} row ${i + 1}: duplicate gantry_id '${g.gantry_id}'`);
    }
    seen.add(g.gantry_id);
    gantries.push({
      gantryId: g.gantry_id,
      name: g.name,
      roadId: g.road_id,
      direction: g.direction,
      kmMarker: g.km_marker,
      lat: g.lat,
      lon: g.lon,
      operator: g.operator,
    });
  });
  if (gantries.length === 0) {
    throw new PipelineError(`${source}: no gantry rows`);
  }
  return gantries;
}

const TRANSACTION_FIELDS = ['plate_hash', 'gantry_id', 'passage_time'];

export interface ParsedTransactions {
  passages: Passage[];
  rejects: Reject[];
  totalRows: number;
}

/** Parse transactions.csv text and join each row to its gantry.
 *
 * Unknown gantries are quarantined and malformed rows rejected, one log
 * entry per row; row numbers are 1-based data row indices.
 */
export function parseTransactions(
  text: string,
  gantryIds: ReadonlySet<string>,
  source = 'transactions.csv'
): ParsedTransactions {
  const { fields, rows } = parseCsv(text, source);
  checkHeader(fields, TRANSACTION_FIELDS, source);
  const passages: Passage[] = [];
  const rejects: Reject[] = [];
  rows.forEach((row, i) => {
    const plate = (row.plate_hash ?? '').trim();
    const gantry = (row.gantry_id ?? '').trim();
    const time = (row.passage_time ?? '').trim();
    const reject = (reason: string) => {
      rejects.push({ row: i + 1, reason, plate_hash: plate, gantry_id: gantry, passage_time: time });
    };
    if ('__parsed_extra' in row) {
      reject('bad_row');
      return;
    }
    if (plate.length === 0) {
      reject('bad_plate');
      return;
    }
    if (gantry.length === 0) {
      reject('bad_gantry');
      return;
    }
    const epochSec = parseIsoSeconds(time);
    if (epochSec === null) {
      reject('bad_timestamp');
      return;
    }
    if (!gantryIds.has(gantry)) {
      reject('unknown_gantry');
      return;
    }
    passages.push({ plateHash: plate, gantryId: gantry, epochSec });
  });
  if (rows.length > 0 && rejects.length * 2 > rows.length) {
    throw new PipelineError(
      `${source}: ${rejects.length} of ${rows.length} rows rejected; refusing to continue`
    );
  }
  return { passages, rejects, totalRows: rows.length };
}

export interface ParsedInputs {
  gantries: Gantry[];
  passages: Passage[];
  rejects: Reject[];
  totalRows: number;
}

/** Read and parse both input files from disk. */
export function parseInputs(gantriesPath: string, transactionsPath: string): ParsedInputs {
  const gantries = parseGantries(readText(gantriesPath), gantriesPath);
  const ids = new Set(gantries.map((g) => g.gantryId));
  const { passages, rejects, totalRows } = parseTransactions(
    readText(transactionsPath),
    ids,
    transactionsPath
  );
  return { gantries, passages, rejects, totalRows };
}
