/** Domain types and input schemas: gantries, passages, the interchange spec. */

import { z } from 'zod';
import { PipelineError } from './errors';

// identifiers end up unquoted in CSV output, so keep them delimiter-free
export const ID_RE = /^[A-Za-z0-9_.:-]+$/;

export interface Gantry {
  gantryId: string;
  name: string;
  roadId: string;
  direction: 'up' | 'down';
  kmMarker: number;
  lat: number;
  lon: number;
  operator: string;
}

/** One joined toll transaction: a plate seen at a known gantry. */
export interface Passage {
  plateHash: string;
  gantryId: string;
  epochSec: number;
}

/** One transaction row that never made it into the record stream. */
export interface Reject {
  row: number; // 1-based data row index in transactions.csv
  reason: string;
  plate_hash: string;
  gantry_id: string;
  passage_time: string;
}

export interface Movement {
  id: string;
  upstream: string;
  downstream: string;
  label: string;
}

/** Interchange structure: gantry ids acting as directions, plus ramp movements. */
export interface InterchangeSpec {
  name: string;
  intervalSec: number;
  directions: string[];
  movements: Movement[];
}

const numField = z
  .string()
  .trim()
  .refine((s) => s.length > 0 && Number.isFinite(Number(s)), { message: 'must be a finite number' })
  .transform(Number);

const idField = z.string().trim().min(1).regex(ID_RE, 'has characters unsafe for CSV ids');

export const GantryRowSchema = z.strictObject({
  gantry_id: idField,
  name: z.string(),
  road_id: z.string().trim().min(1),
  direction: z.string().trim().pipe(z.enum(['up', 'down'])),
  km_marker: numField,
  lat: numField,
  lon: numField,
  operator: z.string(),
});

const MovementSchema = z.object({
  id: idField,
  upstream: z.string().min(1),
  downstream: z.string().min(1),
  label: z.string().default(''),
});

const SpecSchema = z.object({
  name: z.string().min(1),
  interval_sec: z.number().int().positive(),
  directions: z.array(idField).min(2),
  movements: z.array(MovementSchema).min(1),
});

export function describeIssues(error: z.ZodError): string {
  return error.issues.map((i) => `${i.path.join('.') || '(root)'}: ${i.message}`).join('; ');
}

/** Validate a parsed spec document; throws PipelineError with the violation list. */
export function validateSpec(doc: unknown, source: string): InterchangeSpec {
  const parsed = SpecSchema.safeParse(doc);
  if (!parsed.success) {
    throw new PipelineError(`${source}: ${describeIssues(parsed.error)}`);
  }
  const { name, interval_sec, directions, movements } = parsed.data;
  const violations: string[] = [];
  if (new Set(directions).size !== directions.length) {
    violations.push('direction identifiers must be unique');
  }
  const ids = movements.map((m) => m.id);
  if (new Set(ids).size !== ids.length) {
    violations.push('movement identifiers must be unique');
  }
  const known = new Set(directions);
  for (const m of movements) {
    if (m.upstream === m.downstream) {
      violations.push(`movement '${m.id}': upstream and downstream must differ`);
    }
    for (const [end, which] of [
      [m.upstream, 'upstream'],
      [m.downstream, 'downstream'],
    ] as const) {
      if (!known.has(end)) {
        violations.push(`movement '${m.id}' references unknown ${which} direction '${end}'`);
      }
    }
  }
  if (violations.length > 0) {
    throw new PipelineError(`${source}: ${violations.join('; ')}`);
  }
  return { name, intervalSec: interval_sec, directions, movements };
}
