/** Mainline segments: km-consecutive gantry pairs on one road and direction. */

import { Gantry } from './types';

export interface Segment {
  id: string;
  fromId: string;
  toId: string;
  lengthKm: number;
  roadId: string;
  direction: 'up' | 'down';
}

/** Derive segments from the gantry table, ordered the way traffic flows:
 * km ascending for 'up' roads, descending for 'down'. */
export function deriveSegments(gantries: readonly Gantry[]): Segment[] {
  const chains = new Map<string, Gantry[]>();
  for (const g of gantries) {
    const key = `${g.roadId}|${g.direction}`;
    const chain = chains.get(key);
    if (chain === undefined) {
      chains.set(key, [g]);
    } else {
      chain.push(g);
    }
  }
  const segments: Segment[] = [];
  for (const key of [...chains.keys()].sort()) {
    const chain = chains.get(key)!;
    chain.sort((a, b) =>
      a.direction === 'up' ? a.kmMarker - b.kmMarker : b.kmMarker - a.kmMarker
    );
    for (let i = 0; i + 1 < chain.length; i++) {
      const from = chain[i]!;
      const to = chain[i + 1]!;
      segments.push({
        id: `${from.gantryId}->${to.gantryId}`,
        fromId: from.gantryId,
        toId: to.gantryId,
        lengthKm: Math.abs(to.kmMarker - from.kmMarker),
        roadId: from.roadId,
        direction: from.direction,
      });
    }
  }
  return segments;
}
