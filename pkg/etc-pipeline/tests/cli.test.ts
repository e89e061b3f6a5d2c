/** Command-line behavior (exit codes, artifacts) and interop: the exported
 * dataset must load in the forecasting library with zero warnings and
 * survive its save/load round-trip with identical tensors.
 */

import { execFileSync, spawnSync } from 'child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { beforeAll, describe, expect, test } from 'vitest';
import { runPipeline } from '../src/pipeline';

const ROOT = process.cwd();
const CLI = join(ROOT, 'dist', 'cli.js');
const FIXTURE = join(ROOT, 'tests', 'fixtures', 'golden');

const GOLDEN_ARGS = [
  '--gantries', join(FIXTURE, 'gantries.csv'),
  '--transactions', join(FIXTURE, 'transactions.csv'),
  '--spec', join(FIXTURE, 'spec.json'),
  '--interval-sec', '300',
  '--start', '2020-09-07T08:00:00',
  '--end', '2020-09-07T09:00:00',
];

function runCli(args: string[]): { status: number | null; stdout: string; stderr: string } {
  const result = spawnSync('node', [CLI, ...args], { encoding: 'utf-8' });
  return { status: result.status, stdout: result.stdout, stderr: result.stderr };
}

beforeAll(() => {
  execFileSync(join(ROOT, 'node_modules', '.bin', 'tsc'), ['-p', 'tsconfig.json'], { cwd: ROOT });
});

describe('cli', () => {
  test('golden run exits 0 and writes the dataset artifacts', () => {
    const out = mkdtempSync(join(tmpdir(), 'etc-cli-'));
    const { status, stdout } = runCli([...GOLDEN_ARGS, '--out', out]);
    expect(status).toBe(0);
    expect(stdout).toContain('[parse] 30 transaction rows: 28 joined, 2 logged');
    expect(stdout).toContain('[clean] 24 records kept');
    const mainline = readFileSync(join(out, 'mainline.csv'), 'utf-8');
    expect(mainline.trimEnd().split('\n').length).toBe(1 + 12 * 4);
    const rejects = readFileSync(join(out, 'rejects.jsonl'), 'utf-8').trimEnd().split('\n');
    expect(rejects.map((line) => JSON.parse(line).reason)).toEqual([
      'bad_timestamp',
      'unknown_gantry',
    ]);
  });

  test('exits 2 on a missing input file', () => {
    const out = mkdtempSync(join(tmpdir(), 'etc-cli-'));
    const args = [...GOLDEN_ARGS, '--out', out];
    args[1] = join(FIXTURE, 'no-such.csv');
    const { status, stderr } = runCli(args);
    expect(status).toBe(2);
    expect(stderr).toContain('error: cannot read');
  });

  test('exits 2 when most transaction rows are malformed', () => {
    const dir = mkdtempSync(join(tmpdir(), 'etc-cli-'));
    const bad = join(dir, 'transactions.csv');
    writeFileSync(
      bad,
      'plate_hash,gantry_id,passage_time\nP1,A-in,2020-09-07T08:00:00\nP2,A-in,junk\nP3,A-in,junk\n'
    );
    const args = [...GOLDEN_ARGS, '--out', join(dir, 'out')];
    args[3] = bad;
    const { status, stderr } = runCli(args);
    expect(status).toBe(2);
    expect(stderr).toContain('refusing to continue');
  });

  test('exits 2 on an inverted study period', () => {
    const out = mkdtempSync(join(tmpdir(), 'etc-cli-'));
    const args = [...GOLDEN_ARGS, '--out', out];
    args[9] = '2020-09-07T10:00:00'; // start after end
    const { status, stderr } = runCli(args);
    expect(status).toBe(2);
    expect(stderr).toContain('end after it starts');
  });

  test('exits 2 when the interval does not divide the period', () => {
    const out = mkdtempSync(join(tmpdir(), 'etc-cli-'));
    const args = [...GOLDEN_ARGS, '--out', out];
    args[7] = '420';
    const { status, stderr } = runCli(args);
    expect(status).toBe(2);
    expect(stderr).toContain('whole number');
  });

  test('exits 2 on a malformed speed band or unknown flag', () => {
    const out = mkdtempSync(join(tmpdir(), 'etc-cli-'));
    expect(runCli([...GOLDEN_ARGS, '--out', out, '--speed-band', 'fast']).status).toBe(2);
    expect(runCli([...GOLDEN_ARGS, '--out', out, '--turbo']).status).toBe(2);
  });
});

describe('dense export arithmetic', () => {
  test('one day of 5-min windows over 8 gantries makes 288x8 mainline rows', () => {
    const dir = mkdtempSync(join(tmpdir(), 'etc-dense-'));
    const ids = ['G1', 'G2', 'G3', 'G4', 'G5', 'G6', 'G7', 'G8'];
    const gantryLines = ids.map(
      (g, i) => `${g},${g} gate,R,up,${10 + 4 * i},30.0,118.0,Op`
    );
    writeFileSync(
      join(dir, 'gantries.csv'),
      'gantry_id,name,road_id,direction,km_marker,lat,lon,operator\n' + gantryLines.join('\n') + '\n'
    );
    writeFileSync(
      join(dir, 'transactions.csv'),
      'plate_hash,gantry_id,passage_time\n' +
        'P1,G1,2020-09-07T00:10:00\nP1,G2,2020-09-07T00:12:30\nP2,G5,2020-09-07T12:00:00\n'
    );
    writeFileSync(
      join(dir, 'spec.json'),
      JSON.stringify({
        name: 'row-arithmetic',
        interval_sec: 300,
        directions: ids,
        movements: [{ id: 'thru', upstream: 'G1', downstream: 'G8', label: '' }],
      })
    );
    const result = runPipeline({
      gantriesPath: join(dir, 'gantries.csv'),
      transactionsPath: join(dir, 'transactions.csv'),
      specPath: join(dir, 'spec.json'),
      intervalSec: 300,
      start: '2020-09-07T00:00:00',
      end: '2020-09-08T00:00:00',
      outDir: join(dir, 'out'),
    });
    const mainline = readFileSync(result.paths.mainlinePath, 'utf-8');
    expect(mainline.trimEnd().split('\n').length).toBe(1 + 288 * 8);
    const ramp = readFileSync(result.paths.rampPath, 'utf-8');
    expect(ramp.trimEnd().split('\n').length).toBe(1 + 288 * 1);
    // empty movement still gets a dense all-zero series
    expect(result.ramps.values.get('thru')).toEqual(new Array(288).fill(0));
  });
});

describe('interop with the forecasting library', () => {
  const PY_CHECK = `
import sys, warnings
warnings.simplefilter("error")
import numpy as np
from ramp_stdae.dataset import load_dataset, save_dataset

src, dst = sys.argv[1], sys.argv[2]
spec, mainline, ramps = load_dataset(src)
assert mainline.values.shape == (12, 4, 4), mainline.values.shape
assert ramps.values.shape == (12, 2, 1), ramps.values.shape
assert float(mainline.values[0, 1, 1]) == 90.0, "90 km/h cell"
save_dataset(dst, spec, mainline, ramps)
spec2, mainline2, ramps2 = load_dataset(dst)
assert spec2 == spec
assert np.array_equal(mainline.timestamps, mainline2.timestamps)
assert np.array_equal(mainline.values, mainline2.values)
assert np.array_equal(ramps.timestamps, ramps2.timestamps)
assert np.array_equal(ramps.values, ramps2.values)
print("interop-ok")
`;

  test('pipeline output loads with zero warnings and round-trips to identical tensors', () => {
    const out = mkdtempSync(join(tmpdir(), 'etc-interop-'));
    const { status } = runCli([...GOLDEN_ARGS, '--out', out]);
    expect(status).toBe(0);
    const roundTrip = mkdtempSync(join(tmpdir(), 'etc-interop-rt-'));
    const py = spawnSync('python3', ['-c', PY_CHECK, out, roundTrip], { encoding: 'utf-8' });
    expect(py.stderr).toBe('');
    expect(py.status).toBe(0);
    expect(py.stdout).toContain('interop-ok');
    console.log(
      'PASS interop: dataset loads in the forecasting library with zero warnings; ' +
        'save/load round-trip tensors identical'
    );
  });
});
