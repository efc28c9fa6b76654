import { describe, expect, it } from 'vitest';

import { SchemaError, emitDetections, mulberry32, validateDetectionLine } from '../src/emit.js';

function truthLines(ticks: number, callsigns = ['AAA111']): string[] {
  const lines: string[] = [];
  for (let t = 0; t < ticks; t++) {
    const sweep = 3 * (t % 500); // stays inside the 1920 px frame
    for (const [i, callsign] of callsigns.entries()) {
      lines.push(
        JSON.stringify({
          t,
          callsign,
          lat: 1.35,
          lon: 103.99,
          speed_kn: 5.0,
          heading: 90.0,
          region: 'TA',
          box: [100 + sweep + 200 * i, 400, 180 + sweep + 200 * i, 440],
        }),
      );
    }
  }
  return lines;
}

describe('emitDetections', () => {
  it('produces one valid line per tick for a 60-frame truth file', () => {
    const lines = emitDetections(truthLines(60), { seed: 5 });
    expect(lines).toHaveLength(60);
    lines.forEach((line, i) => {
      const frame = validateDetectionLine(line, i + 1);
      expect(frame.t).toBe(i);
      expect(frame.detections).toHaveLength(1);
    });
  });

  it('is deterministic for a fixed seed and differs across seeds', () => {
    const a = emitDetections(truthLines(30), { seed: 9, jitterPx: 2.0 });
    const b = emitDetections(truthLines(30), { seed: 9, jitterPx: 2.0 });
    const c = emitDetections(truthLines(30), { seed: 10, jitterPx: 2.0 });
    expect(a).toEqual(b);
    expect(a).not.toEqual(c);
  });

  it('applies dropout roughly at the configured rate', () => {
    const lines = emitDetections(truthLines(1000), { seed: 3, dropout: 0.1 });
    const empty = lines.filter((l) => JSON.parse(l).detections.length === 0).length;
    expect(empty).toBeGreaterThanOrEqual(70);
    expect(empty).toBeLessThanOrEqual(130);
  });

  it('skips records without boxes', () => {
    const lines = [
      JSON.stringify({ t: 0, callsign: 'X', box: null }),
      JSON.stringify({ t: 1, callsign: 'X', box: [10, 10, 40, 30] }),
    ];
    const out = emitDetections(lines, { jitterPx: 0 });
    expect(JSON.parse(out[0]).detections).toHaveLength(0);
    expect(JSON.parse(out[1]).detections).toHaveLength(1);
  });

  it('clips jittered boxes into the frame', () => {
    const lines = [JSON.stringify({ t: 0, callsign: 'X', box: [-5, -5, 40, 30] })];
    const out = emitDetections(lines, { jitterPx: 0 });
    const det = JSON.parse(out[0]).detections[0];
    expect(det.box[0]).toBeGreaterThanOrEqual(0);
    expect(det.box[1]).toBeGreaterThanOrEqual(0);
  });

  it('rejects malformed truth input', () => {
    expect(() => emitDetections(['{"t": 0}'])).toThrow(SchemaError);
    expect(() => emitDetections(['not json'])).toThrow(SchemaError);
  });
});

describe('validateDetectionLine', () => {
  it('rejects inverted box ordering', () => {
    const line = JSON.stringify({
      t: 0,
      detections: [{ box: [50, 10, 40, 30], conf: 0.9 }],
    });
    expect(() => validateDetectionLine(line)).toThrow(SchemaError);
  });

  it('rejects out-of-range confidence', () => {
    const line = JSON.stringify({
      t: 0,
      detections: [{ box: [10, 10, 40, 30], conf: 1.5 }],
    });
    expect(() => validateDetectionLine(line)).toThrow(SchemaError);
  });

  it('accepts a well-formed frame', () => {
    const line = JSON.stringify({
      t: 2,
      detections: [{ box: [10, 10, 40, 30], conf: 0.97 }],
    });
    expect(validateDetectionLine(line).detections).toHaveLength(1);
  });
});

describe('mulberry32', () => {
  it('streams identically for identical seeds', () => {
    const a = mulberry32(123);
    const b = mulberry32(123);
    for (let i = 0; i < 100; i++) {
      expect(a()).toBe(b());
    }
  });

  it('stays in [0, 1)', () => {
    const rng = mulberry32(77);
    for (let i = 0; i < 1000; i++) {
      const v = rng();
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(1);
    }
  });
});
