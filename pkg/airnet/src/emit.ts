/** Detection-stream adapter: turn ground-truth records into the engine's
 * detection JSONL format, optionally perturbing boxes like a real detector
 * (jitter and dropout from a seeded generator).
 */

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'SchemaError';
  }
}

export interface EmitOptions {
  jitterPx: number;
  dropout: number;
  seed: number;
  frameWidth: number;
  frameHeight: number;
}

export const DEFAULT_EMIT_OPTIONS: EmitOptions = {
  jitterPx: 1.5,
  dropout: 0.0,
  seed: 1,
  frameWidth: 1920,
  frameHeight: 1080,
};

/** Small deterministic PRNG (mulberry32). */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(rng: () => number): number {
  // Box-Muller; rng never returns exactly 0 thanks to the +1 offsets below.
  const u = rng() + 1e-12;
  const v = rng();
  return Math.sqrt(-2.0 * Math.log(u)) * Math.cos(2.0 * Math.PI * v);
}

interface TruthRecord {
  t: number;
  callsign: string;
  box: [number, number, number, number] | null;
}

function parseTruthLine(line: string, lineno: number): TruthRecord {
  let obj: any;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new SchemaError(`truth line ${lineno}: invalid JSON`);
  }
  if (typeof obj.t !== 'number' || typeof obj.callsign !== 'string') {
    throw new SchemaError(`truth line ${lineno}: missing t/callsign`);
  }
  let box: TruthRecord['box'] = null;
  if (obj.box != null) {
    if (!Array.isArray(obj.box) || obj.box.length !== 4) {
      throw new SchemaError(`truth line ${lineno}: box must be 4 numbers`);
    }
    box = obj.box.map(Number) as [number, number, number, number];
  }
  return { t: obj.t, callsign: obj.callsign, box };
}

export interface DetectionRecord {
  box: [number, number, number, number];
  conf: number;
}

export function validateDetectionLine(line: string, lineno = 0): {
  t: number;
  detections: DetectionRecord[];
} {
  let obj: any;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new SchemaError(`detections line ${lineno}: invalid JSON`);
  }
  if (typeof obj.t !== 'number' || !Array.isArray(obj.detections)) {
    throw new SchemaError(`detections line ${lineno}: need numeric t and detections array`);
  }
  for (const det of obj.detections) {
    const box = det.box;
    if (!Array.isArray(box) || box.length !== 4 || box.some((v: unknown) => typeof v !== 'number')) {
      throw new SchemaError(`detections line ${lineno}: box must be 4 numbers`);
    }
    if (!(box[0] < box[2] && box[1] < box[3])) {
      throw new SchemaError(
        `detections line ${lineno}: box ordering violated (${box.join(', ')})`,
      );
    }
    if (typeof det.conf !== 'number' || det.conf < 0 || det.conf > 1) {
      throw new SchemaError(`detections line ${lineno}: conf must be in [0, 1]`);
    }
  }
  return obj;
}

/**
 * Convert ground-truth JSONL lines into detection JSONL lines.
 *
 * Output has one line per distinct timestamp (in first-seen order) and
 * every line validates against the engine's detection schema.
 */
export function emitDetections(
  truthLines: string[],
  options: Partial<EmitOptions> = {},
): string[] {
  const opts = { ...DEFAULT_EMIT_OPTIONS, ...options };
  const rng = mulberry32(opts.seed);
  const ticks: number[] = [];
  const byTick = new Map<number, TruthRecord[]>();
  truthLines.forEach((line, i) => {
    if (!line.trim()) return;
    const rec = parseTruthLine(line, i + 1);
    if (!byTick.has(rec.t)) {
      byTick.set(rec.t, []);
      ticks.push(rec.t);
    }
    byTick.get(rec.t)!.push(rec);
  });

  const out: string[] = [];
  for (const t of ticks) {
    const detections: DetectionRecord[] = [];
    for (const rec of byTick.get(t)!) {
      if (rec.box === null) continue;
      if (opts.dropout > 0 && rng() < opts.dropout) continue;
      let [x0, y0, x1, y1] = rec.box.map(
        (v) => v + gaussian(rng) * opts.jitterPx,
      ) as [number, number, number, number];
      [x0, x1] = [Math.min(x0, x1), Math.max(x0, x1)];
      [y0, y1] = [Math.min(y0, y1), Math.max(y0, y1)];
      x0 = Math.min(Math.max(x0, 0), opts.frameWidth - 1e-6);
      x1 = Math.min(Math.max(x1, 0), opts.frameWidth - 1e-6);
      y0 = Math.min(Math.max(y0, 0), opts.frameHeight - 1e-6);
      y1 = Math.min(Math.max(y1, 0), opts.frameHeight - 1e-6);
      if (!(x0 < x1 && y0 < y1)) continue;
      const conf = 0.9 + 0.1 * rng();
      detections.push({ box: [x0, y0, x1, y1], conf });
    }
    const line = JSON.stringify({ t, detections });
    validateDetectionLine(line);  // never emit a line the engine would reject
    out.push(line);
  }
  return out;
}
