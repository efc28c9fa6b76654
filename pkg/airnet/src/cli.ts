/** Command line: parameter-count report and the detection-stream adapter.
 *
 *   node dist/cli.js report [--config config.json]
 *   node dist/cli.js emit --truth truth.jsonl --out detections.jsonl \
 *       [--jitter 1.5] [--dropout 0.02] [--seed 1] [--frame 1920x1080]
 */

import { readFileSync, writeFileSync } from 'node:fs';

import { AirNetConfig, DEFAULT_CONFIG } from './config.js';
import { emitDetections } from './emit.js';
import { parameterReport } from './model.js';

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`bad arguments near ${argv[i]}`);
    }
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  return flags;
}

function cmdReport(argv: string[]): number {
  const flags = parseFlags(argv);
  let config: AirNetConfig = DEFAULT_CONFIG;
  const configPath = flags.get('config');
  if (configPath) {
    config = { ...DEFAULT_CONFIG, ...JSON.parse(readFileSync(configPath, 'utf-8')) };
  }
  const report = parameterReport(config);
  process.stdout.write(
    JSON.stringify(
      {
        trainable_params: report.trainableParams,
        backbone_shapes_whc: report.backboneShapesWHC,
        config: report.config,
      },
      null,
      2,
    ) + '\n',
  );
  return 0;
}

function cmdEmit(argv: string[]): number {
  const flags = parseFlags(argv);
  const truthPath = flags.get('truth');
  const outPath = flags.get('out');
  if (!truthPath || !outPath) {
    process.stderr.write('emit requires --truth and --out\n');
    return 1;
  }
  const [w, h] = (flags.get('frame') ?? '1920x1080').split('x').map(Number);
  const lines = emitDetections(readFileSync(truthPath, 'utf-8').split('\n'), {
    jitterPx: Number(flags.get('jitter') ?? 1.5),
    dropout: Number(flags.get('dropout') ?? 0.0),
    seed: Number(flags.get('seed') ?? 1),
    frameWidth: w,
    frameHeight: h,
  });
  writeFileSync(outPath, lines.join('\n') + '\n');
  process.stderr.write(`wrote ${lines.length} detection frames to ${outPath}\n`);
  return 0;
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === 'report') return cmdReport(rest);
    if (command === 'emit') return cmdEmit(rest);
    process.stderr.write('usage: cli.js <report|emit> [flags]\n');
    return 1;
  } catch (err) {
    process.stderr.write(`${(err as Error).name}: ${(err as Error).message}\n`);
    return 2;
  }
}

process.exit(main());
