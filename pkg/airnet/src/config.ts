/** Architecture configuration and validation. */

export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'ConfigError';
  }
}

export interface AirNetConfig {
  /** Input width in pixels; width/height must sit near 16:9 (~1.78). */
  inputWidth: number;
  inputHeight: number;
  /** Stem output channels (c0); multiples of 32 keep every 1.5x step integral. */
  stemChannels: number;
  /** Channel expansion factor inside each block. */
  expansion: number;
  /** Number of identical downsampling blocks. */
  blocks: number;
  bifpnChannels: number;
  bifpnLayers: number;
  anchorsPerCell: number;
}

export const DEFAULT_CONFIG: AirNetConfig = {
  inputWidth: 1152,
  inputHeight: 640,
  stemChannels: 32,
  expansion: 2,
  blocks: 5,
  bifpnChannels: 48,
  bifpnLayers: 1,
  anchorsPerCell: 9,
};

const MIN_RATIO = 1.7;
const MAX_RATIO = 1.85;

export function validateConfig(config: AirNetConfig): void {
  const ratio = config.inputWidth / config.inputHeight;
  if (ratio < MIN_RATIO || ratio > MAX_RATIO) {
    throw new ConfigError(
      `input ratio ${ratio.toFixed(3)} outside [${MIN_RATIO}, ${MAX_RATIO}]`,
    );
  }
  if (config.inputWidth % 64 !== 0 || config.inputHeight % 64 !== 0) {
    throw new ConfigError(
      `input ${config.inputWidth}x${config.inputHeight} must be divisible by 64`,
    );
  }
  if (config.stemChannels <= 0 || config.stemChannels % 32 !== 0) {
    throw new ConfigError(`stem channels ${config.stemChannels} must be a positive multiple of 32`);
  }
  if (!Number.isInteger(config.expansion) || config.expansion < 1) {
    throw new ConfigError(`expansion ${config.expansion} must be a positive integer`);
  }
  if (!Number.isInteger(config.blocks) || config.blocks < 0) {
    throw new ConfigError(`blocks ${config.blocks} must be a non-negative integer`);
  }
  for (let i = 0, c = config.stemChannels; i < config.blocks; i++, c = c * 1.5) {
    if (!Number.isInteger(c * 1.5)) {
      throw new ConfigError(`block ${i} output channels ${c * 1.5} not integral`);
    }
  }
  if (config.bifpnChannels < 1 || config.bifpnLayers < 1 || config.anchorsPerCell < 1) {
    throw new ConfigError('bifpn channels/layers and anchors must be at least 1');
  }
}

/** Expected (width, height, channels) chain: stem output plus each block. */
export function expectedFeatureShapes(config: AirNetConfig): Array<[number, number, number]> {
  const shapes: Array<[number, number, number]> = [];
  let w = config.inputWidth / 2;
  let h = config.inputHeight / 2;
  let c = config.stemChannels;
  shapes.push([w, h, c]);
  for (let i = 0; i < config.blocks; i++) {
    w /= 2;
    h /= 2;
    c *= 1.5;
    shapes.push([w, h, c]);
  }
  return shapes;
}
