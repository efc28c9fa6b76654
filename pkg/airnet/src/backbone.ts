/** Backbone: a strided stem convolution followed by identical
 * expand / depthwise-downsample / project blocks.
 *
 * Each block maps (w, h, c) to (w/2, h/2, 1.5c): a 1x1 expansion to n*c
 * channels, a 5x5 depthwise convolution with stride 2, and a 1x1
 * projection, with batch normalization after every convolution.
 */

import * as tf from '@tensorflow/tfjs';

import { AirNetConfig, ConfigError, validateConfig } from './config.js';

let blockCounter = 0;

export function buildBlock(
  input: tf.SymbolicTensor,
  expansion: number,
): tf.SymbolicTensor {
  const [h, w, c] = input.shape.slice(1) as [number, number, number];
  if (w % 2 !== 0 || h % 2 !== 0) {
    throw new ConfigError(`block input ${w}x${h} must have even spatial dims`);
  }
  if (!Number.isInteger(expansion * c) || !Number.isInteger(1.5 * c)) {
    throw new ConfigError(`block channels ${c} do not expand/project to integers`);
  }
  const id = blockCounter++;
  let x = tf.layers
    .conv2d({
      filters: expansion * c,
      kernelSize: 1,
      useBias: false,
      name: `block${id}_expand`,
    })
    .apply(input) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `block${id}_expand_bn` }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.reLU({ name: `block${id}_expand_relu` }).apply(x) as tf.SymbolicTensor;

  x = tf.layers
    .depthwiseConv2d({
      kernelSize: 5,
      strides: 2,
      padding: 'same',
      useBias: false,
      name: `block${id}_dw`,
    })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `block${id}_dw_bn` }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.reLU({ name: `block${id}_dw_relu` }).apply(x) as tf.SymbolicTensor;

  x = tf.layers
    .conv2d({
      filters: 1.5 * c,
      kernelSize: 1,
      useBias: false,
      name: `block${id}_project`,
    })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `block${id}_project_bn` }).apply(x) as tf.SymbolicTensor;
  return x;
}

export interface Backbone {
  model: tf.LayersModel;
  input: tf.SymbolicTensor;
  /** Stem output plus the output of every block, shallow to deep. */
  features: tf.SymbolicTensor[];
}

export function buildBackbone(config: AirNetConfig): Backbone {
  validateConfig(config);
  blockCounter = 0;
  const input = tf.input({
    shape: [config.inputHeight, config.inputWidth, 3],
    name: 'frames',
  });
  let x = tf.layers
    .conv2d({
      filters: config.stemChannels,
      kernelSize: 3,
      strides: 2,
      padding: 'same',
      useBias: false,
      name: 'stem',
    })
    .apply(input) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: 'stem_bn' }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.reLU({ name: 'stem_relu' }).apply(x) as tf.SymbolicTensor;

  const features: tf.SymbolicTensor[] = [x];
  for (let i = 0; i < config.blocks; i++) {
    x = buildBlock(x, config.expansion);
    features.push(x);
  }
  const model = tf.model({ inputs: input, outputs: features, name: 'backbone' });
  return { model, input, features };
}

/** Feature shapes as (width, height, channels) tuples. */
export function featureShapesWHC(features: tf.SymbolicTensor[]): Array<[number, number, number]> {
  return features.map((f) => {
    const [h, w, c] = f.shape.slice(1) as [number, number, number];
    return [w, h, c];
  });
}
