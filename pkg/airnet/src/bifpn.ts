/** A small bidirectional feature pyramid over the deepest three levels.
 *
 * Every level is first squeezed to a common channel width, then fused
 * top-down and bottom-up with learned non-negative per-edge weights
 * (fast normalized fusion) and a depthwise-separable convolution after
 * each fusion node.
 */

import * as tf from '@tensorflow/tfjs';

import { ConfigError } from './config.js';

/** Learned-weight sum of same-shaped inputs: sum(relu(w_i) * x_i) / (sum + eps). */
class WeightedFusion extends tf.layers.Layer {
  static className = 'WeightedFusion';
  private fusionWeights: tf.LayerVariable | null = null;
  private readonly numInputs: number;

  constructor(numInputs: number, name: string) {
    super({ name });
    this.numInputs = numInputs;
  }

  override build(): void {
    this.fusionWeights = this.addWeight(
      'edge_weights',
      [this.numInputs],
      'float32',
      tf.initializers.ones(),
    );
    this.built = true;
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    const tensors = Array.isArray(inputs) ? inputs : [inputs];
    return tf.tidy(() => {
      const weights = tf.relu(this.fusionWeights!.read());
      const total = tf.add(tf.sum(weights), 1e-4);
      let out = tf.mul(tensors[0], tf.div(weights.gather([0]).squeeze(), total));
      for (let i = 1; i < tensors.length; i++) {
        out = tf.add(out, tf.mul(tensors[i], tf.div(weights.gather([i]).squeeze(), total)));
      }
      return out;
    });
  }

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    return (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as tf.Shape;
  }
}
tf.serialization.registerClass(WeightedFusion);

let fusionCounter = 0;

function fuseNode(inputs: tf.SymbolicTensor[], channels: number): tf.SymbolicTensor {
  const id = fusionCounter++;
  const fused = new WeightedFusion(inputs.length, `fuse${id}`).apply(
    inputs,
  ) as tf.SymbolicTensor;
  let x = tf.layers
    .separableConv2d({
      filters: channels,
      kernelSize: 3,
      padding: 'same',
      useBias: false,
      name: `fuse${id}_conv`,
    })
    .apply(fused) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `fuse${id}_bn` }).apply(x) as tf.SymbolicTensor;
  return x;
}

function upsample(x: tf.SymbolicTensor, name: string): tf.SymbolicTensor {
  return tf.layers.upSampling2d({ size: [2, 2], name }).apply(x) as tf.SymbolicTensor;
}

function downsample(x: tf.SymbolicTensor, name: string): tf.SymbolicTensor {
  return tf.layers
    .maxPooling2d({ poolSize: [2, 2], strides: [2, 2], name })
    .apply(x) as tf.SymbolicTensor;
}

/**
 * Fuse the last three backbone levels bidirectionally.
 *
 * Returns one output per input level, each with `channels` channels and the
 * input level's spatial shape.
 */
export function buildFeatureNetwork(
  backboneFeatures: tf.SymbolicTensor[],
  channels: number,
  layers = 1,
): tf.SymbolicTensor[] {
  if (backboneFeatures.length < 3) {
    throw new ConfigError(
      `feature network needs at least 3 backbone levels, got ${backboneFeatures.length}`,
    );
  }
  fusionCounter = 0;
  const picked = backboneFeatures.slice(-3);
  let [p3, p4, p5] = picked.map((feature, i) => {
    let x = tf.layers
      .conv2d({ filters: channels, kernelSize: 1, useBias: false, name: `lateral${i}` })
      .apply(feature) as tf.SymbolicTensor;
    x = tf.layers.batchNormalization({ name: `lateral${i}_bn` }).apply(x) as tf.SymbolicTensor;
    return x;
  });

  for (let layer = 0; layer < layers; layer++) {
    const td4 = fuseNode([p4, upsample(p5, `up5_${layer}`)], channels);
    const out3 = fuseNode([p3, upsample(td4, `up4_${layer}`)], channels);
    const out4 = fuseNode([p4, td4, downsample(out3, `down3_${layer}`)], channels);
    const out5 = fuseNode([p5, downsample(out4, `down4_${layer}`)], channels);
    [p3, p4, p5] = [out3, out4, out5];
  }
  return [p3, p4, p5];
}
