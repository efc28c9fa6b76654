/** Full detector assembly and parameter accounting. */

import * as tf from '@tensorflow/tfjs';

import { buildBackbone, featureShapesWHC } from './backbone.js';
import { AirNetConfig, DEFAULT_CONFIG } from './config.js';
import { buildFeatureNetwork } from './bifpn.js';

export interface Detector {
  model: tf.LayersModel;
  backboneFeatures: tf.SymbolicTensor[];
  pyramidFeatures: tf.SymbolicTensor[];
}

export function buildDetector(config: AirNetConfig = DEFAULT_CONFIG): Detector {
  const backbone = buildBackbone(config);
  const pyramid = buildFeatureNetwork(
    backbone.features,
    config.bifpnChannels,
    config.bifpnLayers,
  );
  // One shared box/score head applied at every pyramid level:
  // anchorsPerCell * (4 box offsets + 1 score) channels per cell.
  const head = tf.layers.conv2d({
    filters: config.anchorsPerCell * 5,
    kernelSize: 1,
    name: 'head',
  });
  const outputs = pyramid.map((level) => head.apply(level) as tf.SymbolicTensor);
  const model = tf.model({ inputs: backbone.input, outputs, name: 'airnet' });
  return { model, backboneFeatures: backbone.features, pyramidFeatures: pyramid };
}

export function countTrainableParameters(model: tf.LayersModel): number {
  let total = 0;
  for (const weight of model.trainableWeights) {
    let size = 1;
    for (const dim of weight.shape) {
      size *= dim ?? 1;
    }
    total += size;
  }
  return total;
}

export interface ParameterReport {
  config: AirNetConfig;
  trainableParams: number;
  backboneShapesWHC: Array<[number, number, number]>;
}

export function parameterReport(config: AirNetConfig = DEFAULT_CONFIG): ParameterReport {
  const detector = buildDetector(config);
  return {
    config,
    trainableParams: countTrainableParameters(detector.model),
    backboneShapesWHC: featureShapesWHC(detector.backboneFeatures),
  };
}
