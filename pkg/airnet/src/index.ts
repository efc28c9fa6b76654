export { AirNetConfig, ConfigError, DEFAULT_CONFIG, expectedFeatureShapes, validateConfig } from './config.js';
export { buildBackbone, buildBlock, featureShapesWHC } from './backbone.js';
export { buildFeatureNetwork } from './bifpn.js';
export { buildDetector, countTrainableParameters, parameterReport } from './model.js';
export { DEFAULT_EMIT_OPTIONS, SchemaError, emitDetections, mulberry32, validateDetectionLine } from './emit.js';
