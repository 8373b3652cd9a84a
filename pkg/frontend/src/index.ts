export { BindingError, type BindingErrorCode } from "./errors";
export {
  type RigidTransform,
  GIMBAL_EPS,
  QUAT_NORM_EXACT,
  QUAT_NORM_REJECT,
  canonicalQuat,
  compose,
  conjugateAction,
  fromQuatTrans,
  identity,
  inverse,
  inverseConjugateAction,
  quatFromRot,
  rotFromQuat,
  rotFromRpy,
  rpyFromRot,
} from "./se3";
export {
  ACTION_DIM,
  type NormalizationStats,
  checkStats,
  decodeAction,
  dequantize,
  encodeAction,
} from "./codec";
export {
  ACTION_STRIDE,
  TRANSFORM_STRIDE,
  type ActionBatch,
  type TokenBatch,
  type TransformBatch,
  actionBatch,
  batchRecoverWorld,
  batchToCameraFrame,
  batchTokenize,
  transformBatch,
} from "./batch";
export {
  type ConversionManifest,
  type Episode,
  type EpisodeStep,
  type TrainingSample,
  readConversionManifest,
  readEpisodeFile,
  readSamplesFile,
  readStatsFile,
} from "./files";
