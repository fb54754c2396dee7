export {
  BioparseError,
  DomainError,
  FormatError,
  UsageError,
  type ErrorCategory,
} from "./errors";
export {
  maskGrid,
  mapGrid,
  type BoundGrid,
  type MapGrid,
  type MaskGrid,
} from "./grid";
export {
  bindDice,
  bindEnsembleShapes,
  bindIrregularity,
  bindRecognize,
  bindValidityTest,
  version,
  type IrregularityResult,
  type RecognitionResult,
  type ValidityReport,
} from "./bindings";
