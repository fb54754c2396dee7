"""Statistical machinery for text-promptable biomedical image parsing.

The package covers the non-neural side of a promptable segmentation
system: rejecting statistically invalid object prompts, mask-shape
irregularity metrics, shape-map alignment and ensembling, multi-target
recognition aggregation, the evaluation metric suite, a three-layer
object ontology with templatic prompt resolution, and dataset
manifest/split tooling with bit-exact file formats.
"""

from .errors import (
    BioparseError,
    DomainError,
    FitError,
    FormatError,
    ResolutionError,
    UsageError,
)
from .geometry import (
    BoundingBox,
    ShapeMetrics,
    box_ratio,
    convex_hull_area,
    convex_ratio,
    iri,
    shape_metrics,
    tight_bbox,
)
from .grids import (
    as_grid,
    as_mask,
    as_pmap,
    as_rgb,
    binarize,
    mask_area,
    mask_mean,
)
from .validity import (
    BetaParams,
    ValidityModel,
    ValidityReport,
    ValiditySample,
    beta_cdf,
    extract_statistics,
    fit_beta,
    fit_validity_model,
    ks_pvalue,
    ks_statistic,
    model_from_json,
    model_to_json,
    validity_pvalue,
)
from .recognition import (
    RecognitionResult,
    ScoredBox,
    TargetMaps,
    aggregate_labels,
    box_iou,
    nms,
    recognize,
    select_targets,
)
from .shapemap import (
    ShapeAccumulator,
    Shift,
    cross_correlate_argmax,
    ensemble_shapes,
    ensemble_volume,
    shift_map,
)
from .metrics import (
    ConfusionCounts,
    auroc,
    dice,
    identification_counts,
    identification_prf,
    identification_prf_macro,
    silhouette,
    summarize,
    weighted_dice,
    wilcoxon_signed_rank,
)
from .ontology import (
    Ontology,
    ObjectType,
    PromptResolution,
    candidates_for,
    dump_ontology,
    load_default_ontology,
    load_ontology,
    normalize,
    resolve_prompt,
)
from .dataset_io import (
    ManifestEntry,
    SplitAssignment,
    SplitMix64,
    assign_entries,
    read_manifest,
    read_mask,
    read_pmap,
    read_rgb,
    split_grouped,
    validate_manifest,
    write_manifest,
    write_mask,
    write_pmap,
    write_pmap_png,
    write_rgb,
)
from .serial import canonical_json

__version__ = "1.0.0"

__all__ = [
    "BioparseError", "DomainError", "FitError", "FormatError",
    "ResolutionError", "UsageError",
    "BoundingBox", "ShapeMetrics", "box_ratio", "convex_hull_area",
    "convex_ratio", "iri", "shape_metrics", "tight_bbox",
    "as_grid", "as_mask", "as_pmap", "as_rgb", "binarize", "mask_area",
    "mask_mean",
    "BetaParams", "ValidityModel", "ValidityReport", "ValiditySample",
    "beta_cdf", "extract_statistics", "fit_beta", "fit_validity_model",
    "ks_pvalue", "ks_statistic", "model_from_json", "model_to_json",
    "validity_pvalue",
    "RecognitionResult", "ScoredBox", "TargetMaps", "aggregate_labels",
    "box_iou", "nms", "recognize", "select_targets",
    "ShapeAccumulator", "Shift", "cross_correlate_argmax", "ensemble_shapes",
    "ensemble_volume", "shift_map",
    "ConfusionCounts", "auroc", "dice", "identification_counts",
    "identification_prf", "identification_prf_macro", "silhouette",
    "summarize", "weighted_dice", "wilcoxon_signed_rank",
    "Ontology", "ObjectType", "PromptResolution", "candidates_for",
    "dump_ontology", "load_default_ontology", "load_ontology", "normalize",
    "resolve_prompt",
    "ManifestEntry", "SplitAssignment", "SplitMix64", "assign_entries",
    "read_manifest", "read_mask", "read_pmap", "read_rgb", "split_grouped",
    "validate_manifest", "write_manifest", "write_mask", "write_pmap",
    "write_pmap_png", "write_rgb",
    "canonical_json",
    "__version__",
]
