"""peakmatch: estimate the viewing direction of geo-tagged mountain photos.

The pipeline matches a photo's edge map against a 360-degree cylindrical
panorama render by vector cross-correlation (an FFT-accelerated complex
edge-field correlation), derives the camera azimuth from the best overlap,
and refines/tags the individual mountain peaks visible in the photo.
"""

from .edges import (
    EdgeDetectConfig,
    EdgeMap,
    FilterConfig,
    detect_edges,
    filter_edges,
    load_raster,
    resize_raster,
    save_raster,
    save_strength_png,
)
from .errors import (
    EmptyDataset,
    EmptyGrid,
    EmptyImage,
    LowConfidence,
    MalformedPeaks,
    MissingExif,
    MissingFocalLength,
    NoCandidates,
    NonPositiveInput,
    NoPairs,
    PeakmatchError,
    PhotoWiderThanPanorama,
    SensorDbError,
    WidthMismatch,
)
from .evaluation import (
    EvalSummary,
    GroundTruth,
    alignment_error,
    evaluate_dataset,
    format_summary_table,
)
from .matching import (
    Alignment,
    RobustConfig,
    ScoreGrid,
    best_alignment,
    compute_vcc_grid,
    edge_similarity,
    offset_to_azimuth,
    robust_rescore,
    save_score_heatmap,
    scale_sweep,
    vcc_brute_force,
)
from .metadata import (
    CameraMatch,
    CameraSpec,
    FovScale,
    PhotoMeta,
    compute_scale_factor,
    estimate_fov,
    load_sensor_db,
    match_camera,
    normalize_camera_name,
    parse_photo_meta,
    text_similarity,
)
from .panorama import (
    CaseData,
    Panorama,
    SynthCase,
    SynthConfig,
    gen_synthetic_case,
    load_case,
    load_panorama,
    load_peaks,
    write_case,
)
from .peaks import (
    Peak,
    PeakTag,
    RefineConfig,
    extract_peak_pattern,
    refine_peak,
    tag_all_peaks,
    triweight,
)
from .pipeline import (
    AlignmentReport,
    RunConfig,
    align_photo,
    panorama_edges,
    photo_edges,
    render_overlay,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "AlignmentReport",
    "CameraMatch",
    "CameraSpec",
    "CaseData",
    "EdgeDetectConfig",
    "EdgeMap",
    "EmptyDataset",
    "EmptyGrid",
    "EmptyImage",
    "EvalSummary",
    "FilterConfig",
    "FovScale",
    "GroundTruth",
    "LowConfidence",
    "MalformedPeaks",
    "MissingExif",
    "MissingFocalLength",
    "NoCandidates",
    "NonPositiveInput",
    "NoPairs",
    "Panorama",
    "Peak",
    "PeakTag",
    "PeakmatchError",
    "PhotoMeta",
    "PhotoWiderThanPanorama",
    "RefineConfig",
    "RobustConfig",
    "RunConfig",
    "ScoreGrid",
    "SensorDbError",
    "SynthCase",
    "SynthConfig",
    "WidthMismatch",
    "align_photo",
    "alignment_error",
    "best_alignment",
    "compute_scale_factor",
    "compute_vcc_grid",
    "detect_edges",
    "edge_similarity",
    "estimate_fov",
    "evaluate_dataset",
    "extract_peak_pattern",
    "filter_edges",
    "format_summary_table",
    "gen_synthetic_case",
    "load_case",
    "load_panorama",
    "load_peaks",
    "load_raster",
    "load_sensor_db",
    "match_camera",
    "normalize_camera_name",
    "offset_to_azimuth",
    "panorama_edges",
    "parse_photo_meta",
    "photo_edges",
    "refine_peak",
    "render_overlay",
    "resize_raster",
    "robust_rescore",
    "save_raster",
    "save_score_heatmap",
    "save_strength_png",
    "scale_sweep",
    "tag_all_peaks",
    "text_similarity",
    "triweight",
    "vcc_brute_force",
    "write_case",
]
