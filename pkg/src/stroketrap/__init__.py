"""Stroke-trapezoid feature extraction for binarized glyph/document images,
plus the inverse transform that renders extracted stroke graphs back into
synthetic paired images."""

from .cluster import (
    Cluster,
    Clustering,
    SampleConfig,
    centroid_of,
    cluster_optics,
    radius_of,
    sample_coords,
)
from .errors import (
    DegenerateGeometryError,
    InvalidInputError,
    InvalidTransformError,
    StrokeTrapError,
    UnsupportedTransformError,
)
from .features import (
    ExtractionResult,
    PipelineParams,
    ScoredTrapezoid,
    circle_density,
    count_foreground_pixels,
    extract,
    feature_vector,
    filter_noise,
    render_overlay,
    result_from_json,
    result_to_json,
    score_all_pairs,
)
from .geometry import (
    AffineTransform,
    Trapezoid,
    affine_apply,
    affine_compose,
    affine_identity,
    affine_invert,
    canonicalize_clockwise,
    circle_area,
    construct_trapezoid,
    polygon_area,
    signed_area,
)
from .image import (
    BinarizeConfig,
    BinaryImage,
    GrayImage,
    MorphConfig,
    binarize,
    foreground_coords,
    morph_clean,
    read_image,
    read_pgm,
    write_image,
    write_pgm,
)
from .synthesis import (
    StrokeGraph,
    SyntheticPair,
    apply_placement,
    build_pair_db,
    graph_from_result,
    render_synthetic,
)

__version__ = "0.1.0"
