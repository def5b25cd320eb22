"""Brightness-density scoring, noise filtering, feature-vector assembly, and
the end-to-end extraction pipeline (image -> sorted stroke trapezoids).
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, asdict

import numpy as np

from . import cluster as _cluster
from .cluster import Clustering, SampleConfig, cluster_optics, sample_coords
from .errors import InvalidInputError
from .geometry import Trapezoid, circle_area, construct_trapezoid, polygon_area, signed_area
from .image import BinaryImage, GrayImage, foreground_coords

DEFAULT_MIN_AREA = 4.0
DEFAULT_MIN_DENSITY = 0.15
DEFAULT_NUM_TRAPEZOIDS = 50

# Gray levels used by render_overlay.
OVERLAY_INK = 0
OVERLAY_BACKGROUND = 255
OVERLAY_TRAPEZOID = 128
OVERLAY_CIRCLE = 192

_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class PipelineParams:
    """Everything the extraction pipeline needs beyond the image itself."""

    sample_fraction: float = 1.0
    seed: int = 0
    min_pts: int = _cluster.DEFAULT_MIN_PTS
    eps: float = math.inf
    bin_width: float = _cluster.DEFAULT_BIN_WIDTH
    min_area: float = DEFAULT_MIN_AREA
    min_density: float = DEFAULT_MIN_DENSITY
    num_trapezoids: int = DEFAULT_NUM_TRAPEZOIDS
    threshold_percentile: float = _cluster.DEFAULT_THRESHOLD_PERCENTILE
    threshold_scale: float = _cluster.DEFAULT_THRESHOLD_SCALE


@dataclass(frozen=True)
class ScoredTrapezoid:
    trap: Trapezoid
    fg_count: int
    area: float
    density: float


@dataclass(frozen=True)
class CircleStat:
    """Per-cluster circle with its own brightness density."""

    id: int
    centroid: tuple
    radius: float
    fg_count: int
    density: float


@dataclass(frozen=True)
class ExtractionResult:
    width: int
    height: int
    source: str | None
    source_sha256: str | None
    params: PipelineParams
    clustering: Clustering
    circles: tuple            # CircleStat per cluster
    trapezoids: tuple         # ScoredTrapezoid, density-sorted descending
    features: tuple           # 9-tuples aligned with trapezoids

    def __post_init__(self):
        object.__setattr__(self, "circles", tuple(self.circles))
        object.__setattr__(self, "trapezoids", tuple(self.trapezoids))
        object.__setattr__(self, "features", tuple(self.features))


def _trapezoid_mask(height: int, width: int, vertices: np.ndarray) -> np.ndarray:
    """Boolean mask of pixels whose centers (r+0.5, c+0.5) lie inside or on
    the quadrilateral. Vectorized half-plane test on clockwise vertices."""
    v = np.asarray(vertices, dtype=np.float64)
    if signed_area(v) > 0:
        v = v[::-1]
    r_lo = max(int(math.floor(v[:, 0].min() - 0.5)), 0)
    r_hi = min(int(math.ceil(v[:, 0].max() + 0.5)), height)
    c_lo = max(int(math.floor(v[:, 1].min() - 0.5)), 0)
    c_hi = min(int(math.ceil(v[:, 1].max() + 0.5)), width)
    mask = np.zeros((height, width), dtype=bool)
    if r_lo >= r_hi or c_lo >= c_hi:
        return mask
    rr, cc = np.meshgrid(np.arange(r_lo, r_hi) + 0.5,
                         np.arange(c_lo, c_hi) + 0.5, indexing="ij")
    inside = np.ones(rr.shape, dtype=bool)
    for k in range(4):
        a = v[k]
        b = v[(k + 1) % 4]
        cross = (b[0] - a[0]) * (cc - a[1]) - (b[1] - a[1]) * (rr - a[0])
        inside &= cross <= _BOUNDARY_EPS
    mask[r_lo:r_hi, c_lo:c_hi] = inside
    return mask


def count_foreground_pixels(img: BinaryImage, trap: Trapezoid) -> int:
    """Foreground pixels whose centers fall inside or on the trapezoid.
    Area outside the image bounds contributes nothing."""
    mask = _trapezoid_mask(img.height, img.width, trap.vertices)
    return int(img.pixels[mask].sum())


def _disk_mask(height: int, width: int, center, radius: float) -> np.ndarray:
    c = np.asarray(center, dtype=np.float64)
    r_lo = max(int(math.floor(c[0] - radius - 0.5)), 0)
    r_hi = min(int(math.ceil(c[0] + radius + 0.5)), height)
    c_lo = max(int(math.floor(c[1] - radius - 0.5)), 0)
    c_hi = min(int(math.ceil(c[1] + radius + 0.5)), width)
    mask = np.zeros((height, width), dtype=bool)
    if r_lo >= r_hi or c_lo >= c_hi:
        return mask
    rr, cc = np.meshgrid(np.arange(r_lo, r_hi) + 0.5,
                         np.arange(c_lo, c_hi) + 0.5, indexing="ij")
    mask[r_lo:r_hi, c_lo:c_hi] = (rr - c[0]) ** 2 + (cc - c[1]) ** 2 <= radius ** 2
    return mask


def circle_density(img: BinaryImage, center, radius: float) -> tuple:
    """(count, density): foreground pixel centers within ``radius`` of
    ``center``, divided by the circle area pi * r^2."""
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    mask = _disk_mask(img.height, img.width, center, radius)
    count = int(img.pixels[mask].sum())
    return count, count / circle_area(radius)


def score_all_pairs(img: BinaryImage, clustering: Clustering) -> list:
    """One ScoredTrapezoid per unordered cluster pair {i, j}, i < j."""
    scored = []
    clusters = clustering.clusters
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            a, b = clusters[i], clusters[j]
            trap = construct_trapezoid(a.centroid, a.radius,
                                       b.centroid, b.radius, src=(a.id, b.id))
            fg = count_foreground_pixels(img, trap)
            area = polygon_area(trap.vertices)
            scored.append(ScoredTrapezoid(trap, fg, area, fg / area))
    return scored


def filter_noise(scored, min_area: float = DEFAULT_MIN_AREA,
                 min_density: float = DEFAULT_MIN_DENSITY) -> list:
    """Drop trapezoids below the area or density floor; order preserved."""
    return [s for s in scored if s.area >= min_area and s.density >= min_density]


def feature_vector(scored: ScoredTrapezoid) -> tuple:
    """9-tuple: the four vertices (row, col each) plus brightness density."""
    v = scored.trap.vertices
    return (float(v[0, 0]), float(v[0, 1]), float(v[1, 0]), float(v[1, 1]),
            float(v[2, 0]), float(v[2, 1]), float(v[3, 0]), float(v[3, 1]),
            float(scored.density))


def extract(img: BinaryImage, params: PipelineParams = PipelineParams(),
            source_sha256: str | None = None) -> ExtractionResult:
    """Full pipeline: foreground coords -> sample -> OPTICS -> circles ->
    pairwise trapezoids -> noise filter -> density sort."""
    coords = foreground_coords(img)
    sampled = sample_coords(coords, SampleConfig(params.sample_fraction, params.seed))
    clustering = cluster_optics(
        sampled,
        min_pts=params.min_pts,
        eps=params.eps,
        bin_width=params.bin_width,
        threshold_percentile=params.threshold_percentile,
        threshold_scale=params.threshold_scale,
    )
    circles = []
    for c in clustering.clusters:
        count, density = circle_density(img, c.centroid, c.radius)
        circles.append(CircleStat(c.id, c.centroid, c.radius, count, density))
    scored = score_all_pairs(img, clustering)
    kept = filter_noise(scored, params.min_area, params.min_density)
    kept.sort(key=lambda s: (-s.density, s.trap.src))
    features = tuple(feature_vector(s) for s in kept)
    return ExtractionResult(
        width=img.width, height=img.height, source=img.source,
        source_sha256=source_sha256, params=params, clustering=clustering,
        circles=tuple(circles), trapezoids=tuple(kept), features=features,
    )


# ---------------------------------------------------------------------------
# Overlay rendering.

def _paint_segment(px: np.ndarray, a, b, level: int) -> None:
    """Paint the pixels whose unit squares the segment a->b passes through."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    steps = max(2, int(np.hypot(*(b - a)) * 4) + 1)
    for t in np.linspace(0.0, 1.0, steps):
        p = a + t * (b - a)
        r, c = int(math.floor(p[0])), int(math.floor(p[1]))
        if 0 <= r < px.shape[0] and 0 <= c < px.shape[1]:
            px[r, c] = level


def _paint_circle(px: np.ndarray, center, radius: float, level: int) -> None:
    steps = max(8, int(2 * math.pi * radius * 4))
    for theta in np.linspace(0.0, 2 * math.pi, steps, endpoint=False):
        r = center[0] + radius * math.cos(theta)
        c = center[1] + radius * math.sin(theta)
        ri, ci = int(math.floor(r)), int(math.floor(c))
        if 0 <= ri < px.shape[0] and 0 <= ci < px.shape[1]:
            px[ri, ci] = level


def render_overlay(img: BinaryImage, result: ExtractionResult, n: int) -> GrayImage:
    """Grayscale copy of the input with the top-n trapezoid outlines and the
    cluster circles drawn at distinct gray levels. n == 0 returns a plain
    grayscale copy."""
    px = np.where(img.pixels > 0, OVERLAY_INK, OVERLAY_BACKGROUND).astype(np.uint8)
    n = max(0, min(n, len(result.trapezoids)))
    if n > 0:
        for circ in result.circles:
            _paint_circle(px, circ.centroid, circ.radius, OVERLAY_CIRCLE)
        for scored in result.trapezoids[:n]:
            v = scored.trap.vertices
            for k in range(4):
                _paint_segment(px, v[k], v[(k + 1) % 4], OVERLAY_TRAPEZOID)
    return GrayImage(px, source=img.source)


# ---------------------------------------------------------------------------
# JSON serialization. Reals are rendered with six decimal places so golden
# files are byte-reproducible.

_FLOAT_TAG = "\x00f\x00"
_FLOAT_RE = re.compile(r'"\\u0000f\\u0000(-?\d+\.\d{6})"')


def _tag_floats(obj):
    if isinstance(obj, float):
        return f"{_FLOAT_TAG}{obj:.6f}"
    if isinstance(obj, dict):
        return {k: _tag_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tag_floats(v) for v in obj]
    return obj


def _dumps_fixed(obj) -> str:
    text = json.dumps(_tag_floats(obj), indent=2)
    return _FLOAT_RE.sub(r"\1", text)


def params_to_dict(params: PipelineParams) -> dict:
    d = asdict(params)
    d["eps"] = "inf" if math.isinf(params.eps) else float(params.eps)
    return d


def params_from_dict(d: dict) -> PipelineParams:
    d = dict(d)
    if d.get("eps") == "inf":
        d["eps"] = math.inf
    return PipelineParams(**d)


def result_to_dict(result: ExtractionResult) -> dict:
    return {
        "image": {
            "width": result.width,
            "height": result.height,
            "source": result.source,
            "sha256": result.source_sha256,
        },
        "params": params_to_dict(result.params),
        "clusters": [
            {
                "id": c.id,
                "centroid": [c.centroid[0], c.centroid[1]],
                "radius": c.radius,
                "density": c.density,
                "count": c.fg_count,
            }
            for c in result.circles
        ],
        "trapezoids": [
            {
                "src": [s.trap.src[0], s.trap.src[1]],
                "vertices": [[float(r), float(c)] for r, c in s.trap.vertices],
                "fg_count": s.fg_count,
                "area": s.area,
                "density": s.density,
            }
            for s in result.trapezoids
        ],
        "features": [list(f) for f in result.features],
    }


def result_to_json(result: ExtractionResult) -> str:
    return _dumps_fixed(result_to_dict(result)) + "\n"


def result_from_json(text: str) -> ExtractionResult:
    """Rebuild an ExtractionResult from its JSON form. Cluster point sets
    are not serialized, so the embedded Clustering carries empty point
    lists; circles and trapezoids are fully restored."""
    d = json.loads(text)
    params = params_from_dict(d["params"])
    circles = tuple(
        CircleStat(c["id"], (c["centroid"][0], c["centroid"][1]),
                   c["radius"], c["count"], c["density"])
        for c in d["clusters"]
    )
    traps = tuple(
        ScoredTrapezoid(
            Trapezoid(np.array(t["vertices"], dtype=np.float64),
                      src=tuple(t["src"])),
            t["fg_count"], t["area"], t["density"],
        )
        for t in d["trapezoids"]
    )
    features = tuple(tuple(f) for f in d["features"])
    return ExtractionResult(
        width=d["image"]["width"], height=d["image"]["height"],
        source=d["image"]["source"], source_sha256=d["image"]["sha256"],
        params=params, clustering=Clustering(), circles=circles,
        trapezoids=traps, features=features,
    )
