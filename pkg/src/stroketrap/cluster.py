"""Random sampling of foreground coordinates and OPTICS clustering into
stroke-segment groups.

The reachability ordering comes from scikit-learn's OPTICS (min_pts = 5,
eps = infinity by default). Clusters are then cut from the ordering by a
reachability threshold: points whose reachability exceeds the threshold
either start a new cluster (if their own core distance is below it) or are
labeled noise. The threshold defaults to a percentile of the finite
reachability distances scaled by a safety factor, so jagged blob boundaries
stay attached to their blob while genuine inter-blob jumps still split.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

DEFAULT_MIN_PTS = 5
DEFAULT_BIN_WIDTH = 1.0
DEFAULT_THRESHOLD_PERCENTILE = 75.0
DEFAULT_THRESHOLD_SCALE = 3.0


@dataclass(frozen=True)
class SampleConfig:
    fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise InvalidInputError("sample fraction must lie in (0, 1]")


@dataclass(frozen=True)
class Cluster:
    """One stroke-segment cluster with its circle model."""

    id: int
    points: np.ndarray  # (N, 2) int64
    centroid: tuple     # (row, col)
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "points",
                           np.asarray(self.points, dtype=np.int64))
        object.__setattr__(self, "centroid",
                           (float(self.centroid[0]), float(self.centroid[1])))


@dataclass(frozen=True)
class Clustering:
    clusters: tuple = ()
    noise: np.ndarray = field(default_factory=lambda: np.empty((0, 2), np.int64))

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        object.__setattr__(self, "noise",
                           np.asarray(self.noise, dtype=np.int64).reshape(-1, 2))

    def __len__(self) -> int:
        return len(self.clusters)


def sample_coords(coords: np.ndarray, cfg: SampleConfig) -> np.ndarray:
    """Keep ceil(fraction * N) distinct coordinates, chosen uniformly
    without replacement; deterministic for a fixed seed. Row-major input
    order is preserved among the survivors."""
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    n = len(coords)
    if n == 0:
        return coords
    keep = math.ceil(cfg.fraction * n)
    if keep >= n:
        return coords.copy()
    rng = np.random.default_rng(cfg.seed)
    idx = rng.choice(n, size=keep, replace=False)
    return coords[np.sort(idx)]


def centroid_of(points: np.ndarray) -> tuple:
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(points) == 0:
        raise InvalidInputError("centroid of empty point set")
    mean = points.mean(axis=0)
    return (float(mean[0]), float(mean[1]))


def radius_of(points: np.ndarray, centroid, bin_width: float = DEFAULT_BIN_WIDTH) -> float:
    """Mode of centroid-to-point distances, quantized to bins of
    ``bin_width``. Returns the center of the most populated bin; ties go to
    the smaller bin, so the result is always >= bin_width / 2."""
    if bin_width <= 0:
        raise InvalidInputError("bin width must be positive")
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(points) == 0:
        raise InvalidInputError("radius of empty point set")
    c = np.asarray(centroid, dtype=np.float64)
    dists = np.hypot(points[:, 0] - c[0], points[:, 1] - c[1])
    bins = np.floor(dists / bin_width).astype(np.int64)
    counts = np.bincount(bins)
    mode_bin = int(np.argmax(counts))  # argmax takes the first (smallest) tie
    return (mode_bin + 0.5) * bin_width


def cluster_optics(coords: np.ndarray,
                   min_pts: int = DEFAULT_MIN_PTS,
                   eps: float = math.inf,
                   bin_width: float = DEFAULT_BIN_WIDTH,
                   threshold_percentile: float = DEFAULT_THRESHOLD_PERCENTILE,
                   threshold_scale: float = DEFAULT_THRESHOLD_SCALE) -> Clustering:
    """OPTICS clustering of pixel coordinates into stroke-segment groups.

    Points in no cluster land in ``noise``; clusters smaller than
    ``min_pts`` are demoted to noise. Each cluster carries its centroid and
    mode-of-distances radius.
    """
    if min_pts < 2:
        raise InvalidInputError("min_pts must be >= 2")
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    n = len(coords)
    if n < min_pts:
        return Clustering((), coords.copy())

    from sklearn.cluster import OPTICS, cluster_optics_dbscan

    model = OPTICS(min_samples=min_pts, max_eps=eps, metric="euclidean")
    model.fit(coords.astype(np.float64))
    reach = model.reachability_
    finite = reach[np.isfinite(reach)]
    if len(finite) == 0:
        return Clustering((), coords.copy())
    cut = threshold_scale * float(np.percentile(finite, threshold_percentile))
    labels = cluster_optics_dbscan(
        reachability=reach,
        core_distances=model.core_distances_,
        ordering=model.ordering_,
        eps=cut,
    )

    # Relabel by first appearance in the reachability ordering and demote
    # undersized clusters to noise.
    order_of = {}
    for pos in model.ordering_:
        lab = labels[pos]
        if lab >= 0 and lab not in order_of:
            order_of[lab] = len(order_of)
    clusters = []
    noise_mask = labels < 0
    for lab, new_id in sorted(order_of.items(), key=lambda kv: kv[1]):
        members = coords[labels == lab]
        if len(members) < min_pts:
            noise_mask |= labels == lab
            continue
        cen = centroid_of(members)
        rad = radius_of(members, cen, bin_width)
        clusters.append(Cluster(len(clusters), members, cen, rad))
    return Clustering(tuple(clusters), coords[noise_mask])
