"""Shared fixtures and independent oracles.

Oracles deliberately use different algorithms than the library:
point-in-polygon by ray casting (the library uses convex half-plane signs),
Otsu by exhaustive within-class variance scan (the library uses cumulative
between-class variance), rasterization by per-shape brute force.
"""
from __future__ import annotations

import math

import numpy as np
import pytest


def point_segment_distance(p, a, b) -> float:
    p = np.asarray(p, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = max(0.0, min(1.0, float((p - a) @ ab) / denom))
    return float(np.hypot(*(p - (a + t * ab))))


def point_in_polygon_oracle(point, vertices, boundary_eps=1e-9) -> bool:
    """Crossing-number (ray casting) test, boundary-inclusive."""
    v = np.asarray(vertices, float)
    n = len(v)
    for k in range(n):
        if point_segment_distance(point, v[k], v[(k + 1) % n]) <= boundary_eps:
            return True
    # Horizontal ray in +col direction; row plays the role of y.
    r, c = float(point[0]), float(point[1])
    crossings = 0
    for k in range(n):
        r1, c1 = v[k]
        r2, c2 = v[(k + 1) % n]
        if (r1 > r) != (r2 > r):
            c_at = c1 + (r - r1) / (r2 - r1) * (c2 - c1)
            if c_at > c:
                crossings += 1
    return crossings % 2 == 1


def count_pixels_oracle(pixels: np.ndarray, vertices) -> int:
    """Exhaustive scan: ray-cast every foreground pixel center."""
    total = 0
    for r, c in np.argwhere(pixels):
        if point_in_polygon_oracle((r + 0.5, c + 0.5), vertices):
            total += 1
    return total


def otsu_oracle(pixels: np.ndarray) -> int:
    """Exhaustive scan of all 255 split points, minimizing the weighted
    within-class variance of the split <= t vs > t."""
    flat = pixels.ravel().astype(float)
    best_t, best_wcv = 0, math.inf
    for t in range(255):
        lo = flat[flat <= t]
        hi = flat[flat > t]
        if len(lo) == 0 or len(hi) == 0:
            continue
        wcv = len(lo) * lo.var() + len(hi) * hi.var()
        if wcv < best_wcv:
            best_wcv, best_t = wcv, t
    return best_t


def disk_pixels(shape, center, radius) -> np.ndarray:
    """Brute-force disk raster over pixel centers (r+0.5, c+0.5)."""
    out = np.zeros(shape, dtype=np.uint8)
    for r in range(shape[0]):
        for c in range(shape[1]):
            if (r + 0.5 - center[0]) ** 2 + (c + 0.5 - center[1]) ** 2 <= radius ** 2:
                out[r, c] = 1
    return out


def random_trapezoid_inputs(rng, lo=0.0, hi=60.0, r_lo=0.5, r_hi=8.0):
    """Random circle pair with non-coincident centers."""
    while True:
        ci = rng.uniform(lo, hi, size=2)
        cj = rng.uniform(lo, hi, size=2)
        if np.hypot(*(cj - ci)) > 1.0:
            return ci, float(rng.uniform(r_lo, r_hi)), cj, float(rng.uniform(r_lo, r_hi))


def place_separated_disks(rng, n_blobs, canvas=140, r_lo=3, r_hi=6, min_gap=12):
    """Disk (center, radius) list with pairwise boundary gaps >= min_gap."""
    disks = []
    attempts = 0
    while len(disks) < n_blobs:
        attempts += 1
        assert attempts < 10_000, "could not place separated disks"
        r = int(rng.integers(r_lo, r_hi + 1))
        center = rng.uniform(r + 1, canvas - r - 1, size=2)
        if all(np.hypot(*(center - c)) >= r + rr + min_gap for c, rr in disks):
            disks.append((center, r))
    return disks


def render_disks(disks, canvas=140) -> np.ndarray:
    rr, cc = np.mgrid[0:canvas, 0:canvas]
    px = np.zeros((canvas, canvas), dtype=np.uint8)
    for center, r in disks:
        px |= (((rr + 0.5 - center[0]) ** 2 + (cc + 0.5 - center[1]) ** 2)
               <= r ** 2).astype(np.uint8)
    return px


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
