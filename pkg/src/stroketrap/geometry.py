"""Trapezoid construction between stroke-circle pairs, clockwise vertex
canonicalization, shoelace areas, and the 2-D affine transform group.

All points are (row, col). "Clockwise" means clockwise on screen with the
row axis pointing down, which under the shoelace sum
``sum(r_k * c_{k+1} - r_{k+1} * c_k) / 2`` comes out negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateGeometryError,
    InvalidInputError,
    InvalidTransformError,
    UnsupportedTransformError,
)

_EPS = 1e-12


def signed_area(vertices: np.ndarray) -> float:
    """Signed shoelace area; negative for clockwise traversal (row down)."""
    v = np.asarray(vertices, dtype=np.float64)
    r = v[:, 0]
    c = v[:, 1]
    return float(0.5 * np.sum(r * np.roll(c, -1) - np.roll(r, -1) * c))


def polygon_area(vertices: np.ndarray) -> float:
    """Absolute shoelace area of a simple polygon, in px^2."""
    return abs(signed_area(vertices))


def circle_area(radius: float) -> float:
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    return math.pi * radius * radius


def _segments_cross(p1, p2, p3, p4) -> bool:
    """Proper intersection test for open segments p1p2 and p3p4."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


@dataclass(frozen=True)
class Trapezoid:
    """Four clockwise vertices; P1P2 is the diameter chord of the source
    cluster i, P3P4 the chord of cluster j."""

    vertices: np.ndarray  # (4, 2) float64
    src: tuple = (-1, -1)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.shape != (4, 2):
            raise InvalidInputError("a trapezoid needs exactly four 2-D vertices")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "src", tuple(self.src))

    def area(self) -> float:
        return polygon_area(self.vertices)


def construct_trapezoid(c_i, r_i: float, c_j, r_j: float,
                        src: tuple = (-1, -1)) -> Trapezoid:
    """Build the stroke trapezoid between circle (c_i, r_i) and (c_j, r_j).

    The two parallel sides are full circle diameters perpendicular to the
    segment c_i -> c_j. Vertices are labeled clockwise with P1 and P2 on
    circle i.
    """
    if r_i <= 0 or r_j <= 0:
        raise InvalidInputError("circle radii must be positive")
    ci = np.asarray(c_i, dtype=np.float64)
    cj = np.asarray(c_j, dtype=np.float64)
    axis = cj - ci
    dist = float(np.hypot(axis[0], axis[1]))
    if dist < 1e-9:
        raise DegenerateGeometryError("coincident centroids")
    u = axis / dist
    normal = np.array([-u[1], u[0]])
    a = ci + r_i * normal
    b = ci - r_i * normal
    bj = cj - r_j * normal
    aj = cj + r_j * normal
    verts = np.array([a, b, bj, aj])
    if signed_area(verts) > 0:
        verts = np.array([b, a, aj, bj])
    return Trapezoid(verts, src=src)


def canonicalize_clockwise(vertices: np.ndarray) -> np.ndarray:
    """Reorder a simple quadrilateral cycle to clockwise traversal starting
    at the lexicographically smallest (row, col) vertex."""
    v = np.asarray(vertices, dtype=np.float64)
    if v.shape != (4, 2):
        raise InvalidInputError("expected four 2-D vertices")
    area = signed_area(v)
    if abs(area) < _EPS:
        raise DegenerateGeometryError("collinear or zero-area quadrilateral")
    if _segments_cross(v[0], v[1], v[2], v[3]) or _segments_cross(v[1], v[2], v[3], v[0]):
        raise DegenerateGeometryError("self-intersecting quadrilateral")
    if area > 0:
        v = v[::-1]
    start = min(range(4), key=lambda k: (v[k, 0], v[k, 1]))
    return np.roll(v, -start, axis=0)


@dataclass(frozen=True)
class AffineTransform:
    """2-D affine map p -> m @ p + t; m must be invertible."""

    m: np.ndarray = field(default_factory=lambda: np.eye(2))
    t: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        t = np.asarray(self.t, dtype=np.float64)
        if m.shape != (2, 2) or t.shape != (2,):
            raise InvalidTransformError("expected a 2x2 matrix and 2-vector")
        if abs(np.linalg.det(m)) < _EPS:
            raise InvalidTransformError("singular matrix")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "t", t)

    def uniform_scale(self) -> float:
        """Scale factor if this is a similarity; raises otherwise."""
        g = self.m.T @ self.m
        s2 = 0.5 * (g[0, 0] + g[1, 1])
        if not np.allclose(g, s2 * np.eye(2), rtol=1e-9, atol=1e-9 * max(s2, 1.0)):
            raise UnsupportedTransformError(
                "anisotropic scale or shear: circles would not map to circles")
        return math.sqrt(s2)


def affine_identity() -> AffineTransform:
    return AffineTransform()


def affine_compose(a: AffineTransform, b: AffineTransform) -> AffineTransform:
    """Composition a after b: (a . b)(p) == a(b(p))."""
    return AffineTransform(a.m @ b.m, a.m @ b.t + a.t)


def affine_invert(a: AffineTransform) -> AffineTransform:
    mi = np.linalg.inv(a.m)
    return AffineTransform(mi, -mi @ a.t)


def affine_apply(a: AffineTransform, p) -> np.ndarray:
    """Apply to one point (2,) or a batch (N, 2)."""
    pts = np.asarray(p, dtype=np.float64)
    return pts @ a.m.T + a.t


def translation(dr: float, dc: float) -> AffineTransform:
    return AffineTransform(np.eye(2), np.array([dr, dc], dtype=np.float64))


def rotation(theta: float) -> AffineTransform:
    co, si = math.cos(theta), math.sin(theta)
    return AffineTransform(np.array([[co, -si], [si, co]]), np.zeros(2))


def scaling(s: float) -> AffineTransform:
    return AffineTransform(s * np.eye(2), np.zeros(2))


def stroke_frame(c_i, c_j) -> AffineTransform:
    """Orientation-preserving similarity taking the reference stroke frame
    ((0,0) -> c_i, (1,0) -> c_j) to image coordinates."""
    ci = np.asarray(c_i, dtype=np.float64)
    cj = np.asarray(c_j, dtype=np.float64)
    d = cj - ci
    if np.hypot(d[0], d[1]) < 1e-9:
        raise DegenerateGeometryError("coincident centroids")
    # Columns: image of (1,0) and of (0,1) under rotation+scale.
    m = np.array([[d[0], -d[1]], [d[1], d[0]]])
    return AffineTransform(m, ci)
