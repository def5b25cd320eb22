"""Inverse transform: render stroke graphs (circles + trapezoids) back into
synthetic binary images, and build original<->synthetic paired datasets.
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent import futures
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .features import (
    ExtractionResult,
    PipelineParams,
    _disk_mask,
    _dumps_fixed,
    _trapezoid_mask,
    extract,
    params_to_dict,
    result_to_json,
)
from .geometry import AffineTransform, affine_apply, construct_trapezoid
from .image import (
    BinarizeConfig,
    BinaryImage,
    MorphConfig,
    binarize,
    morph_clean,
    read_image,
    write_pgm,
)

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class StrokeGraph:
    """Geometric skeleton of a glyph: circle nodes plus trapezoid edges."""

    nodes: tuple              # ((row, col), radius) per node
    edges: tuple              # (i, j, density) with i < j
    canvas: tuple             # (width, height) pixels

    def __post_init__(self):
        nodes = tuple(((float(c[0]), float(c[1])), float(r))
                      for c, r in self.nodes)
        edges = tuple((int(i), int(j), float(d)) for i, j, d in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "canvas", (int(self.canvas[0]), int(self.canvas[1])))
        w, h = self.canvas
        if w < 1 or h < 1:
            raise InvalidInputError("canvas must be at least 1x1")
        for (cr, cc), r in nodes:
            if r <= 0:
                raise InvalidInputError("node radius must be positive")
            if cr + r < 0 or cr - r > h or cc + r < 0 or cc - r > w:
                raise InvalidInputError("node circle lies fully outside the canvas")
        for i, j, d in edges:
            if not (0 <= i < j < len(nodes)):
                raise InvalidInputError("edge endpoints must satisfy 0 <= i < j < #nodes")
            if d < 0:
                raise InvalidInputError("edge density must be >= 0")


@dataclass(frozen=True)
class SyntheticPair:
    original: ExtractionResult
    synthetic: BinaryImage
    graph: StrokeGraph
    params: PipelineParams
    seed: int = 0


def graph_from_result(result: ExtractionResult) -> StrokeGraph:
    """StrokeGraph carrying the circles and post-filter trapezoids of an
    extraction result."""
    nodes = tuple((c.centroid, c.radius) for c in result.circles)
    edges = tuple((min(s.trap.src), max(s.trap.src), s.density)
                  for s in result.trapezoids)
    return StrokeGraph(nodes, edges, (result.width, result.height))


def render_synthetic(graph: StrokeGraph, mode: str = "solid",
                     seed: int = 0) -> BinaryImage:
    """Rasterize a stroke graph onto its canvas.

    Node disks are always solid. In "solid" mode edge trapezoids are solid
    too; in "stochastic" mode each edge pixel is set with probability
    min(1, edge density), matching the observed ink density.
    """
    if mode not in ("solid", "stochastic"):
        raise InvalidInputError(f"unknown fill mode {mode!r}")
    width, height = graph.canvas
    out = np.zeros((height, width), dtype=np.uint8)
    rng = np.random.default_rng(seed) if mode == "stochastic" else None
    for (i, j, density) in graph.edges:
        (ci, ri), (cj, rj) = graph.nodes[i], graph.nodes[j]
        trap = construct_trapezoid(ci, ri, cj, rj, src=(i, j))
        mask = _trapezoid_mask(height, width, trap.vertices)
        if rng is None:
            out[mask] = 1
        else:
            p = min(1.0, density)
            hits = rng.random(int(mask.sum())) < p
            rows, cols = np.nonzero(mask)
            out[rows[hits], cols[hits]] = 1
    for center, radius in graph.nodes:
        out[_disk_mask(height, width, center, radius)] = 1
    return BinaryImage(out)


def apply_placement(graph: StrokeGraph, xf: AffineTransform) -> StrokeGraph:
    """Map a graph through a similarity transform; radii scale by the
    transform's uniform scale factor. Non-similarities are rejected because
    circles must stay circles."""
    scale = xf.uniform_scale()
    nodes = tuple((tuple(affine_apply(xf, np.asarray(c))), r * scale)
                  for c, r in graph.nodes)
    return StrokeGraph(nodes, graph.edges, graph.canvas)


# ---------------------------------------------------------------------------
# Pair database construction.

def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _process_one(args):
    """Worker: run the pipeline on one input file and write its artifacts.
    Returns (source, pair_dict or None, error or None)."""
    (source, out_dir, params, binarize_cfg, morph_cfg, fill_mode, seed) = args
    try:
        gray = read_image(source)
        binary = morph_clean(binarize(gray, binarize_cfg), morph_cfg)
        src_hash = _sha256_file(source)
        result = extract(binary, params, source_sha256=src_hash)
        graph = graph_from_result(result)
        synthetic = render_synthetic(graph, mode=fill_mode, seed=seed)

        stem = Path(source).stem
        original_copy = os.path.join(out_dir, f"{stem}.original{Path(source).suffix}")
        synthetic_path = os.path.join(out_dir, f"{stem}.synthetic.pgm")
        result_path = os.path.join(out_dir, f"{stem}.result.json")
        with open(source, "rb") as fh:
            data = fh.read()
        with open(original_copy, "wb") as fh:
            fh.write(data)
        write_pgm(synthetic, synthetic_path)
        with open(result_path, "w", encoding="ascii") as fh:
            fh.write(result_to_json(result))
        pair = {
            "source": str(source),
            "synthetic": os.path.basename(synthetic_path),
            "result": os.path.basename(result_path),
            "sha256_source": src_hash,
            "sha256_synthetic": _sha256_file(synthetic_path),
        }
        return str(source), pair, None
    except Exception as exc:  # per-file isolation: recorded in the manifest
        return str(source), None, f"{type(exc).__name__}: {exc}"


def build_pair_db(inputs, params: PipelineParams, out_dir,
                  binarize_cfg: BinarizeConfig = BinarizeConfig(),
                  morph_cfg: MorphConfig = MorphConfig(),
                  fill_mode: str = "solid",
                  workers: int = 1) -> dict:
    """Run the pipeline over a corpus and persist an original<->synthetic
    pair database. Per-file failures are recorded in the manifest and do not
    stop the run. Returns the manifest dict (also written to
    ``manifest.json``)."""
    out_dir = str(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    sources = sorted(str(p) for p in inputs)
    jobs = [(s, out_dir, params, binarize_cfg, morph_cfg, fill_mode, params.seed)
            for s in sources]
    if workers > 1 and len(jobs) > 1:
        with futures.ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_process_one, jobs))
    else:
        outcomes = [_process_one(job) for job in jobs]

    pairs = []
    errors = []
    for source, pair, error in outcomes:  # input-sorted, worker-order independent
        if pair is not None:
            pairs.append(pair)
        else:
            errors.append({"source": source, "error": error})
    manifest = {
        "version": MANIFEST_VERSION,
        "params": params_to_dict(params),
        "fill_mode": fill_mode,
        "pairs": pairs,
        "errors": errors,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
        fh.write(_dumps_fixed(manifest) + "\n")
    return manifest
