"""Command-line front end.

Subcommands:
  extract  -- run the trapezoid pipeline over images, one result JSON each
  overlay  -- draw the top-N trapezoids of a result back onto its image
  synth    -- build an original<->synthetic pair database

Exit codes: 0 success, 1 runtime failure, 2 usage error. Diagnostics go to
stderr; stdout carries data (paths of produced artifacts) only.

Every pipeline flag can also be given in a flat key=value config file
(--config); keys equal the flag names without the leading dashes.
Precedence: flag > config file > built-in default.
"""
from __future__ import annotations

import argparse
import glob
import hashlib
import math
import os
import sys
from concurrent import futures
from pathlib import Path

from .errors import StrokeTrapError
from .features import (
    PipelineParams,
    extract,
    render_overlay,
    result_from_json,
    result_to_json,
)
from .image import BinarizeConfig, MorphConfig, binarize, morph_clean, read_image, write_image
from .synthesis import build_pair_db


def _parse_eps(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _parse_morph(text: str) -> tuple:
    return tuple(op for op in text.replace(",", " ").split() if op)


# flag name -> (parser from string, built-in default)
DEFAULTS = {
    "seed": (int, 0),
    "sample-fraction": (float, 1.0),
    "min-pts": (int, 5),
    "eps": (_parse_eps, math.inf),
    "bin-width": (float, 1.0),
    "min-area": (float, 4.0),
    "min-density": (float, 0.15),
    "num-trapezoids": (int, 50),
    "threshold-percentile": (float, 75.0),
    "threshold-scale": (float, 3.0),
    "threshold-method": (str, "otsu"),
    "threshold-value": (int, 128),
    "ink": (str, "dark"),
    "morph": (_parse_morph, ()),
    "morph-repeats": (int, 1),
    "fill-mode": (str, "solid"),
    "workers": (int, os.cpu_count() or 1),
}


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` file; '#' starts a comment; keys are flag names."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise StrokeTrapError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in DEFAULTS:
                raise StrokeTrapError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flag values, config-file values, and defaults (in that order of
    precedence) into a plain dict keyed by flag name."""
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for key, (parse, default) in DEFAULTS.items():
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in file_values:
            resolved[key] = parse(file_values[key])
        else:
            resolved[key] = default
    return resolved


def pipeline_params(cfg: dict) -> PipelineParams:
    return PipelineParams(
        sample_fraction=cfg["sample-fraction"],
        seed=cfg["seed"],
        min_pts=cfg["min-pts"],
        eps=cfg["eps"],
        bin_width=cfg["bin-width"],
        min_area=cfg["min-area"],
        min_density=cfg["min-density"],
        num_trapezoids=cfg["num-trapezoids"],
        threshold_percentile=cfg["threshold-percentile"],
        threshold_scale=cfg["threshold-scale"],
    )


def binarize_config(cfg: dict) -> BinarizeConfig:
    return BinarizeConfig(method=cfg["threshold-method"],
                          threshold=cfg["threshold-value"],
                          dark_ink=cfg["ink"] == "dark")


def morph_config(cfg: dict) -> MorphConfig:
    return MorphConfig(ops=cfg["morph"], repeats=cfg["morph-repeats"])


def _expand_inputs(patterns) -> list:
    paths = set()
    for pattern in patterns:
        hits = glob.glob(pattern)
        if hits:
            paths.update(hits)
        elif os.path.exists(pattern):
            paths.add(pattern)
    return sorted(paths)


def _sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _add_pipeline_flags(sub: argparse.ArgumentParser) -> None:
    g = sub.add_argument_group("pipeline")
    g.add_argument("--config", help="flat key=value config file")
    g.add_argument("--seed", type=int, help="sampling / stochastic-fill seed (default: 0)")
    g.add_argument("--sample-fraction", type=float,
                   help="fraction of foreground pixels kept (default: 1.0)")
    g.add_argument("--min-pts", type=int,
                   help="OPTICS minimum points (default: 5)")
    g.add_argument("--eps", type=_parse_eps,
                   help="OPTICS epsilon; 'inf' allowed (default: inf)")
    g.add_argument("--bin-width", type=float,
                   help="distance-quantization bin width for cluster radii, px (default: 1.0)")
    g.add_argument("--min-area", type=float,
                   help="noise filter: minimum trapezoid area, px^2 (default: 4.0)")
    g.add_argument("--min-density", type=float,
                   help="noise filter: minimum brightness density (default: 0.15)")
    g.add_argument("--num-trapezoids", type=int,
                   help="max trapezoids drawn in overlays (default: 50)")
    g.add_argument("--threshold-percentile", type=float,
                   help="reachability percentile for cluster extraction (default: 75.0)")
    g.add_argument("--threshold-scale", type=float,
                   help="scale applied to the reachability cut (default: 3.0)")
    g.add_argument("--threshold-method", choices=["otsu", "fixed"],
                   help="binarization threshold method (default: otsu)")
    g.add_argument("--threshold-value", type=int,
                   help="fixed binarization threshold in [0, 255] (default: 128)")
    g.add_argument("--ink", choices=["dark", "light"],
                   help="ink polarity (default: dark)")
    g.add_argument("--morph", type=_parse_morph,
                   help="comma-separated open/close sequence (default: none)")
    g.add_argument("--morph-repeats", type=int,
                   help="repetitions of the morph sequence (default: 1)")
    g.add_argument("--fill-mode", choices=["solid", "stochastic"],
                   help="synthetic fill mode (default: solid)")
    g.add_argument("--workers", type=int,
                   help="parallel workers (default: available parallelism)")


def _extract_one(job):
    source, out_dir, params, bin_cfg, morph_cfg = job
    try:
        gray = read_image(source)
        binary = morph_clean(binarize(gray, bin_cfg), morph_cfg)
        result = extract(binary, params, source_sha256=_sha256_file(source))
        out_path = os.path.join(out_dir, f"{Path(source).stem}.result.json")
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(result_to_json(result))
        return source, out_path, None
    except Exception as exc:
        return source, None, f"{type(exc).__name__}: {exc}"


def cmd_extract(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    inputs = _expand_inputs(args.input)
    if not inputs:
        print("error: no inputs matched", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)
    params = pipeline_params(cfg)
    jobs = [(src, args.out, params, binarize_config(cfg), morph_config(cfg))
            for src in inputs]
    if cfg["workers"] > 1 and len(jobs) > 1:
        with futures.ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            outcomes = list(pool.map(_extract_one, jobs))
    else:
        outcomes = [_extract_one(job) for job in jobs]
    failed = False
    for source, out_path, error in outcomes:
        if error is None:
            print(out_path)
        else:
            print(f"error: {source}: {error}", file=sys.stderr)
            failed = True
    return 1 if failed else 0


def cmd_overlay(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    with open(args.result, "r", encoding="utf-8") as fh:
        result = result_from_json(fh.read())
    image_path = args.image or result.source
    if not image_path or not os.path.exists(image_path):
        print(f"error: source image not found: {image_path!r}", file=sys.stderr)
        return 1
    if result.source_sha256 and _sha256_file(image_path) != result.source_sha256:
        print(f"error: {image_path} does not match the hash recorded in "
              f"{args.result}", file=sys.stderr)
        return 1
    gray = read_image(image_path)
    binary = morph_clean(binarize(gray, binarize_config(cfg)), morph_config(cfg))
    overlay = render_overlay(binary, result, cfg["num-trapezoids"])
    write_image(overlay, args.out)
    print(args.out)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    inputs = _expand_inputs(args.input)
    if not inputs:
        print("error: no inputs matched", file=sys.stderr)
        return 1
    manifest = build_pair_db(
        inputs,
        pipeline_params(cfg),
        args.out,
        binarize_cfg=binarize_config(cfg),
        morph_cfg=morph_config(cfg),
        fill_mode=cfg["fill-mode"],
        workers=cfg["workers"],
    )
    for entry in manifest["errors"]:
        print(f"error: {entry['source']}: {entry['error']}", file=sys.stderr)
    print(os.path.join(args.out, "manifest.json"))
    return 1 if manifest["errors"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stroketrap",
        description="Stroke-trapezoid feature extraction for binarized "
                    "glyph images, with synthetic pair generation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="run the pipeline, write result JSONs")
    p_extract.add_argument("--input", nargs="+", required=True,
                           help="input images or globs (PGM/PNG)")
    p_extract.add_argument("--out", required=True, help="output directory")
    _add_pipeline_flags(p_extract)
    p_extract.set_defaults(func=cmd_extract)

    p_overlay = sub.add_parser("overlay", help="draw top-N trapezoids onto the source image")
    p_overlay.add_argument("--result", required=True, help="result JSON from 'extract'")
    p_overlay.add_argument("--image", help="source image (default: path recorded in the result)")
    p_overlay.add_argument("--out", required=True, help="overlay output image (PGM/PNG)")
    _add_pipeline_flags(p_overlay)
    p_overlay.set_defaults(func=cmd_overlay)

    p_synth = sub.add_parser("synth", help="build an original<->synthetic pair database")
    p_synth.add_argument("--input", nargs="+", required=True,
                         help="input images or globs (PGM/PNG)")
    p_synth.add_argument("--out", required=True, help="output directory")
    _add_pipeline_flags(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StrokeTrapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
