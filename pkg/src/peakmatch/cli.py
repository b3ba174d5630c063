"""Command-line interface: align photos, tag peaks, evaluate datasets,
generate synthetic suites, and estimate FOV.

Human-readable text goes to stderr; stdout carries machine JSON when
``--json`` is given.  Pipeline errors exit with the error's stable code and
print a machine-readable error object to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .edges import load_raster, resize_raster, save_raster
from .errors import EmptyDataset, PeakmatchError
from .evaluation import GroundTruth, evaluate_dataset, format_summary_table
from .matching import Alignment, compute_vcc_grid, save_score_heatmap
from .metadata import (
    compute_scale_factor,
    estimate_fov,
    load_sensor_db,
    match_camera,
    parse_photo_meta,
)
from .panorama import (
    Panorama,
    SynthConfig,
    gen_synthetic_case,
    load_case,
    load_panorama,
    write_case,
)
from .peaks import tag_all_peaks
from .pipeline import (
    RunConfig,
    align_photo,
    panorama_edges,
    photo_edges,
    render_overlay,
)

_CONFIG_FLAGS = {
    # flag dest -> RunConfig field
    "rho_p": "rho_p",
    "rho_r": "rho_r",
    "b_p": "b_p",
    "b_r": "b_r",
    "l_p": "l_p",
    "l_r": "l_r",
    "scale_sweep": "scale_sweep",
    "sweep_steps": "sweep_steps",
    "sigma": "sigma",
    "triweight_r": "triweight_radius",
    "max_shift": "max_shift",
    "robust": "robust",
    "robust_exponent": "robust_exponent",
    "robust_penalty": "robust_penalty",
    "robust_fit_length": "robust_fit_length",
    "robust_neighborhood": "robust_neighborhood",
    "robust_cluster_distance": "robust_cluster_distance",
    "robust_top_n": "robust_top_n",
    "threshold": "threshold_deg",
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("operating parameters")
    group.add_argument("--config", metavar="FILE", help="key=value config file")
    group.add_argument("--rho-p", type=float, help="photo edge strength threshold")
    group.add_argument("--rho-r", type=float, help="panorama edge strength threshold")
    group.add_argument("--b-p", type=float, help="photo edge filtering base")
    group.add_argument("--b-r", type=float, help="panorama edge filtering base")
    group.add_argument("--l-p", type=int, help="photo filtering segment length")
    group.add_argument("--l-r", type=int, help="panorama filtering segment length")
    group.add_argument("--scale-sweep", type=float, metavar="PCT",
                       help="sweep +-PCT%% around the estimated scale")
    group.add_argument("--sweep-steps", type=int, help="scales tried in the sweep")
    group.add_argument("--sigma", type=float, help="edge detector Gaussian sigma")
    group.add_argument("--triweight-r", type=int, help="peak pattern radius")
    group.add_argument("--max-shift", type=int, help="peak refinement shift cap")
    group.add_argument("--robust", action=argparse.BooleanOptionalAction,
                       default=None, help="re-rank top candidates by edge overlap")
    group.add_argument("--robust-exponent", type=float, help=argparse.SUPPRESS)
    group.add_argument("--robust-penalty", type=float, help=argparse.SUPPRESS)
    group.add_argument("--robust-fit-length", type=float, help=argparse.SUPPRESS)
    group.add_argument("--robust-neighborhood", type=float, help=argparse.SUPPRESS)
    group.add_argument("--robust-cluster-distance", type=float, help=argparse.SUPPRESS)
    group.add_argument("--robust-top-n", type=int, help=argparse.SUPPRESS)
    group.add_argument("--threshold", type=float, metavar="DEG",
                       help="correct-match error threshold in degrees")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then config file, then explicit flags."""
    config = RunConfig()
    if getattr(args, "config", None):
        config = RunConfig.from_file(args.config, base=config)
    overrides = {
        field: getattr(args, dest)
        for dest, field in _CONFIG_FLAGS.items()
        if getattr(args, dest, None) is not None
    }
    return config.with_overrides(overrides)


def _emit(args: argparse.Namespace, payload: dict, human: str) -> None:
    if human:
        print(human, file=sys.stderr)
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))


def _load_pano_args(args: argparse.Namespace) -> Panorama:
    raster = load_raster(args.panorama)
    q = args.q if args.q is not None else raster.shape[1] / 360.0
    if getattr(args, "peaks", None):
        return load_panorama(args.panorama, args.peaks, q)
    return Panorama(raster, q, [])


def _resolve_fov(args: argparse.Namespace):
    """FOV in radians plus the CameraMatch when it came from the database."""
    if args.fov is not None:
        return math.radians(args.fov), None
    meta = parse_photo_meta(args.photo)
    if not args.sensors:
        raise PeakmatchError(
            "no --fov given and no --sensors database to resolve the camera"
        )
    db = load_sensor_db(args.sensors)
    match = match_camera(meta, db)
    return estimate_fov(meta.focal_length, match.spec.sensor_width), match


def cmd_align(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    pano = _load_pano_args(args)
    photo = load_raster(args.photo)
    fov, match = _resolve_fov(args)

    report = align_photo(photo, pano, fov, config, camera_match=match)

    if args.overlay or args.heatmap:
        scaled = resize_raster(photo, report.alignment.scale)
        p_edges = photo_edges(scaled, config)
        r_edges = panorama_edges(pano, config)
        if args.overlay:
            save_raster(render_overlay(p_edges, r_edges, report.alignment), args.overlay)
        if args.heatmap:
            save_score_heatmap(compute_vcc_grid(p_edges, r_edges), args.heatmap)
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")

    a = report.alignment
    human = (
        f"alignment: dx={a.dx} dy={a.dy} scale={a.scale:.4f} "
        f"azimuth={a.azimuth_deg:.2f} deg score={a.score:.4g}; "
        f"{sum(t.visible for t in report.peak_tags)}/{len(report.peak_tags)} "
        f"peaks visible"
    )
    _emit(args, report.to_json_dict(), human)
    return 0


def cmd_tag_peaks(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    pano = _load_pano_args(args)
    raw = json.loads(Path(args.alignment).read_text(encoding="utf-8"))
    alignment = Alignment.from_json_dict(raw.get("alignment", raw))
    photo = load_raster(args.photo)
    scaled = resize_raster(photo, alignment.scale)
    tags = tag_all_peaks(
        photo_edges(scaled, config),
        panorama_edges(pano, config),
        pano.peaks,
        alignment,
        config.refine_config(),
    )
    payload = {"peak_tags": [t.to_json_dict() for t in tags]}
    human = "\n".join(
        f"{t.name}: ({t.photo_x + t.refine_dx}, {t.photo_y + t.refine_dy}) "
        f"confidence={t.confidence:.3f}"
        if t.visible
        else f"{t.name}: not visible"
        for t in tags
    )
    _emit(args, payload, human)
    return 0


def _run_case(case_dir: str, config_dict: dict) -> dict:
    """Align one case directory (must stay importable for process pools)."""
    config = RunConfig(**config_dict)
    try:
        case = load_case(case_dir)
        report = align_photo(
            case.photo, case.panorama, math.radians(case.fov_deg), config
        )
        return {
            "case": Path(case_dir).name,
            "pairs": case.truth.pairs,
            "categories": case.truth.categories,
            "q": case.q,
            "alignment": report.alignment.to_json_dict(),
        }
    except Exception as exc:  # per-case failures become incorrect matches
        return {
            "case": Path(case_dir).name,
            "failure": {"type": type(exc).__name__, "message": str(exc)},
        }


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    dataset = Path(args.dataset)
    case_dirs = sorted(
        str(p.parent) for p in dataset.glob("*/truth.json") if p.parent.is_dir()
    )
    if not case_dirs:
        raise EmptyDataset(f"{dataset}: no case directories with truth.json")

    config_dict = asdict(config)
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_case, case_dirs, [config_dict] * len(case_dirs)))
    else:
        results = [_run_case(d, config_dict) for d in case_dirs]

    aligned = [r for r in results if "failure" not in r]
    failures = [r for r in results if "failure" in r]
    threshold = config.threshold_deg

    summary = None
    if aligned:
        eval_cases = [
            (
                GroundTruth(pairs=r.pop("pairs"), categories=r["categories"]),
                Alignment.from_json_dict(r["alignment"]),
                r["q"],
            )
            for r in aligned
        ]
        summary = evaluate_dataset(eval_cases, threshold)
        for r, error in zip(aligned, summary.per_photo_errors):
            r["error_deg"] = error

    total = len(results)
    correct = sum(
        1 for r in aligned if r["error_deg"] < threshold
    )
    payload = {
        "total_cases": total,
        "correct_rate": correct / total,
        "threshold_deg": threshold,
        "failures": failures,
        "cases": results,
    }
    if summary is not None:
        payload["summary"] = summary.to_json_dict()

    human_lines = [f"{total} cases, {correct} correct (< {threshold:g} deg): "
                   f"{100.0 * correct / total:.1f}%"]
    if summary is not None:
        human_lines.append(format_summary_table(summary))
    for f in failures:
        human_lines.append(f"FAILED {f['case']}: {f['failure']['type']}: "
                           f"{f['failure']['message']}")
    _emit(args, payload, "\n".join(human_lines))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for seed in range(args.seed, args.seed + args.count):
        cfg = SynthConfig(
            seed=seed,
            q=args.q,
            layers=args.layers,
            photo_fov=args.photo_fov,
            noise_density=args.noise,
            peak_count=args.peak_count,
            pano_height=args.pano_height,
            recolor=args.recolor,
        )
        case = gen_synthetic_case(cfg)
        write_case(case, out / f"case_{seed:05d}")
        written.append(f"case_{seed:05d}")
    _emit(args, {"out_dir": str(out), "cases": written},
          f"wrote {len(written)} cases to {out}")
    return 0


def cmd_fov(args: argparse.Namespace) -> int:
    meta = parse_photo_meta(args.photo)
    db = load_sensor_db(args.sensors)
    match = match_camera(meta, db)
    fov = estimate_fov(meta.focal_length, match.spec.sensor_width)
    payload = {
        "fov_rad": fov,
        "fov_deg": math.degrees(fov),
        "focal_length_mm": meta.focal_length,
        "camera_match": {
            "make": match.spec.make,
            "model": match.spec.model,
            "sensor_width_mm": match.spec.sensor_width,
            "similarity": match.similarity,
        },
    }
    human = (
        f"{meta.make} {meta.model}: matched {match.spec.make} "
        f"{match.spec.model} (similarity {match.similarity:.3f}), "
        f"sensor {match.spec.sensor_width} mm, FOV {math.degrees(fov):.2f} deg"
    )
    if args.pano_width:
        scale = compute_scale_factor(fov, meta.width_px, args.pano_width)
        payload["scale"] = scale
        human += f", scale {scale:.4f}"
    _emit(args, payload, human)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peakmatch",
        description="Align geo-tagged mountain photos to 360-degree panorama "
        "renders and tag the visible peaks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_align = sub.add_parser("align", help="estimate a photo's viewing direction")
    p_align.add_argument("--photo", required=True)
    p_align.add_argument("--panorama", required=True)
    p_align.add_argument("--peaks", help="peak list JSON for tagging")
    p_align.add_argument("--sensors", help="camera sensor database CSV")
    p_align.add_argument("--fov", type=float, metavar="DEG",
                         help="photo field of view (skips EXIF estimation)")
    p_align.add_argument("--q", type=float, help="panorama pixels/degree "
                         "(default: width/360)")
    p_align.add_argument("--overlay", metavar="PNG",
                         help="write an edge overlay diagnostic image")
    p_align.add_argument("--heatmap", metavar="PNG",
                         help="write the correlation score grid as a grayscale image")
    p_align.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p_align.add_argument("--json", action="store_true",
                         help="print the JSON report to stdout")
    _add_config_flags(p_align)
    p_align.set_defaults(func=cmd_align)

    p_tag = sub.add_parser("tag-peaks", help="tag peaks for a known alignment")
    p_tag.add_argument("--photo", required=True)
    p_tag.add_argument("--panorama", required=True)
    p_tag.add_argument("--peaks", required=True)
    p_tag.add_argument("--alignment", required=True,
                       help="alignment JSON (or a full align report)")
    p_tag.add_argument("--q", type=float)
    p_tag.add_argument("--json", action="store_true")
    _add_config_flags(p_tag)
    p_tag.set_defaults(func=cmd_tag_peaks)

    p_eval = sub.add_parser("evaluate", help="run and score a dataset directory")
    p_eval.add_argument("--dataset", required=True,
                        help="directory of case subdirectories")
    p_eval.add_argument("--jobs", type=int, default=1,
                        help="parallel case workers")
    p_eval.add_argument("--json", action="store_true")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_synth = sub.add_parser("synth", help="generate synthetic ground-truth cases")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--count", type=int, default=1)
    p_synth.add_argument("--q", type=float, default=20.0)
    p_synth.add_argument("--layers", type=int, default=3)
    p_synth.add_argument("--photo-fov", type=float, default=40.0)
    p_synth.add_argument("--noise", type=float, default=0.0)
    p_synth.add_argument("--peak-count", type=int, default=5)
    p_synth.add_argument("--pano-height", type=int, default=260)
    p_synth.add_argument("--recolor", action="store_true")
    p_synth.add_argument("--json", action="store_true")
    p_synth.set_defaults(func=cmd_synth)

    p_fov = sub.add_parser("fov", help="estimate FOV and scale from EXIF")
    p_fov.add_argument("--photo", required=True)
    p_fov.add_argument("--sensors", required=True)
    p_fov.add_argument("--pano-width", type=int,
                       help="panorama width in px (adds the scale factor)")
    p_fov.add_argument("--json", action="store_true")
    p_fov.set_defaults(func=cmd_fov)

    return parser


def _emit_error(exc: Exception) -> None:
    print(
        json.dumps(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sort_keys=True,
        )
    )
    print(f"error: {exc}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PeakmatchError as exc:
        _emit_error(exc)
        return exc.exit_code
    except (ValueError, KeyError, OSError) as exc:
        _emit_error(exc)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
