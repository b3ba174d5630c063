"""End-to-end photo alignment: FOV/scale -> edges -> correlation -> peaks.

``RunConfig`` gathers every operating parameter with the defaults that won
the parameter study (photo threshold 0.3, panorama threshold 0.2, photo
decay base 0.7 with segment length 2, no panorama filtering, no scale
sweep).  ``align_photo`` runs the pipeline on in-memory inputs; the CLI
wraps it with file handling.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Union

import numpy as np

from .edges import (
    EdgeDetectConfig,
    EdgeMap,
    FilterConfig,
    RasterImage,
    detect_edges,
    filter_edges,
    resize_raster,
)
from .matching import (
    Alignment,
    RobustConfig,
    best_alignment,
    compute_vcc_grid,
    robust_rescore,
    scale_sweep,
)
from .metadata import CameraMatch, compute_scale_factor
from .panorama import Panorama
from .peaks import PeakTag, RefineConfig, tag_all_peaks


@dataclass
class RunConfig:
    """All operating parameters, defaulting to the best-performing values."""

    rho_p: float = 0.3  # photo edge strength threshold
    rho_r: float = 0.2  # panorama edge strength threshold
    b_p: float = 0.7  # photo edge filtering base
    b_r: float = 1.0  # panorama edge filtering base (1.0 = no filtering)
    l_p: int = 2  # photo filtering max segment length
    l_r: int = 2  # panorama filtering max segment length
    scale_sweep: float = 0.0  # +- percent around the estimated scale
    sweep_steps: int = 3
    sigma: float = 1.0  # Gaussian sigma of the edge detector
    triweight_radius: int = 200  # peak pattern radius r
    max_shift: int = 50  # cap on per-peak refinement
    robust: bool = False  # re-rank top candidates by contiguous overlap
    robust_exponent: float = 2.0
    robust_penalty: float = 5.0
    robust_fit_length: float = 3.0
    robust_neighborhood: float = 2.0
    robust_cluster_distance: float = 2.0
    robust_top_n: int = 10
    threshold_deg: float = 4.0  # correct-match threshold for evaluation

    def robust_config(self) -> RobustConfig:
        return RobustConfig(
            exponent=self.robust_exponent,
            penalty=self.robust_penalty,
            fit_length=self.robust_fit_length,
            neighborhood_radius=self.robust_neighborhood,
            cluster_distance=self.robust_cluster_distance,
            top_n=self.robust_top_n,
        )

    def refine_config(self) -> RefineConfig:
        return RefineConfig(
            kernel_radius=self.triweight_radius, max_shift=self.max_shift
        )

    def with_overrides(self, overrides: dict) -> "RunConfig":
        """New config with the given non-None field values applied.

        Values are coerced to the field's type, so strings from flag or
        config-file parsing are accepted.
        """
        known = {f.name for f in fields(self)}
        clean = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise KeyError(f"unknown configuration key {key!r}")
            current = getattr(self, key)
            if isinstance(current, bool):
                if isinstance(value, bool):
                    clean[key] = value
                else:
                    clean[key] = str(value).strip().lower() in ("1", "true", "yes", "on")
            else:
                clean[key] = type(current)(value)
        return replace(self, **clean)

    @classmethod
    def from_file(
        cls, path: Union[str, Path], base: "RunConfig | None" = None
    ) -> "RunConfig":
        """Parse a UTF-8 key=value file ('#' starts a comment)."""
        base = base if base is not None else cls()
        overrides: dict = {}
        for lineno, raw in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            overrides[key] = value
        return base.with_overrides(overrides)


@dataclass
class AlignmentReport:
    """Everything one pipeline run produced."""

    alignment: Alignment
    peak_tags: list[PeakTag]
    fov: float  # radians
    scale: float
    camera_match: CameraMatch | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "alignment": self.alignment.to_json_dict(),
            "peak_tags": [tag.to_json_dict() for tag in self.peak_tags],
            "fov": self.fov,
            "scale": self.scale,
            "timings_ms": self.timings_ms,
        }
        if self.camera_match is not None:
            out["camera_match"] = {
                "make": self.camera_match.spec.make,
                "model": self.camera_match.spec.model,
                "sensor_width_mm": self.camera_match.spec.sensor_width,
                "similarity": self.camera_match.similarity,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def panorama_edges(pano: Panorama, config: RunConfig) -> EdgeMap:
    """Detect and (optionally) filter the panorama's edge map."""
    detected = detect_edges(
        pano.raster, EdgeDetectConfig(config.sigma, config.rho_r)
    )
    return filter_edges(detected, FilterConfig(config.b_r, config.l_r))


def photo_edges(photo: RasterImage, config: RunConfig) -> EdgeMap:
    """Detect and filter the (already scaled) photo's edge map."""
    detected = detect_edges(photo, EdgeDetectConfig(config.sigma, config.rho_p))
    return filter_edges(detected, FilterConfig(config.b_p, config.l_p))


def align_photo(
    photo: RasterImage,
    pano: Panorama,
    fov: float,
    config: RunConfig = RunConfig(),
    camera_match: CameraMatch | None = None,
    pano_edge_map: EdgeMap | None = None,
) -> AlignmentReport:
    """Run the full pipeline for one photo against one panorama.

    ``fov`` is the photo's horizontal field of view in radians (estimated
    from EXIF by the caller, or supplied directly).  Pass ``pano_edge_map``
    to reuse a precomputed panorama edge map across photos.
    """
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    scale = compute_scale_factor(fov, photo.shape[1], pano.width)
    scaled = resize_raster(photo, scale)
    timings["scale"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    p_edges = photo_edges(scaled, config)
    r_edges = pano_edge_map if pano_edge_map is not None else panorama_edges(pano, config)
    timings["edges"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    if config.scale_sweep > 0:
        alignment = scale_sweep(
            photo,
            r_edges,
            scale,
            config.scale_sweep / 100.0,
            config.sweep_steps,
            EdgeDetectConfig(config.sigma, config.rho_p),
            FilterConfig(config.b_p, config.l_p),
            pano.q,
        )
        if alignment.scale != scale:
            scaled = resize_raster(photo, alignment.scale)
            p_edges = photo_edges(scaled, config)
        grid = None  # rebuilt at the chosen scale only if re-scoring needs it
    else:
        grid = compute_vcc_grid(p_edges, r_edges)
        alignment = best_alignment(grid, scale, pano.q, p_edges.width)
    timings["match"] = (time.perf_counter() - t0) * 1000.0

    if config.robust:
        t0 = time.perf_counter()
        if grid is None:
            grid = compute_vcc_grid(p_edges, r_edges)
        alignment = robust_rescore(
            p_edges,
            r_edges,
            grid,
            config.robust_config(),
            scale=alignment.scale,
            pano_q=pano.q,
        )
        timings["robust"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    tags = tag_all_peaks(p_edges, r_edges, pano.peaks, alignment, config.refine_config())
    timings["peaks"] = (time.perf_counter() - t0) * 1000.0

    return AlignmentReport(
        alignment=alignment,
        peak_tags=tags,
        fov=fov,
        scale=alignment.scale,
        camera_match=camera_match,
        timings_ms=timings,
    )


def render_overlay(
    photo_edge_map: EdgeMap, pano_edge_map: EdgeMap, alignment: Alignment
) -> RasterImage:
    """Diagnostic raster: panorama edges in red, photo edges (placed at the
    alignment) in blue, on white."""
    h_r, w_r = pano_edge_map.strength.shape
    h_p, w_p = photo_edge_map.strength.shape
    canvas = np.full((h_r, w_r, 3), 255, dtype=np.uint8)

    pano_level = np.round(255 * (1.0 - pano_edge_map.strength)).astype(np.uint8)
    pano_on = pano_edge_map.strength > 0
    canvas[pano_on, 1] = pano_level[pano_on]
    canvas[pano_on, 2] = pano_level[pano_on]

    y_lo = max(0, -alignment.dy)
    y_hi = min(h_p, h_r - alignment.dy)
    if y_hi > y_lo:
        cols = (np.arange(w_p) + alignment.dx) % w_r
        strip = photo_edge_map.strength[y_lo:y_hi]
        level = np.round(255 * (1.0 - strip)).astype(np.uint8)
        on = strip > 0
        rows = np.arange(y_lo, y_hi) + alignment.dy
        sub = canvas[np.ix_(rows, cols)]
        sub[on, 0] = level[on]
        sub[on, 1] = level[on]
        sub[on, 2] = 255
        canvas[np.ix_(rows, cols)] = sub
    return canvas
