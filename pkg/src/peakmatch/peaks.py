"""Project panorama peaks onto the photo and refine each position locally.

Even a correct global alignment leaves small per-peak errors (the render is
never pixel-perfect), so each peak is re-matched on its own: a window around
the peak is cut from both edge maps, weighted by a triweight kernel that
fades surrounding peaks out, and correlated again with a bounded shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .edges import EdgeMap
from .matching import Alignment, compute_vcc_grid


@dataclass(frozen=True)
class Peak:
    """A named peak at pixel coordinates on the panorama render."""

    name: str
    pano_x: int
    pano_y: int


@dataclass(frozen=True)
class PeakTag:
    """A peak located on the photograph.

    ``photo_x``/``photo_y`` are the projected coordinates under the global
    alignment; adding ``refine_dx``/``refine_dy`` gives the refined
    position.  ``confidence`` is the local correlation maximum normalized by
    the photo pattern's self-score (1.0 = the pattern matched itself).
    """

    name: str
    photo_x: int
    photo_y: int
    refine_dx: int
    refine_dy: int
    visible: bool
    confidence: float

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "x": self.photo_x,
            "y": self.photo_y,
            "dx": self.refine_dx,
            "dy": self.refine_dy,
            "visible": self.visible,
            "confidence": self.confidence,
        }


@dataclass
class RefineConfig:
    """Pattern radius and the cap on the local refinement shift."""

    kernel_radius: int = 200
    max_shift: int = 50

    def __post_init__(self) -> None:
        if self.kernel_radius <= 0:
            raise ValueError("kernel_radius must be > 0")
        if not 0 <= self.max_shift <= self.kernel_radius:
            raise ValueError("max_shift must be in [0, kernel_radius]")


def triweight(d, r: float):
    """Triweight kernel (1 - (d/r)^2)^3 for d <= r, 0 beyond.

    Continuous, nonincreasing, with support exactly [0, r].  Accepts scalars
    or arrays of distances.
    """
    if r <= 0:
        raise ValueError("r must be > 0")
    d = np.asarray(d, dtype=np.float64)
    w = np.where(d <= r, (1.0 - (d / r) ** 2) ** 3, 0.0)
    return float(w) if w.ndim == 0 else w


def extract_peak_pattern(
    edges: EdgeMap, center: tuple[int, int], cfg: RefineConfig
) -> EdgeMap:
    """Cut a (2r+1)^2 window centered at ``center`` = (x, y), multiplying
    strengths by the triweight of the distance to the center.  Regions
    outside the source map read as strength 0; directions are preserved."""
    r = cfg.kernel_radius
    cx, cy = int(center[0]), int(center[1])
    size = 2 * r + 1
    strength = np.zeros((size, size))
    direction = np.zeros((size, size))

    src_y0 = max(0, cy - r)
    src_y1 = min(edges.height, cy + r + 1)
    src_x0 = max(0, cx - r)
    src_x1 = min(edges.width, cx + r + 1)
    if src_y1 > src_y0 and src_x1 > src_x0:
        dst_y0 = src_y0 - (cy - r)
        dst_x0 = src_x0 - (cx - r)
        h = src_y1 - src_y0
        w = src_x1 - src_x0
        strength[dst_y0 : dst_y0 + h, dst_x0 : dst_x0 + w] = edges.strength[
            src_y0:src_y1, src_x0:src_x1
        ]
        direction[dst_y0 : dst_y0 + h, dst_x0 : dst_x0 + w] = edges.direction[
            src_y0:src_y1, src_x0:src_x1
        ]

    offsets = np.arange(size) - r
    dist = np.hypot(offsets[:, None], offsets[None, :])
    strength *= triweight(dist, r)
    direction[strength == 0.0] = 0.0
    return EdgeMap(strength, direction)


def refine_peak(
    photo_edges: EdgeMap,
    pano_edges: EdgeMap,
    peak: Peak,
    alignment: Alignment,
    cfg: RefineConfig,
) -> PeakTag:
    """Locate one peak on the photo and refine it by local correlation.

    The peak projects to (pano_x - dx) mod W, pano_y - dy; if that lands
    outside the photo the tag is returned not-visible.  Otherwise triweight
    patterns are extracted around the projected point (photo) and the peak
    (panorama), correlated, and the argmax within ``max_shift`` gives the
    refinement.  Two empty patterns degenerate to shift (0, 0), confidence 0.
    """
    proj_x = int(round(peak.pano_x - alignment.dx)) % pano_edges.width
    proj_y = int(round(peak.pano_y - alignment.dy))
    if not (0 <= proj_x < photo_edges.width and 0 <= proj_y < photo_edges.height):
        return PeakTag(peak.name, proj_x, proj_y, 0, 0, False, 0.0)

    photo_pattern = extract_peak_pattern(photo_edges, (proj_x, proj_y), cfg)
    pano_pattern = extract_peak_pattern(pano_edges, (peak.pano_x, peak.pano_y), cfg)
    self_score = float(np.sum(photo_pattern.strength**4))
    if self_score == 0.0 and not np.any(pano_pattern.strength):
        return PeakTag(peak.name, proj_x, proj_y, 0, 0, True, 0.0)

    grid = compute_vcc_grid(photo_pattern, pano_pattern)
    width = grid.width
    dy_values = grid.dy_min + np.arange(grid.scores.shape[0])
    dx_signed = np.arange(width)
    dx_signed = np.where(dx_signed <= width // 2, dx_signed, dx_signed - width)
    within = (
        dy_values[:, None] ** 2 + dx_signed[None, :] ** 2
    ) <= cfg.max_shift**2
    masked = np.where(within, grid.scores, -np.inf)
    iy, ix = np.unravel_index(int(np.argmax(masked)), masked.shape)
    shift_y = int(dy_values[iy])
    shift_x = int(dx_signed[ix])
    confidence = (
        max(0.0, float(grid.scores[iy, ix])) / self_score if self_score > 0 else 0.0
    )
    return PeakTag(peak.name, proj_x, proj_y, -shift_x, -shift_y, True, confidence)


def tag_all_peaks(
    photo_edges: EdgeMap,
    pano_edges: EdgeMap,
    peaks: list[Peak],
    alignment: Alignment,
    cfg: RefineConfig,
) -> list[PeakTag]:
    """Refine every peak independently, preserving order.  A peak whose
    refinement fails for any reason becomes a not-visible tag."""
    tags: list[PeakTag] = []
    for peak in peaks:
        try:
            tags.append(refine_peak(photo_edges, pano_edges, peak, alignment, cfg))
        except Exception:
            proj_x = int(round(peak.pano_x - alignment.dx)) % pano_edges.width
            proj_y = int(round(peak.pano_y - alignment.dy))
            tags.append(PeakTag(peak.name, proj_x, proj_y, 0, 0, False, 0.0))
    return tags
