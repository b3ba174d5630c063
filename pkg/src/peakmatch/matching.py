"""Vector cross-correlation of edge maps over a cylindrical search space.

Edge maps are encoded as squared complex fields z = (rho * e^(i*theta))^2,
so the real part of the correlation

    score(dy, dx) = Re sum_{x,y} z_p(x, y) * conj(z_r((x + dx) mod W, y + dy))

rewards overlapping parallel edges (cos 0 = 1), ignores pi/4 crossings and
penalizes perpendicular ones (cos pi = -1).  The panorama is circular
horizontally and zero outside its vertical extent; dy spans every offset
with at least one row of overlap, [-H_photo, H_pano].

``vcc_brute_force`` evaluates the sum directly and serves as the oracle for
``compute_vcc_grid``, which computes the identical grid through 2-D FFTs on
the vertically zero-padded cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import scipy.fft as sfft
from PIL import Image
from scipy import ndimage
from scipy.spatial import cKDTree

from .edges import EdgeDetectConfig, EdgeMap, FilterConfig, RasterImage, detect_edges, filter_edges, resize_raster
from .errors import EmptyGrid, NoCandidates, PhotoWiderThanPanorama

# Local maxima closer than this (in grid pixels) collapse to one candidate
# when extracting re-scoring candidates.
CANDIDATE_SUPPRESSION_RADIUS = 5


@dataclass
class ScoreGrid:
    """Correlation scores indexed by (dy, dx); row i holds dy = dy_min + i,
    column j holds the cylindrical offset dx = j in [0, pano_width)."""

    scores: np.ndarray
    dy_min: int

    def __post_init__(self) -> None:
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 2:
            raise ValueError("scores must be 2-D")

    @property
    def dy_max(self) -> int:
        return self.dy_min + self.scores.shape[0] - 1

    @property
    def width(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class Alignment:
    """Overlap of the scaled photo on the panorama cylinder."""

    dx: int
    dy: int
    scale: float
    score: float
    azimuth_deg: float

    def to_json_dict(self) -> dict:
        return {
            "dx": self.dx,
            "dy": self.dy,
            "scale": self.scale,
            "score": self.score,
            "azimuth_deg": self.azimuth_deg,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Alignment":
        return cls(
            dx=int(data["dx"]),
            dy=int(data["dy"]),
            scale=float(data["scale"]),
            score=float(data["score"]),
            azimuth_deg=float(data["azimuth_deg"]),
        )


@dataclass
class RobustConfig:
    """Parameters of the contiguous-overlap re-scoring metric."""

    exponent: float = 2.0
    penalty: float = 5.0
    fit_length: float = 3.0
    neighborhood_radius: float = 2.0
    cluster_distance: float = 2.0
    top_n: int = 10

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")
        if self.penalty < 0:
            raise ValueError("penalty must be >= 0")
        if self.fit_length < 0:
            raise ValueError("fit_length must be >= 0")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")


def edge_similarity(v1: tuple[float, float], v2: tuple[float, float]) -> float:
    """Pointwise angular similarity rho1^2 * rho2^2 * cos(2*(theta1 - theta2))."""
    rho1, theta1 = v1
    rho2, theta2 = v2
    return rho1 * rho1 * rho2 * rho2 * math.cos(2.0 * (theta1 - theta2))


def _squared_field(edges: EdgeMap) -> np.ndarray:
    """Complex field (rho * e^(i*theta))^2 = rho^2 * e^(2i*theta)."""
    return edges.strength.astype(np.complex128) ** 2 * np.exp(2j * edges.direction)


def _check_widths(photo: EdgeMap, pano: EdgeMap) -> None:
    if photo.width > pano.width:
        raise PhotoWiderThanPanorama(
            f"photo is {photo.width} px wide but the panorama only {pano.width}"
        )


def vcc_brute_force(photo: EdgeMap, pano: EdgeMap) -> ScoreGrid:
    """Score every overlap by direct summation (the oracle path).

    For each vertical offset the overlapping panorama band is multiplied
    against the photo field column-by-column (one complex matrix product),
    then the cylinder diagonal is gathered for all dx at once.
    """
    _check_widths(photo, pano)
    h_p, w_p = photo.strength.shape
    h_r, w_r = pano.strength.shape
    zp = _squared_field(photo)
    zr_padded = np.zeros((h_r + 2 * h_p, w_r), dtype=np.complex128)
    zr_padded[h_p : h_p + h_r] = _squared_field(pano)

    n_dy = h_p + h_r + 1
    scores = np.empty((n_dy, w_r))
    x = np.arange(w_p)
    wrapped = (x[None, :] + np.arange(w_r)[:, None]) % w_r  # (dx, x) -> pano col
    for i in range(n_dy):
        band = zr_padded[i : i + h_p]  # photo row y overlaps pano row y + dy
        col_dots = band.conj().T @ zp  # (w_r, w_p): pano col x2 against photo col x
        scores[i] = col_dots.real[wrapped, x[None, :]].sum(axis=1)
    return ScoreGrid(scores, dy_min=-h_p)


def compute_vcc_grid(photo: EdgeMap, pano: EdgeMap) -> ScoreGrid:
    """Score every overlap through 2-D FFTs; identical contract to
    ``vcc_brute_force``.

    The panorama field is zero-padded by the photo height above and below,
    which makes the circular vertical correlation equal the linear one for
    every retained offset; the horizontal axis is genuinely circular.  The
    FFT height may exceed the padded height (more zeros) for speed.
    """
    _check_widths(photo, pano)
    h_p, w_p = photo.strength.shape
    h_r, w_r = pano.strength.shape
    h_padded = h_r + 2 * h_p
    h_fft = sfft.next_fast_len(h_padded)

    a = np.zeros((h_fft, w_r), dtype=np.complex128)
    a[:h_p, :w_p] = _squared_field(photo)
    b = np.zeros((h_fft, w_r), dtype=np.complex128)
    b[h_p : h_p + h_r] = _squared_field(pano)

    corr = sfft.ifft2(sfft.fft2(b) * np.conj(sfft.fft2(a)))
    scores = corr.real[: h_p + h_r + 1]
    return ScoreGrid(scores.copy(), dy_min=-h_p)


def save_score_heatmap(grid: ScoreGrid, path: Union[str, Path]) -> None:
    """Dump a score grid as a grayscale PNG (min..max stretched to 0..255)."""
    scores = grid.scores
    lo = float(scores.min()) if scores.size else 0.0
    hi = float(scores.max()) if scores.size else 0.0
    span = hi - lo if hi > lo else 1.0
    gray = np.round((scores - lo) / span * 255.0).astype(np.uint8)
    Image.fromarray(gray, mode="L").save(path)


def offset_to_azimuth(dx: float, photo_width: int, q: float) -> float:
    """Bearing (degrees in [0, 360)) of the photo's center column, with
    panorama column 0 defined as bearing 0 at q pixels/degree."""
    if q <= 0:
        raise ValueError("q must be > 0")
    return float((dx + photo_width / 2.0) / q % 360.0)


def best_alignment(
    grid: ScoreGrid, scale: float, pano_q: float, photo_width: int
) -> Alignment:
    """Offsets of the global score maximum (ties: smallest dy, then dx)."""
    if grid.scores.size == 0:
        raise EmptyGrid("score grid has no entries")
    iy, ix = np.unravel_index(int(np.argmax(grid.scores)), grid.scores.shape)
    dy = grid.dy_min + int(iy)
    dx = int(ix)
    return Alignment(
        dx=dx,
        dy=dy,
        scale=scale,
        score=float(grid.scores[iy, ix]),
        azimuth_deg=offset_to_azimuth(dx, photo_width, pano_q),
    )


def scale_sweep(
    photo: RasterImage,
    pano_edges: EdgeMap,
    base_scale: float,
    sweep_percent: float,
    steps: int,
    detect_cfg: EdgeDetectConfig,
    filter_cfg: FilterConfig,
    pano_q: float,
) -> Alignment:
    """Match at several scales around ``base_scale`` and keep the best.

    Every candidate scale rescales the raw photo and reruns detection,
    filtering and correlation.  Maxima are compared after dividing by the
    scaled photo's area ratio (larger photos accumulate larger raw sums).
    ``sweep_percent`` 0 degenerates to the single estimated scale.
    """
    if sweep_percent < 0:
        raise ValueError("sweep_percent must be >= 0")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if sweep_percent == 0 or steps == 1:
        candidates = np.array([base_scale])
    else:
        candidates = np.linspace(
            base_scale * (1.0 - sweep_percent),
            base_scale * (1.0 + sweep_percent),
            steps,
        )
    # Try candidates nearest the estimated scale first so exact ties keep it.
    order = np.argsort(np.abs(candidates - base_scale), kind="stable")

    base_area = photo.shape[0] * photo.shape[1]
    best: Alignment | None = None
    best_norm = -np.inf
    for k in candidates[order]:
        scaled = resize_raster(photo, k)
        edges = filter_edges(detect_edges(scaled, detect_cfg), filter_cfg)
        grid = compute_vcc_grid(edges, pano_edges)
        alignment = best_alignment(grid, float(k), pano_q, edges.width)
        area_ratio = (scaled.shape[0] * scaled.shape[1]) / base_area
        normalized = alignment.score / area_ratio
        if normalized > best_norm:
            best, best_norm = alignment, normalized
    assert best is not None
    return best


def _top_candidates(grid: ScoreGrid, top_n: int) -> list[tuple[int, int]]:
    """Grid argmax positions after non-maximum suppression (cylindrical dx)."""
    scores = grid.scores.copy()
    n_dy, width = scores.shape
    radius = CANDIDATE_SUPPRESSION_RADIUS
    out: list[tuple[int, int]] = []
    for _ in range(min(top_n, scores.size)):
        iy, ix = np.unravel_index(int(np.argmax(scores)), scores.shape)
        if not np.isfinite(scores[iy, ix]):
            break
        out.append((int(iy), int(ix)))
        for ddy in range(-radius, radius + 1):
            row = iy + ddy
            if not 0 <= row < n_dy:
                continue
            reach = int(math.floor(math.sqrt(radius * radius - ddy * ddy)))
            cols = (ix + np.arange(-reach, reach + 1)) % width
            scores[row, cols] = -np.inf
    return out


def _cluster_points(points: np.ndarray, linkage: float) -> list[np.ndarray]:
    """Single-linkage components: points connected when closer than ``linkage``."""
    count = len(points)
    parent = list(range(count))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tree = cKDTree(points)
    for i, j in tree.query_pairs(r=linkage):
        d2 = float(np.sum((points[i] - points[j]) ** 2))
        if d2 < linkage * linkage:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(count):
        groups.setdefault(find(i), []).append(i)
    return [points[idx] for idx in groups.values()]


def _cluster_endpoints(cluster: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Approximate diameter endpoints: farthest from centroid, then farthest
    from that point (exact for straight segments)."""
    centroid = cluster.mean(axis=0)
    e1 = cluster[np.argmax(np.sum((cluster - centroid) ** 2, axis=1))]
    e2 = cluster[np.argmax(np.sum((cluster - e1) ** 2, axis=1))]
    return e1, e2


def robust_rescore(
    photo: EdgeMap,
    pano: EdgeMap,
    grid: ScoreGrid,
    cfg: RobustConfig,
    scale: float = 1.0,
    pano_q: float | None = None,
) -> Alignment:
    """Re-rank the grid's top candidates by contiguous edge overlap.

    Both maps are binarized; the panorama edges are widened to a band of
    radius ``neighborhood_radius``; the photo edges at each candidate offset
    are intersected with the band and split into clusters (single linkage,
    ``cluster_distance``).  A cluster of l points staying on one side of the
    band contributes l**exponent when l > fit_length; a short cluster that
    crosses to the other side costs ``penalty``.  The candidate with the
    highest total wins.  The returned score is the winning robust total.
    """
    if not np.any(grid.scores):
        raise NoCandidates("score grid is identically zero")
    if cfg.top_n > grid.scores.size:
        raise ValueError("top_n exceeds the number of grid entries")
    if pano_q is None:
        pano_q = pano.width / 360.0

    h_p, w_p = photo.strength.shape
    h_r, w_r = pano.strength.shape
    photo_mask = photo.strength > 0
    pano_mask = pano.strength > 0
    # Distance to the nearest panorama edge pixel, and that pixel's indices.
    dist, (near_y, near_x) = ndimage.distance_transform_edt(
        ~pano_mask, return_indices=True
    )
    band = dist <= cfg.neighborhood_radius

    best_pos: tuple[int, int] | None = None
    best_score = -np.inf
    for iy, ix in _top_candidates(grid, cfg.top_n):
        dy = grid.dy_min + iy
        dx = ix
        placed = np.zeros((h_r, w_r), dtype=bool)
        y_lo = max(0, -dy)
        y_hi = min(h_p, h_r - dy)
        if y_hi > y_lo:
            cols = (np.arange(w_p) + dx) % w_r
            placed[np.ix_(np.arange(y_lo, y_hi) + dy, cols)] = photo_mask[y_lo:y_hi]
        overlap = placed & band
        points = np.argwhere(overlap)
        total = 0.0
        if len(points):
            for cluster in _cluster_points(points, cfg.cluster_distance):
                length = len(cluster)
                e1, e2 = _cluster_endpoints(cluster)
                v1 = e1 - np.array([near_y[tuple(e1)], near_x[tuple(e1)]])
                v2 = e2 - np.array([near_y[tuple(e2)], near_x[tuple(e2)]])
                same_side = float(v1 @ v2) >= 0.0
                if length > cfg.fit_length and same_side:
                    total += float(length) ** cfg.exponent
                elif length < cfg.fit_length and not same_side:
                    total -= cfg.penalty
        if total > best_score:
            best_score = total
            best_pos = (dy, dx)
    assert best_pos is not None
    dy, dx = best_pos
    return Alignment(
        dx=dx,
        dy=dy,
        scale=scale,
        score=best_score,
        azimuth_deg=offset_to_azimuth(dx, w_p, pano_q),
    )
