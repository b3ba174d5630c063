"""Alignment error metric and dataset-level aggregation.

A photo's error comes from manually tagged point pairs (photo point, pano
point).  Each pair's offset under the estimated alignment is taken with
SIGN, components are summed before the distance is formed, and the result
is expressed in degrees:

    e = sqrt((sum dx_i)^2 + (sum dy_i)^2) / (N * q)

so a positive offset compensates a negative one: when photo and panorama
are slightly differently scaled, the best possible overlap is the one whose
residuals cancel, and it scores 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyDataset, NoPairs
from .matching import Alignment

Point = tuple[float, float]


@dataclass
class GroundTruth:
    """Tagged point pairs plus free-form category labels for one photo."""

    pairs: list[tuple[Point, Point]]  # (photo point, pano point)
    categories: dict[str, str] = field(default_factory=dict)


@dataclass
class EvalSummary:
    per_photo_errors: list[float]
    correct_rate: float
    threshold_deg: float
    per_category_rates: dict[str, dict[str, float]]
    histogram: list[int]  # 1-degree bins, bin i counts errors in [i, i+1)

    def to_json_dict(self) -> dict:
        return {
            "per_photo_errors_deg": self.per_photo_errors,
            "correct_rate": self.correct_rate,
            "threshold_deg": self.threshold_deg,
            "per_category_rates": self.per_category_rates,
            "histogram_1deg": self.histogram,
        }


def wrap_signed(delta: float, period: float) -> float:
    """Map a difference onto the shortest signed arc in [-period/2, period/2)."""
    return (delta + period / 2.0) % period - period / 2.0


def alignment_error(truth: GroundTruth, alignment: Alignment, q: float) -> float:
    """Estimation error in degrees for one photo (see module docstring).

    Photo points are projected as photo*scale + (dx, dy); horizontal
    differences are taken on the cylinder (shortest wrap).
    """
    if not truth.pairs:
        raise NoPairs("ground truth contains no point pairs")
    if q <= 0:
        raise ValueError("q must be > 0")
    pano_width = 360.0 * q
    sum_dx = 0.0
    sum_dy = 0.0
    for (px, py), (rx, ry) in truth.pairs:
        proj_x = (px * alignment.scale + alignment.dx) % pano_width
        proj_y = py * alignment.scale + alignment.dy
        sum_dx += wrap_signed(proj_x - rx, pano_width)
        sum_dy += proj_y - ry
    n = len(truth.pairs)
    return math.hypot(sum_dx, sum_dy) / (n * q)


def evaluate_dataset(
    cases: list[tuple[GroundTruth, Alignment, float]], threshold: float
) -> EvalSummary:
    """Aggregate per-photo errors: a case is correct iff error < threshold.

    Rates are reported overall and per category option, plus a histogram of
    errors in 1-degree bins.
    """
    if not cases:
        raise EmptyDataset("no cases to evaluate")
    errors: list[float] = []
    correct_flags: list[bool] = []
    cat_total: dict[str, dict[str, int]] = {}
    cat_correct: dict[str, dict[str, int]] = {}
    for truth, alignment, q in cases:
        err = alignment_error(truth, alignment, q)
        ok = err < threshold
        errors.append(err)
        correct_flags.append(ok)
        for cat, option in truth.categories.items():
            cat_total.setdefault(cat, {}).setdefault(option, 0)
            cat_correct.setdefault(cat, {}).setdefault(option, 0)
            cat_total[cat][option] += 1
            if ok:
                cat_correct[cat][option] += 1

    rates = {
        cat: {
            option: cat_correct[cat][option] / total
            for option, total in options.items()
        }
        for cat, options in cat_total.items()
    }
    n_bins = max(1, int(math.floor(max(errors))) + 1)
    histogram = [0] * n_bins
    for err in errors:
        histogram[min(int(math.floor(err)), n_bins - 1)] += 1

    return EvalSummary(
        per_photo_errors=errors,
        correct_rate=sum(correct_flags) / len(cases),
        threshold_deg=threshold,
        per_category_rates=rates,
        histogram=histogram,
    )


def format_summary_table(summary: EvalSummary) -> str:
    """Plain-text table of per-category correct-match rates."""
    lines = [
        f"Overall correct rate: {summary.correct_rate * 100:.1f}% "
        f"(threshold {summary.threshold_deg:g} deg, "
        f"{len(summary.per_photo_errors)} photos)",
        "",
        f"{'Category':<24}{'Option':<28}{'Correct matches':>16}",
        "-" * 68,
    ]
    for cat, options in summary.per_category_rates.items():
        for i, (option, rate) in enumerate(options.items()):
            label = cat if i == 0 else ""
            lines.append(f"{label:<24}{option:<28}{rate * 100:>15.1f}%")
    return "\n".join(lines)
