"""The signed-compensation error metric and dataset aggregation."""

import numpy as np
import pytest

from peakmatch import (
    Alignment,
    EmptyDataset,
    GroundTruth,
    NoPairs,
    alignment_error,
    evaluate_dataset,
    format_summary_table,
)


def aligned(dx=0, dy=0, scale=1.0):
    return Alignment(dx=dx, dy=dy, scale=scale, score=1.0, azimuth_deg=0.0)


class TestAlignmentError:
    def test_perfect_alignment(self):
        truth = GroundTruth(pairs=[((10.0, 5.0), (110.0, 25.0)),
                                   ((50.0, 9.0), (150.0, 29.0))])
        assert alignment_error(truth, aligned(dx=100, dy=20), q=2.0) == pytest.approx(0.0)

    def test_signed_compensation(self):
        # offsets +2 and -2 cancel exactly
        truth = GroundTruth(pairs=[((12.0, 5.0), (10.0, 5.0)),
                                   ((20.0, 5.0), (22.0, 5.0))])
        assert alignment_error(truth, aligned(), q=3.0) == pytest.approx(0.0)

    def test_single_pair_20px_at_q20(self):
        truth = GroundTruth(pairs=[((120.0, 40.0), (100.0, 40.0))])
        assert alignment_error(truth, aligned(), q=20.0) == pytest.approx(1.0)

    def test_wraps_across_the_seam(self):
        q = 1.0  # panorama 360 px wide
        truth = GroundTruth(pairs=[((2.0, 0.0), (358.0, 0.0))])
        # projected photo point 2 vs pano point 358: shortest arc is 4 px
        assert alignment_error(truth, aligned(), q=q) == pytest.approx(4.0)

    def test_scale_applied_to_photo_points(self):
        truth = GroundTruth(pairs=[((40.0, 10.0), (20.0, 5.0))])
        assert alignment_error(truth, aligned(scale=0.5), q=1.0) == pytest.approx(0.0)

    def test_negating_offsets_is_invariant(self):
        rng = np.random.default_rng(40)
        q = 5.0
        pano_pts = rng.uniform(0, 360 * q, size=(4, 2))
        offsets = rng.uniform(-30, 30, size=(4, 2))
        pos = GroundTruth(pairs=[((rx + ox, ry + oy), (rx, ry))
                                 for (rx, ry), (ox, oy) in zip(pano_pts, offsets)])
        neg = GroundTruth(pairs=[((rx - ox, ry - oy), (rx, ry))
                                 for (rx, ry), (ox, oy) in zip(pano_pts, offsets)])
        assert alignment_error(pos, aligned(), q) == pytest.approx(
            alignment_error(neg, aligned(), q)
        )

    def test_zero_iff_component_sums_vanish(self):
        truth = GroundTruth(pairs=[((5.0, 1.0), (0.0, 0.0)),
                                   ((0.0, 0.0), (5.0, 1.0))])
        assert alignment_error(truth, aligned(), 2.0) == pytest.approx(0.0)
        skewed = GroundTruth(pairs=[((5.0, 1.0), (0.0, 0.0)),
                                    ((0.0, 0.0), (4.0, 1.0))])
        assert alignment_error(skewed, aligned(), 2.0) > 0.0

    def test_error_scales_inversely_with_q(self):
        truth = GroundTruth(pairs=[((30.0, 0.0), (10.0, 0.0))])
        e1 = alignment_error(truth, aligned(), q=10.0)
        e2 = alignment_error(truth, aligned(), q=20.0)
        assert e1 == pytest.approx(2 * e2)

    def test_no_pairs(self):
        with pytest.raises(NoPairs):
            alignment_error(GroundTruth(pairs=[]), aligned(), 1.0)


class TestEvaluateDataset:
    @staticmethod
    def case_with_error(error_px, q=1.0, categories=None):
        truth = GroundTruth(
            pairs=[((100.0 + error_px, 10.0), (100.0, 10.0))],
            categories=categories or {},
        )
        return (truth, aligned(), q)

    def test_single_correct_case(self):
        summary = evaluate_dataset([self.case_with_error(0.0)], threshold=4.0)
        assert summary.correct_rate == 1.0
        assert summary.histogram == [1]

    def test_two_of_three_under_threshold(self):
        cases = [self.case_with_error(px) for px in (1.0, 3.0, 5.0)]
        summary = evaluate_dataset(cases, threshold=4.0)
        assert summary.correct_rate == pytest.approx(2 / 3)
        assert summary.histogram == [0, 1, 0, 1, 0, 1]
        assert summary.per_photo_errors == pytest.approx([1.0, 3.0, 5.0])

    def test_threshold_monotonicity(self):
        cases = [self.case_with_error(px) for px in (0.5, 1.5, 2.5, 3.5, 6.0)]
        rates = [evaluate_dataset(cases, threshold=t).correct_rate
                 for t in (1.0, 2.0, 4.0, 8.0)]
        assert rates == sorted(rates)

    def test_per_category_rates(self):
        cases = [
            self.case_with_error(0.0, categories={"source": "photo camera"}),
            self.case_with_error(9.0, categories={"source": "photo camera"}),
            self.case_with_error(0.0, categories={"source": "cellular phone"}),
        ]
        summary = evaluate_dataset(cases, threshold=4.0)
        assert summary.per_category_rates["source"]["photo camera"] == pytest.approx(0.5)
        assert summary.per_category_rates["source"]["cellular phone"] == pytest.approx(1.0)

    def test_histogram_counts_all_photos(self):
        cases = [self.case_with_error(px) for px in (0.2, 0.8, 1.1, 7.7)]
        summary = evaluate_dataset(cases, threshold=4.0)
        assert sum(summary.histogram) == len(cases)

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            evaluate_dataset([], threshold=4.0)

    def test_table_renders(self):
        cases = [
            self.case_with_error(0.0, categories={"cloud presence": "none"}),
            self.case_with_error(5.0, categories={"cloud presence": "overcast"}),
        ]
        summary = evaluate_dataset(cases, threshold=4.0)
        table = format_summary_table(summary)
        assert "cloud presence" in table
        assert "overcast" in table
        assert "50.0%" in table
