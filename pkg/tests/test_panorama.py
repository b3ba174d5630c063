"""Panorama loading and the synthetic case generator."""

import json
import math

import numpy as np
import pytest

from peakmatch import (
    GroundTruth,
    MalformedPeaks,
    SynthConfig,
    WidthMismatch,
    align_photo,
    alignment_error,
    gen_synthetic_case,
    load_case,
    load_panorama,
    load_peaks,
    save_raster,
    write_case,
)
from peakmatch.panorama import _circular_ridgeline


def _write_pano_files(tmp_path, width=72, height=20, peaks=()):
    img = np.full((height, width, 3), 200, dtype=np.uint8)
    img_path = tmp_path / "pano.png"
    save_raster(img, img_path)
    peaks_path = tmp_path / "peaks.json"
    peaks_path.write_text(json.dumps(list(peaks)))
    return img_path, peaks_path


class TestLoadPanorama:
    def test_consistent_width_accepted(self, tmp_path):
        img_path, peaks_path = _write_pano_files(
            tmp_path, width=72, peaks=[{"name": "a", "x": 10, "y": 5}]
        )
        pano = load_panorama(img_path, peaks_path, q=0.2)
        assert pano.width == 72
        assert pano.peaks[0].name == "a"

    def test_q20_standard_width(self, tmp_path):
        img_path, peaks_path = _write_pano_files(tmp_path, width=7200, height=4)
        pano = load_panorama(img_path, peaks_path, q=20.0)
        assert pano.width == 7200

    def test_width_mismatch(self, tmp_path):
        img_path, peaks_path = _write_pano_files(tmp_path, width=7200, height=4)
        with pytest.raises(WidthMismatch):
            load_panorama(img_path, peaks_path, q=10.0)

    def test_empty_peaks_file(self, tmp_path):
        img_path, peaks_path = _write_pano_files(tmp_path)
        peaks_path.write_text("")
        pano = load_panorama(img_path, peaks_path, q=0.2)
        assert pano.peaks == []

    def test_malformed_peaks(self, tmp_path):
        img_path, peaks_path = _write_pano_files(tmp_path)
        peaks_path.write_text('{"not": "a list"}')
        with pytest.raises(MalformedPeaks):
            load_panorama(img_path, peaks_path, q=0.2)
        peaks_path.write_text('[{"name": "x"}]')
        with pytest.raises(MalformedPeaks):
            load_panorama(img_path, peaks_path, q=0.2)

    def test_peak_outside_raster_rejected(self, tmp_path):
        img_path, peaks_path = _write_pano_files(
            tmp_path, peaks=[{"name": "far", "x": 900, "y": 5}]
        )
        with pytest.raises(MalformedPeaks):
            load_panorama(img_path, peaks_path, q=0.2)

    def test_load_peaks_standalone(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text('[{"name": "left", "x": 3, "y": 4}]')
        peaks = load_peaks(path)
        assert peaks[0].pano_x == 3


class TestSyntheticGeneration:
    def test_deterministic_in_seed(self):
        cfg = SynthConfig(seed=42, q=1.0, pano_height=80, photo_fov=50.0,
                          noise_density=0.4, recolor=True)
        a = gen_synthetic_case(cfg)
        b = gen_synthetic_case(cfg)
        np.testing.assert_array_equal(a.panorama.raster, b.panorama.raster)
        np.testing.assert_array_equal(a.photo, b.photo)
        assert a.truth_alignment == b.truth_alignment
        assert a.truth_pairs == b.truth_pairs
        assert [p.name for p in a.panorama.peaks] == [p.name for p in b.panorama.peaks]

    def test_different_seeds_differ(self):
        a = gen_synthetic_case(SynthConfig(seed=1, q=1.0, pano_height=80))
        b = gen_synthetic_case(SynthConfig(seed=2, q=1.0, pano_height=80))
        assert (a.panorama.raster != b.panorama.raster).any()

    def test_geometry_and_truth_consistency(self):
        case = gen_synthetic_case(SynthConfig(seed=7, q=1.5, photo_fov=70.0,
                                              pano_height=90, peak_count=6))
        pano = case.panorama
        assert pano.width == round(360 * 1.5)
        assert case.photo.shape[1] == round(70.0 * 1.5)
        dx, dy = case.truth_alignment.dx, case.truth_alignment.dy
        for (px, py), (rx, ry) in case.truth_pairs:
            assert (px + dx) % pano.width == pytest.approx(rx)
            assert py + dy == pytest.approx(ry)
        assert len(case.truth_pairs) >= 1
        for peak in pano.peaks:
            assert 0 <= peak.pano_x < pano.width
            assert 0 <= peak.pano_y < pano.height

    def test_ridgeline_wraps_continuously(self):
        rng = np.random.default_rng(3)
        for width in (360, 720, 1000):
            line = _circular_ridgeline(rng, width)
            interior_steps = np.abs(np.diff(line))
            wrap_step = abs(line[-1] - line[0])
            assert wrap_step <= max(interior_steps.max(), 1e-9) * 1.5 + 1e-9

    def test_noiseless_pipeline_recovers_truth(self):
        cfg = SynthConfig(seed=5, q=2.0, layers=3, photo_fov=60.0,
                          pano_height=120, peak_count=4)
        case = gen_synthetic_case(cfg)
        report = align_photo(case.photo, case.panorama, math.radians(case.fov_deg))
        err = alignment_error(GroundTruth(case.truth_pairs), report.alignment,
                              case.panorama.q)
        assert err == pytest.approx(0.0, abs=1e-9)
        assert report.alignment.dx == case.truth_alignment.dx
        assert report.alignment.dy == case.truth_alignment.dy

    def test_full_circle_photo_flagged_degenerate(self):
        case = gen_synthetic_case(SynthConfig(seed=9, q=0.5, photo_fov=360.0,
                                              pano_height=60))
        assert case.degenerate
        assert case.photo.shape[1] == case.panorama.width

    def test_noise_confined_to_lower_third(self):
        clean = gen_synthetic_case(SynthConfig(seed=11, q=1.0, pano_height=90))
        noisy = gen_synthetic_case(SynthConfig(seed=11, q=1.0, pano_height=90,
                                               noise_density=0.5))
        h = clean.photo.shape[0]
        np.testing.assert_array_equal(clean.photo[: 2 * h // 3],
                                      noisy.photo[: 2 * h // 3])
        assert (clean.photo[2 * h // 3 :] != noisy.photo[2 * h // 3 :]).any()


class TestCaseDirectories:
    def test_write_then_load_round_trip(self, tmp_path):
        case = gen_synthetic_case(SynthConfig(seed=21, q=1.0, photo_fov=45.0,
                                              pano_height=80, peak_count=3))
        out = write_case(case, tmp_path / "case_0")
        assert sorted(p.name for p in out.iterdir()) == [
            "panorama.png", "peaks.json", "photo.png", "truth.json",
        ]
        loaded = load_case(out)
        np.testing.assert_array_equal(loaded.photo, case.photo)
        np.testing.assert_array_equal(loaded.panorama.raster, case.panorama.raster)
        assert loaded.q == case.panorama.q
        assert loaded.fov_deg == case.fov_deg
        assert loaded.truth_alignment == case.truth_alignment
        assert loaded.truth.pairs == [
            (tuple(map(float, p)), tuple(map(float, r))) for p, r in case.truth_pairs
        ]
        assert loaded.panorama.peaks == case.panorama.peaks
        assert "source" in loaded.truth.categories

    def test_written_bytes_deterministic(self, tmp_path):
        cfg = SynthConfig(seed=33, q=1.0, pano_height=70, noise_density=0.2)
        write_case(gen_synthetic_case(cfg), tmp_path / "a")
        write_case(gen_synthetic_case(cfg), tmp_path / "b")
        for name in ("panorama.png", "photo.png", "peaks.json", "truth.json"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()
