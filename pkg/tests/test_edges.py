"""Edge detection and the column-decay filter."""

import numpy as np
import pytest

from peakmatch import (
    EdgeDetectConfig,
    EdgeMap,
    EmptyImage,
    FilterConfig,
    detect_edges,
    edge_similarity,
    filter_edges,
    load_raster,
    save_strength_png,
)

from conftest import rand_edge_map


def step_image(width=40, height=30, left=(0, 0, 0), right=(255, 255, 255)):
    img = np.zeros((height, width, 3), dtype=np.uint8)
    img[:, : width // 2] = left
    img[:, width // 2 :] = right
    return img


class TestDetectEdges:
    def test_uniform_image_has_no_edges(self):
        img = np.full((20, 30, 3), 137, dtype=np.uint8)
        edges = detect_edges(img, EdgeDetectConfig())
        assert not edges.strength.any()
        assert not edges.direction.any()

    def test_vertical_step_edge(self):
        edges = detect_edges(step_image(), EdgeDetectConfig(strength_threshold=0.3))
        row = edges.strength[15]
        peak_col = int(np.argmax(row))
        assert peak_col in (19, 20)  # the step sits between columns 19 and 20
        assert row[peak_col] > 0.9  # full-contrast step peaks near 1
        # tangent of a vertical boundary is vertical
        assert edges.direction[15, peak_col] == pytest.approx(np.pi / 2, abs=1e-6)

    def test_ranges(self):
        rng = np.random.default_rng(3)
        img = (rng.random((25, 35, 3)) * 255).astype(np.uint8)
        edges = detect_edges(img, EdgeDetectConfig(strength_threshold=0.0))
        assert float(edges.strength.min()) >= 0.0
        assert float(edges.strength.max()) <= 1.0
        assert float(edges.direction.min()) >= 0.0
        assert float(edges.direction.max()) < 2 * np.pi

    def test_threshold_one_zeroes_soft_images(self):
        rng = np.random.default_rng(4)
        soft = (rng.random((20, 20, 3)) * 60 + 100).astype(np.uint8)
        edges = detect_edges(soft, EdgeDetectConfig(strength_threshold=1.0))
        assert not edges.strength.any()

    def test_threshold_monotone(self):
        rng = np.random.default_rng(5)
        img = (rng.random((30, 30, 3)) * 255).astype(np.uint8)
        nonzero = [
            int((detect_edges(img, EdgeDetectConfig(strength_threshold=t)).strength > 0).sum())
            for t in (0.0, 0.1, 0.2, 0.4, 0.8)
        ]
        assert nonzero == sorted(nonzero, reverse=True)

    def test_empty_image(self):
        with pytest.raises(EmptyImage):
            detect_edges(np.zeros((0, 0, 3), dtype=np.uint8), EdgeDetectConfig())

    def test_pure_color_edge_detected(self):
        # equal-luminance color boundary must still respond (multi-channel)
        img = step_image(left=(200, 0, 0), right=(0, 200, 0))
        edges = detect_edges(img, EdgeDetectConfig(strength_threshold=0.2))
        assert edges.strength[15].max() > 0.2

    def test_step_edge_tangent_wins_among_canonical_angles(self):
        edges = detect_edges(step_image(), EdgeDetectConfig(strength_threshold=0.3))
        on = edges.strength > 0
        scores = {}
        for angle in (0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4):
            scores[angle] = sum(
                edge_similarity(
                    (edges.strength[y, x], edges.direction[y, x]), (1.0, angle)
                )
                for y, x in np.argwhere(on)
            )
        assert max(scores, key=scores.get) == pytest.approx(np.pi / 2)


class TestFilterEdges:
    def test_base_one_is_identity(self):
        rng = np.random.default_rng(6)
        edges = rand_edge_map(rng, 12, 9)
        out = filter_edges(edges, FilterConfig(base=1.0, max_segment_length=2))
        np.testing.assert_array_equal(out.strength, edges.strength)
        np.testing.assert_array_equal(out.direction, edges.direction)

    def test_hand_worked_column(self):
        strength = np.array([[0.9], [0.9], [0.9], [0.0], [0.8]])
        edges = EdgeMap(strength, np.zeros_like(strength))
        out = filter_edges(edges, FilterConfig(base=0.7, max_segment_length=2))
        expected = [0.9, 0.9, 0.9 * 0.7, 0.0, 0.8 * 0.49]
        np.testing.assert_allclose(out.strength[:, 0], expected, rtol=1e-12)

    def test_restart_per_run_variant(self):
        strength = np.array([[0.9], [0.9], [0.9], [0.0], [0.8]])
        edges = EdgeMap(strength, np.zeros_like(strength))
        out = filter_edges(
            edges, FilterConfig(base=0.7, max_segment_length=2, restart_per_run=True)
        )
        # second run restarts its decay index at the top
        np.testing.assert_allclose(
            out.strength[:, 0], [0.9, 0.9, 0.63, 0.0, 0.8], rtol=1e-12
        )

    def test_all_zero_column(self):
        edges = EdgeMap.zeros(8, 3)
        out = filter_edges(edges, FilterConfig())
        assert not out.strength.any()

    def test_never_increases_and_preserves_top_segment(self):
        rng = np.random.default_rng(7)
        edges = rand_edge_map(rng, 30, 14, density=0.5)
        out = filter_edges(edges, FilterConfig(base=0.7, max_segment_length=2))
        assert (out.strength <= edges.strength + 1e-15).all()
        for col in range(edges.width):
            nonzero = np.flatnonzero(edges.strength[:, col])
            if nonzero.size:
                top = nonzero[0]
                assert out.strength[top, col] == edges.strength[top, col]

    def test_preserves_zero_set_and_directions(self):
        rng = np.random.default_rng(8)
        edges = rand_edge_map(rng, 25, 10)
        out = filter_edges(edges, FilterConfig(base=0.5, max_segment_length=3))
        np.testing.assert_array_equal(out.strength == 0, edges.strength == 0)
        np.testing.assert_array_equal(out.direction, edges.direction)

    def test_columns_independent(self):
        rng = np.random.default_rng(9)
        edges = rand_edge_map(rng, 20, 12)
        cfg = FilterConfig(base=0.6, max_segment_length=2)
        whole = filter_edges(edges, cfg)
        crop = EdgeMap(edges.strength[:, 3:9], edges.direction[:, 3:9])
        np.testing.assert_allclose(
            filter_edges(crop, cfg).strength, whole.strength[:, 3:9], rtol=1e-12
        )


class TestRasterIO:
    def test_strength_png_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        edges = rand_edge_map(rng, 16, 24)
        path = tmp_path / "edges.png"
        save_strength_png(edges, path)
        back = load_raster(path)
        assert back.shape == (16, 24, 3)
        expected = np.round(edges.strength * 255).astype(np.uint8)
        np.testing.assert_array_equal(back[:, :, 0], expected)
