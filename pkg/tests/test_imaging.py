"""PNG I/O, colormap and heatmap rendering."""

import numpy as np
import pytest
from PIL import Image

from hipe import ImageTensor, load_image, render_heatmap, save_image
from hipe.errors import DimensionError
from hipe.imaging import COLORMAP

from helpers import field, tensor


def read_rgb(path):
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


class TestColormap:
    def test_shape_and_monotone_ends(self):
        assert COLORMAP.shape == (256, 3)
        assert COLORMAP.dtype == np.uint8
        assert not np.array_equal(COLORMAP[0], COLORMAP[255])


class TestPngRoundTrip:
    def test_grayscale_promotes_to_one_channel(self, tmp_path):
        path = tmp_path / "g.png"
        Image.fromarray(np.array([[0, 128], [255, 64]], dtype=np.uint8), mode="L").save(path)
        t = load_image(path)
        assert t.channels == 1
        np.testing.assert_allclose(
            t.values[0], np.array([[0, 128], [255, 64]]) / 255.0, atol=1e-7
        )

    def test_rgb_promotes_to_three_channels(self, tmp_path):
        path = tmp_path / "c.png"
        pixels = np.zeros((2, 2, 3), dtype=np.uint8)
        pixels[0, 0] = (255, 0, 0)
        Image.fromarray(pixels, mode="RGB").save(path)
        t = load_image(path)
        assert t.channels == 3
        assert t.values[0, 0, 0] == 1.0 and t.values[1, 0, 0] == 0.0

    def test_save_then_load_quantized(self, tmp_path):
        rng = np.random.default_rng(3)
        values = rng.random((3, 5, 7)).astype(np.float32)
        path = tmp_path / "t.png"
        save_image(ImageTensor(values), path)
        back = load_image(path)
        np.testing.assert_allclose(back.values, values, atol=1 / 255.0 + 1e-7)


class TestRenderHeatmap:
    def test_constant_map_renders_uniform_mid_color(self, tmp_path):
        path = tmp_path / "c.png"
        render_heatmap(field(np.full((4, 4), 3.5)), path)
        rgb = read_rgb(path)
        assert (rgb == COLORMAP[128]).all()

    def test_max_pixel_gets_terminal_color(self, tmp_path):
        values = np.zeros((5, 5), dtype=np.float32)
        values[2, 3] = 7.0
        path = tmp_path / "m.png"
        render_heatmap(field(values), path)
        rgb = read_rgb(path)
        assert (rgb[2, 3] == COLORMAP[255]).all()
        assert (rgb[0, 0] == COLORMAP[0]).all()

    def test_checkerboard_hits_colormap_ends(self, tmp_path):
        # independent route: normalize by hand, look indices up in the table
        path = tmp_path / "b.png"
        render_heatmap(field([[0.0, 1.0], [1.0, 0.0]]), path)
        rgb = read_rgb(path)
        expected = np.array(
            [[COLORMAP[0], COLORMAP[255]], [COLORMAP[255], COLORMAP[0]]]
        )
        np.testing.assert_array_equal(rgb, expected)

    def test_overlay_dims_must_match(self, tmp_path):
        with pytest.raises(DimensionError):
            render_heatmap(
                field(np.zeros((4, 4))),
                tmp_path / "o.png",
                overlay=tensor(np.zeros((1, 5, 5))),
            )

    def test_overlay_blends_half_luminance(self, tmp_path):
        values = np.array([[0.0, 1.0]], dtype=np.float32)
        overlay = tensor(np.full((1, 1, 2), 1.0))
        path = tmp_path / "ov.png"
        render_heatmap(field(values), path, overlay=overlay)
        rgb = read_rgb(path)
        expected_hot = np.rint(0.5 * COLORMAP[255].astype(float) + 0.5 * 255.0)
        np.testing.assert_array_equal(rgb[0, 1], expected_hot.astype(np.uint8))

    def test_input_map_not_mutated(self, tmp_path):
        values = np.array([[1.0, 5.0]], dtype=np.float32)
        f = field(values)
        render_heatmap(f, tmp_path / "n.png")
        np.testing.assert_array_equal(f.values, values)

    def test_render_is_reproducible(self, tmp_path):
        rng = np.random.default_rng(11)
        f = field(rng.normal(size=(8, 8)).astype(np.float32))
        render_heatmap(f, tmp_path / "a.png")
        render_heatmap(f, tmp_path / "b.png")
        np.testing.assert_array_equal(read_rgb(tmp_path / "a.png"), read_rgb(tmp_path / "b.png"))
