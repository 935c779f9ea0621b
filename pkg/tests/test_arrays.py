"""Array value types and the HFA file format."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hipe import ImageTensor, RectRegion, ScalarField2D, load_array, save_array
from hipe.errors import DimensionError, HfaFormatError, HfaTruncatedError

from helpers import field, tensor


class TestScalarField2D:
    def test_holds_row_major_values(self):
        f = field([[0, 1, 2], [3, 4, 5]])
        assert f.shape == (2, 3)
        assert f.values[1, 2] == 5.0

    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            field([[0.0, np.nan]])
        with pytest.raises(ValueError):
            field([[np.inf, 0.0]])

    def test_rejects_wrong_rank(self):
        with pytest.raises(DimensionError):
            ScalarField2D(np.zeros((2, 2, 2), dtype=np.float32))

    def test_rejects_empty_dims(self):
        with pytest.raises(DimensionError):
            ScalarField2D(np.zeros((0, 4), dtype=np.float32))

    def test_immutable_after_construction(self):
        f = field([[1, 2], [3, 4]])
        with pytest.raises(ValueError):
            f.values[0, 0] = 9.0

    def test_does_not_alias_source_array(self):
        src = np.ones((2, 2), dtype=np.float32)
        f = ScalarField2D(src)
        src[0, 0] = 5.0
        assert f.values[0, 0] == 1.0


class TestImageTensor:
    def test_channel_major_layout(self):
        t = tensor(np.arange(12).reshape(2, 2, 3))
        assert t.channels == 2 and t.height == 2 and t.width == 3
        assert t.values[1, 0, 0] == 6.0

    def test_rejects_wrong_rank(self):
        with pytest.raises(DimensionError):
            ImageTensor(np.zeros((4, 4), dtype=np.float32))


class TestRectRegion:
    def test_fits_inside_host(self):
        RectRegion(1, 2, 3, 4).check_within(4, 6)

    def test_overflow_raises(self):
        with pytest.raises(DimensionError):
            RectRegion(2, 0, 3, 2).check_within(4, 4)

    @pytest.mark.parametrize("kwargs", [
        {"top": -1, "left": 0, "height": 1, "width": 1},
        {"top": 0, "left": 0, "height": 0, "width": 1},
    ])
    def test_degenerate_regions_rejected(self, kwargs):
        with pytest.raises(DimensionError):
            RectRegion(**kwargs)


class TestHfaFormat:
    def test_reads_hand_built_field(self, tmp_path):
        # dims (2,3), payload 0..5 written byte by byte, independent of save_array
        path = tmp_path / "f.hfa"
        blob = b"HFA1" + struct.pack("<B", 2) + struct.pack("<II", 2, 3)
        blob += struct.pack("<6f", *range(6))
        path.write_bytes(blob)
        loaded = load_array(path)
        assert isinstance(loaded, ScalarField2D)
        np.testing.assert_array_equal(loaded.values, np.arange(6, dtype=np.float32).reshape(2, 3))

    def test_reads_zero_tensor(self, tmp_path):
        path = tmp_path / "z.hfa"
        blob = b"HFA1" + struct.pack("<B", 3) + struct.pack("<III", 1, 4, 4)
        blob += b"\x00" * (16 * 4)
        path.write_bytes(blob)
        loaded = load_array(path)
        assert isinstance(loaded, ImageTensor)
        assert loaded.shape == (1, 4, 4)
        assert not loaded.values.any()

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "t.hfa"
        blob = b"HFA1" + struct.pack("<B", 2) + struct.pack("<II", 4, 4)
        blob += struct.pack("<12f", *range(12))  # 12 of 16 values
        path.write_bytes(blob)
        with pytest.raises(HfaTruncatedError):
            load_array(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.hfa"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(HfaFormatError):
            load_array(path)

    def test_bad_rank(self, tmp_path):
        path = tmp_path / "r.hfa"
        path.write_bytes(b"HFA1" + struct.pack("<B", 4) + b"\x00" * 32)
        with pytest.raises(HfaFormatError):
            load_array(path)

    def test_zero_dim_rejected(self, tmp_path):
        path = tmp_path / "e.hfa"
        path.write_bytes(b"HFA1" + struct.pack("<B", 2) + struct.pack("<II", 0, 4))
        with pytest.raises(HfaFormatError):
            load_array(path)

    def test_trailing_bytes_rejected(self, tmp_path):
        path = tmp_path / "x.hfa"
        blob = b"HFA1" + struct.pack("<B", 2) + struct.pack("<II", 1, 1)
        blob += struct.pack("<f", 1.0) + b"junk"
        path.write_bytes(blob)
        with pytest.raises(HfaFormatError):
            load_array(path)

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            save_array(field([[1.0]]), tmp_path / "missing-dir" / "f.hfa")

    @settings(max_examples=100, deadline=None)
    @given(
        h=st.integers(1, 9),
        w=st.integers(1, 9),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_field_round_trip_bit_exact(self, h, w, seed, tmp_path_factory):
        rng = np.random.default_rng(seed)
        values = rng.normal(scale=100.0, size=(h, w)).astype(np.float32)
        path = tmp_path_factory.mktemp("hfa") / "r.hfa"
        save_array(ScalarField2D(values), path)
        back = load_array(path)
        assert back.values.tobytes() == values.tobytes()

    def test_tensor_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        values = rng.normal(size=(3, 16, 16)).astype(np.float32)
        path = tmp_path / "t.hfa"
        save_array(ImageTensor(values), path)
        back = load_array(path)
        assert isinstance(back, ImageTensor)
        assert back.values.tobytes() == values.tobytes()
