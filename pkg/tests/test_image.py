import numpy as np
import pytest

from stroketrap import (
    BinarizeConfig,
    BinaryImage,
    GrayImage,
    InvalidInputError,
    MorphConfig,
    binarize,
    foreground_coords,
    morph_clean,
    read_image,
    read_pgm,
    write_image,
    write_pgm,
)
from stroketrap.image import otsu_threshold

from conftest import otsu_oracle


class TestBinarize:
    def test_all_white_dark_ink_gives_no_ink(self):
        img = GrayImage(np.full((8, 8), 255, np.uint8))
        assert binarize(img).pixels.sum() == 0

    def test_all_black_fixed_threshold_gives_all_ink(self):
        img = GrayImage(np.zeros((6, 9), np.uint8))
        out = binarize(img, BinarizeConfig(method="fixed", threshold=128))
        assert out.pixels.all()

    def test_bimodal_otsu_separates_modes(self, rng):
        px = np.where(rng.random((16, 16)) < 0.5, 10, 245).astype(np.uint8)
        out = binarize(GrayImage(px))
        np.testing.assert_array_equal(out.pixels, (px == 10).astype(np.uint8))

    def test_otsu_matches_exhaustive_scan(self, rng):
        for _ in range(20):
            px = rng.integers(0, 256, size=(24, 24)).astype(np.uint8)
            if px.min() == px.max():
                continue
            assert otsu_threshold(px) == otsu_oracle(px)

    def test_light_ink_polarity(self):
        px = np.array([[0, 255]], np.uint8)
        out = binarize(GrayImage(px), BinarizeConfig(method="fixed", threshold=128,
                                                     dark_ink=False))
        np.testing.assert_array_equal(out.pixels, [[0, 1]])

    def test_empty_image_rejected(self):
        with pytest.raises(InvalidInputError):
            GrayImage(np.zeros((0, 4), np.uint8))

    def test_purity_depends_only_on_intensities(self, rng):
        px = rng.integers(0, 256, size=(12, 12)).astype(np.uint8)
        a = binarize(GrayImage(px))
        b = binarize(GrayImage(px.copy()))
        np.testing.assert_array_equal(a.pixels, b.pixels)


class TestMorphClean:
    def test_empty_sequence_is_identity(self, rng):
        img = BinaryImage((rng.random((10, 10)) < 0.4).astype(np.uint8))
        out = morph_clean(img, MorphConfig(ops=()))
        np.testing.assert_array_equal(out.pixels, img.pixels)

    def test_opening_removes_isolated_pixel(self):
        px = np.zeros((7, 7), np.uint8)
        px[3, 3] = 1
        out = morph_clean(BinaryImage(px), MorphConfig(ops=("open",)))
        assert out.pixels.sum() == 0

    def test_closing_fills_interior_hole(self):
        # Hand-computed: dilation fills the hole, erosion restores the square.
        px = np.ones((5, 5), np.uint8)
        px[2, 2] = 0
        out = morph_clean(BinaryImage(px), MorphConfig(ops=("close",)))
        assert out.pixels.all()

    @pytest.mark.parametrize("op", ["open", "close"])
    def test_idempotence(self, op, rng):
        for _ in range(20):
            img = BinaryImage((rng.random((16, 16)) < 0.45).astype(np.uint8))
            once = morph_clean(img, MorphConfig(ops=(op,)))
            twice = morph_clean(once, MorphConfig(ops=(op,)))
            np.testing.assert_array_equal(once.pixels, twice.pixels)

    def test_zero_repeats_is_identity(self, rng):
        img = BinaryImage((rng.random((8, 8)) < 0.5).astype(np.uint8))
        out = morph_clean(img, MorphConfig(ops=("open", "close"), repeats=0))
        np.testing.assert_array_equal(out.pixels, img.pixels)


class TestForegroundCoords:
    def test_blank_image(self):
        assert len(foreground_coords(BinaryImage(np.zeros((4, 4), np.uint8)))) == 0

    def test_single_pixel(self):
        px = np.zeros((2, 2), np.uint8)
        px[0, 1] = 1
        np.testing.assert_array_equal(foreground_coords(BinaryImage(px)), [[0, 1]])

    def test_matches_full_scan(self, rng):
        px = (rng.random((16, 16)) < 0.3).astype(np.uint8)
        coords = foreground_coords(BinaryImage(px))
        expected = [(r, c) for r in range(16) for c in range(16) if px[r, c]]
        assert [tuple(rc) for rc in coords] == expected

    def test_count_matches_binarize(self, rng):
        for _ in range(10):
            h, w = rng.integers(1, 65, size=2)
            px = rng.integers(0, 256, size=(h, w)).astype(np.uint8)
            binary = binarize(GrayImage(px), BinarizeConfig(method="fixed", threshold=100))
            assert len(foreground_coords(binary)) == int((px <= 100).sum())


class TestPgmIO:
    def test_p5_roundtrip(self, tmp_path, rng):
        px = rng.integers(0, 256, size=(9, 13)).astype(np.uint8)
        path = tmp_path / "img.pgm"
        write_pgm(GrayImage(px), path)
        back = read_pgm(str(path))
        np.testing.assert_array_equal(back.pixels, px)

    def test_p2_parsing_with_comments(self, tmp_path):
        path = tmp_path / "ascii.pgm"
        path.write_text("P2\n# a comment\n3 2\n255\n0 10 20\n30 40 255\n")
        img = read_pgm(str(path))
        np.testing.assert_array_equal(img.pixels, [[0, 10, 20], [30, 40, 255]])

    def test_binary_writes_ink_black(self, tmp_path):
        px = np.array([[1, 0]], np.uint8)
        path = tmp_path / "b.pgm"
        write_pgm(BinaryImage(px), path)
        back = read_pgm(str(path))
        np.testing.assert_array_equal(back.pixels, [[0, 255]])

    def test_truncated_pgm_rejected(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P5\n4 4\n255\nxx")
        with pytest.raises(InvalidInputError):
            read_pgm(str(path))

    def test_png_roundtrip(self, tmp_path, rng):
        px = rng.integers(0, 256, size=(7, 5)).astype(np.uint8)
        path = tmp_path / "img.png"
        write_image(GrayImage(px), path)
        back = read_image(str(path))
        np.testing.assert_array_equal(back.pixels, px)
