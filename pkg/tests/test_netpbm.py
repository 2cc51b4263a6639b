import numpy as np
import pytest

from scenedbm.netpbm import (Image, ImageFormatError, decode_netpbm, encode_netpbm, read_netpbm,
                             resize, write_netpbm)


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    img = Image(rng.integers(0, 256, (5, 7, 3)).astype(np.uint8))
    path = tmp_path / "a.ppm"
    write_netpbm(path, img)
    back = read_netpbm(path)
    assert back.width == 7 and back.height == 5 and back.channels == 3
    np.testing.assert_array_equal(back.data, img.data)


def test_pgm_round_trip():
    img = Image(np.arange(12, dtype=np.uint8).reshape(3, 4))
    back = decode_netpbm(encode_netpbm(img))
    assert back.channels == 1
    np.testing.assert_array_equal(back.data, img.data)


def test_header_comments_are_skipped():
    buf = b"P5\n# made by hand\n2 1\n# another\n255\n\x01\x02"
    np.testing.assert_array_equal(decode_netpbm(buf).data[:, :, 0], [[1, 2]])


@pytest.mark.parametrize("buf, msg", [
    (b"P3\n1 1\n255\n0 0 0", "not a binary"),
    (b"P5\n1 1\n65535\n\x00\x00", "maxval"),
    (b"P6\n2 2\n255\n\x00", "truncated raster"),
    (b"P5\n2", "truncated header"),
])
def test_bad_files(buf, msg):
    with pytest.raises(ImageFormatError, match=msg):
        decode_netpbm(buf, "x.pgm")


def test_missing_file_names_path(tmp_path):
    with pytest.raises(ImageFormatError, match="nope.ppm"):
        read_netpbm(tmp_path / "nope.ppm")


def test_resize():
    img = Image(np.full((10, 20, 3), 77, dtype=np.uint8))
    assert resize(img, 20, 10) is img
    out = resize(img, 5, 4)
    assert out.data.shape == (4, 5, 3)
    assert np.all(out.data == 77)


def test_gray_to_rgb():
    img = Image(np.full((2, 2), 9, dtype=np.uint8)).to_rgb()
    assert img.channels == 3 and np.all(img.data == 9)
