import io

import numpy as np
import pytest
from PIL import Image

from cliquexplain.errors import ImageSizeError, ShapeError
from cliquexplain.image_io import (decode_image, encode_png, load_image, save_png,
                                   validate_image)


def test_png_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (20, 30, 3), dtype=np.uint8)
    path = tmp_path / "img.png"
    save_png(img, path)
    assert np.array_equal(load_image(path), img)


def test_jpeg_decodes_to_rgb(tmp_path):
    img = np.full((32, 32, 3), (200, 40, 90), np.uint8)
    path = tmp_path / "img.jpg"
    Image.fromarray(img).save(path, format="JPEG", quality=95)
    loaded = load_image(path)
    assert loaded.shape == (32, 32, 3) and loaded.dtype == np.uint8
    assert np.all(np.abs(loaded.astype(int) - img.astype(int)) <= 12)  # lossy


def test_grayscale_and_alpha_inputs_become_rgb():
    gray = Image.fromarray(np.full((16, 16), 77, np.uint8), mode="L")
    buf = io.BytesIO()
    gray.save(buf, format="PNG")
    arr = decode_image(buf.getvalue())
    assert arr.shape == (16, 16, 3)
    assert (arr == 77).all()


def test_validate_rejects_bad_shapes_and_sizes():
    with pytest.raises(ShapeError):
        validate_image(np.zeros((16, 16), np.uint8))
    with pytest.raises(ShapeError):
        validate_image(np.zeros((16, 16, 4), np.uint8))
    with pytest.raises(ShapeError):
        validate_image(np.zeros((16, 16, 3), np.float32))
    with pytest.raises(ImageSizeError):
        validate_image(np.zeros((15, 64, 3), np.uint8))


def test_encode_png_is_deterministic():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, (18, 18, 3), dtype=np.uint8)
    assert encode_png(img) == encode_png(img)
