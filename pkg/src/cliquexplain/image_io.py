"""Loading, validating and writing 8-bit RGB images."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import ImageSizeError, ShapeError

MIN_SIDE = 16


def validate_image(image: np.ndarray) -> np.ndarray:
    """Check that `image` is an (H, W, 3) uint8 array of usable size."""
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ShapeError(f"expected uint8 pixel data, got dtype {arr.dtype}")
    h, w = arr.shape[:2]
    if h < MIN_SIDE or w < MIN_SIDE:
        raise ImageSizeError(
            f"image is {w}x{h} pixels; at least {MIN_SIDE}x{MIN_SIDE} is required"
        )
    return arr


def load_image(path: str | Path) -> np.ndarray:
    """Decode a PNG or JPEG file to a validated RGB array."""
    with PILImage.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    return validate_image(arr)


def decode_image(data: bytes) -> np.ndarray:
    """Decode in-memory PNG/JPEG bytes to a validated RGB array."""
    with PILImage.open(io.BytesIO(data)) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    return validate_image(arr)


def encode_png(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    PILImage.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_png(image: np.ndarray, path: str | Path) -> None:
    Path(path).write_bytes(encode_png(image))
