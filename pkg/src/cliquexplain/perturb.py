"""Realizing masks as images and weighting samples by locality.

A mask is rendered by keeping the pixels of active superpixels and filling
inactive ones (segment mean color, mid gray, or black).  Locality is the
Euclidean distance between the all-ones vector and the mask, optionally
normalized by sqrt(d') so the kernel width is independent of the segment
count, then mapped through exp(-D^2 / sigma^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .segmentation import SuperpixelMap

SEGMENT_MEAN = "segment_mean"
CONSTANT_GRAY = "constant_gray"
CONSTANT_BLACK = "constant_black"
FILL_KINDS = (SEGMENT_MEAN, CONSTANT_GRAY, CONSTANT_BLACK)


@dataclass(frozen=True)
class KernelParams:
    sigma: float = 0.25
    normalize_distance: bool = True

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ParameterError("sigma must be > 0")


def segment_mean_colors(image: np.ndarray, spmap: SuperpixelMap) -> np.ndarray:
    """Mean RGB per segment, shape (num_segments, 3), float64."""
    flat = spmap.labels.ravel()
    counts = np.bincount(flat, minlength=spmap.num_segments).astype(np.float64)
    means = np.empty((spmap.num_segments, 3), dtype=np.float64)
    for ch in range(3):
        sums = np.bincount(flat, weights=image[..., ch].ravel().astype(np.float64),
                           minlength=spmap.num_segments)
        means[:, ch] = sums / counts
    return means


def fill_image(image: np.ndarray, spmap: SuperpixelMap, fill: str) -> np.ndarray:
    """The image used for pixels of hidden segments."""
    if fill == SEGMENT_MEAN:
        means = np.rint(segment_mean_colors(image, spmap)).astype(np.uint8)
        return means[spmap.labels]
    if fill == CONSTANT_GRAY:
        return np.full_like(image, 128)
    if fill == CONSTANT_BLACK:
        return np.zeros_like(image)
    raise ParameterError(f"unknown fill strategy {fill!r}")


def recover_image(image: np.ndarray, spmap: SuperpixelMap, mask: np.ndarray,
                  fill: str = SEGMENT_MEAN) -> np.ndarray:
    """Render one mask: active segments keep their pixels, the rest are filled."""
    mask = np.asarray(mask)
    if mask.shape != (spmap.num_segments,):
        raise ShapeError(
            f"mask has length {mask.shape}, expected ({spmap.num_segments},)"
        )
    if image.shape[:2] != spmap.shape:
        raise ShapeError(
            f"image {image.shape[:2]} and label map {spmap.shape} dimensions differ"
        )
    active = mask[spmap.labels].astype(bool)
    return np.where(active[..., None], image, fill_image(image, spmap, fill))


def recover_batch(image: np.ndarray, spmap: SuperpixelMap, masks: np.ndarray,
                  fill: str = SEGMENT_MEAN) -> list[np.ndarray]:
    """Batch variant of recover_image sharing one fill-image computation."""
    filled = fill_image(image, spmap, fill)
    out = []
    for mask in masks:
        active = np.asarray(mask)[spmap.labels].astype(bool)
        out.append(np.where(active[..., None], image, filled))
    return out


def mask_distance(mask: np.ndarray, params: KernelParams | None = None) -> float:
    """Euclidean distance from the all-ones vector: sqrt(#zeros), optionally
    divided by sqrt(d') so the result lies in [0, 1]."""
    params = params or KernelParams()
    mask = np.asarray(mask)
    zeros = mask.size - int(mask.sum())
    d = math.sqrt(zeros)
    if params.normalize_distance:
        d /= math.sqrt(mask.size)
    return d


def kernel_weight(distance: float, params: KernelParams | None = None) -> float:
    """Locality kernel exp(-distance^2 / sigma^2), in (0, 1]."""
    params = params or KernelParams()
    if distance < 0:
        raise ParameterError("distance must be >= 0")
    return math.exp(-(distance ** 2) / (params.sigma ** 2))
