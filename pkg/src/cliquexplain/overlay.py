"""Explanation overlays: chosen segments stay bright, the rest are dimmed."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .image_io import save_png
from .segmentation import SuperpixelMap

DIM_FACTOR = 0.3
OUTLINE_RGB = (255, 255, 0)


def render_overlay(image: np.ndarray, spmap: SuperpixelMap,
                   segment_ids: Sequence[int],
                   out_path: str | Path | None = None) -> np.ndarray:
    """Dim everything outside `segment_ids` to 30% brightness and outline
    the listed segments with a 1-pixel contrasting border.  Writes a PNG
    when `out_path` is given; always returns the rendered array."""
    for sid in segment_ids:
        if not 0 <= sid < spmap.num_segments:
            raise IndexError(f"segment id {sid} out of range")
    labels = spmap.labels
    selected = np.isin(labels, list(segment_ids))

    out = np.rint(image.astype(np.float64) * DIM_FACTOR).astype(np.uint8)
    out[selected] = image[selected]

    if segment_ids:
        change = np.zeros(labels.shape, dtype=bool)
        change[:, 1:] |= labels[:, 1:] != labels[:, :-1]
        change[:, :-1] |= labels[:, :-1] != labels[:, 1:]
        change[1:, :] |= labels[1:, :] != labels[:-1, :]
        change[:-1, :] |= labels[:-1, :] != labels[1:, :]
        out[selected & change] = OUTLINE_RGB

    if out_path is not None:
        save_png(out, out_path)
    return out
