"""Superpixel segmentation and the binary presence representation.

The segmenter is a deterministic SLIC-style clustering: centers are seeded
on a regular grid, pixels are assigned by a joint color+position distance,
and a post-pass guarantees that every segment is a single 4-connected
region with compact labels 0..num_segments-1.  Two calls on identical
inputs produce identical label maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .image_io import validate_image

# 4-connectivity structuring element for connected-component analysis.
FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class SegmentationParams:
    """Knobs of the superpixel clustering.

    target_segments is a request, not a promise: the seed grid rounds it
    and connectivity enforcement can merge stray fragments, so the final
    count lands in [2, 2 * target_segments].
    """

    target_segments: int = 50
    compactness: float = 10.0
    iterations: int = 10

    def __post_init__(self) -> None:
        if self.target_segments < 2:
            raise ParameterError("target_segments must be >= 2")
        if self.compactness <= 0:
            raise ParameterError("compactness must be > 0")
        if self.iterations < 1:
            raise ParameterError("iterations must be >= 1")


@dataclass(frozen=True)
class SuperpixelMap:
    """Per-pixel segment ids plus the segment count d'.

    Labels are compact: every id in [0, num_segments) appears at least
    once.  Producers additionally guarantee each id forms one 4-connected
    region.
    """

    labels: np.ndarray  # (H, W) int32
    num_segments: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise ParameterError(f"labels must be 2-D, got shape {labels.shape}")
        if self.num_segments < 1:
            raise ParameterError("num_segments must be >= 1")
        counts = np.bincount(labels.ravel(), minlength=self.num_segments)
        if labels.min() < 0 or labels.max() >= self.num_segments:
            raise ParameterError("labels must lie in [0, num_segments)")
        if (counts == 0).any():
            missing = int(np.flatnonzero(counts == 0)[0])
            raise ParameterError(f"label ids are not compact: id {missing} is unused")

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape  # type: ignore[return-value]


def full_mask(spmap: SuperpixelMap) -> np.ndarray:
    """The all-ones mask: every superpixel of the instance present."""
    return np.ones(spmap.num_segments, dtype=np.uint8)


def _seed_grid(width: int, height: int, target: int) -> tuple[int, int]:
    """Choose a seed grid (nx, ny) with nx*ny close to `target`.

    The grid count is constrained to [2, 2*target] and the grid aspect
    follows the image aspect.  Ties prefer wider grids so an even split of
    a square image is left/right, not top/bottom.
    """
    aspect = width / height
    best_key: tuple[float, int] | None = None
    best: tuple[int, int] | None = None
    for nx in range(1, min(2 * target, width) + 1):
        for ny in {math.floor(target / nx), math.ceil(target / nx), 1}:
            if ny < 1 or ny > height:
                continue
            count = nx * ny
            if count < 2 or count > 2 * target:
                continue
            score = abs(math.log((nx / ny) / aspect)) + abs(count - target) / target
            key = (score, -nx)
            if best_key is None or key < best_key:
                best_key, best = key, (nx, ny)
    if best is None:
        raise ParameterError(
            f"cannot place {target} seeds on a {width}x{height} image"
        )
    return best


def segment_image(image: np.ndarray, params: SegmentationParams | None = None) -> SuperpixelMap:
    """Partition an RGB image into superpixels.

    Grid-seeded k-means in joint (r, g, b, x, y) space with colors scaled
    to [0, 1] and positions normalized by the seed spacing; `compactness`
    multiplies the spatial term.  Stray connected components left by the
    clustering are relabeled to their largest neighboring segment, then
    labels are compacted in raster order of first appearance.
    """
    params = params or SegmentationParams()
    image = validate_image(image)
    h, w = image.shape[:2]
    if params.target_segments > h * w:
        raise ParameterError(
            f"target_segments={params.target_segments} exceeds pixel count {h * w}"
        )

    nx, ny = _seed_grid(w, h, params.target_segments)
    sx, sy = w / nx, h / ny

    rgb = image.astype(np.float64) / 255.0
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    xs += 0.5  # pixel centers
    ys += 0.5

    cx = (np.arange(nx) + 0.5) * sx
    cy = (np.arange(ny) + 0.5) * sy
    centers_xy = np.array([(x, y) for y in cy for x in cx], dtype=np.float64)
    k = len(centers_xy)
    seed_cols = np.clip(centers_xy[:, 0].astype(int), 0, w - 1)
    seed_rows = np.clip(centers_xy[:, 1].astype(int), 0, h - 1)
    centers_rgb = rgb[seed_rows, seed_cols].copy()

    m2 = params.compactness ** 2
    labels = np.full((h, w), -1, dtype=np.int32)
    dist = np.empty((h, w), dtype=np.float64)

    for _ in range(params.iterations):
        dist.fill(np.inf)
        labels.fill(-1)
        for ci in range(k):
            cxi, cyi = centers_xy[ci]
            x0 = max(int(math.floor(cxi - sx)), 0)
            x1 = min(int(math.ceil(cxi + sx)), w)
            y0 = max(int(math.floor(cyi - sy)), 0)
            y1 = min(int(math.ceil(cyi + sy)), h)
            if x0 >= x1 or y0 >= y1:
                continue
            dc2 = ((rgb[y0:y1, x0:x1] - centers_rgb[ci]) ** 2).sum(axis=-1)
            dx = (xs[y0:y1, x0:x1] - cxi) / sx
            dy = (ys[y0:y1, x0:x1] - cyi) / sy
            d = dc2 + m2 * (dx * dx + dy * dy)
            better = d < dist[y0:y1, x0:x1]
            dist[y0:y1, x0:x1][better] = d[better]
            labels[y0:y1, x0:x1][better] = ci

        # Centers can drift away from pixels outside every window; assign
        # leftovers to the globally nearest center.
        missing = labels < 0
        if missing.any():
            mi = np.flatnonzero(missing.ravel())
            px = xs.ravel()[mi]
            py = ys.ravel()[mi]
            pc = rgb.reshape(-1, 3)[mi]
            d_all = ((pc[:, None, :] - centers_rgb[None, :, :]) ** 2).sum(axis=-1)
            d_all += m2 * (((px[:, None] - centers_xy[None, :, 0]) / sx) ** 2
                           + ((py[:, None] - centers_xy[None, :, 1]) / sy) ** 2)
            labels.ravel()[mi] = np.argmin(d_all, axis=1)

        flat = labels.ravel()
        counts = np.bincount(flat, minlength=k).astype(np.float64)
        nonempty = counts > 0
        for ch in range(3):
            s = np.bincount(flat, weights=rgb[..., ch].ravel(), minlength=k)
            centers_rgb[nonempty, ch] = s[nonempty] / counts[nonempty]
        sumx = np.bincount(flat, weights=xs.ravel(), minlength=k)
        sumy = np.bincount(flat, weights=ys.ravel(), minlength=k)
        centers_xy[nonempty, 0] = sumx[nonempty] / counts[nonempty]
        centers_xy[nonempty, 1] = sumy[nonempty] / counts[nonempty]

    labels = _enforce_connectivity(labels)
    labels = _compact_labels(labels)
    count = int(labels.max()) + 1

    if count < 2:
        # Degenerate collapse to one region: split along the longer axis.
        if w >= h:
            labels[:, w // 2:] = 1
        else:
            labels[h // 2:, :] = 1
        count = 2

    return SuperpixelMap(labels=labels.astype(np.int32), num_segments=count)


def _enforce_connectivity(labels: np.ndarray) -> np.ndarray:
    """Keep the largest 4-connected component of each id; relabel every
    stray component to its largest (by current area) neighboring segment."""
    out = labels.copy()
    h, w = out.shape

    comp_pixels: list[np.ndarray] = []  # flat indices per stray component
    core = np.zeros(out.shape, dtype=bool)
    for lid in np.unique(out):
        comp, n = ndimage.label(out == lid, structure=FOUR_CONNECTED)
        if n == 1:
            core |= comp == 1
            continue
        sizes = ndimage.sum_labels(np.ones_like(comp), comp, index=np.arange(1, n + 1))
        keep = int(np.argmax(sizes)) + 1  # largest; earliest component wins ties
        core |= comp == keep
        for c in range(1, n + 1):
            if c != keep:
                comp_pixels.append(np.flatnonzero((comp == c).ravel()))

    if not comp_pixels:
        return out

    comp_pixels.sort(key=lambda idx: int(idx[0]))
    areas = np.bincount(out.ravel()[core.ravel()], minlength=int(out.max()) + 1)
    finalized = core.copy()
    pending = list(range(len(comp_pixels)))

    while pending:
        progressed = False
        still = []
        for ci in pending:
            idx = comp_pixels[ci]
            rows, cols = np.unravel_index(idx, (h, w))
            neigh_labels: dict[int, int] = {}
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                rr, cc = rows + dr, cols + dc
                ok = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
                rr, cc = rr[ok], cc[ok]
                good = finalized[rr, cc]
                for lab in np.unique(out[rr[good], cc[good]]):
                    neigh_labels[int(lab)] = areas[int(lab)]
            if not neigh_labels:
                still.append(ci)
                continue
            target = max(neigh_labels, key=lambda lab: (neigh_labels[lab], -lab))
            out[rows, cols] = target
            areas[target] += len(idx)
            finalized[rows, cols] = True
            progressed = True
        if not progressed:  # pragma: no cover - image connectivity guarantees progress
            raise RuntimeError("stray segment components could not be merged")
        pending = still

    return out


def _compact_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel to 0..m-1 in raster order of first appearance."""
    flat = labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    mapping = np.empty(int(ids.max()) + 1, dtype=np.int32)
    mapping[ids[np.argsort(first, kind="stable")]] = np.arange(len(ids), dtype=np.int32)
    return mapping[labels]


def label_map_png(spmap: SuperpixelMap) -> np.ndarray:
    """Debug rendering of the label map: ids modulo 256 in the red channel."""
    h, w = spmap.shape
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[..., 0] = (spmap.labels % 256).astype(np.uint8)
    return img
