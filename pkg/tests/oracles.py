"""Independent reference implementations used to compute expected values.

Everything here is deliberately brute-force and shares no code with the
package: subset enumeration for cliques, pixel-pair scans for adjacency,
BFS flood fill for connectivity, and normal equations for weighted least
squares.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np


def brute_force_cliques(num_vertices: int, edges) -> list[tuple[int, ...]]:
    """All vertex subsets of size 1-3 with pairwise adjacency, sorted by
    (size, members)."""
    adj = {(min(u, v), max(u, v)) for u, v in edges}
    out = []
    for size in (1, 2, 3):
        for combo in itertools.combinations(range(num_vertices), size):
            if all((a, b) in adj for a, b in itertools.combinations(combo, 2)):
                out.append(combo)
    out.sort(key=lambda c: (len(c), c))
    return out


def brute_force_triangle_count(num_vertices: int, edges) -> int:
    return sum(1 for c in brute_force_cliques(num_vertices, edges) if len(c) == 3)


def brute_force_region_edges(labels: np.ndarray) -> list[tuple[int, int]]:
    """Scan every horizontally/vertically neighboring pixel pair."""
    h, w = labels.shape
    edges = set()
    for y in range(h):
        for x in range(w):
            for dy, dx in ((0, 1), (1, 0)):
                yy, xx = y + dy, x + dx
                if yy < h and xx < w and labels[y, x] != labels[yy, xx]:
                    a, b = int(labels[y, x]), int(labels[yy, xx])
                    edges.add((min(a, b), max(a, b)))
    return sorted(edges)


def flood_fill_size(labels: np.ndarray, start: tuple[int, int]) -> int:
    """Pixels reachable from `start` through 4-neighbors of equal label."""
    h, w = labels.shape
    lid = labels[start]
    seen = {start}
    queue = deque([start])
    while queue:
        y, x = queue.popleft()
        for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w and (yy, xx) not in seen \
                    and labels[yy, xx] == lid:
                seen.add((yy, xx))
                queue.append((yy, xx))
    return len(seen)


def segment_is_connected(labels: np.ndarray, lid: int) -> bool:
    member_ys, member_xs = np.nonzero(labels == lid)
    if len(member_ys) == 0:
        return False
    start = (int(member_ys[0]), int(member_xs[0]))
    return flood_fill_size(labels, start) == len(member_ys)


def weighted_least_squares(X: np.ndarray, y: np.ndarray, w: np.ndarray,
                           features) -> tuple[float, np.ndarray]:
    """Normal-equations solution of min sum w_i (y_i - b - X[i, feats] c)^2."""
    features = list(features)
    A = np.column_stack([np.ones(len(y)), np.asarray(X, dtype=np.float64)[:, features]])
    W = np.diag(np.asarray(w, dtype=np.float64))
    beta = np.linalg.solve(A.T @ W @ A, A.T @ W @ np.asarray(y, dtype=np.float64))
    return float(beta[0]), beta[1:]


def segment_mean_color(image: np.ndarray, labels: np.ndarray, lid: int) -> np.ndarray:
    return image[labels == lid].reshape(-1, 3).astype(np.float64).mean(axis=0)


def exhaustive_importance(d: int, response_of_mask) -> np.ndarray:
    """Ground-truth per-segment importance: the mean change in response when
    the segment is present vs hidden, averaged over all 2^(d-1) contexts."""
    deltas = np.zeros(d)
    for bits in itertools.product((0, 1), repeat=d):
        mask = np.array(bits, dtype=np.uint8)
        r = response_of_mask(mask)
        for s in range(d):
            flipped = mask.copy()
            flipped[s] = 1 - flipped[s]
            r2 = response_of_mask(flipped)
            if mask[s] == 1:
                deltas[s] += r - r2
            else:
                deltas[s] += r2 - r
    return deltas / (2 ** d)
