"""Region adjacency graph over superpixels.

Vertices are segment ids; an undirected edge joins two segments whenever
some pixel of one is 4-adjacent to some pixel of the other.  Diagonal-only
contacts do not count, which keeps the graph planar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .segmentation import SuperpixelMap


@dataclass(frozen=True)
class RegionGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]  # unordered pairs, u < v, lexicographically sorted
    adjacency: tuple[tuple[int, ...], ...]  # per-vertex sorted neighbor ids

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def build_region_graph(spmap: SuperpixelMap) -> RegionGraph:
    labels = spmap.labels
    lh = labels[:, :-1].ravel(), labels[:, 1:].ravel()
    lv = labels[:-1, :].ravel(), labels[1:, :].ravel()
    u = np.concatenate([np.minimum(*lh), np.minimum(*lv)])
    v = np.concatenate([np.maximum(*lh), np.maximum(*lv)])
    keep = u != v
    pairs = np.unique(np.stack([u[keep], v[keep]], axis=1), axis=0)
    edges = tuple((int(a), int(b)) for a, b in pairs)

    neighbors: list[list[int]] = [[] for _ in range(spmap.num_segments)]
    for a, b in edges:
        neighbors[a].append(b)
        neighbors[b].append(a)
    adjacency = tuple(tuple(sorted(n)) for n in neighbors)
    return RegionGraph(num_vertices=spmap.num_segments, edges=edges, adjacency=adjacency)


def edge_list_text(graph: RegionGraph) -> str:
    """Edge list as text, one sorted "u v" pair per line."""
    return "".join(f"{u} {v}\n" for u, v in graph.edges)
