"""Perturbation-mask construction.

The correlation-aware sampler enumerates every clique of size 1, 2 or 3 in
the region graph; each clique becomes one perturbed sample that hides (or,
under the opposite polarity, isolates) a coherent group of adjacent
superpixels.  A seeded uniform Bernoulli sampler provides the baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ParameterError
from .graph import RegionGraph

DEACTIVATE = "deactivate_clique"
ACTIVATE = "activate_clique"
POLARITIES = (DEACTIVATE, ACTIVATE)


@dataclass(frozen=True)
class Clique:
    """A vertex subset of size 1-3 in canonical (strictly increasing) form."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.members) <= 3:
            raise ParameterError(f"clique size must be 1-3, got {len(self.members)}")
        if any(b <= a for a, b in zip(self.members, self.members[1:])):
            raise ParameterError(f"members must be strictly increasing, got {self.members}")

    def __len__(self) -> int:
        return len(self.members)


def enumerate_cliques(graph: RegionGraph) -> list[Clique]:
    """Every clique of size 1, 2 or 3, each exactly once, sorted by
    (size, members).

    Triangles come from neighbor intersection over the (u < v) edge list,
    keeping only third vertices w > v, so each triangle is produced once
    and already in canonical form.
    """
    cliques = [Clique((v,)) for v in range(graph.num_vertices)]
    cliques += [Clique(edge) for edge in graph.edges]
    adjacency_sets = [set(n) for n in graph.adjacency]
    for u, v in graph.edges:
        for w in graph.adjacency[v]:
            if w > v and w in adjacency_sets[u]:
                cliques.append(Clique((u, v, w)))
    cliques.sort(key=lambda c: (len(c.members), c.members))
    return cliques


def clique_to_mask(clique: Clique, num_segments: int, polarity: str = DEACTIVATE) -> np.ndarray:
    """Binary presence vector for one clique sample.

    deactivate_clique hides the clique members from the instance;
    activate_clique keeps only the members.
    """
    members = np.asarray(clique.members)
    if members.max() >= num_segments:
        raise IndexError(
            f"clique member {int(members.max())} out of range for {num_segments} segments"
        )
    if polarity == DEACTIVATE:
        mask = np.ones(num_segments, dtype=np.uint8)
        mask[members] = 0
    elif polarity == ACTIVATE:
        mask = np.zeros(num_segments, dtype=np.uint8)
        mask[members] = 1
    else:
        raise ParameterError(f"unknown polarity {polarity!r}")
    return mask


def uniform_sampler(num_segments: int, n_samples: int, rng_seed: int) -> list[np.ndarray]:
    """Baseline sampler: each bit independently Bernoulli(0.5), seeded."""
    if num_segments < 1:
        raise ParameterError("num_segments must be >= 1")
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    bits = rng.integers(0, 2, size=(n_samples, num_segments), dtype=np.uint8)
    return list(bits)


def clique_list_text(cliques: Iterable[Clique]) -> str:
    """Clique list as text, one sorted member tuple per line."""
    return "".join(" ".join(str(m) for m in c.members) + "\n" for c in cliques)
