"""Confusability graph, finest decomposition and maximin information.

The released clusters of a quantization form the nodes of an undirected
graph with an edge wherever two clusters' conditional S-ranges intersect
(the confusability graph). The graph's connected components determine the
number of perfectly distinguishable pieces of S: the maximin information is
log2 of the component count.

Components are found by iterative breadth-first search (no recursion-depth
hazard); edges are detected with bitmask intersections of the conditional
ranges. Two independent routes to the same partition are kept side by side
on purpose:

* ``finest_decomposition(build_graph(...))`` -- the BFS route used
  everywhere in production code;
* ``overlap_partition_oracle`` -- a definitional union-find over the S
  alphabet (values are united whenever one released cluster covers both),
  used by tests as a cross-check of the BFS route.

``merge_update`` coarsens an existing decomposition under a quantization
without rebuilding the graph.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from .core import JointRange
from .errors import ContractViolation

__all__ = [
    "ConfusabilityGraph",
    "Decomposition",
    "UnionFind",
    "build_graph",
    "finest_decomposition",
    "maximin_information",
    "overlap_partition_oracle",
    "merge_update",
]


class UnionFind:
    """Minimal union-find with path halving; used for overlap partitions."""

    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Keep the smaller root as representative for stable output order.
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _canonical_clusters(q) -> tuple[frozenset[int], ...]:
    clusters = [frozenset(c) for c in getattr(q, "clusters", q)]
    if any(not c for c in clusters):
        raise ContractViolation("clusters must be non-empty")
    return tuple(sorted(clusters, key=min))


@dataclass(frozen=True)
class ConfusabilityGraph:
    """Graph over released clusters; edge iff conditional S-ranges overlap.

    ``clusters`` is ordered by smallest member x-index; ``edges`` holds
    (i, j) cluster-position pairs with i < j. No self-loops are recorded and
    the relation is symmetric by construction.
    """

    clusters: tuple[frozenset[int], ...]
    edges: frozenset[tuple[int, int]]

    @property
    def n_nodes(self) -> int:
        return len(self.clusters)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.clusters]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class Decomposition:
    """Partition of the X alphabet into mutually non-confusable blocks.

    Blocks are unions of cluster members, each internally connected in the
    confusability graph, with no edge crossing blocks; ordered by smallest
    contained x-index.
    """

    blocks: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self) -> dict[int, int]:
        """Map every x-index to the position of its block."""
        out: dict[int, int] = {}
        for pos, block in enumerate(self.blocks):
            for x in block:
                out[x] = pos
        return out


def build_graph(jr: JointRange, q) -> ConfusabilityGraph:
    """Confusability graph of a quantization's clusters.

    O(n^2) pairwise bitmask intersections; fine for the alphabet sizes this
    package targets.
    """
    clusters = _canonical_clusters(q)
    masks = [jr.cond_mask_cluster(c) for c in clusters]
    edges = set()
    for i in range(len(clusters)):
        mi = masks[i]
        for j in range(i + 1, len(clusters)):
            if mi & masks[j]:
                edges.add((i, j))
    return ConfusabilityGraph(clusters, frozenset(edges))


def finest_decomposition(g: ConfusabilityGraph) -> Decomposition:
    """Connected components of the graph, as blocks of x-indices (BFS)."""
    adj = g.adjacency()
    seen = [False] * g.n_nodes
    blocks = []
    for start in range(g.n_nodes):
        if seen[start]:
            continue
        seen[start] = True
        component = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    component.append(v)
                    queue.append(v)
        members: set[int] = set()
        for node in component:
            members |= g.clusters[node]
        blocks.append(frozenset(members))
    blocks.sort(key=min)
    return Decomposition(tuple(blocks))


def maximin_information(jr: JointRange, q) -> float:
    """Bits of S perfectly distinguishable from the release: log2(#components)."""
    return math.log2(len(finest_decomposition(build_graph(jr, q))))


def overlap_partition_oracle(jr: JointRange, q) -> tuple[frozenset[int], ...]:
    """Finest overlap partition of the S alphabet, straight from the definition.

    All sensitive values covered by one released cluster are overlap
    connected; the partition is the transitive closure of that relation,
    computed by union-find over S indices. Kept deliberately independent of
    the BFS component search so the two can check each other.
    """
    uf = UnionFind(jr.n_s)
    for cluster in _canonical_clusters(q):
        mask = jr.cond_mask_cluster(cluster)
        first = None
        i = 0
        while mask:
            if mask & 1:
                if first is None:
                    first = i
                else:
                    uf.union(first, i)
            mask >>= 1
            i += 1
    groups: dict[int, set[int]] = {}
    for s in range(jr.n_s):
        groups.setdefault(uf.find(s), set()).add(s)
    return tuple(frozenset(g) for g in sorted(groups.values(), key=min))


def merge_update(dec: Decomposition, q) -> Decomposition:
    """Coarsen a decomposition under a quantization without a graph rebuild.

    Every cluster of ``q`` fuses all blocks it intersects. When ``dec`` is
    the finest decomposition of the singleton-level graph, the result equals
    the finest decomposition of the graph built on ``q``'s clusters.
    """
    clusters = _canonical_clusters(q)
    dec_universe = frozenset().union(*dec.blocks)
    q_universe = frozenset().union(*clusters)
    if dec_universe != q_universe:
        raise ContractViolation("decomposition and quantization cover different alphabets")

    block_of = dec.block_of()
    uf = UnionFind(len(dec.blocks))
    for cluster in clusters:
        it = iter(cluster)
        first = block_of[next(it)]
        for x in it:
            uf.union(first, block_of[x])
    fused: dict[int, set[int]] = {}
    for pos, block in enumerate(dec.blocks):
        fused.setdefault(uf.find(pos), set()).update(block)
    blocks = tuple(frozenset(b) for b in sorted(fused.values(), key=min))
    return Decomposition(blocks)
