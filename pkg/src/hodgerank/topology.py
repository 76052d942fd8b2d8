"""Online tracking of connected components and loops of the clique complex.

Simplices arrive in filtration order (faces first).  Components are
maintained with a union-find; loops with the standard mod-2 boundary
column reduction restricted to dimensions 1-2: an edge either merges two
components or opens a loop, and a triangle closes a loop exactly when
its reduced boundary column is nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TimelineEvent",
    "TopologyTimeline",
    "BettiTracker",
    "track",
    "timeline_from_comparisons",
    "betti_oracle",
    "mean_betti_curves",
]


@dataclass(frozen=True)
class TimelineEvent:
    seq: int
    kind: str  # "vertex" | "edge" | "triangle"
    beta0: int
    beta1: int


@dataclass
class TopologyTimeline:
    """Betti numbers after each simplex insertion, in filtration order."""

    events: list[TimelineEvent] = field(default_factory=list)

    def betti_at(self, seq: int) -> tuple[int, int]:
        """State after the last event with sequence index <= seq."""
        beta0, beta1 = 0, 0
        for ev in self.events:
            if ev.seq > seq:
                break
            beta0, beta1 = ev.beta0, ev.beta1
        return beta0, beta1

    def final(self) -> tuple[int, int]:
        if not self.events:
            return 0, 0
        last = self.events[-1]
        return last.beta0, last.beta1

    def to_rows(self) -> list[tuple[int, str, int, int]]:
        """CSV-ready rows (seq, kind, beta0, beta1)."""
        return [(ev.seq, ev.kind, ev.beta0, ev.beta1) for ev in self.events]


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def add(self, v: int) -> None:
        self.parent[v] = v

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the components of a and b; False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


class BettiTracker:
    """Incremental beta_0 / beta_1 of a complex growing in filtration order."""

    def __init__(self):
        self.beta0 = 0
        self.beta1 = 0
        self._uf = _UnionFind()
        self._edge_index: dict[tuple[int, int], int] = {}
        # reduced boundary columns of earlier triangles, keyed by pivot edge
        self._pivots: dict[int, frozenset[int]] = {}
        self.timeline = TopologyTimeline()

    def _emit(self, seq: int, kind: str) -> None:
        self.timeline.events.append(TimelineEvent(seq, kind, self.beta0, self.beta1))

    def has_edge(self, u: int, v: int) -> bool:
        return tuple(sorted((u, v))) in self._edge_index

    def add_vertex(self, v: int, seq: int = 0) -> None:
        if v in self._uf.parent:
            raise ValueError(f"vertex {v} already present")
        self._uf.add(v)
        self.beta0 += 1
        self._emit(seq, "vertex")

    def add_edge(self, u: int, v: int, seq: int) -> None:
        if u not in self._uf.parent or v not in self._uf.parent:
            raise ValueError(f"edge ({u}, {v}) before its endpoints")
        key = tuple(sorted((u, v)))
        if key in self._edge_index:
            raise ValueError(f"edge {key} already present")
        self._edge_index[key] = len(self._edge_index)
        if self._uf.union(u, v):
            self.beta0 -= 1
        else:
            self.beta1 += 1
        self._emit(seq, "edge")

    def add_triangle(self, i: int, j: int, k: int, seq: int) -> None:
        vs = sorted((i, j, k))
        try:
            col = {
                self._edge_index[(vs[0], vs[1])],
                self._edge_index[(vs[0], vs[2])],
                self._edge_index[(vs[1], vs[2])],
            }
        except KeyError:
            raise ValueError(f"triangle {tuple(vs)} before one of its edges") from None
        while col and max(col) in self._pivots:
            col ^= self._pivots[max(col)]
        if col:
            self._pivots[max(col)] = frozenset(col)
            self.beta1 -= 1
        self._emit(seq, "triangle")


def track(stream) -> TopologyTimeline:
    """Run the tracker over (seq, simplex) pairs in filtration order.

    A simplex is a tuple of 1 (vertex), 2 (edge) or 3 (triangle) vertex
    ids; faces must appear before the simplices they bound.
    """
    tracker = BettiTracker()
    for seq, simplex in stream:
        if len(simplex) == 1:
            tracker.add_vertex(simplex[0], seq)
        elif len(simplex) == 2:
            tracker.add_edge(simplex[0], simplex[1], seq)
        elif len(simplex) == 3:
            tracker.add_triangle(*simplex, seq=seq)
        else:
            raise ValueError(f"simplex of dimension > 2: {simplex!r}")
    return tracker.timeline


def timeline_from_comparisons(n: int, pairs) -> TopologyTimeline:
    """Timeline of a comparison stream: all vertices at 0, pair t at seq t.

    A repeated pair is a topology no-op; triangles completed by a new
    edge enter immediately after it, in lexicographic order.
    """
    tracker = BettiTracker()
    adj: list[set[int]] = [set() for _ in range(n)]
    for v in range(n):
        tracker.add_vertex(v, 0)
    for t, (i, j) in enumerate(pairs, start=1):
        lo, hi = (i, j) if i < j else (j, i)
        if tracker.has_edge(lo, hi):
            continue
        tracker.add_edge(lo, hi, t)
        for k in sorted(adj[lo] & adj[hi]):
            tracker.add_triangle(*sorted((lo, hi, k)), seq=t)
        adj[lo].add(hi)
        adj[hi].add(lo)
    return tracker.timeline


def _gf2_rank(mat: np.ndarray) -> int:
    """Rank of a 0/1 matrix over GF(2) by Gaussian elimination."""
    m = mat.astype(np.uint8).copy()
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r, c]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        below = m[:, c].astype(bool)
        below[rank] = False
        m[below] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def betti_oracle(n_vertices: int, edges, triangles) -> tuple[int, int]:
    """Brute-force beta_0 / beta_1 from GF(2) ranks of the boundary maps."""
    edges = [tuple(sorted(e)) for e in edges]
    e_index = {e: k for k, e in enumerate(edges)}
    d1 = np.zeros((n_vertices, len(edges)), dtype=np.uint8)
    for k, (u, v) in enumerate(edges):
        d1[u, k] = 1
        d1[v, k] = 1
    d2 = np.zeros((len(edges), len(triangles)), dtype=np.uint8)
    for k, tri in enumerate(triangles):
        a, b, c = sorted(tri)
        for e in ((a, b), (a, c), (b, c)):
            d2[e_index[e], k] = 1
    r1 = _gf2_rank(d1)
    r2 = _gf2_rank(d2)
    return n_vertices - r1, (len(edges) - r1) - r2


def mean_betti_curves(timelines, grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ensemble-mean beta_0 and beta_1 over a budget grid.

    Returns (grid, mean beta_0, mean beta_1), averaging each timeline's
    state after the last event at or before every grid step.
    """
    timelines = list(timelines)
    if not timelines:
        raise ValueError("need at least one timeline")
    grid = np.asarray(list(grid), dtype=np.int64)
    b0 = np.zeros((len(timelines), len(grid)))
    b1 = np.zeros((len(timelines), len(grid)))
    for t_idx, tl in enumerate(timelines):
        for g_idx, g in enumerate(grid):
            b0[t_idx, g_idx], b1[t_idx, g_idx] = tl.betti_at(int(g))
    return grid, b0.mean(axis=0), b1.mean(axis=0)
