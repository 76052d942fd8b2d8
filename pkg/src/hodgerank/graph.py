"""Comparison multigraph, chain operators and the weighted graph Laplacian.

A comparison dataset is a multigraph on ``n`` items: each record is one
voter's preference on one ordered item pair, and each record owns one
coordinate of the edge-flow space (dimension = number of records).  The
finite-difference operator maps item scores to edge flows, its adjoint
aggregates flows back onto items, and the triangular curl measures the
cyclic part of the mean flow around every 3-clique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ComparisonRecord",
    "ComparisonGraph",
    "coboundary",
    "coboundary_adjoint",
    "laplacian",
    "curl",
    "curl_adjoint",
    "coboundary_matrix",
    "curl_matrix",
    "connected_components",
    "pair_laplacian",
]


@dataclass(frozen=True)
class ComparisonRecord:
    """One voter's preference value on one ordered item pair."""

    voter: int
    item_i: int
    item_j: int
    value: float
    seq: int

    @property
    def edge(self) -> tuple[int, int]:
        """Unordered pair as (low, high)."""
        return (self.item_i, self.item_j) if self.item_i < self.item_j else (self.item_j, self.item_i)

    @property
    def sign(self) -> int:
        """+1 when the stored direction is (low, high), else -1."""
        return 1 if self.item_i < self.item_j else -1


class ComparisonGraph:
    """Multigraph of pairwise comparisons with its 3-clique complex.

    Parameters
    ----------
    n : number of items; records must reference items in ``[0, n)``.
    mode : "binary" stores each record in canonical orientation
        (``item_i < item_j``, value sign-flipped as needed) and requires
        values in {+1, -1}; "general" accepts any real value and keeps
        the reported direction, which is what makes position bias
        observable downstream.
    """

    def __init__(self, n: int, mode: str = "binary"):
        if n < 1:
            raise ValueError(f"need at least one item, got n={n}")
        if mode not in ("binary", "general"):
            raise ValueError(f"unknown mode {mode!r}")
        self.n = n
        self.mode = mode
        self.records: list[ComparisonRecord] = []
        self._mult: dict[tuple[int, int], int] = {}
        self._adj: list[set[int]] = [set() for _ in range(n)]
        # triangle (i<j<k) -> seq of the comparison that completed it
        self._triangles: dict[tuple[int, int, int], int] = {}
        self._dirty = True
        self._arrays: dict[str, np.ndarray] = {}

    # -- construction ------------------------------------------------

    def add_comparison(self, voter: int, item_i: int, item_j: int, value: float) -> ComparisonRecord:
        """Append one comparison; returns the stored record.

        Maintains edge multiplicities and closes any new 3-cliques,
        stamping them with this record's arrival index.
        """
        if item_i == item_j:
            raise ValueError(f"self-comparison on item {item_i}")
        if not (0 <= item_i < self.n and 0 <= item_j < self.n):
            raise ValueError(f"item pair ({item_i}, {item_j}) out of range for n={self.n}")
        if self.mode == "binary":
            if value not in (1, -1):
                raise ValueError(f"binary mode requires value in {{+1, -1}}, got {value!r}")
            if item_i > item_j:
                item_i, item_j, value = item_j, item_i, -value
        seq = len(self.records)
        rec = ComparisonRecord(voter, item_i, item_j, float(value), seq)
        self.records.append(rec)

        lo, hi = rec.edge
        is_new_edge = (lo, hi) not in self._mult
        self._mult[(lo, hi)] = self._mult.get((lo, hi), 0) + 1
        if is_new_edge:
            # new triangles are exactly the common neighbours of lo and hi
            for k in sorted(self._adj[lo] & self._adj[hi]):
                self._triangles[tuple(sorted((lo, hi, k)))] = seq
            self._adj[lo].add(hi)
            self._adj[hi].add(lo)
        self._dirty = True
        return rec

    def extend(self, rows) -> None:
        """Add (voter, item_i, item_j, value) rows in order."""
        for voter, i, j, value in rows:
            self.add_comparison(voter, i, j, value)

    # -- views -------------------------------------------------------

    @property
    def num_records(self) -> int:
        return len(self.records)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Unordered edges (low, high), sorted."""
        return sorted(self._mult)

    @property
    def triangles(self) -> list[tuple[int, int, int]]:
        """3-cliques (i<j<k), sorted."""
        return sorted(self._triangles)

    def multiplicity(self, i: int, j: int) -> int:
        lo, hi = (i, j) if i < j else (j, i)
        return self._mult.get((lo, hi), 0)

    def triangle_seq(self, tri: tuple[int, int, int]) -> int:
        """Arrival index of the comparison that completed the 3-clique."""
        return self._triangles[tuple(sorted(tri))]

    def values(self) -> np.ndarray:
        """Record values as an edge-flow vector (one entry per record)."""
        return self._cache()["values"].copy()

    def voters(self) -> np.ndarray:
        return self._cache()["voters"].copy()

    # -- cached index arrays for the matrix-free operators ------------

    def _cache(self) -> dict[str, np.ndarray]:
        if not self._dirty:
            return self._arrays
        recs = self.records
        edges = self.edges
        edge_index = {e: k for k, e in enumerate(edges)}
        a = np.fromiter((r.item_i for r in recs), dtype=np.intp, count=len(recs))
        b = np.fromiter((r.item_j for r in recs), dtype=np.intp, count=len(recs))
        sign = np.where(a < b, 1.0, -1.0)
        rec_edge = np.fromiter((edge_index[r.edge] for r in recs), dtype=np.intp, count=len(recs))
        mult = np.fromiter((self._mult[e] for e in edges), dtype=np.float64, count=len(edges))
        tris = self.triangles
        # per triangle (i<j<k): edge indices of (i,j), (j,k), (i,k)
        t_ij = np.fromiter((edge_index[(i, j)] for i, j, _ in tris), dtype=np.intp, count=len(tris))
        t_jk = np.fromiter((edge_index[(j, k)] for _, j, k in tris), dtype=np.intp, count=len(tris))
        t_ik = np.fromiter((edge_index[(i, k)] for i, _, k in tris), dtype=np.intp, count=len(tris))
        self._arrays = {
            "a": a,
            "b": b,
            "sign": sign,
            "rec_edge": rec_edge,
            "mult": mult,
            "values": np.fromiter((r.value for r in recs), dtype=np.float64, count=len(recs)),
            "voters": np.fromiter((r.voter for r in recs), dtype=np.intp, count=len(recs)),
            "t_ij": t_ij,
            "t_jk": t_jk,
            "t_ik": t_ik,
        }
        self._dirty = False
        return self._arrays

    def edge_means(self, y: np.ndarray) -> np.ndarray:
        """Per-edge mean flow in the (low, high) direction, indexed like ``edges``."""
        c = self._cache()
        y = _check_flow(self, y)
        acc = np.zeros(len(self._mult))
        np.add.at(acc, c["rec_edge"], c["sign"] * y)
        return acc / c["mult"]


def _check_flow(graph: ComparisonGraph, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (graph.num_records,):
        raise ValueError(f"edge flow has shape {y.shape}, expected ({graph.num_records},)")
    return y


def _check_scores(graph: ComparisonGraph, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.n,):
        raise ValueError(f"score vector has shape {x.shape}, expected ({graph.n},)")
    return x


# -- chain operators ----------------------------------------------------


def coboundary(graph: ComparisonGraph, x) -> np.ndarray:
    """Finite difference of a score vector along each record: x_i - x_j."""
    x = _check_scores(graph, x)
    c = graph._cache()
    return x[c["a"]] - x[c["b"]]


def coboundary_adjoint(graph: ComparisonGraph, y) -> np.ndarray:
    """Adjoint of :func:`coboundary`: signed sums of flows incident to each item."""
    y = _check_flow(graph, y)
    c = graph._cache()
    out = np.zeros(graph.n)
    np.add.at(out, c["a"], y)
    np.add.at(out, c["b"], -y)
    return out


def laplacian(graph: ComparisonGraph) -> np.ndarray:
    """Weighted graph Laplacian: L[i,j] = -m_ij off-diagonal, degree on the diagonal."""
    L = np.zeros((graph.n, graph.n))
    for (i, j), m in graph._mult.items():
        L[i, j] -= m
        L[j, i] -= m
        L[i, i] += m
        L[j, j] += m
    return L


def pair_laplacian(n: int, i: int, j: int) -> np.ndarray:
    """Rank-1 Laplacian of a single comparison on pair (i, j)."""
    d = np.zeros(n)
    d[i], d[j] = 1.0, -1.0
    return np.outer(d, d)


def curl(graph: ComparisonGraph, y) -> np.ndarray:
    """Oriented sum of mean edge flows around each 3-clique (i -> j -> k -> i)."""
    y = _check_flow(graph, y)
    c = graph._cache()
    means = graph.edge_means(y)
    return means[c["t_ij"]] + means[c["t_jk"]] - means[c["t_ik"]]


def curl_adjoint(graph: ComparisonGraph, z) -> np.ndarray:
    """Adjoint of :func:`curl`; spreads triangle values back over records.

    Each record on edge e receives sum over incident triangles of
    +/- z_t / m_e, with the orientation sign of e in the triangle cycle
    and the record's own direction sign.
    """
    z = np.asarray(z, dtype=np.float64)
    c = graph._cache()
    if z.shape != c["t_ij"].shape:
        raise ValueError(f"triangle vector has shape {z.shape}, expected {c['t_ij'].shape}")
    acc = np.zeros(len(graph._mult))
    np.add.at(acc, c["t_ij"], z)
    np.add.at(acc, c["t_jk"], z)
    np.add.at(acc, c["t_ik"], -z)
    return c["sign"] * acc[c["rec_edge"]] / c["mult"][c["rec_edge"]]


# -- dense operator matrices (desk scale) --------------------------------


def coboundary_matrix(graph: ComparisonGraph) -> np.ndarray:
    """Dense (records x items) matrix of :func:`coboundary`."""
    c = graph._cache()
    D0 = np.zeros((graph.num_records, graph.n))
    rows = np.arange(graph.num_records)
    D0[rows, c["a"]] = 1.0
    D0[rows, c["b"]] = -1.0
    return D0


def curl_matrix(graph: ComparisonGraph) -> np.ndarray:
    """Dense (triangles x records) matrix of :func:`curl`."""
    c = graph._cache()
    tris = len(c["t_ij"])
    D1 = np.zeros((tris, graph.num_records))
    m_rec = c["mult"][c["rec_edge"]]
    for t in range(tris):
        for e_idx, s in ((c["t_ij"][t], 1.0), (c["t_jk"][t], 1.0), (c["t_ik"][t], -1.0)):
            on_edge = c["rec_edge"] == e_idx
            D1[t, on_edge] = s * c["sign"][on_edge] / m_rec[on_edge]
    return D1


def connected_components(graph: ComparisonGraph) -> list[list[int]]:
    """Partition of the items by edge reachability (count = beta_0)."""
    seen = [False] * graph.n
    parts = []
    for root in range(graph.n):
        if seen[root]:
            continue
        stack, comp = [root], []
        seen[root] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in graph._adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        parts.append(sorted(comp))
    return parts
