"""Undirected simple graphs, vertex-cover oracles, and isomorphism-free enumeration.

Bit-string convention used repo-wide: a subset of vertices is a string of
'0'/'1' characters where character i corresponds to vertex i ('1' = vertex in
the set).  The matching basis-state index puts vertex i at bit i, so vertex 0
is the least significant bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, GraphParseError

MAX_COVER_VERTICES = 20
MAX_CANONICAL_VERTICES = 7


def bits_to_index(bits: str) -> int:
    """Basis-state index of a vertex-subset bit string (vertex i at bit i)."""
    index = 0
    for i, ch in enumerate(bits):
        if ch == "1":
            index |= 1 << i
        elif ch != "0":
            raise ContractViolation(f"bit string may contain only 0/1, got {bits!r}")
    return index


def index_to_bits(index: int, n: int) -> str:
    """Inverse of :func:`bits_to_index`."""
    return "".join("1" if (index >> i) & 1 else "0" for i in range(n))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as a sorted, deduplicated edge list.

    Every edge is a pair (u, v) with u < v; the list is lexicographically
    sorted.  Use :meth:`from_edges` to build one from unnormalized pairs.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ContractViolation("graph needs at least one vertex")
        prev = None
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ContractViolation(f"edge ({u}, {v}) has endpoint outside [0, {self.n_vertices})")
            if u == v:
                raise ContractViolation(f"self-loop ({u}, {v}) not allowed")
            if u > v:
                raise ContractViolation(f"edge ({u}, {v}) must be normalized u < v")
            if prev is not None and prev >= (u, v):
                raise ContractViolation("edge list must be sorted and free of duplicates")
            prev = (u, v)

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "Graph":
        """Build a graph from arbitrary (u, v) pairs, normalizing and deduplicating."""
        normalized = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ContractViolation(f"self-loop ({u}, {v}) not allowed")
            normalized.add((u, v) if u < v else (v, u))
        return cls(n_vertices, tuple(sorted(normalized)))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n_vertices == 1:
            return True
        adj = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_vertices


@dataclass(frozen=True)
class CoverSolution:
    """Minimum vertex-cover size together with every optimal cover."""

    size: int
    covers: tuple[str, ...]


def is_vertex_cover(g: Graph, subset: str) -> bool:
    """True iff every edge of g has at least one endpoint marked '1' in subset."""
    if len(subset) != g.n_vertices:
        raise ContractViolation(
            f"subset length {len(subset)} does not match {g.n_vertices} vertices"
        )
    if any(ch not in "01" for ch in subset):
        raise ContractViolation(f"subset must be a 0/1 string, got {subset!r}")
    return all(subset[u] == "1" or subset[v] == "1" for u, v in g.edges)


def min_vertex_covers(g: Graph) -> CoverSolution:
    """Exhaustive scan over all 2^n subsets; returns the minimum size and all optima."""
    n = g.n_vertices
    if n > MAX_COVER_VERTICES:
        raise ContractViolation(f"brute-force cover search limited to {MAX_COVER_VERTICES} vertices")
    idx = np.arange(1 << n, dtype=np.int64)
    covered = np.ones(idx.size, dtype=bool)
    for u, v in g.edges:
        covered &= (((idx >> u) | (idx >> v)) & 1).astype(bool)
    sizes = np.bitwise_count(idx)
    best = int(sizes[covered].min())
    optima = idx[covered & (sizes == best)]
    return CoverSolution(best, tuple(index_to_bits(int(i), n) for i in optima))


# ---------------------------------------------------------------------------
# Canonical labeling and enumeration.
#
# A graph on n vertices is packed into an integer edge mask: pair rank r in
# lexicographic combination order occupies bit (m - 1 - r), so comparing masks
# as integers compares upper-triangle adjacency matrices row by row.  The
# canonical form is the minimum mask over all n! vertex relabelings.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n), 2))


@lru_cache(maxsize=None)
def _perm_weights(n: int) -> np.ndarray:
    """Weight matrix (n_perms, m): weights[p, r] = bit value of pair r under perm p."""
    pairs = _pairs(n)
    rank = {pair: r for r, pair in enumerate(pairs)}
    m = len(pairs)
    perms = list(itertools.permutations(range(n)))
    weights = np.zeros((len(perms), m), dtype=np.int64)
    for pi, perm in enumerate(perms):
        for r, (u, v) in enumerate(pairs):
            pu, pv = perm[u], perm[v]
            rr = rank[(pu, pv) if pu < pv else (pv, pu)]
            weights[pi, r] = 1 << (m - 1 - rr)
    return weights


def _canonical_masks(n: int, masks: np.ndarray) -> np.ndarray:
    """Minimum edge mask over all vertex permutations, for a batch of masks."""
    m = n * (n - 1) // 2
    if m == 0:
        return np.zeros_like(masks)
    weights = _perm_weights(n)
    shifts = (m - 1 - np.arange(m)).astype(np.int64)
    out = np.empty(masks.size, dtype=np.int64)
    chunk = 256  # keeps bits @ weights.T under ~10 MB for n = 7
    for lo in range(0, masks.size, chunk):
        batch = masks[lo : lo + chunk]
        bits = ((batch[:, None] >> shifts[None, :]) & 1).astype(np.int64)
        out[lo : lo + chunk] = (bits @ weights.T).min(axis=1)
    return out


def _mask_of(g: Graph) -> int:
    pairs = _pairs(g.n_vertices)
    rank = {pair: r for r, pair in enumerate(pairs)}
    m = len(pairs)
    mask = 0
    for e in g.edges:
        mask |= 1 << (m - 1 - rank[e])
    return mask


def _graph_from_mask(n: int, mask: int) -> Graph:
    pairs = _pairs(n)
    m = len(pairs)
    edges = tuple(pairs[r] for r in range(m) if (mask >> (m - 1 - r)) & 1)
    return Graph(n, edges)


def canonical_form(g: Graph) -> bytes:
    """Canonical label: two graphs map to the same bytes iff they are isomorphic."""
    if g.n_vertices > MAX_CANONICAL_VERTICES:
        raise ContractViolation(
            f"canonical form limited to {MAX_CANONICAL_VERTICES} vertices (n! search)"
        )
    mask = _mask_of(g)
    canon = int(_canonical_masks(g.n_vertices, np.array([mask], dtype=np.int64))[0])
    return bytes([g.n_vertices]) + canon.to_bytes(3, "big")


def enumerate_connected_graphs(n: int) -> list[Graph]:
    """One representative per isomorphism class of connected simple graphs on n vertices.

    Deterministic order: by edge count, then by canonical edge mask.  Classes
    are grown one edge at a time from canonical representatives, so only
    O(classes * non-edges) masks are ever canonicalized.
    """
    if not 1 <= n <= MAX_CANONICAL_VERTICES:
        raise ContractViolation(f"enumeration supports 1 <= n <= {MAX_CANONICAL_VERTICES}")
    m = n * (n - 1) // 2
    reps: list[int] = [0]
    frontier = [0]
    for _ in range(m):
        candidates = set()
        for mask in frontier:
            for b in range(m):
                bit = 1 << b
                if not mask & bit:
                    candidates.add(mask | bit)
        if not candidates:
            break
        canon = _canonical_masks(n, np.fromiter(candidates, dtype=np.int64))
        frontier = sorted({int(c) for c in canon})
        reps.extend(frontier)
    graphs = [_graph_from_mask(n, mask) for mask in reps]
    return [g for g in graphs if g.is_connected()]


# ---------------------------------------------------------------------------
# Graph file format: line 1 = "<n_vertices> <n_edges>", then one "<u> <v>"
# line per edge with 0-based indices and u < v.
# ---------------------------------------------------------------------------


def parse_graph(text: str) -> Graph:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise GraphParseError("line 1: empty graph file")
    header = lines[0].split()
    if len(header) != 2:
        raise GraphParseError("line 1: expected '<n_vertices> <n_edges>'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphParseError("line 1: vertex and edge counts must be integers") from None
    if n < 1:
        raise GraphParseError("line 1: vertex count must be positive")
    if m < 0:
        raise GraphParseError("line 1: edge count must be nonnegative")
    if len(lines) - 1 != m:
        raise GraphParseError(
            f"line {len(lines)}: header declares {m} edges but file has {len(lines) - 1} edge lines"
        )
    seen = set()
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphParseError(f"line {lineno}: expected '<u> <v>'")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: endpoints must be integers") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"line {lineno}: endpoint outside [0, {n})")
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop ({u}, {v})")
        if u > v:
            raise GraphParseError(f"line {lineno}: edge must satisfy u < v")
        if (u, v) in seen:
            raise GraphParseError(f"line {lineno}: duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
    return Graph(n, tuple(sorted(edges)))


def serialize_graph(g: Graph) -> str:
    lines = [f"{g.n_vertices} {len(g.edges)}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_graph(text)
    except GraphParseError as exc:
        raise GraphParseError(f"{path}: {exc}") from None


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_graph(g))
