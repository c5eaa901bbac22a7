"""Isomorphism-free enumeration of small graphs.

Graphs on n vertices are grown from every graph on n-1 vertices by adding
one vertex with each possible neighborhood. Duplicates are removed by a
canonical code: the smallest upper-triangle adjacency bit string over all
vertex permutations.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .graph import Graph


@lru_cache(maxsize=None)
def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    ii, jj = np.triu_indices(n, 1)
    return ii, jj


def canonical_code(adj: np.ndarray) -> tuple[int, np.ndarray]:
    """(code, permutation) minimizing the upper-triangle bit string read as a binary number.

    The first pair (0,1) is the most significant bit.
    """
    n = adj.shape[0]
    if n < 2:
        return 0, np.arange(n)
    perms = _perms(n)
    ii, jj = _pairs(n)
    bits = adj[perms[:, ii], perms[:, jj]].astype(np.int64)  # (nperm, npairs)
    # lexicographic minimum of the bit rows
    keep = np.arange(len(perms))
    for col in range(bits.shape[1]):
        column = bits[keep, col]
        low = column.min()
        keep = keep[column == low]
        if len(keep) == 1:
            break
    best = keep[0]
    code = 0
    for b in bits[best]:
        code = code << 1 | int(b)
    return code, perms[best]


def _graph_from_code(n: int, code: int) -> tuple[tuple[int, int], ...]:
    ii, jj = _pairs(n)
    npairs = len(ii)
    edges = []
    for t in range(npairs):
        if code >> (npairs - 1 - t) & 1:
            edges.append((int(ii[t]) + 1, int(jj[t]) + 1))
    return tuple(edges)


def _adjacency(n: int, edges) -> np.ndarray:
    adj = np.zeros((n, n), dtype=np.int8)
    for u, w in edges:
        adj[u - 1, w - 1] = adj[w - 1, u - 1] = 1
    return adj


def _connected(n: int, edges) -> bool:
    if n == 0:
        return False
    seen = {1}
    stack = [1]
    nbrs = {x: [] for x in range(1, n + 1)}
    for u, w in edges:
        nbrs[u].append(w)
        nbrs[w].append(u)
    while stack:
        x = stack.pop()
        for y in nbrs[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def all_graphs(n: int) -> list[int]:
    """Canonical codes of every simple graph on n vertices (connected or not)."""
    if n <= 1:
        return [0]
    out = set()
    for code in _all_graphs_cached(n - 1):
        base = _graph_from_code(n - 1, code)
        for k in range(n):
            for nbrs in itertools.combinations(range(1, n), k):
                edges = base + tuple((u, n) for u in nbrs)
                out.add(canonical_code(_adjacency(n, edges))[0])
    return sorted(out)


def gen_corpus(max_n: int, connected_only: bool = True, min_n: int = 2) -> list[Graph]:
    """Connected (by default) graphs with min_n..max_n vertices, ordered by (n, m, code)."""
    if max_n > 7:
        raise ValueError("corpus generation is limited to at most 7 vertices")
    graphs = []
    for n in range(max(min_n, 1), max_n + 1):
        rows = []
        for code in _all_graphs_cached(n):
            edges = _graph_from_code(n, code)
            if connected_only and not _connected(n, edges):
                continue
            rows.append((len(edges), code, edges))
        rows.sort()
        for t, (m, code, edges) in enumerate(rows):
            graphs.append(Graph(n, edges, f"g{n}_{t:03d}"))
    return graphs


@lru_cache(maxsize=None)
def _all_graphs_cached(n: int) -> tuple[int, ...]:
    return tuple(all_graphs(n))
