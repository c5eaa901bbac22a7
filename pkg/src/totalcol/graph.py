"""Simple graphs with fixed vertex/edge order, neighbor-set families, parsing.

Vertices are 1..n and edges e_1..e_m keep the order they were read in. The
forward families N_i(v_i) and N_i(e_i) depend on that order, so nothing
here ever re-sorts edges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping


class ParseError(ValueError):
    pass


class LoopEdge(ParseError):
    pass


class DuplicateEdge(ParseError):
    pass


class PartialAssignment(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        seen = set()
        for u, w in self.edges:
            if u == w:
                raise LoopEdge(f"loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= w <= self.n):
                raise ParseError(f"edge {u}-{w} outside 1..{self.n}")
            key = frozenset((u, w))
            if key in seen:
                raise DuplicateEdge(f"edge {u}-{w} listed twice")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * (self.n + 1)
        for u, w in self.edges:
            deg[u] += 1
            deg[w] += 1
        return tuple(deg[1:])

    def degree(self, u: int) -> int:
        return self.degrees[u - 1]

    @property
    def delta(self) -> int:
        return max(self.degrees, default=0)

    def to_edgelist(self) -> str:
        return "".join(f"{u} {w}\n" for u, w in self.edges)

    def label(self) -> str:
        return self.name or f"n{self.n}m{self.m}:" + ",".join(f"{u}-{w}" for u, w in self.edges)


def from_edges(edges: Iterable[tuple[int, int]], n: int | None = None, name: str = "") -> Graph:
    edges = tuple((int(u), int(w)) for u, w in edges)
    if n is None:
        n = max((max(u, w) for u, w in edges), default=0)
    return Graph(n, edges, name)


_DIMACS_P = re.compile(r"^p\s+(?:edge|col)\s+(\d+)\s+(\d+)\s*$")


def parse_graph(text: str, fmt: str | None = None, name: str = "") -> Graph:
    """Parse an edge list ("u v" per line, '#' comments) or a DIMACS payload.

    ``fmt`` is "edgelist", "dimacs" or None to sniff for a "p edge" header.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    if fmt is None:
        fmt = "dimacs" if any(_DIMACS_P.match(ln) for ln in lines) else "edgelist"
    edges: list[tuple[int, int]] = []
    n = None
    if fmt == "dimacs":
        declared_m = None
        for no, ln in enumerate(lines, 1):
            if not ln or ln.startswith("c"):
                continue
            hdr = _DIMACS_P.match(ln)
            if hdr:
                if n is not None:
                    raise ParseError(f"line {no}: second problem line")
                n, declared_m = int(hdr.group(1)), int(hdr.group(2))
                continue
            parts = ln.split()
            if parts[0] != "e" or len(parts) != 3:
                raise ParseError(f"line {no}: expected 'e u v', got {ln!r}")
            edges.append(_pair(parts[1], parts[2], no))
        if n is None:
            raise ParseError("missing 'p edge n m' line")
        if declared_m is not None and declared_m != len(edges):
            raise ParseError(f"header declares {declared_m} edges, found {len(edges)}")
    elif fmt == "edgelist":
        for no, ln in enumerate(lines, 1):
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            parts = ln.split()
            if len(parts) != 2:
                raise ParseError(f"line {no}: expected 'u v', got {ln!r}")
            edges.append(_pair(parts[0], parts[1], no))
    else:
        raise ParseError(f"unknown format {fmt!r}")
    if n is None:
        n = max((max(u, w) for u, w in edges), default=0)
    return Graph(n, tuple(edges), name)


def _pair(a: str, b: str, no: int) -> tuple[int, int]:
    try:
        u, w = int(a), int(b)
    except ValueError:
        raise ParseError(f"line {no}: non-integer vertex") from None
    if u < 1 or w < 1:
        raise ParseError(f"line {no}: vertices are 1-based")
    return u, w


@dataclass(frozen=True)
class NeighborIndex:
    """All neighbor-set families, 1-based, each stored as a sorted tuple.

    nv[i]    neighbors of v_i
    ne_v[i]  edges incident to v_i
    ne[k]    edges adjacent to e_k
    nvi[i]   neighbors of v_i with larger index
    nei[k]   edges adjacent to e_k with larger index
    Index 0 is unused padding.
    """

    nv: tuple
    ne_v: tuple
    ne: tuple
    nvi: tuple
    nei: tuple


def build_neighbor_index(g: Graph) -> NeighborIndex:
    nv = [set() for _ in range(g.n + 1)]
    ne_v = [set() for _ in range(g.n + 1)]
    for k, (u, w) in enumerate(g.edges, 1):
        nv[u].add(w)
        nv[w].add(u)
        ne_v[u].add(k)
        ne_v[w].add(k)
    ne = [set() for _ in range(g.m + 1)]
    for k, (u, w) in enumerate(g.edges, 1):
        ne[k] = (ne_v[u] | ne_v[w]) - {k}
    nvi = [{j for j in nv[i] if j > i} for i in range(g.n + 1)]
    nei = [{j for j in ne[k] if j > k} for k in range(g.m + 1)]

    def freeze(rows):
        return tuple(tuple(sorted(r)) for r in rows)

    return NeighborIndex(freeze(nv), freeze(ne_v), freeze(ne), freeze(nvi), freeze(nei))


@dataclass(frozen=True)
class ColorSet:
    """K = {1, ..., delta+1} together with a floating color alpha."""

    delta: int
    alpha: int
    p: int

    def __post_init__(self):
        if not (self.delta + 2 <= self.alpha < self.p):
            raise ValueError(f"alpha={self.alpha} must lie in Z_{self.p} minus {{0..{self.delta + 1}}}")

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(range(1, self.delta + 2))

    @property
    def colors(self) -> tuple[int, ...]:
        return self.base + (self.alpha,)

    def __contains__(self, c: int) -> bool:
        return c == self.alpha or 1 <= c <= self.delta + 1

    def __len__(self) -> int:
        return self.delta + 2

    def complement(self) -> tuple[int, ...]:
        """Z_p minus K, increasing."""
        return tuple(x for x in range(self.p) if x not in self)

    def with_alpha(self, alpha: int) -> "ColorSet":
        return ColorSet(self.delta, alpha, self.p)


def default_colors(g: Graph, p: int) -> ColorSet:
    return ColorSet(g.delta, g.delta + 2, p)


@dataclass
class ColorAssignment:
    vertex_colors: dict[int, int]
    edge_colors: dict[int, int]
    palette: ColorSet | None = None

    def is_total(self, g: Graph) -> bool:
        return (set(self.vertex_colors) == set(range(1, g.n + 1))
                and set(self.edge_colors) == set(range(1, g.m + 1)))

    def colors_used(self) -> set[int]:
        return set(self.vertex_colors.values()) | set(self.edge_colors.values())

    def as_json(self) -> dict:
        out = {
            "vertices": {str(i): c for i, c in sorted(self.vertex_colors.items())},
            "edges": {str(k): c for k, c in sorted(self.edge_colors.items())},
        }
        if self.palette is not None:
            out["palette"] = list(self.palette.colors)
            out["palette_size"] = len(self.palette)
        return out


@dataclass
class Check:
    ok: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_edge_coloring(g: Graph, edge_colors: Mapping[int, int], allowed=None) -> Check:
    if set(edge_colors) != set(range(1, g.m + 1)):
        raise PartialAssignment("edge coloring does not cover every edge")
    for k in range(1, g.m + 1):
        if allowed is not None and edge_colors[k] not in allowed:
            return Check(False, f"edge e{k} color {edge_colors[k]} outside palette")
    at_vertex: dict[tuple[int, int], int] = {}
    for k, (u, w) in enumerate(g.edges, 1):
        c = edge_colors[k]
        for x in (u, w):
            other = at_vertex.get((x, c))
            if other is not None:
                return Check(False, f"adjacent edges e{other}, e{k} share color {c} at v{x}")
            at_vertex[(x, c)] = k
    return Check(True)


def verify_total_coloring(g: Graph, c: ColorAssignment) -> Check:
    """Check the three total-coloring conditions and palette membership."""
    if not c.is_total(g):
        raise PartialAssignment("assignment does not cover every vertex and edge")
    allowed = c.palette
    if allowed is not None:
        for i, col in sorted(c.vertex_colors.items()):
            if col not in allowed:
                return Check(False, f"vertex v{i} color {col} outside palette")
    for u, w in g.edges:
        if c.vertex_colors[u] == c.vertex_colors[w]:
            return Check(False, f"adjacent vertices v{u}, v{w} share color {c.vertex_colors[u]}")
    chk = verify_edge_coloring(g, c.edge_colors, allowed)
    if not chk:
        return chk
    for k, (u, w) in enumerate(g.edges, 1):
        for x in (u, w):
            if c.vertex_colors[x] == c.edge_colors[k]:
                return Check(False, f"edge e{k} and its end v{x} share color {c.edge_colors[k]}")
    return Check(True)
