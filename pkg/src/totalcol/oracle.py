"""Combinatorial ground truth: exact total chromatic number and a Vizing edge coloring."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .budget import Budget
from .graph import ColorAssignment, Graph, build_neighbor_index, verify_edge_coloring, verify_total_coloring


@dataclass
class OracleResult:
    chi_total: int | None
    witness: ColorAssignment | None
    nodes_explored: int
    certificate: str  # how minimality is known

    def as_json(self) -> dict:
        return {"chi_total": self.chi_total, "nodes_explored": self.nodes_explored,
                "certificate": self.certificate,
                "witness": self.witness.as_json() if self.witness else None}


def conflict_graph(g: Graph) -> tuple[list[tuple[str, int]], list[set[int]]]:
    """Elements (vertices then edges) and, per element, the indices it conflicts with."""
    elems = [("v", i) for i in range(1, g.n + 1)] + [("e", k) for k in range(1, g.m + 1)]
    pos = {x: t for t, x in enumerate(elems)}
    adj = [set() for _ in elems]

    def link(a, b):
        adj[pos[a]].add(pos[b])
        adj[pos[b]].add(pos[a])

    idx = build_neighbor_index(g)
    for k, (u, w) in enumerate(g.edges, 1):
        link(("v", u), ("v", w))
        link(("v", u), ("e", k))
        link(("v", w), ("e", k))
        for j in idx.nei[k]:
            link(("e", k), ("e", j))
    return elems, adj


def element_order(g: Graph, adj: list[set[int]]) -> list[int]:
    """Max-degree vertex, its incident edges, then most-constrained-first."""
    if g.n == 0:
        return []
    start = max(range(1, g.n + 1), key=lambda i: (g.degree(i), -i)) - 1
    order = [start]
    idx = build_neighbor_index(g)
    order += [g.n + k - 1 for k in idx.ne_v[start + 1]]
    placed = set(order)
    while len(order) < len(adj):
        rest = [t for t in range(len(adj)) if t not in placed]
        nxt = max(rest, key=lambda t: (len(adj[t] & placed), len(adj[t]), -t))
        order.append(nxt)
        placed.add(nxt)
    return order


def _search(adj: list[set[int]], order: list[int], k: int, budget: Budget, counter: list[int]) -> list[int] | None:
    n = len(order)
    colors = [-1] * len(adj)
    earlier = []
    seen = set()
    for t in order:
        earlier.append([u for u in adj[t] if u in seen])
        seen.add(t)

    def rec(depth: int, used: int) -> bool:
        if depth == n:
            return True
        t = order[depth]
        blocked = 0
        for u in earlier[depth]:
            blocked |= 1 << colors[u]
        # canonical colors: a new color must be the next unused one
        for c in range(min(used + 1, k)):
            if blocked >> c & 1:
                continue
            counter[0] += 1
            budget.charge(1, "total coloring search")
            colors[t] = c
            if rec(depth + 1, max(used, c + 1)):
                return True
        colors[t] = -1
        return False

    return colors if rec(0, 0) else None


def brute_total_chromatic(g: Graph, k_max: int | None = None, budget: Budget | None = None) -> OracleResult:
    """Smallest k <= k_max with a proper total coloring, searching up from delta+1.

    Delta+1 is a lower bound (a max-degree vertex and its edges pairwise
    conflict), so the answer is certified either by that clique or by the
    exhausted search one color below.
    """
    delta = g.delta
    k_max = delta + 2 if k_max is None else k_max
    if k_max < delta + 1:
        raise ValueError(f"k_max={k_max} is below the lower bound delta+1={delta + 1}")
    budget = budget or Budget()
    elems, adj = conflict_graph(g)
    order = element_order(g, adj)
    counter = [0]
    for k in range(max(delta + 1, 1), k_max + 1):
        colors = _search(adj, order, k, budget, counter)
        if colors is None:
            continue
        vc, ec = {}, {}
        for (kind, i), c in zip(elems, colors):
            (vc if kind == "v" else ec)[i] = c + 1
        wit = ColorAssignment(vc, ec)
        chk = verify_total_coloring(g, wit)
        assert chk, chk.detail
        cert = "clique of size delta+1" if k == delta + 1 else f"exhausted search with {k - 1} colors"
        return OracleResult(k, wit, counter[0], cert)
    return OracleResult(None, None, counter[0], f"exhausted search up to {k_max} colors")


def max_total_independent_set(g: Graph) -> int:
    """Largest set of pairwise non-conflicting elements (exhaustive; tiny graphs only)."""
    _, adj = conflict_graph(g)
    n = len(adj)
    for size in range(n, 0, -1):
        for combo in itertools.combinations(range(n), size):
            s = set(combo)
            if all(not (adj[t] & s) for t in combo):
                return size
    return 0


def independence_lower_bound(g: Graph) -> int:
    """ceil((n + m) / a) where a is the largest total independent set."""
    a = max_total_independent_set(g)
    return -(-(g.n + g.m) // a) if a else 0


def vizing_edge_coloring(g: Graph) -> ColorAssignment:
    """Misra-Gries fan recoloring; colors 1..delta+1."""
    palette = range(1, g.delta + 2)
    col: dict[frozenset, int] = {}
    nbrs = {x: set() for x in range(1, g.n + 1)}
    for u, w in g.edges:
        nbrs[u].add(w)
        nbrs[w].add(u)

    def free(x: int) -> list[int]:
        used = {col[frozenset((x, y))] for y in nbrs[x] if frozenset((x, y)) in col}
        return [c for c in palette if c not in used]

    def color_at(x: int, y: int) -> int | None:
        return col.get(frozenset((x, y)))

    for u, w in g.edges:
        common = [c for c in free(u) if c in free(w)]
        if common:
            col[frozenset((u, w))] = common[0]
            continue
        fan = [w]
        while True:
            last_free = set(free(fan[-1]))
            nxt = None
            for y in sorted(nbrs[u]):
                if y in fan:
                    continue
                c = color_at(u, y)
                if c is not None and c in last_free:
                    nxt = y
                    break
            if nxt is None:
                break
            fan.append(nxt)
        c = free(u)[0]
        d = free(fan[-1])[0]
        # invert the c/d path starting at u (it starts with a d edge, since c is free at u)
        path = []
        x, want = u, d
        prev = None
        while True:
            step = None
            for y in sorted(nbrs[x]):
                if y != prev and color_at(x, y) == want:
                    step = y
                    break
            if step is None:
                break
            path.append(frozenset((x, step)))
            prev, x = x, step
            want = c if want == d else d
        for edge in path:
            col[edge] = c if col[edge] == d else d
        # shortest fan prefix ending in a vertex where d is free
        for end in range(len(fan)):
            prefix_ok = all(color_at(u, fan[t + 1]) in free(fan[t]) for t in range(end))
            if prefix_ok and d in free(fan[end]):
                break
        else:
            raise AssertionError("fan rotation failed")
        for t in range(end):
            col[frozenset((u, fan[t]))] = col[frozenset((u, fan[t + 1]))]
        col.pop(frozenset((u, fan[end])), None)
        col[frozenset((u, fan[end]))] = d
    edge_colors = {k: col[frozenset(ed)] for k, ed in enumerate(g.edges, 1)}
    chk = verify_edge_coloring(g, edge_colors, set(palette))
    assert chk, chk.detail
    return ColorAssignment({}, edge_colors)
