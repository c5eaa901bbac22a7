"""Builders and evaluators for the graph polynomials.

Every polynomial is kept as a product of linear or univariate factors, and
the one non-product ingredient, the vertex coefficient C(e) (coefficient of
a fixed vertex monomial in the reduced vertex polynomial P), is evaluated
pointwise.

C(e) at a given edge point is a linear functional of the value table of
P(v, e) over Z_p^n: coef = sum_a P(a, e) * prod_i W[l_i, a_i] with W the
Lagrange coefficient matrix. Since P factors along the graph (per-vertex
vectors and one (v_i - v_j) matrix per edge), the sum is contracted by
variable elimination rather than by materializing the p^n table.
``VertexCoefficient.eval_slow`` does the literal nested interpolation and is
kept as the independent route for cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .budget import Budget, BudgetExceeded
from .ff import Prime
from .graph import ColorSet, Graph, NeighborIndex, build_neighbor_index, default_colors
from .mpoly import (
    CoefficientView,
    FactoredPoly,
    SparsePoly,
    VarId,
    ZeroTest,
    e,
    find_nonzero,
    gradedlex_descending,
    gradedlex_key,
    lagrange_matrix,
    lex_ascending,
    v,
    values_to_coeffs,
)

STRATEGIES = ("gradedlex", "lexmin")


class EmptyReduction(RuntimeError):
    """The reduced vertex polynomial at e = 0 has no monomial left."""


class NoValidM1(RuntimeError):
    pass


@dataclass(frozen=True)
class Setting:
    graph: Graph
    index: NeighborIndex
    p: Prime

    @property
    def delta(self) -> int:
        return self.graph.delta

    def colors(self, alpha: int | None = None) -> ColorSet:
        return default_colors(self.graph, self.p) if alpha is None else ColorSet(self.delta, alpha, self.p)

    def edge_vars(self) -> list[VarId]:
        return [e(k) for k in range(1, self.graph.m + 1)]

    def vertex_vars(self) -> list[VarId]:
        return [v(i) for i in range(1, self.graph.n + 1)]


def make_setting(g: Graph, p: int) -> Setting:
    if p < g.delta + 3:
        raise ValueError(f"p={p} leaves no room for a floating color beyond 1..{g.delta + 1}")
    return Setting(g, build_neighbor_index(g), p if isinstance(p, Prime) else Prime(p))


# ---------------------------------------------------------------------------
# factor lists


def vertex_palette_factors(s: Setting, i: int) -> list[SparsePoly]:
    """(v_i - l) for l = delta+2 .. p; l = p contributes v_i - 0."""
    p = s.p
    return [SparsePoly.linear(p, v(i), l % p) for l in range(s.delta + 2, p + 1)]


def vertex_factors(s: Setting, i: int) -> list[SparsePoly]:
    p = s.p
    out = [SparsePoly.difference(p, v(i), v(j)) for j in s.index.nvi[i]]
    out += [SparsePoly.difference(p, v(i), e(k)) for k in s.index.ne_v[i]]
    out += vertex_palette_factors(s, i)
    return out


def edge_adjacency_factors(s: Setting, k: int) -> list[SparsePoly]:
    return [SparsePoly.difference(s.p, e(k), e(j)) for j in s.index.nei[k]]


def edge_palette_factors(s: Setting, k: int, colors: ColorSet) -> list[SparsePoly]:
    return [SparsePoly.linear(s.p, e(k), l) for l in colors.complement()]


def edge_factors(s: Setting, k: int, colors: ColorSet) -> list[SparsePoly]:
    return edge_adjacency_factors(s, k) + edge_palette_factors(s, k, colors)


# ---------------------------------------------------------------------------
# handles


class CPProduct:
    """C(e) times a factored product of edge-variable factors."""

    def __init__(self, cp: "VertexCoefficient | None", factors: FactoredPoly):
        self.cp = cp
        self.factors = factors
        self.p = factors.p

    def variables(self) -> frozenset:
        out = self.factors.variables()
        if self.cp is not None:
            out |= self.cp.variables()
        return out

    def eval(self, point: Mapping[VarId, int]) -> int:
        val = self.factors.eval(point)
        if val and self.cp is not None:
            val = val * self.cp.eval(point) % self.p
        return val

    def eval_slow(self, point: Mapping[VarId, int]) -> int:
        """Same value, with C(e) through literal nested interpolation."""
        val = self.factors.eval(point)
        if val and self.cp is not None:
            val = val * self.cp.eval_slow(point) % self.p
        return val

    def value_table(self, axes: Sequence[VarId], fixed: Mapping[VarId, int] | None = None,
                    budget: Budget | None = None) -> np.ndarray:
        """Values over Z_p^len(axes); C(e) is only computed where the factors are nonzero."""
        table = self.factors.eval_grid(axes, fixed)
        if self.cp is None:
            return table
        base = dict(fixed or {})
        for idx in zip(*np.nonzero(table)):
            point = dict(base)
            point.update(zip(axes, (int(a) for a in idx)))
            if budget is not None:
                self.cp.charge(point, budget, "value table")
            table[idx] = table[idx] * self.cp.eval(point) % self.p
        return table

    def eval_cost(self) -> int:
        return len(self.factors) + (self.cp.cost if self.cp is not None else 0)


@dataclass
class PolyHandle:
    kind: str  # T, P, E_i, E_m, Q_i, Z_i, G, H, Kpoly
    body: object
    setting: Setting
    i: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.setting.p

    def eval(self, point: Mapping[VarId, int]) -> int:
        return self.body.eval(point)

    def eval_slow(self, point: Mapping[VarId, int]) -> int:
        return getattr(self.body, "eval_slow", self.body.eval)(point)

    def variables(self) -> frozenset:
        return self.body.variables()

    def substitute(self, partial: Mapping[VarId, int]):
        return self.body.substitute(partial)

    @property
    def factors(self) -> FactoredPoly:
        return self.body.factors if isinstance(self.body, CPProduct) else self.body


def build_P(s: Setting) -> PolyHandle:
    fs = []
    for i in range(1, s.graph.n + 1):
        fs += vertex_factors(s, i)
    return PolyHandle("P", FactoredPoly(s.p, fs), s)


def build_E_i(i: int, s: Setting, colors: ColorSet | None = None) -> PolyHandle:
    if not 1 <= i <= s.graph.m:
        raise ValueError(f"edge index {i} outside 1..{s.graph.m}")
    colors = s.colors() if colors is None else colors
    return PolyHandle("E_i", FactoredPoly(s.p, edge_factors(s, i, colors)), s, i)


def build_E_m(s: Setting, colors: ColorSet | None = None) -> PolyHandle:
    colors = s.colors() if colors is None else colors
    fs = []
    for k in range(1, s.graph.m + 1):
        fs += edge_factors(s, k, colors)
    return PolyHandle("E_m", FactoredPoly(s.p, fs), s)


def build_T(s: Setting, colors: ColorSet | None = None) -> PolyHandle:
    body = build_P(s).body * build_E_m(s, colors).body
    return PolyHandle("T", body, s)


# ---------------------------------------------------------------------------
# the vertex coefficient C(e)


@dataclass(frozen=True)
class VertexMonomialChoice:
    exponents: tuple[int, ...]
    coefficient_at_zero: int
    strategy: str = "gradedlex"
    method: str = "dense"

    def as_json(self) -> dict:
        return {"exponents": list(self.exponents), "coefficient_at_zero": self.coefficient_at_zero,
                "strategy": self.strategy, "method": self.method}


def _elimination_order(n: int, pairs: Sequence[tuple[int, int]]) -> list[int]:
    """Greedy min-degree order over vertices 0..n-1 of the interaction graph."""
    adj = {i: set() for i in range(n)}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    order = []
    while adj:
        x = min(adj, key=lambda t: (len(adj[t]), t))
        nbrs = adj.pop(x)
        for y in nbrs:
            adj[y].discard(x)
            adj[y] |= nbrs - {y}
        order.append(x)
    return order


def _align(arr: np.ndarray, have: tuple, want: tuple) -> np.ndarray:
    perm = sorted(range(len(have)), key=lambda t: want.index(have[t]))
    arr = np.transpose(arr, perm)
    shape = [1] * len(want)
    for ax, var in enumerate(sorted(have, key=want.index)):
        shape[want.index(var)] = arr.shape[ax]
    return arr.reshape(shape)


def contract(factors: list[tuple[tuple, np.ndarray]], order: Sequence, p: int) -> tuple[int, int]:
    """Sum over all variables of a product of small tensors, mod p.

    Returns (value, work) where work counts entries touched.
    """
    factors = list(factors)
    work = 0
    for x in order:
        mine = [f for f in factors if x in f[0]]
        if not mine:
            continue
        factors = [f for f in factors if x not in f[0]]
        union = tuple(sorted({y for vs, _ in mine for y in vs}))
        acc = None
        for vs, arr in mine:
            a = _align(arr, vs, union)
            acc = a if acc is None else (acc * a) % p
        acc = np.broadcast_to(acc, tuple(p for _ in union))
        work += acc.size * len(mine)
        ax = union.index(x)
        summed = acc.sum(axis=ax) % p
        rest = union[:ax] + union[ax + 1:]
        factors.append((rest, summed))
    total = 1
    for vs, arr in factors:
        total = total * int(arr) % p
    return total, work


class VertexCoefficient:
    """C(e): coefficient of prod v_i^{l_i} in reduced P(v, e), as a function of e."""

    def __init__(self, s: Setting, exponents: Sequence[int]):
        g = s.graph
        p = int(s.p)
        if len(exponents) != g.n:
            raise ValueError("one exponent per vertex")
        self.setting = s
        self.p = p
        self.exponents = tuple(int(k) for k in exponents)
        w = lagrange_matrix(p)
        a = np.arange(p, dtype=np.int64)
        pal = np.ones(p, dtype=np.int64)
        for l in range(s.delta + 2, p + 1):
            pal = pal * ((a - l) % p) % p
        self._base = [(pal * w[self.exponents[i - 1]]) % p for i in range(1, g.n + 1)]
        self._diff = (a[:, None] - a[None, :]) % p
        self._pairs = [(i - 1, j - 1) for i in range(1, g.n + 1) for j in s.index.nvi[i]]
        self._order = _elimination_order(g.n, self._pairs)
        self._cache: dict[tuple, int] = {}
        self.cost = self._estimate_cost()

    def _estimate_cost(self) -> int:
        # replay the elimination on variable sets only
        scopes = [frozenset([i]) for i in range(self.setting.graph.n)] + [frozenset(pr) for pr in self._pairs]
        work = 0
        for x in self._order:
            mine = [sc for sc in scopes if x in sc]
            scopes = [sc for sc in scopes if x not in sc]
            union = frozenset().union(*mine)
            work += self.p ** len(union) * len(mine)
            scopes.append(union - {x})
        return max(work, 1)

    def variables(self) -> frozenset:
        return frozenset(self.setting.edge_vars())

    def edge_values(self, point: Mapping[VarId, int]) -> tuple[int, ...]:
        return tuple(point[e(k)] % self.p for k in range(1, self.setting.graph.m + 1))

    def charge(self, point: Mapping[VarId, int], budget: Budget, what: str) -> None:
        """Charge one evaluation at ``point``, once per budget."""
        budget.charge_once((self.exponents, self.edge_values(point)), self.cost, what)

    def eval(self, point: Mapping[VarId, int]) -> int:
        key = self.edge_values(point)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._compute(key)
            self._cache[key] = hit
        return hit

    def _compute(self, beta: tuple[int, ...]) -> int:
        s, p = self.setting, self.p
        a = np.arange(p, dtype=np.int64)
        factors = []
        for i in range(1, s.graph.n + 1):
            vec = self._base[i - 1]
            for k in s.index.ne_v[i]:
                vec = vec * ((a - beta[k - 1]) % p) % p
            factors.append(((i - 1,), vec))
        for pr in self._pairs:
            factors.append((pr, self._diff))
        val, _ = contract(factors, self._order, p)
        return val

    def eval_slow(self, point: Mapping[VarId, int]) -> int:
        s = self.setting
        edge_point = {e(k): point[e(k)] for k in range(1, s.graph.m + 1)}
        reduced = build_P(s).body.substitute(edge_point)
        view = CoefficientView(reduced, s.vertex_vars(), self.exponents)
        return view.eval({})


@lru_cache(maxsize=256)
def vertex_coefficient(s: Setting, exponents: tuple[int, ...]) -> VertexCoefficient:
    return VertexCoefficient(s, exponents)


def zero_edge_point(s: Setting) -> dict:
    return {x: 0 for x in s.edge_vars()}


def expand_vertex_polynomial_at_zero(s: Setting) -> SparsePoly:
    """Naive oracle: expand P(v, 0) factor by factor, reducing as we go."""
    return build_P(s).body.substitute(zero_edge_point(s)).expand_reduced()


def _pick(monos: list[tuple[int, ...]], strategy: str) -> tuple[int, ...]:
    if strategy == "gradedlex":
        return max(monos, key=lambda t: (sum(t), t))
    if strategy == "lexmin":
        return min(monos)
    raise ValueError(f"unknown strategy {strategy!r}")


def choose_vertex_monomial(s: Setting, strategy: str = "gradedlex",
                           budget: Budget | None = None) -> VertexMonomialChoice:
    """Pick a vertex monomial with nonzero coefficient in reduced P(v, 0).

    When the full p^n coefficient table fits in the budget, it is computed
    by interpolating the value table of P(v, 0) and the strategy picks among
    all nonzero monomials. Otherwise monomials are probed one by one in the
    strategy's order, which selects the same monomial.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    g = s.graph
    if g.m < 1:
        raise ValueError("graph must have at least one edge")
    budget = budget or Budget()
    p, n = int(s.p), g.n
    dense_cost = p ** n * (n * p + len(build_P(s).body))
    if dense_cost <= budget.remaining:
        budget.charge(dense_cost, "vertex monomial table")
        p0 = build_P(s).body.substitute(zero_edge_point(s))
        coeffs = values_to_coeffs(p0.eval_grid(s.vertex_vars()), p)
        nz = [tuple(int(t) for t in idx) for idx in np.argwhere(coeffs)]
        if not nz:
            raise EmptyReduction(f"reduced P(v, 0) vanishes for {g.label()} at p={p}")
        best = _pick(nz, strategy)
        return VertexMonomialChoice(best, int(coeffs[best]), strategy, "dense")
    probe_order = gradedlex_descending(n, p - 1) if strategy == "gradedlex" else lex_ascending(n, p - 1)
    zero = zero_edge_point(s)
    for exps in probe_order:
        cp = VertexCoefficient(s, exps)
        budget.charge(cp.cost, "vertex monomial probe")
        c = cp.eval(zero)
        if c:
            return VertexMonomialChoice(tuple(exps), c, strategy, "probe")
    raise EmptyReduction(f"reduced P(v, 0) vanishes for {g.label()} at p={p}")


def eval_CP(choice: VertexMonomialChoice, e_point: Mapping[VarId, int], s: Setting) -> int:
    return vertex_coefficient(s, choice.exponents).eval(e_point)


def reconstruct_CP(choice: VertexMonomialChoice, s: Setting, budget: Budget | None = None) -> np.ndarray:
    """Coefficient tensor of C(e) over all edge variables from the full p^m grid."""
    cp = vertex_coefficient(s, choice.exponents)
    handle = CPProduct(cp, FactoredPoly(s.p, []))
    if budget is not None:
        budget.require(int(s.p) ** s.graph.m * cp.cost, "C(e) reconstruction")
    table = handle.value_table(s.edge_vars(), budget=budget)
    return values_to_coeffs(table, int(s.p))


def tensor_degrees(coeffs: np.ndarray) -> list[int]:
    """Per-axis degree of a dense coefficient tensor (-1 for the zero tensor)."""
    nz = np.argwhere(coeffs)
    if not len(nz):
        return [-1] * coeffs.ndim
    return [int(d) for d in nz.max(axis=0)]


# ---------------------------------------------------------------------------
# Q, Z


def build_Q(i: int, choice: VertexMonomialChoice, s: Setting, colors: ColorSet | None = None) -> PolyHandle:
    """Q_i = C(e) * E^1 * ... * E^i; Q_0 is C(e) alone."""
    if not 0 <= i <= s.graph.m:
        raise ValueError(f"Q index {i} outside 0..{s.graph.m}")
    colors = s.colors() if colors is None else colors
    fs = []
    for k in range(1, i + 1):
        fs += edge_factors(s, k, colors)
    body = CPProduct(vertex_coefficient(s, choice.exponents), FactoredPoly(s.p, fs))
    return PolyHandle("Q_i", body, s, i, {"alpha": colors.alpha})


def z_anchor(s: Setting, i: int) -> int:
    """Endpoint v_s of e_i with |N(v_s)| >= |N(v_t)|; ties go to the smaller index."""
    a, b = s.graph.edges[i - 1]
    da, db = len(s.index.nv[a]), len(s.index.nv[b])
    if da != db:
        return a if da > db else b
    return min(a, b)


def build_Z(i: int, choice: VertexMonomialChoice, s: Setting) -> PolyHandle:
    p = s.p
    anchor = z_anchor(s, i)
    S = list(s.index.ne_v[anchor])
    fs = [SparsePoly.difference(p, e(a), e(b)) for a, b in itertools.combinations(S, 2)]
    for k in S:
        fs += [SparsePoly.linear(p, e(k), l % p) for l in range(s.delta + 3, p + 1)]
    body = CPProduct(vertex_coefficient(s, choice.exponents), FactoredPoly(p, fs))
    return PolyHandle("Z_i", body, s, i, {"anchor": anchor, "S": S})


def z_degree_bound(handle: PolyHandle, cp_degree: int = 2) -> dict[int, int]:
    """Per-edge-variable degree bound of Z_i from its factor structure."""
    s = handle.setting
    out = {}
    for k in range(1, s.graph.m + 1):
        out[k] = cp_degree + handle.factors.degree_bound(e(k))
    return out


def check_Z_nonzero(i: int, choice: VertexMonomialChoice, s: Setting,
                    budget: Budget | None = None) -> ZeroTest:
    """Search for a point with Z_i != 0. Edges in S_i only range over 1..delta+2."""
    handle = build_Z(i, choice, s)
    S = set(handle.meta["S"])
    allowed = list(range(1, s.delta + 3))
    domains = {e(k): (allowed if k in S else range(int(s.p))) for k in range(1, s.graph.m + 1)}
    budget = budget or Budget()
    try:
        pt = find_nonzero(handle, domains, budget, cost=handle.body.eval_cost())
    except BudgetExceeded as exc:
        return ZeroTest("inconclusive", reason=str(exc))
    if pt is None:
        return ZeroTest("zero", reason="every point of the search box vanishes")
    return ZeroTest("nonzero", {str(x): val for x, val in pt.items()})


# ---------------------------------------------------------------------------
# G, H, J, K


def build_G(i: int, alpha_old: int, M1: Sequence[int], choice: VertexMonomialChoice, s: Setting,
            drop_palette_of: int | None = None) -> PolyHandle:
    """G = Q_{i-1} * prod_{l in M1} (e_l - alpha_old).

    ``drop_palette_of`` omits that edge's palette product, which is how the
    coefficient polynomials behind J(e_j) are obtained.
    """
    colors = s.colors(alpha_old)
    fs = []
    for k in range(1, i):
        fs += edge_adjacency_factors(s, k)
        if k != drop_palette_of:
            fs += edge_palette_factors(s, k, colors)
    fs += [SparsePoly.linear(s.p, e(l), alpha_old) for l in M1]
    body = CPProduct(vertex_coefficient(s, choice.exponents), FactoredPoly(s.p, fs))
    return PolyHandle("G", body, s, i, {"alpha": alpha_old, "M1": list(M1), "dropped": drop_palette_of})


def build_H(j: int, G: PolyHandle) -> PolyHandle:
    alpha = G.meta["alpha"]
    body = CPProduct(G.body.cp, G.body.factors * SparsePoly.linear(G.p, e(j), alpha))
    return PolyHandle("H", body, G.setting, G.i, dict(G.meta, j=j))


@dataclass
class JPoly:
    """Univariate coefficient polynomial in one edge variable."""

    var: int
    poly: SparsePoly
    reference: dict  # exponents of the other edge variables
    core_degree: int  # degree of the coefficient part before the palette product
    exact: bool

    def as_json(self) -> dict:
        return {"var": f"e{self.var}", "reference": self.reference,
                "degree": self.poly.total_degree(), "core_degree": self.core_degree, "exact": self.exact}


def coefficient_tensor(handle: PolyHandle, budget: Budget | None = None) -> np.ndarray:
    """Reduced coefficient tensor of a handle over all edge variables (full p^m grid)."""
    s = handle.setting
    p = int(s.p)
    if budget is not None:
        budget.require(p ** s.graph.m * (len(handle.factors) + 1), "coefficient tensor")
    table = handle.body.value_table(s.edge_vars(), budget=budget)
    return values_to_coeffs(table, p)


def build_J(target: int, G: PolyHandle, with_palette: bool, budget: Budget | None = None) -> JPoly:
    """J(e_target): univariate coefficient of the graded-lex greatest other-variable monomial.

    For an edge in M2 the coefficient is taken in G with e_target's palette
    removed and the palette product is then multiplied back unreduced, so
    J has degree up to p + delta - 2. For e_i (``with_palette=False``) the
    coefficient is taken in G directly.
    """
    s = G.setting
    p = int(s.p)
    m = s.graph.m
    alpha = G.meta["alpha"]
    source = build_G(G.i, alpha, G.meta["M1"], _choice_of(G), s, drop_palette_of=target) if with_palette else G
    deg_bound = 2 + source.factors.degree_bound(e(target))
    coeffs = coefficient_tensor(source, budget)
    ax = target - 1
    moved = np.moveaxis(coeffs, ax, -1)
    others = [k for k in range(1, m + 1) if k != target]
    nz = {tuple(int(t) for t in idx) for idx in np.argwhere(moved.any(axis=-1))} if m > 1 else \
        ({()} if moved.any() else set())
    if not nz:
        raise NoValidM1(f"coefficient polynomial in e{target} vanishes identically")
    ref = max(nz, key=lambda t: (sum(t), t))
    core = [int(c) for c in moved[ref]]
    core_poly = SparsePoly.from_dense(p, core, e(target))
    poly = core_poly
    if with_palette:
        for l in s.colors(alpha).complement():
            poly = poly * SparsePoly.linear(p, e(target), l)
    return JPoly(target, poly, {f"e{k}": t for k, t in zip(others, ref)},
                 core_poly.total_degree(), deg_bound <= p - 1)


def _choice_of(G: PolyHandle) -> VertexMonomialChoice:
    cp = G.body.cp
    return VertexMonomialChoice(cp.exponents, 0)


def divide_out(G: PolyHandle, M2: Sequence[int], beta: int) -> PolyHandle:
    """G / prod_{j in M2} (e_j - beta), performed on the factored form.

    Each edge in M2 carries (e_j - beta) inside its palette product, and
    that factor is removed.
    """
    p = G.p
    fs = list(G.factors.factors)
    for j in M2:
        target = SparsePoly.linear(p, e(j), beta)
        for pos, f in enumerate(fs):
            if f == target:
                del fs[pos]
                break
        else:
            raise ValueError(f"(e{j} - {beta}) is not a factor of G")
    body = CPProduct(G.body.cp, FactoredPoly(p, fs))
    return PolyHandle("G", body, G.setting, G.i, dict(G.meta, divided=list(M2), beta=beta))


def build_Kpoly(i: int, alpha_old: int, beta: int, M1: Sequence[int], M2: Sequence[int],
                choice: VertexMonomialChoice, s: Setting) -> PolyHandle:
    """(G / prod_{M2}(e_j - beta)) * prod_{M2}(e_j - alpha_old) * prod_{l not in {1..delta+1, beta}} (e_i - l)."""
    p = s.p
    quotient = divide_out(build_G(i, alpha_old, M1, choice, s), M2, beta)
    fs = list(quotient.factors.factors)
    fs += [SparsePoly.linear(p, e(j), alpha_old) for j in M2]
    fs += edge_palette_factors(s, i, s.colors(beta))
    body = CPProduct(quotient.body.cp, FactoredPoly(p, fs))
    return PolyHandle("Kpoly", body, s, i, {"alpha_old": alpha_old, "beta": beta, "M1": list(M1), "M2": list(M2)})
