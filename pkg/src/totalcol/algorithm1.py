"""The edge-by-edge coloring procedure with a floating palette color.

Edges are processed in order. At step i we look for a point of K^m
(K = {1..delta+1, alpha}) where Q_i is nonzero. When none exists the
floating color is re-selected: a subset M1 of the earlier edges is fixed,
univariate coefficient polynomials J are read off G, a new color beta is
chosen so that (e_j - beta) is a simple root of every J(e_j) and not a root
of J(e_i), and the search is repeated with alpha = beta.

Every statement the procedure relies on is checked on the fly, and the
outcome of each check is recorded in the run report instead of assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .budget import Budget, BudgetExceeded
from .constructions import (
    EmptyReduction,
    NoValidM1,
    PolyHandle,
    Setting,
    VertexMonomialChoice,
    build_G,
    build_J,
    build_Kpoly,
    build_P,
    build_Q,
    choose_vertex_monomial,
    coefficient_tensor,
    divide_out,
    make_setting,
)
from .ff import select_prime
from .graph import ColorAssignment, ColorSet, Graph, verify_edge_coloring, verify_total_coloring
from .mpoly import SparsePoly, dense_multiplicities, e, find_nonzero, fermat_reduce, v


class EmptyCandidateSet(RuntimeError):
    pass


class NoVertexAssignment(RuntimeError):
    pass


@dataclass
class Search:
    status: str  # witness | none | inconclusive
    point: tuple[int, ...] | None = None
    evaluated: int = 0
    reason: str = ""


@dataclass
class ClaimCheck:
    claim: str
    i: int
    status: str  # holds | falsified | inconclusive
    detail: str = ""
    evidence: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {"claim": self.claim, "i": self.i, "status": self.status,
                "detail": self.detail, "evidence": self.evidence}


@dataclass
class Outcome:
    kind: str  # colored | falsified | inconclusive
    claim: str | None = None
    step: int | None = None
    detail: str = ""
    witness: dict | None = None

    def as_json(self) -> dict:
        return {"kind": self.kind, "claim": self.claim, "step": self.step,
                "detail": self.detail, "witness": self.witness}


@dataclass
class AlgState:
    setting: Setting
    choice: VertexMonomialChoice
    i: int = 1
    alpha: int = 0
    prefix: tuple[int, ...] = ()
    witness: tuple[int, ...] | None = None
    M1: tuple[int, ...] = ()
    M2: tuple[int, ...] = ()
    candidates: dict = field(default_factory=dict)
    history: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    outcome: Outcome | None = None

    def __post_init__(self):
        if not self.alpha:
            self.alpha = self.setting.delta + 2

    @property
    def colors(self) -> ColorSet:
        return self.setting.colors(self.alpha)

    @property
    def done(self) -> bool:
        return self.outcome is not None or self.i > self.setting.graph.m


@dataclass
class RunReport:
    graph: Graph
    p: int
    scaled: bool
    choice: VertexMonomialChoice | None
    outcome: Outcome
    edge_colors: dict[int, int] = field(default_factory=dict)
    assignment: ColorAssignment | None = None
    alpha_trace: list = field(default_factory=list)
    history: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    budget_spent: int = 0

    def as_json(self) -> dict:
        return {
            "graph": self.graph.label(),
            "p": int(self.p),
            "scaled": self.scaled,
            "monomial": self.choice.as_json() if self.choice else None,
            "outcome": self.outcome.as_json(),
            "edge_colors": {str(k): c for k, c in sorted(self.edge_colors.items())},
            "coloring": self.assignment.as_json() if self.assignment else None,
            "alpha_trace": self.alpha_trace,
            "history": self.history,
            "checks": [c.as_json() for c in self.checks],
            "budget_spent": self.budget_spent,
        }


# ---------------------------------------------------------------------------
# point searches


def _points(prefix: Sequence[int], colors: Sequence[int], m: int) -> Iterator[tuple[int, ...]]:
    """Known prefix extended lex first, then all of colors^m in lex order."""
    prefix = tuple(prefix)
    if all(c in colors for c in prefix):
        for rest in itertools.product(colors, repeat=m - len(prefix)):
            yield prefix + rest
    for pt in itertools.product(colors, repeat=m):
        if pt[:len(prefix)] != prefix:
            yield pt


def search_lattice(handle: PolyHandle, colors: Sequence[int], prefix: Sequence[int], budget: Budget) -> Search:
    """First point of colors^m (prefix first) where the handle is nonzero."""
    s = handle.setting
    m = s.graph.m
    body = handle.body
    count = 0
    try:
        for pt in _points(prefix, colors, m):
            point = {e(k): pt[k - 1] for k in range(1, m + 1)}
            budget.charge(len(body.factors), "lattice search")
            count += 1
            if not body.factors.eval(point):
                continue
            body.cp.charge(point, budget, "lattice search")
            if body.cp.eval(point):
                return Search("witness", pt, count)
    except BudgetExceeded as exc:
        return Search("inconclusive", None, count, str(exc))
    return Search("none", None, count)


def hypothesis_check(state: AlgState, i: int | None = None, budget: Budget | None = None) -> Search:
    """Is there a point of K^m with Q_i != 0? ``none`` is the Hypothesis-1 state."""
    i = state.i if i is None else i
    budget = budget or Budget()
    q = build_Q(i, state.choice, state.setting, state.colors)
    return search_lattice(q, state.colors.colors, state.prefix[:i - 1], budget)


def prefix_search(handle: PolyHandle, colors: ColorSet, i: int, budget: Budget) -> dict | None:
    """Point with e_1..e_i in K and e_{i+1}..e_m free in Z_p where the handle is nonzero."""
    s = handle.setting
    domains = {e(k): (colors.colors if k <= i else range(int(s.p))) for k in range(1, s.graph.m + 1)}
    cost = len(handle.factors) + handle.body.cp.cost
    return find_nonzero(handle, domains, budget, cost)


# ---------------------------------------------------------------------------
# beta selection


def select_beta(B: Sequence[int], J_m2: Mapping[int, SparsePoly], J_i: SparsePoly) -> tuple[int, dict]:
    """Smallest beta in B that is a simple root of every J(e_j) and not a root of J(e_i).

    Returns (beta, detail) where detail lists the excluded sets. Raises
    EmptyCandidateSet when nothing survives.
    """
    B = sorted(set(B))
    detail = {"B": B, "B_j": {}, "B_i": []}
    bad = set()
    for j, J in sorted(J_m2.items()):
        mult = dense_multiplicities(J.to_dense(), J.p, B)
        Bj = sorted(g for g in B if mult[g] >= 2)
        # a candidate must also divide J(e_j) at all
        missing = sorted(g for g in B if mult[g] == 0)
        detail["B_j"][f"e{j}"] = Bj
        if missing:
            detail.setdefault("not_roots", {})[f"e{j}"] = missing
        bad |= set(Bj) | set(missing)
    mult_i = dense_multiplicities(J_i.to_dense(), J_i.p, B)
    Bi = sorted(g for g in B if mult_i[g] >= 1)
    detail["B_i"] = Bi
    bad |= set(Bi)
    left = [g for g in B if g not in bad]
    detail["remaining"] = left
    if not left:
        raise EmptyCandidateSet(f"every candidate in B={B} is excluded")
    beta = left[0]
    for j, J in J_m2.items():
        got = dense_multiplicities(J.to_dense(), J.p, [beta])[beta]
        assert got == 1, f"beta={beta} has multiplicity {got} in J(e{j})"
    assert dense_multiplicities(J_i.to_dense(), J_i.p, [beta])[beta] == 0
    return beta, detail


def candidate_set(s: Setting, alpha: int) -> list[int]:
    return [g for g in range(s.delta + 2, int(s.p)) if g != alpha]


# ---------------------------------------------------------------------------
# tensor helpers for the in-branch checks


def axis_multiplicity(coeffs: np.ndarray, axis: int, beta: int, p: int) -> int:
    """Multiplicity of (x - beta) in a dense tensor viewed as univariate along ``axis``."""
    rows = np.moveaxis(coeffs, axis, -1).reshape(-1, coeffs.shape[axis])
    best = None
    for row in rows:
        if not row.any():
            continue
        k = dense_multiplicities([int(c) for c in row], p, [beta])[beta]
        best = k if best is None else min(best, k)
        if best == 0:
            break
    return -1 if best is None else best


def divide_axis(coeffs: np.ndarray, axis: int, beta: int, p: int) -> tuple[np.ndarray, bool]:
    """Divide a dense tensor by (x - beta) along ``axis``; returns (quotient, exact)."""
    c = np.moveaxis(coeffs, axis, 0).astype(np.int64)
    n = c.shape[0]
    q = np.zeros_like(c)
    carry = np.zeros_like(c[0])
    for k in range(n - 1, 0, -1):
        carry = (c[k] + carry * beta) % p
        q[k - 1] = carry
    rem = (c[0] + carry * beta) % p
    return np.moveaxis(q, 0, axis), not rem.any()


def eval_dense(coeffs: np.ndarray, point: Sequence[int], p: int) -> int:
    acc = coeffs.astype(np.int64)
    for a in point:
        powers = np.array([pow(int(a), k, p) for k in range(acc.shape[0])], dtype=np.int64)
        acc = np.tensordot(powers, acc, axes=(0, 0)) % p
    return int(acc)


def product_except(p: int, skip: int) -> list[int]:
    """Dense coefficients of prod_{l in Z_p, l != skip} (x - l)."""
    poly = SparsePoly.const(p, 1)
    for l in range(p):
        if l != skip:
            poly = poly * SparsePoly.linear(p, e(1), l)
    return poly.to_dense(e(1))


# ---------------------------------------------------------------------------
# the else-branch


def find_M1(support: np.ndarray, i: int, alpha: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Subset search: decreasing |M1|, lexicographic within a size.

    ``support`` lists the points (rows) where Q_{i-1} is nonzero. G is
    nonzero iff some support point avoids alpha on all of M1, and H_{e_j}
    vanishes iff every such point has e_j = alpha.
    """
    earlier = list(range(1, i))
    for size in range(len(earlier), -1, -1):
        for M1 in itertools.combinations(earlier, size):
            mask = np.ones(len(support), dtype=bool)
            for l in M1:
                mask &= support[:, l - 1] != alpha
            if not mask.any():
                continue
            kept = support[mask]
            M2 = tuple(j for j in earlier if j not in M1)
            if all((kept[:, j - 1] == alpha).all() for j in M2):
                return M1, M2
    raise NoValidM1(f"no subset of e1..e{i - 1} makes G nonzero with every H vanishing")


def _check(state: AlgState, claim: str, status: str, detail: str = "", **evidence) -> ClaimCheck:
    c = ClaimCheck(claim, state.i, status, detail, evidence)
    state.checks.append(c)
    return c


def polynomial_reading(state: AlgState, budget: Budget, cap: int = 200_000) -> str:
    """Is Q_i nonzero anywhere on Z_p^m (its reduced form nonzero)? Skipped when large."""
    s = state.setting
    q = build_Q(state.i, state.choice, s, state.colors)
    size = len(state.colors) ** state.i * int(s.p) ** (s.graph.m - state.i)
    if size > cap:
        return "skipped"
    try:
        pt = prefix_search(q, state.colors, state.i, budget)
    except BudgetExceeded:
        return "skipped"
    return "nonzero" if pt is not None else "zero"


def else_branch(state: AlgState, budget: Budget, l3_samples: int = 50, seed: int = 0) -> None:
    s = state.setting
    p = int(s.p)
    i = state.i
    m = s.graph.m
    alpha = state.alpha
    reading = polynomial_reading(state, budget)
    diverge = reading == "nonzero"
    state.history.append({"i": i, "event": "hypothesis-1", "alpha": alpha, "polynomial_reading": reading,
                          "readings_diverge": diverge})

    # support of Q_{i-1}; G's subset domain is e_1..e_{i-1}
    q_prev = build_Q(i - 1, state.choice, s, state.colors)
    budget.require(p ** m * (len(q_prev.factors) + 1), "support of Q_{i-1}")
    table = q_prev.body.value_table(s.edge_vars(), budget=budget)
    support = np.argwhere(table)
    try:
        M1, M2 = find_M1(support, i, alpha)
    except NoValidM1 as exc:
        _check(state, "CL2", "falsified", str(exc), support_size=int(len(support)))
        state.outcome = Outcome("falsified", "CL2", i, str(exc))
        return
    state.M1, state.M2 = M1, M2
    G = build_G(i, alpha, M1, state.choice, s)

    J_m2 = {j: build_J(j, G, with_palette=True, budget=budget) for j in M2}
    J_i = build_J(i, G, with_palette=False, budget=budget)
    B = candidate_set(s, alpha)
    try:
        beta, detail = select_beta(B, {j: J.poly for j, J in J_m2.items()}, J_i.poly)
    except EmptyCandidateSet as exc:
        _check(state, "CL2", "falsified", str(exc), B=B)
        state.outcome = Outcome("falsified", "CL2", i, str(exc), {"B": B})
        return
    state.candidates = detail

    # on G itself: (e_j - beta) simple for j in M2, (e_i - beta) absent
    g_coeffs = coefficient_tensor(G, budget)
    mults = {f"e{j}": axis_multiplicity(g_coeffs, j - 1, beta, p) for j in M2}
    mult_i = axis_multiplicity(g_coeffs, i - 1, beta, p)
    ok = all(k == 1 for k in mults.values()) and mult_i == 0
    _check(state, "CL2", "holds" if ok else "falsified",
           "" if ok else "multiplicity condition fails on G", beta=beta, G_multiplicity=mults,
           G_multiplicity_ei=mult_i, J_exact=all(J.exact for J in list(J_m2.values()) + [J_i]))
    if not ok:
        state.outcome = Outcome("falsified", "CL2", i, "multiplicity condition fails on G", {"beta": beta})
        return

    # shape: each reduced J(e_j) is b * prod_{l != alpha} (x - l)
    if M2:
        target = product_except(p, alpha)
        bad = {}
        for j, J in J_m2.items():
            red = fermat_reduce(J.poly).to_dense(e(j)) + [0] * p
            red = red[:p]
            lead = red[p - 1]
            if not lead or any((lead * t - r) % p for t, r in zip(target, red)):
                bad[f"e{j}"] = red
        _check(state, "L2", "falsified" if bad else "holds",
               "reduced J is not a multiple of prod_{l != alpha}(x - l)" if bad else "", offending=bad)
    else:
        _check(state, "L2", "holds", "vacuous: M2 is empty")

    # quotient identity for G and its reduction
    _check_l3(state, G, g_coeffs, beta, l3_samples, seed)

    # K(e) and Q_i must stay nonzero under the new palette
    kpoly = build_Kpoly(i, alpha, beta, M1, M2, state.choice, s)
    new_colors = s.colors(beta)
    try:
        kpt = prefix_search(kpoly, new_colors, i, budget)
        qpt = prefix_search(build_Q(i, state.choice, s, new_colors), new_colors, i, budget) if kpt else None
    except BudgetExceeded as exc:
        _check(state, "CL3", "inconclusive", str(exc))
        state.outcome = Outcome("inconclusive", "CL3", i, str(exc))
        return
    if kpt is None or qpt is None:
        which = "K(e)" if kpt is None else "Q_i"
        _check(state, "CL3", "falsified", f"{which} vanishes on K^i x Z_p^(m-i) with alpha={beta}", beta=beta)
        state.outcome = Outcome("falsified", "CL3", i, f"{which} has no nonzero point after re-selection",
                                {"beta": beta})
        return
    _check(state, "CL3", "holds", beta=beta, K_point={str(k): x for k, x in kpt.items()},
           Q_point={str(k): x for k, x in qpt.items()})
    state.history.append({"i": i, "event": "alpha-change", "from": alpha, "to": beta,
                          "M1": list(M1), "M2": list(M2)})
    state.alpha = beta
    state.prefix = tuple(qpt[e(k)] for k in range(1, i + 1))


def _check_l3(state: AlgState, G: PolyHandle, g_coeffs: np.ndarray, beta: int, samples: int, seed: int) -> None:
    s = state.setting
    p = int(s.p)
    m = s.graph.m
    M2 = state.M2
    if not M2:
        _check(state, "L3", "holds", "vacuous: M2 is empty")
        return
    quotient_dense = g_coeffs
    for j in M2:
        quotient_dense, exact = divide_axis(quotient_dense, j - 1, beta, p)
        if not exact:
            _check(state, "L3", "falsified", f"(e{j} - {beta}) does not divide reduced G")
            return
    factored = divide_out(G, M2, beta)
    if p ** m <= 4096:
        points = list(itertools.product(range(p), repeat=m))
        mode = "full grid"
    else:
        rng = np.random.default_rng(seed)
        points = []
        for t in range(samples):
            pt = [int(x) for x in rng.integers(0, p, m)]
            if t % 2 == 0:
                for j in M2:
                    pt[j - 1] = beta
            points.append(tuple(pt))
        mode = f"{samples} sampled points"
    for pt in points:
        point = {e(k): pt[k - 1] for k in range(1, m + 1)}
        a = eval_dense(quotient_dense, pt, p)
        b = factored.eval(point)
        if a != b:
            _check(state, "L3", "falsified", "quotients of G and reduced G disagree",
                   point=list(pt), reduced_value=a, factored_value=b)
            return
    _check(state, "L3", "holds", mode)


# ---------------------------------------------------------------------------
# driver


def step(state: AlgState, budget: Budget | None = None) -> AlgState:
    if state.done:
        return state
    budget = budget or Budget()
    found = hypothesis_check(state, budget=budget)
    if found.status == "inconclusive":
        state.outcome = Outcome("inconclusive", None, state.i, found.reason)
        return state
    if found.status == "witness":
        if state.i == 1:
            _check(state, "CL1", "holds", point=list(found.point), alpha=state.alpha)
        state.witness = found.point
        state.prefix = found.point[:state.i]
        state.history.append({"i": state.i, "event": "witness", "alpha": state.alpha, "point": list(found.point)})
        state.i += 1
        return state
    if state.i == 1:
        _check(state, "CL1", "falsified", f"no point of K^m with Q_1 != 0 at alpha={state.alpha}",
               evaluated=found.evaluated)
    state.witness = None
    try:
        else_branch(state, budget)
    except BudgetExceeded as exc:
        state.outcome = Outcome("inconclusive", None, state.i, str(exc))
        return state
    if state.outcome is None:
        state.i += 1
    return state


def extend_to_vertices(g: Graph, edge_colors: Mapping[int, int], setting: Setting | None = None,
                       budget: Budget | None = None) -> ColorAssignment:
    """First (lex) vertex coloring from {1..delta+1}^n with P(beta_v, beta_e) != 0."""
    delta = g.delta
    budget = budget or Budget()
    from .graph import build_neighbor_index
    idx = setting.index if setting else build_neighbor_index(g)
    colors = list(range(1, delta + 2))
    chosen = [0] * (g.n + 1)

    def ok(i: int, c: int) -> bool:
        if any(edge_colors[k] == c for k in idx.ne_v[i]):
            return False
        return all(chosen[j] != c for j in idx.nv[i] if j < i)

    def dfs(i: int) -> bool:
        if i > g.n:
            return True
        for c in colors:
            budget.charge(1, "vertex extension")
            if ok(i, c):
                chosen[i] = c
                if dfs(i + 1):
                    return True
        chosen[i] = 0
        return False

    if not dfs(1):
        raise NoVertexAssignment("no vertex colors in 1..delta+1 are compatible with the edge colors")
    vc = {i: chosen[i] for i in range(1, g.n + 1)}
    if setting is not None:
        point = {v(i): vc[i] for i in vc}
        point.update({e(k): edge_colors[k] for k in edge_colors})
        assert build_P(setting).eval(point), "vertex search accepted a point where P vanishes"
    return ColorAssignment(vc, dict(edge_colors))


def run(g: Graph, p: int | None = None, strategy: str = "gradedlex", budget: Budget | int | None = None,
        choice: VertexMonomialChoice | None = None) -> RunReport:
    if g.m < 1:
        raise ValueError("graph must have at least one edge")
    if not isinstance(budget, Budget):
        budget = Budget(budget)
    prime = select_prime(g.m, g.delta, p)
    s = make_setting(g, prime)
    scaled = prime.below_bound
    report = RunReport(g, prime, scaled, None, Outcome("inconclusive"))
    try:
        choice = choice or choose_vertex_monomial(s, strategy, budget)
    except EmptyReduction as exc:
        report.outcome = Outcome("falsified", "T1", 0, str(exc))
        return report
    except BudgetExceeded as exc:
        report.outcome = Outcome("inconclusive", "T1", 0, str(exc))
        report.budget_spent = budget.spent
        return report
    report.choice = choice
    state = AlgState(s, choice)
    trace = [state.alpha]
    while not state.done:
        step(state, budget)
        if state.alpha != trace[-1]:
            trace.append(state.alpha)
    report.alpha_trace = trace
    report.history = state.history
    report.checks = state.checks
    if state.outcome is not None:
        report.outcome = state.outcome
        report.budget_spent = budget.spent
        return report
    if state.witness is None:
        # the last step re-selected alpha; its lattice witness is still outstanding
        final = hypothesis_check(state, g.m, budget)
        if final.status != "witness":
            kind = "inconclusive" if final.status == "inconclusive" else "falsified"
            report.outcome = Outcome(kind, "R4", g.m, final.reason or "no point of K^m with Q_m != 0")
            report.budget_spent = budget.spent
            return report
        state.witness = final.point
    point = state.witness
    edge_colors = {k: point[k - 1] for k in range(1, g.m + 1)}
    report.edge_colors = edge_colors
    q_m = build_Q(g.m, choice, s, state.colors)
    assert q_m.eval({e(k): c for k, c in edge_colors.items()}), "Q_m vanishes at the reported point"
    assert verify_edge_coloring(g, edge_colors, state.colors), "edge colors are not proper"
    try:
        assignment = extend_to_vertices(g, edge_colors, s, budget)
    except NoVertexAssignment as exc:
        report.outcome = Outcome("falsified", "PT4", g.m, str(exc), {"edges": {str(k): c for k, c in edge_colors.items()}})
        report.budget_spent = budget.spent
        return report
    except BudgetExceeded as exc:
        report.outcome = Outcome("inconclusive", "PT4", g.m, str(exc))
        report.budget_spent = budget.spent
        return report
    assignment.palette = state.colors
    chk = verify_total_coloring(g, assignment)
    assert chk, chk.detail
    report.assignment = assignment
    report.outcome = Outcome("colored", None, None, "", assignment.as_json())
    report.budget_spent = budget.spent
    return report
