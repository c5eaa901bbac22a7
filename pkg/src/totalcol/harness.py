"""Per-instance verification of each statement, with tri-state verdicts.

A verdict is Holds, Falsified (with a witness that has been re-checked by a
second evaluation route) or Inconclusive (with a reason). Nothing is ever
asserted globally: the report summary only speaks about the tested
instances.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .algorithm1 import AlgState, RunReport, hypothesis_check, run
from .budget import Budget, BudgetExceeded, default_budget
from .constructions import (
    EmptyReduction,
    VertexMonomialChoice,
    build_Q,
    build_Z,
    check_Z_nonzero,
    choose_vertex_monomial,
    expand_vertex_polynomial_at_zero,
    make_setting,
    reconstruct_CP,
    tensor_degrees,
    vertex_coefficient,
)
from .ff import select_prime
from .graph import Graph
from .mpoly import SparsePoly, e, fermat_reduce, reconstruct_univariate
from .oracle import brute_total_chromatic

SCHEMA = "totalcol-report/1"


class ClaimId(str, enum.Enum):
    T1 = "T1"
    L1 = "L1"
    CL1 = "CL1"
    CL2 = "CL2"
    CL3 = "CL3"
    L2 = "L2"
    L3 = "L3"
    R4 = "R4"
    PT4 = "PT4"
    PC1 = "PC1"
    Z = "Z"
    FERMAT_REMARK = "FERMAT_REMARK"


DESCRIPTIONS = {
    ClaimId.T1: "reduced P(v, 0) has a nonzero vertex monomial",
    ClaimId.L1: "C(e) has degree at most 2 in every edge variable",
    ClaimId.CL1: "with alpha = delta+2 some point of K^m makes Q_1 nonzero",
    ClaimId.CL2: "a re-selected color beta is a simple root of each J(e_j) and of G, and not a root of J(e_i)",
    ClaimId.CL3: "after re-selection K(e) and Q_i have nonzero points with e_1..e_i in the new palette",
    ClaimId.L2: "each reduced J(e_j) is a constant times prod_{l != alpha}(x - l)",
    ClaimId.L3: "G and its reduction have the same quotient by prod (e_j - beta)",
    ClaimId.R4: "the procedure ends at a point of K^m with Q_m nonzero",
    ClaimId.PT4: "the edge colors extend to vertex colors in 1..delta+1 with P nonzero",
    ClaimId.PC1: "total chromatic number is at most delta+2",
    ClaimId.Z: "Z_i is nonzero on the search box for every edge",
    ClaimId.FERMAT_REMARK: "x^p - x reduces to zero",
}

RUN_CLAIMS = (ClaimId.CL2, ClaimId.CL3, ClaimId.L2, ClaimId.L3, ClaimId.R4, ClaimId.PT4)
NOTES = [
    "G is built over subsets of e_1..e_(i-1); the variant over e_1..e_i is not used",
    "the Hypothesis-1 state is read as: no point of K^m makes Q_i nonzero",
]


@dataclass(frozen=True)
class Params:
    prime_override: int | None = None
    strategy: str = "gradedlex"
    budget: int | None = None
    seed: int = 0
    l1_samples: int = 50
    timings: bool = False

    def budget_limit(self) -> int:
        return default_budget() if self.budget is None else self.budget

    def as_json(self) -> dict:
        return {"prime_override": self.prime_override, "strategy": self.strategy,
                "budget": self.budget_limit(), "seed": self.seed, "l1_samples": self.l1_samples}


@dataclass
class Verdict:
    claim: ClaimId
    instance: dict
    outcome: str  # holds | falsified | inconclusive
    reason: str = ""
    evidence: dict = field(default_factory=dict)
    wall_time: float | None = None

    @property
    def digest(self) -> str:
        return digest(self.evidence)

    def as_json(self, timings: bool = False) -> dict:
        out = {"claim": self.claim.value, "instance": self.instance, "outcome": self.outcome,
               "reason": self.reason, "evidence": self.evidence, "digest": self.digest}
        if timings and self.wall_time is not None:
            out["wall_time"] = round(self.wall_time, 4)
        return out


def digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def instance_id(g: Graph, p: int | None, strategy: str) -> str:
    return digest({"n": g.n, "edges": g.edges, "p": p, "strategy": strategy})[:12]


# ---------------------------------------------------------------------------
# per-instance context


class Instance:
    """Lazily computed shared state for one graph under fixed parameters."""

    def __init__(self, g: Graph, params: Params):
        self.g = g
        self.params = params
        self.prime = None
        self.setting = None
        self.problem = ""
        try:
            self.prime = select_prime(g.m, g.delta, params.prime_override)
            self.setting = make_setting(g, self.prime)
        except ValueError as exc:
            self.problem = str(exc)
        self._choice = None
        self._choice_error = None
        self._run: RunReport | None = None

    def describe(self) -> dict:
        g = self.g
        p = int(self.prime) if self.prime is not None else None
        return {
            "id": instance_id(g, p, self.params.strategy),
            "graph": g.label(),
            "n": g.n,
            "m": g.m,
            "delta": g.delta,
            "edges": [list(ed) for ed in g.edges],
            "p": p,
            "prime_source": self.prime.source.value if self.prime is not None else None,
            "scaled": bool(self.prime.below_bound) if self.prime is not None else None,
            "strategy": self.params.strategy,
        }

    def budget(self) -> Budget:
        return Budget(self.params.budget_limit())

    def choice(self) -> VertexMonomialChoice:
        if self._choice is None and self._choice_error is None:
            try:
                self._choice = choose_vertex_monomial(self.setting, self.params.strategy, self.budget())
            except (EmptyReduction, BudgetExceeded) as exc:
                self._choice_error = exc
        if self._choice_error is not None:
            raise self._choice_error
        return self._choice

    def run(self) -> RunReport:
        if self._run is None:
            choice = None
            try:
                choice = self.choice()
            except (EmptyReduction, BudgetExceeded):
                pass
            self._run = run(self.g, self.prime, self.params.strategy, self.budget(), choice)
        return self._run


# ---------------------------------------------------------------------------
# claim procedures


def _holds(reason="", **ev):
    return "holds", reason, ev


def _false(reason, **ev):
    return "falsified", reason, ev


def _unknown(reason, **ev):
    return "inconclusive", reason, ev


def check_T1(inst: Instance):
    try:
        ch = inst.choice()
    except BudgetExceeded as exc:
        return _unknown(str(exc))
    except EmptyReduction as exc:
        return _false(str(exc))
    return _holds(**ch.as_json())


def check_L1(inst: Instance):
    s = inst.setting
    p = int(s.p)
    try:
        ch = inst.choice()
    except (EmptyReduction, BudgetExceeded) as exc:
        return _unknown(f"no vertex monomial: {exc}")
    cp = vertex_coefficient(s, ch.exponents)
    budget = inst.budget()
    full_cost = p ** s.graph.m * cp.cost
    if full_cost <= budget.remaining:
        coeffs = reconstruct_CP(ch, s, budget)
        degs = tensor_degrees(coeffs)
        bad = {f"e{k}": d for k, d in enumerate(degs, 1) if d > 2}
        if bad:
            return _false("degree above 2", degrees=degs, mode="full grid")
        return _holds("full-grid reconstruction", degrees=degs, mode="full grid")
    return _sampled_L1(inst, ch, cp, budget)


def _sampled_L1(inst: Instance, ch, cp, budget: Budget):
    s = inst.setting
    p = int(s.p)
    m = s.graph.m
    rng = np.random.default_rng(inst.params.seed)
    R = inst.params.l1_samples
    checked = 0
    try:
        for k in range(1, m + 1):
            for t in range(R):
                base = [int(x) for x in rng.integers(0, p, m)]
                extra = int(rng.integers(3, p))

                def at(a):
                    pt = list(base)
                    pt[k - 1] = a
                    point = {e(r): pt[r - 1] for r in range(1, m + 1)}
                    cp.charge(point, budget, "sampled degree check")
                    return cp.eval(point)

                ys = [at(a) for a in (0, 1, 2)]
                # quadratic through (0,y0),(1,y1),(2,y2), evaluated at ``extra``
                x = extra
                inv2 = pow(2, p - 2, p)
                pred = (ys[0] * (x - 1) * (x - 2) * inv2 - ys[1] * x * (x - 2) + ys[2] * x * (x - 1) * inv2) % p
                checked += 1
                if pred != at(extra):
                    line = reconstruct_univariate([(a, at(a)) for a in range(p)], p, e(k))
                    deg = line.total_degree()
                    if deg > 2:
                        return _false("restriction to a line has degree above 2", variable=f"e{k}",
                                      base=base, line_degree=deg, mode="sampled")
    except BudgetExceeded as exc:
        return _unknown(f"sampled check incomplete: {exc}", checked=checked)
    return _unknown("sampled reconstruction found no violation; full grid out of budget",
                    lines_checked=checked, mode="sampled")


def check_CL1(inst: Instance):
    try:
        ch = inst.choice()
    except (EmptyReduction, BudgetExceeded) as exc:
        return _unknown(f"no vertex monomial: {exc}")
    state = AlgState(inst.setting, ch)
    found = hypothesis_check(state, 1, inst.budget())
    if found.status == "witness":
        return _holds(point=list(found.point), alpha=state.alpha, evaluated=found.evaluated)
    if found.status == "inconclusive":
        return _unknown(found.reason, evaluated=found.evaluated)
    return _false("no point of K^m makes Q_1 nonzero", alpha=state.alpha, evaluated=found.evaluated)


def check_from_run(claim: ClaimId):
    def proc(inst: Instance):
        rep = inst.run()
        checks = [c for c in rep.checks if c.claim == claim.value]
        out = rep.outcome
        if claim in (ClaimId.R4, ClaimId.PT4):
            if out.kind == "colored":
                if claim == ClaimId.R4:
                    return _holds(edges={str(k): c for k, c in sorted(rep.edge_colors.items())},
                                  alpha_trace=rep.alpha_trace)
                return _holds(coloring=rep.assignment.as_json())
            if out.kind == "falsified" and out.claim == claim.value:
                return _false(out.detail, step=out.step, witness=out.witness)
            return _unknown(f"run ended before this statement was reached: {out.kind} {out.claim or ''}".strip())
        if not checks:
            if out.kind == "inconclusive":
                return _unknown(f"run incomplete: {out.detail}")
            return _unknown("NotTriggered: the re-selection branch never ran on this instance")
        ev = {"checks": [c.as_json() for c in checks]}
        if any(c.status == "falsified" for c in checks):
            bad = next(c for c in checks if c.status == "falsified")
            return _false(bad.detail, step=bad.i, **ev)
        if all(c.status == "holds" for c in checks):
            return _holds(**ev)
        return _unknown("some checks incomplete", **ev)
    return proc


def check_PC1(inst: Instance):
    g = inst.g
    try:
        res = brute_total_chromatic(g, g.delta + 2, inst.budget())
    except BudgetExceeded as exc:
        return _unknown(str(exc))
    if res.chi_total is None:
        return _false(f"no total coloring with {g.delta + 2} colors", nodes=res.nodes_explored)
    return _holds(chi_total=res.chi_total, delta=g.delta, certificate=res.certificate,
                  witness=res.witness.as_json())


def check_Z(inst: Instance):
    try:
        ch = inst.choice()
    except (EmptyReduction, BudgetExceeded) as exc:
        return _unknown(f"no vertex monomial: {exc}")
    budget = inst.budget()
    points = {}
    for i in range(1, inst.g.m + 1):
        res = check_Z_nonzero(i, ch, inst.setting, budget)
        if res.status == "zero":
            return _false(f"Z_{i} vanishes on its search box", edge=i, S=build_Z(i, ch, inst.setting).meta["S"])
        if res.status == "inconclusive":
            return _unknown(res.reason, completed=sorted(points))
        points[f"e{i}"] = res.witness
    return _holds(points=points)


def check_fermat(inst: Instance):
    p = int(inst.prime)
    x = e(1)
    f = SparsePoly(p, {((x, p),): 1, ((x, 1),): p - 1})
    red = fermat_reduce(f)
    if red.is_zero():
        return _holds(p=p)
    return _false("x^p - x did not reduce to zero", p=p, reduced=str(red))


PROCEDURES = {
    ClaimId.T1: check_T1,
    ClaimId.L1: check_L1,
    ClaimId.CL1: check_CL1,
    ClaimId.PC1: check_PC1,
    ClaimId.Z: check_Z,
    ClaimId.FERMAT_REMARK: check_fermat,
}
for _c in RUN_CLAIMS:
    PROCEDURES[_c] = check_from_run(_c)


# ---------------------------------------------------------------------------
# independent re-verification of falsifications


def reverify(claim: ClaimId, inst: Instance, evidence: dict, cap: int = 2_000_000) -> tuple[bool, str]:
    """Re-derive a falsification through a second code path.

    Returns (confirmed, note). Unconfirmed falsifications are downgraded.
    """
    s = inst.setting
    g = inst.g
    if claim == ClaimId.PC1:
        from .oracle import _search, conflict_graph
        _, adj = conflict_graph(g)
        colors = _search(adj, list(range(len(adj))), g.delta + 2, Budget(cap * 10), [0])
        return colors is None, "plain element order search"
    if claim == ClaimId.FERMAT_REMARK:
        p = int(inst.prime)
        return any((pow(a, p, p) - a) % p for a in range(p)), "pointwise evaluation"
    if claim == ClaimId.T1:
        p = int(s.p)
        if p ** g.n * (g.n + g.m) > cap:
            return False, "expansion oracle out of reach"
        return expand_vertex_polynomial_at_zero(s).is_zero(), "sparse expansion"
    if claim == ClaimId.L1:
        ch = inst.choice()
        cp = vertex_coefficient(s, ch.exponents)
        p = int(s.p)
        k = int(evidence.get("variable", "e1")[1:]) if "variable" in evidence else None
        if "base" in evidence:
            base = evidence["base"]
            vals = []
            for a in range(p):
                pt = list(base)
                pt[k - 1] = a
                vals.append((a, cp.eval_slow({e(r): pt[r - 1] for r in range(1, g.m + 1)})))
            return reconstruct_univariate(vals, p, e(k)).total_degree() > 2, "slow line reconstruction"
        if p ** g.m * p ** g.n > cap:
            return False, "slow reconstruction out of reach"
        from .mpoly import values_to_coeffs
        table = np.zeros((p,) * g.m, dtype=np.int64)
        for pt in itertools.product(range(p), repeat=g.m):
            table[pt] = cp.eval_slow({e(r): pt[r - 1] for r in range(1, g.m + 1)})
        return max(tensor_degrees(values_to_coeffs(table, p))) > 2, "slow full-grid reconstruction"
    if claim in (ClaimId.CL1, ClaimId.R4):
        ch = inst.choice()
        alpha = inst.run().alpha_trace[-1] if claim == ClaimId.R4 else s.delta + 2
        i = 1 if claim == ClaimId.CL1 else g.m
        q = build_Q(i, ch, s, s.colors(alpha))
        K = s.colors(alpha).colors
        if len(K) ** g.m * int(s.p) ** g.n > cap:
            return False, "slow lattice sweep out of reach"
        for pt in itertools.product(K, repeat=g.m):
            if q.eval_slow({e(k): pt[k - 1] for k in range(1, g.m + 1)}):
                return False, f"slow path found a nonzero point {pt}"
        return True, "slow lattice sweep"
    if claim == ClaimId.Z:
        ch = inst.choice()
        i = evidence["edge"]
        z = build_Z(i, ch, s)
        S = set(z.meta["S"])
        domains = [range(1, s.delta + 3) if k in S else range(int(s.p)) for k in range(1, g.m + 1)]
        size = 1
        for d in domains:
            size *= len(d)
        if size * int(s.p) ** g.n > cap:
            return False, "slow box sweep out of reach"
        for pt in itertools.product(*domains):
            if z.eval_slow({e(k): pt[k - 1] for k in range(1, g.m + 1)}):
                return False, f"slow path found a nonzero point {pt}"
        return True, "slow box sweep"
    if claim == ClaimId.PT4:
        from .algorithm1 import NoVertexAssignment
        edges = {int(k): c for k, c in evidence.get("witness", {}).get("edges", {}).items()}
        for vc in itertools.product(range(1, g.delta + 2), repeat=g.n):
            ok = all(vc[u - 1] != vc[w - 1] for u, w in g.edges) and all(
                vc[x - 1] != edges[k] for k, ed in enumerate(g.edges, 1) for x in ed)
            if ok:
                return False, "product enumeration found vertex colors"
        return True, "product enumeration"
    return False, "no independent route for this witness"


# ---------------------------------------------------------------------------
# driving


def verify_claim(claim: ClaimId, g: Graph, params: Params, inst: Instance | None = None) -> Verdict:
    claim = ClaimId(claim)
    inst = inst or Instance(g, params)
    t0 = time.perf_counter()
    if inst.setting is None and claim not in (ClaimId.PC1,):
        outcome, reason, ev = _unknown(f"instance not runnable: {inst.problem}")
    else:
        try:
            outcome, reason, ev = PROCEDURES[claim](inst)
        except BudgetExceeded as exc:
            outcome, reason, ev = _unknown(str(exc))
        if outcome == "falsified":
            try:
                confirmed, note = reverify(claim, inst, ev)
            except BudgetExceeded as exc:
                confirmed, note = False, str(exc)
            ev = dict(ev, reverified=note)
            if not confirmed:
                outcome, reason = "inconclusive", f"falsification not confirmed independently: {reason} ({note})"
    return Verdict(claim, inst.describe(), outcome, reason, _plain(ev), time.perf_counter() - t0)


def _plain(obj):
    """Round-trip through JSON so evidence is plain data with string keys."""
    return json.loads(json.dumps(obj, sort_keys=True, default=str))


def _instance_verdicts(args) -> list[dict]:
    g, claims, params = args
    inst = Instance(g, params)
    return [verify_claim(c, g, params, inst).as_json(params.timings) for c in claims]


def run_suite(corpus: Sequence[Graph], claims: Iterable[ClaimId], params: Params, threads: int = 1) -> dict:
    claims = [ClaimId(c) for c in claims]
    jobs = [(g, claims, params) for g in corpus]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_instance_verdicts, jobs))
    else:
        chunks = [_instance_verdicts(j) for j in jobs]
    verdicts = [v for chunk in chunks for v in chunk]
    return build_report(verdicts, claims, params)


def summarize(verdicts: list[dict], claims: Sequence[ClaimId]) -> dict:
    out = {}
    for c in claims:
        mine = [v for v in verdicts if v["claim"] == c.value]
        counts = {k: sum(v["outcome"] == k for v in mine) for k in ("holds", "falsified", "inconclusive")}
        n = len(mine)
        if n == 0:
            text = "no instances tested"
        elif counts["falsified"]:
            text = f"falsified on {counts['falsified']} of {n} tested instances"
        elif counts["holds"] == n:
            text = f"holds on all tested instances ({n})"
        else:
            text = f"holds on {counts['holds']} of {n} tested instances; {counts['inconclusive']} inconclusive"
        out[c.value] = dict(counts, tested=n, statement=DESCRIPTIONS[c], summary=text)
    return out


def build_report(verdicts: list[dict], claims: Sequence[ClaimId], params: Params) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "params": params.as_json(),
        "claims": [c.value for c in claims],
        "notes": NOTES,
        "summary": summarize(verdicts, claims),
        "falsified": sum(v["outcome"] == "falsified" for v in verdicts),
        "verdicts": verdicts,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
