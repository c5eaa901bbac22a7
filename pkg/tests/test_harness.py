import json

import pytest

from totalcol import harness
from totalcol.corpus import gen_corpus
from totalcol.figures import render_figures, verdict_matrix
from totalcol.graph import from_edges
from totalcol.harness import ClaimId, Params, dumps, run_suite, verify_claim

VERDICT_KEYS = {"claim", "instance", "outcome", "reason", "evidence", "digest"}
INSTANCE_KEYS = {"id", "graph", "n", "m", "delta", "edges", "p", "prime_source", "scaled", "strategy"}


@pytest.fixture(scope="module")
def small_report():
    return run_suite(gen_corpus(3), list(ClaimId), Params())


def test_report_shape(small_report):
    rep = small_report
    assert rep["schema"] == harness.SCHEMA
    assert set(rep) == {"schema", "version", "params", "claims", "notes", "summary", "falsified", "verdicts"}
    assert len(rep["verdicts"]) == 3 * len(ClaimId)
    for v in rep["verdicts"]:
        assert set(v) == VERDICT_KEYS
        assert set(v["instance"]) == INSTANCE_KEYS
        assert v["outcome"] in ("holds", "falsified", "inconclusive")
        assert v["digest"] == harness.digest(v["evidence"])


def test_small_corpus_verdicts(small_report):
    by = {(v["claim"], v["instance"]["graph"]): v for v in small_report["verdicts"]}
    assert by[("T1", "g2_000")]["outcome"] == "holds"
    assert by[("L1", "g3_000")]["outcome"] == "holds"
    assert by[("L1", "g3_000")]["evidence"]["mode"] == "full grid"
    assert small_report["summary"]["FERMAT_REMARK"]["summary"] == "holds on all tested instances (3)"
    cl2 = by[("CL2", "g2_000")]
    assert cl2["outcome"] == "inconclusive" and cl2["reason"].startswith("NotTriggered")
    assert small_report["falsified"] == 0


def test_summary_never_claims_proof(small_report):
    text = json.dumps(small_report["summary"]).lower()
    assert "proven" not in text and "proved" not in text


def test_pc1_holds_to_n4():
    rep = run_suite(gen_corpus(4), [ClaimId.PC1], Params())
    assert all(v["outcome"] == "holds" for v in rep["verdicts"])
    assert len(rep["verdicts"]) == 9


def test_empty_corpus():
    rep = run_suite([], [ClaimId.PC1], Params())
    assert rep["verdicts"] == [] and rep["falsified"] == 0
    assert rep["summary"]["PC1"]["summary"] == "no instances tested"


def test_byte_identical_runs_and_workers():
    corpus = gen_corpus(4)
    claims = [ClaimId.T1, ClaimId.CL1, ClaimId.PC1, ClaimId.Z, ClaimId.R4]
    params = Params(seed=3)
    a = dumps(run_suite(corpus, claims, params))
    b = dumps(run_suite(corpus, claims, params))
    c = dumps(run_suite(corpus, claims, params, threads=3))
    assert a == b == c


def test_timings_only_on_request():
    g = [from_edges([(1, 2)])]
    assert "wall_time" not in run_suite(g, [ClaimId.T1], Params())["verdicts"][0]
    assert "wall_time" in run_suite(g, [ClaimId.T1], Params(timings=True))["verdicts"][0]


def test_budget_gives_inconclusive_not_falsified():
    g = from_edges([(1, 2), (2, 3), (3, 4)])
    for claim in (ClaimId.T1, ClaimId.CL1, ClaimId.L1, ClaimId.R4):
        assert verify_claim(claim, g, Params(budget=50)).outcome == "inconclusive"


def test_unconfirmed_falsification_is_downgraded(monkeypatch):
    monkeypatch.setitem(harness.PROCEDURES, ClaimId.PC1, lambda inst: ("falsified", "planted", {}))
    v = verify_claim(ClaimId.PC1, from_edges([(1, 2)]), Params())
    assert v.outcome == "inconclusive"
    assert v.reason.startswith("falsification not confirmed independently")


def test_confirmed_falsification_survives(monkeypatch):
    # vertex extension really fails for K2 with edge color 1
    monkeypatch.setitem(harness.PROCEDURES, ClaimId.PT4,
                        lambda inst: ("falsified", "planted", {"witness": {"edges": {"1": 1}}}))
    v = verify_claim(ClaimId.PT4, from_edges([(1, 2)]), Params())
    assert v.outcome == "falsified" and v.evidence["reverified"] == "product enumeration"


def test_scaled_instance_flag():
    v = verify_claim(ClaimId.T1, from_edges([(1, 2), (2, 3)]), Params(prime_override=7))
    assert v.instance["scaled"] and v.instance["p"] == 7 and v.instance["prime_source"] == "override"


def test_figures(tmp_path, small_report):
    claims, instances, grid = verdict_matrix(small_report)
    assert grid.shape == (len(ClaimId), 3)
    paths = render_figures(small_report, str(tmp_path))
    assert [p.rsplit("/", 1)[-1] for p in paths] == ["verdict_matrix.png", "outcome_counts.png"]
    for p in paths:
        with open(p, "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
