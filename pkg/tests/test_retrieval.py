from fractions import Fraction

import pytest

from legalkg.corpus import CaseRecord, LawEntry, SectionSet
from legalkg.errors import RetrievalError, UnknownDomainError
from legalkg.extract import CourtLevel, ExtractionRecord
from legalkg.kgraph import CDC, build_graph, meta_path_neighbors
from legalkg.retrieval import (
    RUNS,
    AggMode,
    HoldoutSplit,
    aggregate,
    build_case_index,
    build_law_index,
    domain_candidates,
    evaluate,
    format_results,
    method1_case_law,
    method2_mixed,
    method3_case_case,
    method4_domain_case_case,
    query_metrics,
    run_all,
    select_holdout,
    similar_cases,
)

LAWS = [
    LawEntry("A", "Luật Đất đai 2013", 2013),
    LawEntry("B", "Bộ luật Dân sự 2015", 2015),
    LawEntry("C", "Luật Hôn nhân và gia đình 2014", 2014),
]


def _case(case_id, content="", judgment="", decision="", domain="D1"):
    return CaseRecord(case_id=case_id, sections=SectionSet("", content, judgment, decision),
                      court_name="Tòa án nhân dân tỉnh A", domain_name=domain)


def _rec(case_id, laws, domain):
    return ExtractionRecord(case_id, "Tòa án nhân dân tỉnh A", CourtLevel.PROVINCIAL, domain, "",
                            frozenset(laws))


@pytest.fixture
def world():
    graph_cases = [_case("g1", "đất đai đất đai"), _case("g2", "đất đai nhà ở", domain="D2"),
                   _case("g3", "hôn nhân")]
    graph = build_graph([_rec("g1", "AB", "D1"), _rec("g2", "AC", "D2"), _rec("g3", "C", "D1")], LAWS)
    return graph, build_case_index(graph_cases)


def test_aggregate():
    assert aggregate([{"a", "b"}, {"b", "c"}], "union") == {"a", "b", "c"}
    assert aggregate([{"a", "b"}, {"b", "c"}], AggMode.INTERSECTION) == {"b"}
    assert aggregate([{"a"}, {"b"}], "intersection") == frozenset()
    assert aggregate([{"a"}], "union") == {"a"}
    with pytest.raises(RetrievalError):
        aggregate([], "union")
    with pytest.raises(ValueError):
        aggregate([{"a"}], "xor")


def test_method1_and_2():
    q = _case("q", "tranh chấp đất đai", "Căn cứ Bộ luật Dân sự", "Căn cứ Luật Hôn nhân và gia đình")
    idx = build_law_index(LAWS)
    assert method1_case_law(q, "content", idx) == {"A"}
    assert method1_case_law(q, "judgment", idx) == {"B"}
    assert method1_case_law(q, "decision", idx) == {"C"}
    assert method2_mixed(q, idx, "union") == {"A", "B", "C"}
    assert method2_mixed(q, idx, "intersection") == frozenset()


def test_method1_empty_section():
    q = _case("q", "đất đai")
    assert method1_case_law(q, "judgment", build_law_index(LAWS)) == frozenset()


def test_method3(world):
    graph, idx = world
    q = _case("q", "tranh chấp đất đai nhà ở")
    assert similar_cases(q, idx, 2) == ["g2", "g1"]
    assert method3_case_case(q, idx, graph, 1) == {"A", "C"}
    assert method3_case_case(q, idx, graph, 2, "union") == {"A", "B", "C"}
    assert method3_case_case(q, idx, graph, 2, "intersection") == {"A"}


def test_method4(world):
    graph, idx = world
    q = _case("q", "tranh chấp đất đai nhà ở", domain="D1")
    assert domain_candidates(q, graph, idx) == {"g1", "g3"}
    assert method4_domain_case_case(q, idx, graph, 1) == {"A", "B"}
    # g3 shares no term, so only one candidate is available.
    assert method4_domain_case_case(q, idx, graph, 2, "intersection") == {"A", "B"}


def test_method4_unknown_domain(world):
    graph, idx = world
    with pytest.raises(UnknownDomainError, match="unknown domain"):
        method4_domain_case_case(_case("q", "đất đai", domain="D9"), idx, graph, 1)


def test_domain_candidates_equal_meta_path(world):
    graph, idx = world
    members = domain_candidates(_case("q", "x", domain="D1"), graph, idx)
    assert members == {"g1"} | meta_path_neighbors(graph, "g1", CDC)


def test_query_never_returns_itself(world):
    graph, idx = world
    g1 = _case("g1", "đất đai đất đai")
    assert "g1" not in similar_cases(g1, idx, 2)
    with pytest.raises(RetrievalError):
        similar_cases(g1, idx, 0)


def test_query_metrics_example():
    m = query_metrics({"a", "b", "c"}, {"a", "d"})
    assert (m.precision, m.recall, m.f1) == (Fraction(1, 3), Fraction(1, 2), Fraction(2, 5))
    assert query_metrics(set(), {"a"}) == query_metrics({"x"}, {"a"})
    assert query_metrics(set(), {"a"}).f1 == 0


def test_evaluate_macro():
    preds = {"q1": {"a", "b", "c"}, "q2": set()}
    gold = {"q1": {"a", "d"}, "q2": {"x"}}
    m = evaluate(preds, gold, exact=True)
    assert (m.f1, m.recall, m.precision) == (Fraction(1, 5), Fraction(1, 4), Fraction(1, 6))
    assert evaluate(preds, gold).f1 == pytest.approx(0.2)


def test_evaluate_errors():
    with pytest.raises(RetrievalError, match="no gold"):
        evaluate({"q": {"a"}}, {})
    with pytest.raises(RetrievalError, match="empty"):
        evaluate({"q": {"a"}}, {"q": set()})


def test_holdout():
    ids = [f"c{i}" for i in range(20)]
    a, b = select_holdout(ids, 5, 7), select_holdout(list(reversed(ids)), 5, 7)
    assert a == b
    assert len(a.test_ids) == 5 and set(a.test_ids) | set(a.graph_ids) == set(ids)
    with pytest.raises(RetrievalError):
        select_holdout(ids, 20, 7)
    with pytest.raises(RetrievalError, match="overlaps"):
        HoldoutSplit(test_ids=("c1",), graph_ids=("c1", "c2"))


@pytest.fixture(scope="module")
def report():
    from legalkg.synth import GeneratorParams, generate_corpus

    corpus = generate_corpus(21, GeneratorParams(cases=240, laws=60, domains=5, courts=15))
    split = select_holdout([c.case_id for c in corpus.cases], 60, 1)
    return run_all(corpus.cases, corpus.laws, corpus.gold, split)


def test_report_shape(report):
    rows = report.rows()
    assert [r["run"] for r in rows] == list(range(1, 12))
    assert [r["description"] for r in rows] == [s.description for s in RUNS]
    for r in rows:
        assert all(0.0 <= r[k] <= 1.0 for k in ("f1", "recall", "precision"))
    assert not set(report.split.test_ids) & set(report.graph.nodes)


def test_aggregation_inclusions(report):
    p = {r.spec.run: r.predictions for r in report.results}
    for cid in report.split.test_ids:
        assert p[5][cid] <= p[1][cid] <= p[4][cid]
        assert p[5][cid] <= p[2][cid] <= p[4][cid]
        assert p[5][cid] <= p[3][cid] <= p[4][cid]
        assert p[8][cid] <= p[6][cid] <= p[7][cid]
        assert p[11][cid] <= p[9][cid] <= p[10][cid]


def test_recall_ordering(report):
    r = {x.spec.run: x for x in report.results}
    assert r[4].recall >= max(r[1].recall, r[2].recall, r[3].recall)
    assert r[5].recall <= min(r[1].recall, r[2].recall, r[3].recall)
    assert r[7].recall >= r[6].recall >= r[8].recall
    assert r[10].recall >= r[9].recall >= r[11].recall


def test_format_results(report):
    tsv = format_results(report.rows(), "tsv").splitlines()
    assert tsv[0] == "run\tmethod\tdescription\tf1\trecall\tprecision"
    assert len(tsv) == 12
    with pytest.raises(ValueError):
        format_results(report.rows(), "xml")
