from collections import Counter
from fractions import Fraction

import pytest

from legalkg.corpus import LawEntry
from legalkg.errors import GraphSchemaError, UnknownDomainError, UnknownNodeError
from legalkg.extract import CourtLevel, ExtractionRecord, LawMatcher, extract_all
from legalkg.kgraph import (
    CCC,
    CDC,
    HeteroGraph,
    MetaPath,
    NodeType,
    RelationType,
    build_graph,
    connected_components,
    density,
    edge_ratio,
    entity_node_id,
    export_graph,
    graph_stats,
    import_graph,
    meta_path_neighbors,
    undirected_density,
)

from oracles import random_hetero_graph, two_hop_cases, union_find_partition

LAWS = [LawEntry(f"L{i}", f"Luật số {i}", 2000 + i) for i in range(5)]


def _rec(case_id, court="Tòa án nhân dân tỉnh A", domain="Dân sự", laws=(), subdomain=""):
    return ExtractionRecord(case_id, court, CourtLevel.PROVINCIAL, domain, subdomain, frozenset(laws))


def test_laws_only_graph():
    laws = [LawEntry(f"L{i:03d}", f"Luật {i}", 2000) for i in range(225)]
    g = build_graph([], laws)
    assert len(g.nodes) == 225 and not g.edges
    assert len(connected_components(g)) == 225


def test_single_case_counts():
    g = build_graph([_rec("c1", laws=["L0", "L3"])], LAWS)
    stats = graph_stats(g)
    assert stats.node_counts == {"Case": 1, "Court": 1, "Domain": 1, "Law": 5}
    assert stats.edge_counts == {"Decide": 1, "BelongTo": 1, "BasedOn": 2}
    assert g.laws_of("c1") == {"L0", "L3"}
    assert g.attrs(g.court_of("c1"))["court_name"] == "Tòa án nhân dân tỉnh A"


def test_courts_and_domains_are_shared_by_name():
    recs = [_rec("c1", court="Tòa án  nhân dân tỉnh A", subdomain="x"),
            _rec("c2", court="tòa án nhân dân tỉnh a", subdomain="y")]
    g = build_graph(recs, LAWS)
    assert g.court_of("c1") == g.court_of("c2")
    assert g.attrs(g.domain_of("c1"))["subdomains"] == ["x", "y"]
    assert g.find_domain("Dân sự") == g.domain_of("c1")
    with pytest.raises(UnknownDomainError, match="unknown domain"):
        g.find_domain("Hình sự")


def test_synthetic_edge_counts_match_gold(small_corpus):
    matcher = LawMatcher(small_corpus.laws)
    g = build_graph([extract_all(c, matcher) for c in small_corpus.cases], small_corpus.laws)
    counts = Counter(rel for *_, rel in g.edges)
    assert counts[RelationType.BASED_ON] == sum(len(v) for v in small_corpus.gold.values())
    assert counts[RelationType.DECIDE] == counts[RelationType.BELONG_TO] == len(small_corpus.cases)


def test_schema_violations():
    g = HeteroGraph()
    g.add_node("c", NodeType.CASE)
    g.add_node("l", NodeType.LAW)
    with pytest.raises(GraphSchemaError, match="expected Court"):
        g.add_edge("l", "c", RelationType.DECIDE)
    with pytest.raises(GraphSchemaError, match="unknown node"):
        g.add_edge("c", "zz", RelationType.BASED_ON)
    with pytest.raises(GraphSchemaError, match="already exists"):
        g.add_node("c", NodeType.LAW)


def test_second_court_for_a_case_rejected():
    g = HeteroGraph()
    g.add_node("c", NodeType.CASE)
    g.add_node("k1", NodeType.COURT)
    g.add_node("k2", NodeType.COURT)
    g.add_edge("k1", "c", RelationType.DECIDE)
    with pytest.raises(GraphSchemaError, match="already has"):
        g.add_edge("k2", "c", RelationType.DECIDE)


def test_validate_requires_court_and_domain():
    g = HeteroGraph()
    g.add_node("c", NodeType.CASE)
    with pytest.raises(GraphSchemaError, match="no Decide edge"):
        g.validate()


def test_empty_court_name_rejected():
    with pytest.raises(GraphSchemaError, match="empty court"):
        build_graph([_rec("c1", court=" ")], LAWS)


def test_unknown_node_lookup():
    with pytest.raises(UnknownNodeError):
        HeteroGraph().node_type("nope")


def test_meta_path_examples():
    recs = [_rec("a", court="K1", domain="D1"), _rec("b", court="K1", domain="D2"),
            _rec("c", court="K2", domain="D1"), _rec("d", court="K2", domain="D3")]
    g = build_graph(recs, LAWS)
    assert meta_path_neighbors(g, "a", CCC) == {"b"}
    assert meta_path_neighbors(g, "a", CDC) == {"c"}
    assert meta_path_neighbors(g, "d", CDC) == set()
    with pytest.raises(GraphSchemaError):
        meta_path_neighbors(g, "L0", CCC)


def test_invalid_meta_path():
    with pytest.raises(ValueError):
        MetaPath(((NodeType.CASE, RelationType.DECIDE, NodeType.DOMAIN),))
    with pytest.raises(ValueError):
        MetaPath(())


@pytest.mark.parametrize("seed", range(15))
def test_meta_paths_against_scan_and_symmetric(seed):
    g = random_hetero_graph(seed, max_nodes=120)
    types = {n: t for n, (t, _) in g.nodes.items()}
    edges = list(g.edges)
    for path, rel in ((CDC, RelationType.BELONG_TO), (CCC, RelationType.DECIDE)):
        for c in g.nodes_of_type(NodeType.CASE):
            got = meta_path_neighbors(g, c, path)
            assert got == two_hop_cases(edges, types, c, rel)
            assert all(c in meta_path_neighbors(g, o, path) for o in got)


@pytest.mark.parametrize("seed", range(15))
def test_components_match_union_find(seed):
    g = random_hetero_graph(seed, max_nodes=200)
    comps = connected_components(g)
    assert {frozenset(c) for c in comps} == union_find_partition(g.nodes, g.edges)
    sizes = [len(c) for c in comps]
    assert sizes == sorted(sizes, reverse=True)


def test_stats_formulas():
    assert edge_ratio(1, 2) == 0.5
    assert density(1, 2) == 0.5
    assert undirected_density(1, 2) == 1.0
    assert density(5, 1) is None and edge_ratio(0, 0) is None
    assert density(3, 4, exact=True) == Fraction(1, 4)


def test_stats_hand_fixture():
    # court -> c1 -> domain, c1 -> L0; L1 isolated. |V| = 5, |E| = 3.
    g = build_graph([_rec("c1", laws=["L0"])], LAWS[:2])
    s = graph_stats(g)
    assert (s.num_nodes, s.num_edges) == (5, 3)
    assert s.ratio == pytest.approx(3 / 5)
    assert s.density == pytest.approx(3 / 20)
    assert s.undirected_density == pytest.approx(6 / 20)
    assert s.num_components == 2 and s.component_sizes == [4, 1]
    assert s.mean_based_on_degree == 1.0


def test_entity_ids_are_stable():
    a = entity_node_id(NodeType.COURT, "Tòa án nhân dân tỉnh A")
    assert a == entity_node_id(NodeType.COURT, "  TÒA ÁN  nhân dân tỉnh A ")
    assert a.startswith("court:") and len(a) == len("court:") + 16
    assert a.split(":")[1] != entity_node_id(NodeType.DOMAIN, "Tòa án nhân dân tỉnh A").split(":")[1]


def test_export_import_round_trip(tmp_path, small_corpus):
    matcher = LawMatcher(small_corpus.laws)
    g = build_graph([extract_all(c, matcher) for c in small_corpus.cases], small_corpus.laws)
    export_graph(g, tmp_path)
    back = import_graph(tmp_path)
    assert back == g
    assert graph_stats(back).to_dict() == graph_stats(g).to_dict()


def test_import_unknown_node_reports_line(tmp_path):
    export_graph(build_graph([_rec("c1", laws=["L0"])], LAWS), tmp_path)
    with open(tmp_path / "edges.jsonl", "a", encoding="utf-8") as fh:
        fh.write('{"src": "c1", "dst": "L99", "rel": "BasedOn"}\n')
    with pytest.raises(GraphSchemaError, match=r"line 4: .*unknown node 'L99'"):
        import_graph(tmp_path)
