"""
Relevant-law determination and the 11-run evaluation harness.

Four methods, all driven by BM25:

1. case-law: one part of the query case is searched against the law corpus
   and the top law is returned.
2. mixed case-law: method 1 over content, judgment and decision, with the
   three results aggregated by union or intersection.
3. case-case + graph: the most similar graph cases are found by BM25 over
   case texts; their BasedOn laws are read from the graph and aggregated.
4. domain case-case + graph: as 3, but the candidates are restricted to the
   cases sharing the query's domain (the Case-Domain-Case meta-path).
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .bm25 import Bm25Index, Bm25Params, build_index, top_k
from .corpus import CaseRecord, LawEntry
from .errors import RetrievalError, UnknownDomainError
from .extract import LawMatchConfig, LawMatcher, extract_all, extract_meta
from .kgraph import HeteroGraph, NodeType, build_graph

logger = logging.getLogger(__name__)


class QuerySection(str, Enum):
    CONTENT = "content"
    JUDGMENT = "judgment"
    DECISION = "decision"


class AggMode(str, Enum):
    UNION = "union"
    INTERSECTION = "intersection"


def aggregate(sets: Sequence[Iterable[str]], mode: AggMode | str) -> frozenset[str]:
    """Fold law-id sets with union or intersection.

    An empty intersection is a legitimate (empty) answer, not an error.
    """
    if not sets:
        raise RetrievalError("aggregate needs at least one set")
    mode = AggMode(mode)
    op = frozenset.union if mode is AggMode.UNION else frozenset.intersection
    return reduce(op, (frozenset(s) for s in sets))


# ---------------------------------------------------------------------------
# Indexes
# ---------------------------------------------------------------------------

def law_document(law: LawEntry) -> str:
    return "\n".join([law.law_name, *law.aliases, law.body])


def build_law_index(laws: Sequence[LawEntry]) -> Bm25Index:
    """BM25 index over law names, aliases and (when present) law bodies."""
    return build_index((law.law_id, law_document(law)) for law in laws)


ALL_SECTIONS = ("introduction", "content", "judgment", "decision")


def case_text(case: CaseRecord, sections: Sequence[str] = ALL_SECTIONS) -> str:
    return "\n".join(case.sections.get(s) for s in sections)


def build_case_index(cases: Iterable[CaseRecord],
                     sections: Sequence[str] = ALL_SECTIONS) -> Bm25Index:
    return build_index((c.case_id, case_text(c, sections)) for c in cases)


# ---------------------------------------------------------------------------
# Methods
# ---------------------------------------------------------------------------

def method1_case_law(case: CaseRecord, section: QuerySection | str, law_index: Bm25Index,
                     params: Bm25Params = Bm25Params()) -> frozenset[str]:
    text = case.sections.get(QuerySection(section).value)
    if not text.strip():
        return frozenset()
    hits = top_k(law_index, text, 1, params)
    return frozenset(h.doc_id for h in hits)


def method2_mixed(case: CaseRecord, law_index: Bm25Index, mode: AggMode | str,
                  params: Bm25Params = Bm25Params()) -> frozenset[str]:
    return aggregate([method1_case_law(case, s, law_index, params) for s in QuerySection], mode)


def _laws_of_candidates(graph: HeteroGraph, candidates: Sequence[str],
                        mode: AggMode | str) -> frozenset[str]:
    if not candidates:
        return frozenset()
    sets = []
    for cid in candidates:
        if cid not in graph.nodes or graph.nodes[cid][0] is not NodeType.CASE:
            raise RetrievalError(f"candidate {cid!r} from the case index is not a Case node in the graph")
        sets.append(graph.laws_of(cid))
    return aggregate(sets, mode)


def similar_cases(case: CaseRecord, case_index: Bm25Index, k: int,
                  params: Bm25Params = Bm25Params(),
                  restrict_to: Iterable[str] | None = None,
                  sections: Sequence[str] = ALL_SECTIONS) -> list[str]:
    if k < 1:
        raise RetrievalError("k must be >= 1")
    # The query itself never counts as its own neighbour.
    extra = 1 if case.case_id in case_index else 0
    hits = top_k(case_index, case_text(case, sections), k + extra, params, restrict_to=restrict_to)
    return [h.doc_id for h in hits if h.doc_id != case.case_id][:k]


def method3_case_case(case: CaseRecord, case_index: Bm25Index, graph: HeteroGraph, k: int,
                      mode: AggMode | str = AggMode.UNION,
                      params: Bm25Params = Bm25Params(),
                      sections: Sequence[str] = ALL_SECTIONS) -> frozenset[str]:
    candidates = similar_cases(case, case_index, k, params, sections=sections)
    return _laws_of_candidates(graph, candidates, mode)


def domain_candidates(case: CaseRecord, graph: HeteroGraph, case_index: Bm25Index,
                      domain_name: str | None = None) -> set[str]:
    """Graph cases sharing the query's domain (the CDC meta-path from its Domain node)."""
    if domain_name is None:
        domain_name = extract_meta(case).domain_name
    domain_id = graph.find_domain(domain_name)
    # Equal to {c} | meta_path_neighbors(graph, c, CDC) for any member c.
    members = graph.cases_in_domain(domain_id)
    missing = [m for m in members if m not in case_index]
    if missing:
        raise RetrievalError(f"graph case {sorted(missing)[0]!r} is not in the case index")
    return members


def method4_domain_case_case(case: CaseRecord, case_index: Bm25Index, graph: HeteroGraph, k: int,
                             mode: AggMode | str = AggMode.UNION,
                             params: Bm25Params = Bm25Params(),
                             domain_name: str | None = None,
                             sections: Sequence[str] = ALL_SECTIONS) -> frozenset[str]:
    members = domain_candidates(case, graph, case_index, domain_name)
    if not members:
        return frozenset()
    candidates = similar_cases(case, case_index, k, params, restrict_to=members, sections=sections)
    return _laws_of_candidates(graph, candidates, mode)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    f1: float | Fraction
    recall: float | Fraction
    precision: float | Fraction


def query_metrics(pred: Iterable[str], gold: Iterable[str]) -> Metrics:
    """Exact per-query P/R/F1; an empty prediction scores zero."""
    pred, gold = frozenset(pred), frozenset(gold)
    if not gold:
        raise RetrievalError("gold set is empty")
    hit = len(pred & gold)
    p = Fraction(hit, len(pred)) if pred else Fraction(0)
    r = Fraction(hit, len(gold))
    f1 = 2 * p * r / (p + r) if p + r else Fraction(0)
    return Metrics(f1=f1, recall=r, precision=p)


def evaluate(predictions: Mapping[str, Iterable[str]], gold: Mapping[str, Iterable[str]],
             exact: bool = False) -> Metrics:
    """Macro-averaged (F1, recall, precision) over the predicted queries."""
    if not predictions:
        zero = Fraction(0) if exact else 0.0
        return Metrics(zero, zero, zero)
    per_query = []
    for case_id in sorted(predictions):
        if case_id not in gold:
            raise RetrievalError(f"no gold labels for case {case_id!r}")
        per_query.append(query_metrics(predictions[case_id], gold[case_id]))
    n = len(per_query)
    f1 = sum((m.f1 for m in per_query), Fraction(0)) / n
    r = sum((m.recall for m in per_query), Fraction(0)) / n
    p = sum((m.precision for m in per_query), Fraction(0)) / n
    if exact:
        return Metrics(f1, r, p)
    return Metrics(float(f1), float(r), float(p))


# ---------------------------------------------------------------------------
# The 11 runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunSpec:
    run: int
    method: int
    description: str
    section: QuerySection | None = None
    k: int | None = None
    agg: AggMode | None = None


RUNS: tuple[RunSpec, ...] = (
    RunSpec(1, 1, "Content of the case", section=QuerySection.CONTENT),
    RunSpec(2, 1, "Court's judgment", section=QuerySection.JUDGMENT),
    RunSpec(3, 1, "Court's decision", section=QuerySection.DECISION),
    RunSpec(4, 2, "Mix 3 queries (Union)", agg=AggMode.UNION),
    RunSpec(5, 2, "Mix 3 queries (Intersection)", agg=AggMode.INTERSECTION),
    RunSpec(6, 3, "Top-1 similar case", k=1, agg=AggMode.UNION),
    RunSpec(7, 3, "Top-2 similar cases (Union)", k=2, agg=AggMode.UNION),
    RunSpec(8, 3, "Top-2 similar cases (Intersection)", k=2, agg=AggMode.INTERSECTION),
    RunSpec(9, 4, "Top-1 similar case", k=1, agg=AggMode.UNION),
    RunSpec(10, 4, "Top-2 similar cases (Union)", k=2, agg=AggMode.UNION),
    RunSpec(11, 4, "Top-2 similar cases (Intersection)", k=2, agg=AggMode.INTERSECTION),
)


@dataclass
class RunResult:
    spec: RunSpec
    f1: float
    recall: float
    precision: float
    predictions: dict[str, frozenset[str]] = field(default_factory=dict)

    def row(self) -> dict:
        return {
            "run": self.spec.run,
            "method": self.spec.method,
            "description": self.spec.description,
            "f1": round(self.f1, 6),
            "recall": round(self.recall, 6),
            "precision": round(self.precision, 6),
        }


@dataclass(frozen=True)
class HarnessParams:
    bm25: Bm25Params = Bm25Params()
    match: LawMatchConfig = LawMatchConfig()
    query_sections: tuple[str, ...] = ALL_SECTIONS


@dataclass(frozen=True)
class HoldoutSplit:
    test_ids: tuple[str, ...]
    graph_ids: tuple[str, ...]

    def __post_init__(self):
        overlap = set(self.test_ids) & set(self.graph_ids)
        if overlap:
            raise RetrievalError(f"holdout overlaps graph set: {sorted(overlap)[:5]}")


def select_holdout(case_ids: Sequence[str], size: int, seed: int) -> HoldoutSplit:
    """Seeded random split of ``size`` test cases; the rest build the graph."""
    if not 0 < size < len(case_ids):
        raise RetrievalError(f"holdout size {size} must be in (0, {len(case_ids)})")
    ordered = sorted(case_ids)
    test = set(random.Random(seed).sample(ordered, size))
    return HoldoutSplit(
        test_ids=tuple(c for c in ordered if c in test),
        graph_ids=tuple(c for c in ordered if c not in test),
    )


@dataclass
class HarnessReport:
    results: list[RunResult]
    split: HoldoutSplit
    graph: HeteroGraph
    gold: dict[str, frozenset[str]]

    def rows(self) -> list[dict]:
        return [r.row() for r in self.results]

    def prediction_rows(self) -> list[dict]:
        out = []
        for r in self.results:
            for cid in sorted(r.predictions):
                out.append({
                    "case_id": cid,
                    "run": r.spec.run,
                    "predicted_laws": sorted(r.predictions[cid]),
                    "gold_laws": sorted(self.gold[cid]),
                })
        return out


def check_holdout_integrity(split: HoldoutSplit, graph: HeteroGraph, case_index: Bm25Index) -> None:
    leaked = [cid for cid in split.test_ids if cid in graph.nodes or cid in case_index]
    if leaked:
        raise RetrievalError(f"test case {leaked[0]!r} leaked into the graph or case index")


def run_all(cases: Sequence[CaseRecord], laws: Sequence[LawEntry],
            gold: Mapping[str, Iterable[str]], split: HoldoutSplit,
            params: HarnessParams = HarnessParams(),
            runs: Sequence[RunSpec] = RUNS) -> HarnessReport:
    """Build graph and indexes from the graph split, then score every run on the test split."""
    by_id = {c.case_id: c for c in cases}
    unknown = [cid for cid in (*split.test_ids, *split.graph_ids) if cid not in by_id]
    if unknown:
        raise RetrievalError(f"split references unknown case {unknown[0]!r}")
    gold = {cid: frozenset(ids) for cid, ids in gold.items()}
    missing = [cid for cid in split.test_ids if cid not in gold]
    if missing:
        raise RetrievalError(f"no gold labels for test case {missing[0]!r}")

    matcher = LawMatcher(laws, params.match)
    graph_cases = [by_id[cid] for cid in split.graph_ids]
    records = [extract_all(c, matcher, params.match) for c in graph_cases]
    graph = build_graph(records, laws)
    case_index = build_case_index(graph_cases, params.query_sections)
    law_index = build_law_index(laws)
    check_holdout_integrity(split, graph, case_index)
    logger.info("graph: %d nodes, %d edges; %d test queries", len(graph.nodes), len(graph.edges),
                len(split.test_ids))

    preds: dict[int, dict[str, frozenset[str]]] = {r.run: {} for r in runs}
    needs = {r.method for r in runs}
    bm = params.bm25
    for cid in split.test_ids:
        case = by_id[cid]
        m1 = {}
        if needs & {1, 2}:
            m1 = {s: method1_case_law(case, s, law_index, bm) for s in QuerySection}
        top_global: list[str] = []
        if 3 in needs:
            top_global = similar_cases(case, case_index, 2, bm, sections=params.query_sections)
        top_domain: list[str] = []
        if 4 in needs:
            try:
                members = domain_candidates(case, graph, case_index)
            except UnknownDomainError:
                logger.warning("case %s: domain not in graph, method 4 predicts nothing", cid)
                members = set()
            if members:
                top_domain = similar_cases(case, case_index, 2, bm, restrict_to=members,
                                           sections=params.query_sections)
        for spec in runs:
            if spec.method == 1:
                pred = m1[spec.section]
            elif spec.method == 2:
                pred = aggregate(list(m1.values()), spec.agg)
            else:
                cands = top_global if spec.method == 3 else top_domain
                pred = _laws_of_candidates(graph, cands[: spec.k], spec.agg)
            preds[spec.run][cid] = pred

    results = []
    for spec in runs:
        m = evaluate(preds[spec.run], gold)
        results.append(RunResult(spec, m.f1, m.recall, m.precision, preds[spec.run]))
    return HarnessReport(results=results, split=split, graph=graph,
                         gold={cid: gold[cid] for cid in split.test_ids})


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

RESULT_FIELDS = ("run", "method", "description", "f1", "recall", "precision")


def format_results(rows: Sequence[dict], fmt: str = "tsv") -> str:
    if fmt == "json":
        return json.dumps(list(rows), ensure_ascii=False, indent=2)
    if fmt != "tsv":
        raise ValueError(f"unknown format {fmt!r}")
    lines = ["\t".join(RESULT_FIELDS)]
    for row in rows:
        lines.append("\t".join(str(row[f]) for f in RESULT_FIELDS))
    return "\n".join(lines) + "\n"


def write_predictions(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")
