"""
Typed heterogeneous graph of cases, courts, domains and laws.

Four node types and three relation types, each relation with a fixed
endpoint schema::

    Court  --Decide-->   Case
    Case   --BelongTo--> Domain
    Case   --BasedOn-->  Law

Edges are stored in their schema direction but meta-path traversal and
connectivity treat them as undirected. Every Case node carries exactly one
Decide and one BelongTo edge; repeated citations of one law by one case
collapse into a single BasedOn edge with a ``count`` attribute.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import LawEntry
from .errors import GraphSchemaError, UnknownDomainError, UnknownNodeError
from .extract import ExtractionRecord


class NodeType(str, Enum):
    CASE = "Case"
    COURT = "Court"
    DOMAIN = "Domain"
    LAW = "Law"


class RelationType(str, Enum):
    DECIDE = "Decide"
    BELONG_TO = "BelongTo"
    BASED_ON = "BasedOn"


SCHEMA: dict[RelationType, tuple[NodeType, NodeType]] = {
    RelationType.DECIDE: (NodeType.COURT, NodeType.CASE),
    RelationType.BELONG_TO: (NodeType.CASE, NodeType.DOMAIN),
    RelationType.BASED_ON: (NodeType.CASE, NodeType.LAW),
}
# Relations a Case node must have exactly once.
_CASE_SINGLETON_RELATIONS = (RelationType.DECIDE, RelationType.BELONG_TO)


def normalize_name(name: str) -> str:
    """Identity key for court and domain names."""
    return re.sub(r"\s+", " ", unicodedata.normalize("NFC", name).casefold()).strip()


def entity_node_id(node_type: NodeType, name: str) -> str:
    digest = hashlib.sha1(f"{node_type.value}\x00{normalize_name(name)}".encode("utf-8"))
    return f"{node_type.value.lower()}:{digest.hexdigest()[:16]}"


class HeteroGraph:
    """Node/edge store that rejects anything outside the relation schema."""

    def __init__(self):
        self.nodes: dict[str, tuple[NodeType, dict]] = {}
        self.edges: dict[tuple[str, str, RelationType], int] = {}
        # rel -> node -> neighbours, in schema direction and reversed.
        self._out: dict[RelationType, dict[str, set[str]]] = {r: {} for r in RelationType}
        self._in: dict[RelationType, dict[str, set[str]]] = {r: {} for r in RelationType}

    # -- construction ----------------------------------------------------

    def add_node(self, node_id: str, node_type: NodeType, **attrs) -> None:
        node_type = NodeType(node_type)
        existing = self.nodes.get(node_id)
        if existing is not None:
            if existing[0] is not node_type:
                raise GraphSchemaError(
                    f"node {node_id!r} already exists as {existing[0].value}, not {node_type.value}")
            existing[1].update(attrs)
            return
        self.nodes[node_id] = (node_type, dict(attrs))

    def add_edge(self, src: str, dst: str, rel: RelationType, count: int = 1) -> None:
        rel = RelationType(rel)
        src_type, dst_type = SCHEMA[rel]
        desc = f"{rel.value} edge {src!r} -> {dst!r}"
        for node_id, expected in ((src, src_type), (dst, dst_type)):
            if node_id not in self.nodes:
                raise GraphSchemaError(f"{desc}: unknown node {node_id!r}")
            actual = self.nodes[node_id][0]
            if actual is not expected:
                raise GraphSchemaError(
                    f"{desc}: {node_id!r} is {actual.value}, expected {expected.value}")
        if count < 1:
            raise GraphSchemaError(f"{desc}: count must be >= 1")
        key = (src, dst, rel)
        if key in self.edges:
            self.edges[key] += count
            return
        case_end = src if src_type is NodeType.CASE else dst
        if rel in _CASE_SINGLETON_RELATIONS and self.degree(case_end, rel):
            raise GraphSchemaError(f"{desc}: case {case_end!r} already has a {rel.value} edge")
        self.edges[key] = count
        self._out[rel].setdefault(src, set()).add(dst)
        self._in[rel].setdefault(dst, set()).add(src)

    def validate(self) -> None:
        """Check that every Case has its Decide and BelongTo edge."""
        for node_id in self.nodes_of_type(NodeType.CASE):
            for rel in _CASE_SINGLETON_RELATIONS:
                if self.degree(node_id, rel) != 1:
                    raise GraphSchemaError(f"case {node_id!r} has no {rel.value} edge")

    # -- access ----------------------------------------------------------

    def node_type(self, node_id: str) -> NodeType:
        try:
            return self.nodes[node_id][0]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node_id!r}") from None

    def attrs(self, node_id: str) -> dict:
        self.node_type(node_id)
        return self.nodes[node_id][1]

    def nodes_of_type(self, node_type: NodeType) -> list[str]:
        return [n for n, (t, _) in self.nodes.items() if t is node_type]

    def degree(self, node_id: str, rel: RelationType) -> int:
        return len(self._out[rel].get(node_id, ())) + len(self._in[rel].get(node_id, ()))

    def neighbors(self, node_id: str, rel: RelationType) -> set[str]:
        """Undirected neighbours of ``node_id`` through ``rel`` edges."""
        return self._out[rel].get(node_id, set()) | self._in[rel].get(node_id, set())

    def laws_of(self, case_id: str) -> frozenset[str]:
        if self.node_type(case_id) is not NodeType.CASE:
            raise GraphSchemaError(f"{case_id!r} is not a Case node")
        return frozenset(self._out[RelationType.BASED_ON].get(case_id, ()))

    def domain_of(self, case_id: str) -> str:
        (domain,) = self._out[RelationType.BELONG_TO][case_id]
        return domain

    def court_of(self, case_id: str) -> str:
        (court,) = self._in[RelationType.DECIDE][case_id]
        return court

    def find_domain(self, domain_name: str) -> str:
        node_id = entity_node_id(NodeType.DOMAIN, domain_name)
        if self.nodes.get(node_id, (None,))[0] is not NodeType.DOMAIN:
            raise UnknownDomainError(f"unknown domain {domain_name!r}")
        return node_id

    def cases_in_domain(self, domain_id: str) -> set[str]:
        return set(self._in[RelationType.BELONG_TO].get(domain_id, ()))

    def undirected_adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for src, dst, _ in self.edges:
            adj[src].add(dst)
            adj[dst].add(src)
        return adj

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeteroGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __repr__(self) -> str:
        return f"<HeteroGraph |V|={len(self.nodes)} |E|={len(self.edges)}>"


# ---------------------------------------------------------------------------
# Construction from extraction output
# ---------------------------------------------------------------------------

def build_graph(records: Iterable[ExtractionRecord], laws: Sequence[LawEntry]) -> HeteroGraph:
    g = HeteroGraph()
    for law in laws:
        g.add_node(law.law_id, NodeType.LAW, law_name=law.law_name, year=law.year)
    for rec in records:
        if not rec.court_name.strip():
            raise GraphSchemaError(f"case {rec.case_id!r}: empty court name")
        if not rec.domain_name.strip():
            raise GraphSchemaError(f"case {rec.case_id!r}: empty domain name")
        if rec.case_id in g.nodes:
            raise GraphSchemaError(f"case {rec.case_id!r}: node id already in use")
        g.add_node(rec.case_id, NodeType.CASE, case_number=rec.case_number,
                   date=rec.date.isoformat() if rec.date else None)
        court = entity_node_id(NodeType.COURT, rec.court_name)
        if court not in g.nodes:
            g.add_node(court, NodeType.COURT, court_name=rec.court_name,
                       court_level=rec.court_level.value)
        domain = entity_node_id(NodeType.DOMAIN, rec.domain_name)
        if domain not in g.nodes:
            g.add_node(domain, NodeType.DOMAIN, domain_name=rec.domain_name)
        subdomains = g.attrs(domain).setdefault("subdomains", [])
        if rec.subdomain and rec.subdomain not in subdomains:
            subdomains.append(rec.subdomain)
        g.add_edge(court, rec.case_id, RelationType.DECIDE)
        g.add_edge(rec.case_id, domain, RelationType.BELONG_TO)
        counts = rec.citation_counts
        for law_id in sorted(rec.cited_laws):
            g.add_edge(rec.case_id, law_id, RelationType.BASED_ON, count=counts.get(law_id, 1))
    g.validate()
    return g


# ---------------------------------------------------------------------------
# Meta-paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetaPath:
    legs: tuple[tuple[NodeType, RelationType, NodeType], ...]
    name: str = ""

    def __post_init__(self):
        if not self.legs:
            raise ValueError("meta-path needs at least one leg")
        for i, (a, rel, b) in enumerate(self.legs):
            if {a, b} != set(SCHEMA[rel]) or a is b:
                raise ValueError(f"leg {i}: {a.value}-{rel.value}-{b.value} not in schema")
            if i and self.legs[i - 1][2] is not a:
                raise ValueError(f"leg {i} starts at {a.value}, previous ended at {self.legs[i - 1][2].value}")

    @property
    def start(self) -> NodeType:
        return self.legs[0][0]


CCC = MetaPath(((NodeType.CASE, RelationType.DECIDE, NodeType.COURT),
                (NodeType.COURT, RelationType.DECIDE, NodeType.CASE)), name="CCC")
CDC = MetaPath(((NodeType.CASE, RelationType.BELONG_TO, NodeType.DOMAIN),
                (NodeType.DOMAIN, RelationType.BELONG_TO, NodeType.CASE)), name="CDC")


def meta_path_neighbors(g: HeteroGraph, node_id: str, path: MetaPath) -> set[str]:
    """Terminal nodes reachable from ``node_id`` along ``path``, minus the start."""
    if g.node_type(node_id) is not path.start:
        raise GraphSchemaError(
            f"{node_id!r} is {g.node_type(node_id).value}, path starts at {path.start.value}")
    frontier = {node_id}
    for _, rel, target in path.legs:
        nxt: set[str] = set()
        for n in frontier:
            nxt.update(m for m in g.neighbors(n, rel) if g.nodes[m][0] is target)
        frontier = nxt
    frontier.discard(node_id)
    return frontier


# ---------------------------------------------------------------------------
# Connectivity and statistics
# ---------------------------------------------------------------------------

def connected_components(g: HeteroGraph) -> list[set[str]]:
    """Weakly connected components, largest first, ties by smallest member."""
    adj = g.undirected_adjacency()
    seen: set[str] = set()
    comps: list[set[str]] = []
    for start in adj:
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        queue = deque([start])
        while queue:
            for m in adj[queue.popleft()]:
                if m not in seen:
                    seen.add(m)
                    comp.add(m)
                    queue.append(m)
        comps.append(comp)
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def density(num_edges: int, num_nodes: int, exact: bool = False):
    """|E| / (|V| (|V| - 1)); None when |V| < 2."""
    if num_nodes < 2:
        return None
    value = Fraction(num_edges, num_nodes * (num_nodes - 1))
    return value if exact else num_edges / (num_nodes * (num_nodes - 1))


def undirected_density(num_edges: int, num_nodes: int, exact: bool = False):
    """2|E| / (|V| (|V| - 1)); None when |V| < 2."""
    if num_nodes < 2:
        return None
    value = Fraction(2 * num_edges, num_nodes * (num_nodes - 1))
    return value if exact else 2 * num_edges / (num_nodes * (num_nodes - 1))


def edge_ratio(num_edges: int, num_nodes: int, exact: bool = False):
    """|E| / |V|; None for an empty graph."""
    if num_nodes == 0:
        return None
    return Fraction(num_edges, num_nodes) if exact else num_edges / num_nodes


@dataclass
class GraphStats:
    node_counts: dict[str, int]
    edge_counts: dict[str, int]
    num_nodes: int
    num_edges: int
    density: float | None
    undirected_density: float | None
    ratio: float | None
    num_components: int
    component_sizes: list[int] = field(default_factory=list)
    mean_based_on_degree: float | None = None

    def to_dict(self) -> dict:
        return {
            "node_counts": self.node_counts,
            "edge_counts": self.edge_counts,
            "total_nodes": self.num_nodes,
            "total_edges": self.num_edges,
            "density": self.density,
            "undirected_density": self.undirected_density,
            "ratio": self.ratio,
            "connected_components": self.num_components,
            "component_sizes": self.component_sizes,
            "mean_based_on_degree": self.mean_based_on_degree,
        }


def graph_stats(g: HeteroGraph) -> GraphStats:
    node_counts = Counter(t.value for t, _ in g.nodes.values())
    edge_counts = Counter(rel.value for _, _, rel in g.edges)
    comps = connected_components(g)
    v, e = len(g.nodes), len(g.edges)
    n_cases = node_counts.get(NodeType.CASE.value, 0)
    return GraphStats(
        node_counts={t.value: node_counts.get(t.value, 0) for t in NodeType},
        edge_counts={r.value: edge_counts.get(r.value, 0) for r in RelationType},
        num_nodes=v,
        num_edges=e,
        density=density(e, v),
        undirected_density=undirected_density(e, v),
        ratio=edge_ratio(e, v),
        num_components=len(comps),
        component_sizes=[len(c) for c in comps],
        mean_based_on_degree=(edge_counts.get(RelationType.BASED_ON.value, 0) / n_cases
                              if n_cases else None),
    )


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def export_graph(g: HeteroGraph, directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    nodes_path, edges_path = directory / "nodes.jsonl", directory / "edges.jsonl"
    with open(nodes_path, "w", encoding="utf-8", newline="\n") as fh:
        for node_id, (t, attrs) in g.nodes.items():
            fh.write(json.dumps({"id": node_id, "type": t.value, "attrs": attrs}, ensure_ascii=False))
            fh.write("\n")
    with open(edges_path, "w", encoding="utf-8", newline="\n") as fh:
        for (src, dst, rel), count in g.edges.items():
            fh.write(json.dumps({"src": src, "dst": dst, "rel": rel.value, "count": count},
                                ensure_ascii=False))
            fh.write("\n")
    return nodes_path, edges_path


def _read_jsonl(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise GraphSchemaError(f"{path.name}: malformed JSON ({exc.msg})", line=lineno) from None


def import_graph(directory: str | Path) -> HeteroGraph:
    directory = Path(directory)
    g = HeteroGraph()
    for lineno, obj in _read_jsonl(directory / "nodes.jsonl"):
        try:
            node_id, node_type = obj["id"], NodeType(obj["type"])
        except (KeyError, ValueError, TypeError) as exc:
            raise GraphSchemaError(f"nodes.jsonl: bad node ({exc})", line=lineno) from None
        if node_id in g.nodes:
            raise GraphSchemaError(f"nodes.jsonl: duplicate node {node_id!r}", line=lineno)
        g.add_node(node_id, node_type, **(obj.get("attrs") or {}))
    for lineno, obj in _read_jsonl(directory / "edges.jsonl"):
        try:
            src, dst, rel = obj["src"], obj["dst"], RelationType(obj["rel"])
            count = int(obj.get("count", 1))
        except (KeyError, ValueError, TypeError) as exc:
            raise GraphSchemaError(f"edges.jsonl: bad edge ({exc})", line=lineno) from None
        if (src, dst, rel) in g.edges:
            raise GraphSchemaError(f"edges.jsonl: duplicate edge {src!r} -> {dst!r}", line=lineno)
        try:
            g.add_edge(src, dst, rel, count=count)
        except GraphSchemaError as exc:
            raise GraphSchemaError(f"edges.jsonl: {exc}", line=lineno) from None
    try:
        g.validate()
    except GraphSchemaError as exc:
        raise GraphSchemaError(f"edges.jsonl: {exc}") from None
    return g
