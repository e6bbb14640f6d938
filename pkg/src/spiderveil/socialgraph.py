"""Directed blogger graph with labeled edges and its measurement suite.

Nodes are blogger names; an edge src -> dst means dst engaged with src's
content (liked or reblogged it), so influence flows along edge direction.
Edges carry the set of note kinds that produced them.

Measurement conventions:
  * diameter ranges over ordered reachable pairs only,
  * clustering and modularity work on the undirected simplification,
  * betweenness is directed and unnormalized,
  * in-closeness of v = (# nodes reaching v) / (sum of distances into v).
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from xml.etree import ElementTree

from .corpus import NoteKind
from .errors import GraphFormatError, SelfLoopError
from .langmodel import Verdict


class CommunityGraph:
    """Directed graph; at most one edge per ordered pair, with a label set."""

    def __init__(self):
        self._nodes: dict[str, dict] = {}
        self._succ: dict[str, dict[str, set[NoteKind]]] = {}

    # -- construction -----------------------------------------------------

    def add_node(self, name: str, verdict: Verdict | None = None,
                 score: float | None = None) -> None:
        if not name:
            raise ValueError("node name must be non-empty")
        attrs = self._nodes.setdefault(name, {"verdict": None, "score": None})
        if verdict is not None:
            attrs["verdict"] = verdict
        if score is not None:
            attrs["score"] = score
        self._succ.setdefault(name, {})

    def add_link(self, src: str, dst: str, label: NoteKind) -> None:
        """Add (or relabel) the edge src -> dst.  Self-loops are rejected."""
        if src == dst:
            raise SelfLoopError(f"self-loop on {src!r} rejected")
        if not isinstance(label, NoteKind):
            raise ValueError(f"edge label must be a NoteKind, got {label!r}")
        self.add_node(src)
        self.add_node(dst)
        self._succ[src].setdefault(dst, set()).add(label)

    # -- accessors --------------------------------------------------------

    def nodes(self) -> list[str]:
        return list(self._nodes)

    def has_node(self, name: str) -> bool:
        return name in self._nodes

    def node_count(self) -> int:
        return len(self._nodes)

    def edge_count(self) -> int:
        return sum(len(targets) for targets in self._succ.values())

    def edges(self):
        """Yield (src, dst, frozenset of labels) in insertion order."""
        for src, targets in self._succ.items():
            for dst, labels in targets.items():
                yield src, dst, frozenset(labels)

    def has_edge(self, src: str, dst: str) -> bool:
        return dst in self._succ.get(src, {})

    def labels(self, src: str, dst: str) -> frozenset[NoteKind]:
        return frozenset(self._succ[src][dst])

    def successors(self, name: str) -> list[str]:
        return list(self._succ.get(name, {}))

    def out_degree(self, name: str) -> int:
        return len(self._succ.get(name, {}))

    def verdict(self, name: str) -> Verdict | None:
        return self._nodes[name]["verdict"]

    def score(self, name: str) -> float | None:
        return self._nodes[name]["score"]

    def undirected_adjacency(self) -> dict[str, set[str]]:
        """Neighbor sets of the undirected simplification (no self-loops)."""
        adjacency = {v: set() for v in self._nodes}
        for src, dst, _ in self.edges():
            adjacency[src].add(dst)
            adjacency[dst].add(src)
        return adjacency

    def project(self, label: NoteKind) -> "CommunityGraph":
        """Subgraph of edges carrying ``label``; only their endpoints remain."""
        sub = CommunityGraph()
        for src, dst, labels in self.edges():
            if label in labels:
                sub.add_node(src, self.verdict(src), self.score(src))
                sub.add_node(dst, self.verdict(dst), self.score(dst))
                sub.add_link(src, dst, label)
        return sub

    def copy(self) -> "CommunityGraph":
        dup = CommunityGraph()
        for name, attrs in self._nodes.items():
            dup.add_node(name, attrs["verdict"], attrs["score"])
        for src, dst, labels in self.edges():
            for label in labels:
                dup.add_link(src, dst, label)
        return dup

    def __eq__(self, other) -> bool:
        if not isinstance(other, CommunityGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._succ == other._succ

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        nodes = []
        for name, attrs in self._nodes.items():
            verdict = attrs["verdict"]
            nodes.append({
                "id": name,
                "verdict": verdict.value if verdict is not None else None,
                "score": attrs["score"],
            })
        edges = []
        for src, dst, labels in self.edges():
            edges.append({
                "src": src,
                "dst": dst,
                "labels": sorted(label.value for label in labels),
            })
        return {"nodes": nodes, "edges": edges}

    @classmethod
    def from_json_dict(cls, data: dict) -> "CommunityGraph":
        if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
            raise GraphFormatError("graph document needs 'nodes' and 'edges'")
        graph = cls()
        try:
            for node in data["nodes"]:
                verdict = node.get("verdict")
                graph.add_node(node["id"],
                               Verdict(verdict) if verdict is not None else None,
                               node.get("score"))
            for edge in data["edges"]:
                for label in edge["labels"]:
                    graph.add_link(edge["src"], edge["dst"], NoteKind(label))
        except (KeyError, TypeError, ValueError, SelfLoopError) as exc:
            raise GraphFormatError(f"bad graph document: {exc}") from exc
        return graph


# -- measurements ----------------------------------------------------------


def strongly_connected_components(graph: CommunityGraph) -> list[list[str]]:
    """Tarjan with an explicit stack; recursion would cap the graph size."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in graph.nodes():
        if root in index:
            continue
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(graph.successors(root)))]
        while work:
            node, successors = work[-1]
            descended = False
            for succ in successors:
                if succ not in index:
                    index[succ] = lowlink[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(graph.successors(succ))))
                    descended = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
    return components


def scc_count(graph: CommunityGraph) -> int:
    return len(strongly_connected_components(graph))


def _bfs_depths(start: str, adjacency: dict[str, list[str]]) -> dict[str, int]:
    depths = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in adjacency[node]:
            if nxt not in depths:
                depths[nxt] = depths[node] + 1
                queue.append(nxt)
    return depths


def diameter(graph: CommunityGraph) -> int:
    """Longest shortest directed path over reachable ordered pairs."""
    nodes = graph.nodes()
    if not nodes:
        raise ValueError("diameter of an empty graph is undefined")
    adjacency = {v: graph.successors(v) for v in nodes}
    best = 0
    for start in nodes:
        depths = _bfs_depths(start, adjacency)
        local = max(depths.values())
        if local > best:
            best = local
    return best


def avg_clustering(graph: CommunityGraph) -> float:
    """Mean local clustering coefficient on the undirected simplification.

    Nodes with fewer than two neighbors contribute 0.
    """
    nodes = graph.nodes()
    if not nodes:
        return 0.0
    adjacency = graph.undirected_adjacency()
    total = 0.0
    for node in nodes:
        neighbors = list(adjacency[node])
        degree = len(neighbors)
        if degree < 2:
            continue
        links = 0
        for i in range(degree):
            for j in range(i + 1, degree):
                if neighbors[j] in adjacency[neighbors[i]]:
                    links += 1
        total += 2.0 * links / (degree * (degree - 1))
    return total / len(nodes)


def betweenness(graph: CommunityGraph) -> dict[str, float]:
    """Unnormalized directed shortest-path betweenness (Brandes accumulation)."""
    nodes = graph.nodes()
    adjacency = {v: graph.successors(v) for v in nodes}
    centrality = {v: 0.0 for v in nodes}
    for source in nodes:
        order: list[str] = []
        preds: dict[str, list[str]] = {v: [] for v in nodes}
        sigma = {v: 0 for v in nodes}
        sigma[source] = 1
        dist = {v: -1 for v in nodes}
        dist[source] = 0
        queue = deque([source])
        while queue:
            node = queue.popleft()
            order.append(node)
            for nxt in adjacency[node]:
                if dist[nxt] < 0:
                    dist[nxt] = dist[node] + 1
                    queue.append(nxt)
                if dist[nxt] == dist[node] + 1:
                    sigma[nxt] += sigma[node]
                    preds[nxt].append(node)
        delta = {v: 0.0 for v in nodes}
        while order:
            node = order.pop()
            for pred in preds[node]:
                delta[pred] += sigma[pred] / sigma[node] * (1.0 + delta[node])
            if node != source:
                centrality[node] += delta[node]
    return centrality


def closeness_in(graph: CommunityGraph) -> dict[str, float]:
    """In-closeness: nodes reaching v divided by their summed distances."""
    nodes = graph.nodes()
    predecessors: dict[str, list[str]] = {v: [] for v in nodes}
    for src, dst, _ in graph.edges():
        predecessors[dst].append(src)
    closeness = {}
    for node in nodes:
        depths = _bfs_depths(node, predecessors)
        reaching = len(depths) - 1
        if reaching == 0:
            closeness[node] = 0.0
        else:
            closeness[node] = reaching / sum(depths.values())
    return closeness


@dataclass(frozen=True)
class Partition:
    """Community assignment: node name -> community index."""
    assignment: dict[str, int]

    def community_count(self) -> int:
        return len(set(self.assignment.values()))


def _undirected_edges(graph: CommunityGraph) -> set[tuple[str, str]]:
    edges = set()
    for src, dst, _ in graph.edges():
        edges.add((src, dst) if src <= dst else (dst, src))
    return edges


def modularity(graph: CommunityGraph, partition: Partition | dict) -> float:
    """Newman modularity of the partition on the undirected simplification."""
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    for node in graph.nodes():
        if node not in assignment:
            raise ValueError(f"partition misses node {node!r}")
    edges = _undirected_edges(graph)
    m = len(edges)
    if m == 0:
        raise ValueError("modularity is undefined for a graph without edges")
    adjacency = graph.undirected_adjacency()
    intra: dict[int, int] = {}
    degree_sum: dict[int, int] = {}
    for node in graph.nodes():
        community = assignment[node]
        degree_sum[community] = degree_sum.get(community, 0) + len(adjacency[node])
    for u, v in edges:
        if assignment[u] == assignment[v]:
            community = assignment[u]
            intra[community] = intra.get(community, 0) + 1
    quality = 0.0
    for community, degrees in degree_sum.items():
        quality += intra.get(community, 0) / m - (degrees / (2.0 * m)) ** 2
    return quality


def detect_communities(graph: CommunityGraph) -> Partition:
    """Greedy agglomeration: merge the community pair with the best
    modularity gain until no merge improves it.  Deterministic given node
    insertion order; the result never has lower modularity than singletons.
    """
    nodes = graph.nodes()
    community_of = {node: i for i, node in enumerate(nodes)}
    adjacency = graph.undirected_adjacency()
    edges = _undirected_edges(graph)
    m = len(edges)
    if m == 0:
        return Partition(assignment=community_of)

    degree = {i: len(adjacency[node]) for i, node in enumerate(nodes)}
    between: dict[tuple[int, int], int] = {}
    for u, v in edges:
        a, b = community_of[u], community_of[v]
        if a != b:
            key = (a, b) if a < b else (b, a)
            between[key] = between.get(key, 0) + 1

    two_m = 2.0 * m
    while between:
        best_gain = 1e-12
        best_pair = None
        for pair in sorted(between):
            a, b = pair
            gain = between[pair] / m - 2.0 * (degree[a] / two_m) * (degree[b] / two_m)
            if gain > best_gain:
                best_gain = gain
                best_pair = pair
        if best_pair is None:
            break
        a, b = best_pair
        degree[a] += degree.pop(b)
        for node, community in community_of.items():
            if community == b:
                community_of[node] = a
        merged: dict[tuple[int, int], int] = {}
        for (x, y), count in between.items():
            x = a if x == b else x
            y = a if y == b else y
            if x == y:
                continue
            key = (x, y) if x < y else (y, x)
            merged[key] = merged.get(key, 0) + count
        between = merged

    relabel: dict[int, int] = {}
    for node in nodes:
        community = community_of[node]
        if community not in relabel:
            relabel[community] = len(relabel)
        community_of[node] = relabel[community]
    return Partition(assignment=community_of)


@dataclass(frozen=True)
class GraphMeasurements:
    """Summary statistics of one community graph."""
    node_count: int
    edge_count: int
    diameter: int
    scc_count: int
    avg_clustering: float
    modularity: float
    mean_in_betweenness: float
    mean_in_closeness: float

    def to_json_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "diameter": self.diameter,
            "scc_count": self.scc_count,
            "avg_clustering": self.avg_clustering,
            "modularity": self.modularity,
            "mean_in_betweenness": self.mean_in_betweenness,
            "mean_in_closeness": self.mean_in_closeness,
        }

    def format_table(self) -> str:
        rows = [
            ("nodes", str(self.node_count)),
            ("edges", str(self.edge_count)),
            ("diameter", str(self.diameter)),
            ("strongly connected components", str(self.scc_count)),
            ("average clustering", f"{self.avg_clustering:.4f}"),
            ("modularity", f"{self.modularity:.4f}"),
            ("mean in-betweenness", f"{self.mean_in_betweenness:.4f}"),
            ("mean in-closeness", f"{self.mean_in_closeness:.4f}"),
        ]
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)


def measure(graph: CommunityGraph) -> GraphMeasurements:
    """All measurements at once.  A graph without edges gets modularity 0."""
    if graph.node_count() == 0:
        raise ValueError("cannot measure an empty graph")
    if _undirected_edges(graph):
        quality = modularity(graph, detect_communities(graph))
    else:
        quality = 0.0
    central = betweenness(graph)
    closeness = closeness_in(graph)
    count = graph.node_count()
    return GraphMeasurements(
        node_count=count,
        edge_count=graph.edge_count(),
        diameter=diameter(graph),
        scc_count=scc_count(graph),
        avg_clustering=avg_clustering(graph),
        modularity=quality,
        mean_in_betweenness=sum(central.values()) / count,
        mean_in_closeness=sum(closeness.values()) / count,
    )


# -- exports ----------------------------------------------------------------

_PLAIN_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$|^-?(\.\d+|\d+(\.\d*)?)$")


def _dot_id(name: str) -> str:
    if _PLAIN_ID_RE.match(name):
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _to_dot(graph: CommunityGraph) -> str:
    lines = ["digraph community {"]
    for name in graph.nodes():
        attrs = []
        verdict = graph.verdict(name)
        if verdict is not None:
            attrs.append(f'verdict="{verdict.value}"')
        score = graph.score(name)
        if score is not None:
            attrs.append(f'score="{score!r}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_dot_id(name)}{suffix};")
    for src, dst, labels in graph.edges():
        joined = "|".join(sorted(label.value for label in labels))
        lines.append(f'  {_dot_id(src)} -> {_dot_id(dst)} [label="{joined}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _to_graphml(graph: CommunityGraph) -> bytes:
    ns = "http://graphml.graphdrawing.org/xmlns"
    ElementTree.register_namespace("", ns)
    root = ElementTree.Element(f"{{{ns}}}graphml")
    for key_id, target, name, kind in (
            ("d_verdict", "node", "verdict", "string"),
            ("d_score", "node", "score", "double"),
            ("d_labels", "edge", "labels", "string")):
        key = ElementTree.SubElement(root, f"{{{ns}}}key")
        key.set("id", key_id)
        key.set("for", target)
        key.set("attr.name", name)
        key.set("attr.type", kind)
    container = ElementTree.SubElement(root, f"{{{ns}}}graph")
    container.set("id", "community")
    container.set("edgedefault", "directed")
    for name in graph.nodes():
        node = ElementTree.SubElement(container, f"{{{ns}}}node")
        node.set("id", name)
        verdict = graph.verdict(name)
        if verdict is not None:
            data = ElementTree.SubElement(node, f"{{{ns}}}data")
            data.set("key", "d_verdict")
            data.text = verdict.value
        score = graph.score(name)
        if score is not None:
            data = ElementTree.SubElement(node, f"{{{ns}}}data")
            data.set("key", "d_score")
            data.text = repr(score)
    for src, dst, labels in graph.edges():
        edge = ElementTree.SubElement(container, f"{{{ns}}}edge")
        edge.set("source", src)
        edge.set("target", dst)
        data = ElementTree.SubElement(edge, f"{{{ns}}}data")
        data.set("key", "d_labels")
        data.text = "|".join(sorted(label.value for label in labels))
    return ElementTree.tostring(root, encoding="UTF-8", xml_declaration=True)


def export_graph(graph: CommunityGraph, fmt: str) -> bytes:
    """Serialize to one of: json (edge list), graphml, dot."""
    token = fmt.strip().lower()
    if token in ("json", "jsonedgelist", "json-edge-list"):
        payload = json.dumps(graph.to_json_dict(), sort_keys=True,
                             separators=(",", ":"), ensure_ascii=True)
        return payload.encode("utf-8")
    if token == "graphml":
        return _to_graphml(graph)
    if token == "dot":
        return _to_dot(graph).encode("utf-8")
    raise GraphFormatError(f"unsupported export format {fmt!r}")


def import_json_edge_list(data) -> CommunityGraph:
    """Inverse of the json export; accepts bytes, str, or a parsed dict."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"bad JSON edge list: {exc}") from exc
    return CommunityGraph.from_json_dict(data)
