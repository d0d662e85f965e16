"""Implicit relation prediction.

When the assembled query graph is disconnected (a relation keyword was
omitted), every pair of connected components gets a candidate edge labeled
with the cheapest (vertex, vertex, predicate) triple across the component
boundary, and a minimum spanning tree over the components supplies the
predicted edges.

Vertex sets that no assembled edge touched never had their candidate chosen
by cost; for those, prediction scans the whole candidate set and fixes the
vertex to the argmin of the first spanning-tree edge that reaches it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .assembler import FREE_VAR, AssembledEdge, QueryGraph


def connected_components(q: QueryGraph) -> list[list[int]]:
    """Partition of vertex-set indices by undirected edge reachability,
    ordered by smallest member."""
    n = len(q.vertices)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in q.all_edges:
        a, b = find(e.set1), find(e.set2)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [sorted(groups[r]) for r in sorted(groups)]


@dataclass
class PredictionEdge:
    comp1: int
    comp2: int
    weight: float
    set1: int
    vertex1: int
    set2: int
    vertex2: int
    predicate: int
    direction: int


@dataclass
class PredictionGraph:
    components: list[list[int]]
    edges: list[PredictionEdge]  # complete graph: r(r-1)/2 edges

    @property
    def r(self) -> int:
        return len(self.components)


def _candidate_vertices(q: QueryGraph, set_idx: int) -> list[int]:
    """Vertices prediction may use for one set: the chosen vertex when an
    assembled edge pinned it, the whole candidate set otherwise."""
    chosen = q.vertices[set_idx]
    constrained = any(set_idx in (e.set1, e.set2) for e in q.edges)
    if constrained or q.sets is None:
        return [] if chosen == FREE_VAR else [chosen]
    return [v for v in q.sets.vertex_sets[set_idx] if v != FREE_VAR]


def _component_vertices(q: QueryGraph, comp: list[int]) -> list[tuple[int, int]]:
    """(item id, set index) pairs usable as prediction endpoints, sorted by
    item id for deterministic tie breaks.  Free variables are skipped."""
    pairs = sorted(
        (v, i) for i in comp for v in _candidate_vertices(q, i)
    )
    if not pairs:
        raise ValueError("component has no concrete vertices to predict from")
    return pairs


def _best_bridge(table, predicates: np.ndarray, left, right):
    """Cheapest (v_i, v_j, p) over left x right x predicates.

    left/right are (item, set) pair lists sorted by item id; the flattened
    enumeration is lexicographic in (v_i, v_j, p), so taking the first
    minimum realizes the (vertex id, vertex id, predicate id) tie break.
    """
    np_ = len(predicates)
    v1 = np.repeat([v for v, _ in left], len(right) * np_)
    s1 = np.repeat([s for _, s in left], len(right) * np_)
    v2 = np.tile(np.repeat([v for v, _ in right], np_), len(left))
    s2 = np.tile(np.repeat([s for _, s in right], np_), len(left))
    pp = np.tile(predicates, len(left) * len(right))
    costs, dirs = kernels.pair_costs(table.vectors, v1, v2, pp)
    best = int(np.argmin(costs))
    return (
        float(costs[best]),
        int(s1[best]),
        int(v1[best]),
        int(s2[best]),
        int(v2[best]),
        int(pp[best]),
        int(dirs[best]),
    )


def build_prediction_graph(components, table, predicates, q: QueryGraph) -> PredictionGraph:
    """Weight every component pair with its cheapest cross-boundary triple.

    Ties break by (vertex id, vertex id, predicate id).
    """
    if len(components) < 2:
        raise ValueError("prediction needs at least two components")
    preds = np.array(sorted(predicates), dtype=np.int64)
    if len(preds) == 0:
        raise ValueError("empty predicate catalog")
    edges: list[PredictionEdge] = []
    for ci in range(len(components)):
        for cj in range(ci + 1, len(components)):
            w, s1, v1, s2, v2, p, direction = _best_bridge(
                table,
                preds,
                _component_vertices(q, components[ci]),
                _component_vertices(q, components[cj]),
            )
            edges.append(
                PredictionEdge(
                    comp1=ci,
                    comp2=cj,
                    weight=w,
                    set1=s1,
                    vertex1=v1,
                    set2=s2,
                    vertex2=v2,
                    predicate=p,
                    direction=direction,
                )
            )
    return PredictionGraph(components=components, edges=edges)


def minimum_spanning_tree(p: PredictionGraph) -> list[PredictionEdge]:
    """Kruskal over the component graph; ties by (weight, comp1, comp2)."""
    parent = list(range(p.r))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for e in sorted(p.edges, key=lambda e: (e.weight, e.comp1, e.comp2)):
        a, b = find(e.comp1), find(e.comp2)
        if a != b:
            parent[max(a, b)] = min(a, b)
            tree.append(e)
    return tree


def mst_connect(p: PredictionGraph, q: QueryGraph, table=None, predicates=None) -> QueryGraph:
    """Add the spanning tree's labels to q.predicted_edges; q ends connected.

    Tree edges are realized in acceptance order.  The first edge reaching a
    set whose vertex was not pinned by assembly fixes that set's vertex to
    the edge's argmin; later tree edges must respect earlier fixes, so their
    labels are recomputed with the fixed endpoints when the precomputed
    label disagrees (possible only when a component bridges two others).
    """
    fixed: dict[int, int] = {}
    for e in q.edges:
        fixed[e.set1] = e.vertex1
        fixed[e.set2] = e.vertex2

    preds = None
    if predicates is not None:
        preds = np.array(sorted(predicates), dtype=np.int64)

    def realize(e: PredictionEdge) -> PredictionEdge:
        clash = (e.set1 in fixed and fixed[e.set1] != e.vertex1) or (
            e.set2 in fixed and fixed[e.set2] != e.vertex2
        )
        if not clash:
            return e
        if table is None or preds is None:
            raise ValueError("cannot re-resolve a bridged prediction without the cost table")
        left = [(fixed[e.set1], e.set1)] if e.set1 in fixed else [
            (v, e.set1) for v in sorted(_candidate_vertices(q, e.set1))
        ]
        right = [(fixed[e.set2], e.set2)] if e.set2 in fixed else [
            (v, e.set2) for v in sorted(_candidate_vertices(q, e.set2))
        ]
        w, s1, v1, s2, v2, pp, direction = _best_bridge(table, preds, left, right)
        return PredictionEdge(e.comp1, e.comp2, w, s1, v1, s2, v2, pp, direction)

    for edge in minimum_spanning_tree(p):
        edge = realize(edge)
        fixed.setdefault(edge.set1, edge.vertex1)
        fixed.setdefault(edge.set2, edge.vertex2)
        q.vertices[edge.set1] = fixed[edge.set1]
        q.vertices[edge.set2] = fixed[edge.set2]
        q.predicted_edges.append(
            AssembledEdge(
                set1=edge.set1,
                vertex1=fixed[edge.set1],
                set2=edge.set2,
                vertex2=fixed[edge.set2],
                predicate=edge.predicate,
                direction=edge.direction,
                weight=edge.weight,
                predicted=True,
            )
        )
    return q


def predict_missing_relations(q: QueryGraph, table, predicates) -> QueryGraph:
    """Connect q if needed; a no-op on already-connected graphs."""
    components = connected_components(q)
    if len(components) < 2:
        return q
    graph = build_prediction_graph(components, table, predicates, q)
    return mst_connect(graph, q, table=table, predicates=predicates)
