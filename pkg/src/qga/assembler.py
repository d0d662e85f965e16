"""Query graph assembly: the condensed bipartite graph and its solver.

Assembling a query graph means choosing one vertex per candidate vertex set
and one predicate per candidate edge set, and wiring each chosen predicate to
a pair of chosen vertices at minimum total cost.  That is equivalent to a
minimum-cost size-m conflict-free matching on a bipartite graph whose left
nodes are vertex pairs and whose right nodes are the (condensed) edge sets.

The solver is a best-first branch and bound over partial matchings, with a
pluggable admissible lower bound (naive / km / greedy).  A brute-force
oracle, a 3-SAT reduction, and an exact-completion helper for auditing the
bounds live here as well.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .embedding import DIR_FORWARD, condensed_edge_weight
from .errors import ResourceLimitError

FREE_VAR = -1  # synthetic vertex standing for an untyped variable

BOUND_NAMES = ("naive", "km", "greedy")


@dataclass
class CandidateSets:
    """Candidate vertex sets and predicate edge sets, in term order.

    Items inside a set are unique and ordered best-first (as produced by
    Phase-I).  ``vertex_terms``/``edge_terms`` carry the originating terms
    for diagnostics; synthetic free-variable sets have ``None`` provenance.
    """

    vertex_sets: list[tuple[int, ...]]
    edge_sets: list[tuple[int, ...]]
    vertex_terms: list = field(default_factory=list)
    edge_terms: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.vertex_sets)

    @property
    def m(self) -> int:
        return len(self.edge_sets)


def build_candidate_sets(aq) -> CandidateSets:
    """Split an annotated query into vertex sets and edge sets.

    When relation terms are present but fewer than two vertex sets exist,
    synthetic free-variable sets are appended so the relations have a pair
    of endpoints to bind; a free variable costs nothing to wire.
    """
    if not aq.terms:
        raise ValueError("annotated query has no terms")
    vertex_sets: list[tuple[int, ...]] = []
    edge_sets: list[tuple[int, ...]] = []
    vertex_terms: list = []
    edge_terms: list = []
    for term in aq.terms:
        items = tuple(item for item, _ in term.candidates)
        if term.character == "relation":
            edge_sets.append(items)
            edge_terms.append(term)
        else:
            vertex_sets.append(items)
            vertex_terms.append(term)
    if edge_sets:
        while len(vertex_sets) < 2:
            vertex_sets.append((FREE_VAR,))
            vertex_terms.append(None)
    return CandidateSets(vertex_sets, edge_sets, vertex_terms, edge_terms)


@dataclass(frozen=True)
class CrossingEdge:
    """One admissible wiring: a vertex pair (left) and an edge set (right)."""

    index: int  # position in the weight-sorted edge list
    left: int  # left node index
    right: int  # edge set index
    set1: int
    vertex1: int
    set2: int
    vertex2: int
    weight: float
    best_p: int
    direction: int


def conflicts(e: CrossingEdge, f: CrossingEdge) -> bool:
    """Mutual exclusion between two crossing edges of the same graph:
    different vertices from a shared vertex set, a shared right node, or a
    shared left node."""
    if e.right == f.right:
        return True
    if e.left == f.left:
        return True
    for si, vi in ((e.set1, e.vertex1), (e.set2, e.vertex2)):
        for sj, vj in ((f.set1, f.vertex1), (f.set2, f.vertex2)):
            if si == sj and vi != vj:
                return True
    return False


@dataclass
class CondensedBipartiteGraph:
    sets: CandidateSets
    left_nodes: list[tuple[int, int, int, int]]  # (set1, vertex1, set2, vertex2)
    edges: list[CrossingEdge]  # sorted by (weight, left, right)
    weights: np.ndarray  # (E,) float64, nondecreasing
    rights: np.ndarray  # (E,) int64
    lefts: np.ndarray  # (E,) int64
    conflict: np.ndarray  # (E, E) bool

    @property
    def num_edge_sets(self) -> int:
        return self.sets.m


def _conflict_matrix(sets: CandidateSets, edges: list[CrossingEdge]) -> np.ndarray:
    ne = len(edges)
    rights = np.array([e.right for e in edges], dtype=np.int64)
    lefts = np.array([e.left for e in edges], dtype=np.int64)
    conf = rights[:, None] == rights[None, :]
    conf |= lefts[:, None] == lefts[None, :]
    # one value per vertex set; -1 marks "not constrained by this edge"
    assign = np.full((ne, sets.n), -1, dtype=np.int64)
    for idx, e in enumerate(edges):
        assign[idx, e.set1] = sets.vertex_sets[e.set1].index(e.vertex1)
        assign[idx, e.set2] = sets.vertex_sets[e.set2].index(e.vertex2)
    for i in range(sets.n):
        col = assign[:, i]
        bound = col >= 0
        conf |= (col[:, None] != col[None, :]) & bound[:, None] & bound[None, :]
    np.fill_diagonal(conf, False)
    return conf


def build_condensed_graph(sets: CandidateSets, cost_source) -> CondensedBipartiteGraph:
    """Materialize every vertex pair, weight every crossing edge, and sort.

    ``cost_source(set1, v1, set2, v2, j, predicates)`` must return
    ``(weight, best_predicate, direction)``.  Pairs involving a synthetic
    free variable are wired at zero cost with the first candidate predicate.
    """
    n, m = sets.n, sets.m
    if m >= 1 and n < 2:
        raise ValueError("need at least two vertex sets to place predicate edges")
    left_nodes: list[tuple[int, int, int, int]] = []
    for i1, i2 in itertools.combinations(range(n), 2):
        for v1 in sets.vertex_sets[i1]:
            for v2 in sets.vertex_sets[i2]:
                left_nodes.append((i1, v1, i2, v2))

    raw = []
    for left, (i1, v1, i2, v2) in enumerate(left_nodes):
        for j, predicates in enumerate(sets.edge_sets):
            if v1 == FREE_VAR or v2 == FREE_VAR:
                w, best_p, direction = 0.0, min(predicates), DIR_FORWARD
            else:
                w, best_p, direction = cost_source(i1, v1, i2, v2, j, predicates)
            raw.append((w, left, j, best_p, direction))
    raw.sort(key=lambda r: (r[0], r[1], r[2]))

    edges = []
    for index, (w, left, j, best_p, direction) in enumerate(raw):
        i1, v1, i2, v2 = left_nodes[left]
        edges.append(
            CrossingEdge(
                index=index,
                left=left,
                right=j,
                set1=i1,
                vertex1=v1,
                set2=i2,
                vertex2=v2,
                weight=w,
                best_p=best_p,
                direction=direction,
            )
        )
    weights = np.array([e.weight for e in edges], dtype=np.float64)
    rights = np.array([e.right for e in edges], dtype=np.int64)
    lefts = np.array([e.left for e in edges], dtype=np.int64)
    conflict = _conflict_matrix(sets, edges)
    return CondensedBipartiteGraph(
        sets=sets,
        left_nodes=left_nodes,
        edges=edges,
        weights=weights,
        rights=rights,
        lefts=lefts,
        conflict=conflict,
    )


def embedding_cost_source(table):
    def source(i1, v1, i2, v2, j, predicates):
        return condensed_edge_weight(table, v1, v2, predicates)

    return source


def table_cost_source(weight_table: dict):
    """Cost source backed by a dict keyed (set1, v1, set2, v2, j)."""

    def source(i1, v1, i2, v2, j, predicates):
        return weight_table[(i1, v1, i2, v2, j)]

    return source


# -- search states and lower bounds ----------------------------------------


@dataclass
class SearchState:
    """A partial matching plus the weight-sorted edges still compatible
    with it.  ``compatible`` only holds edges beyond the last matched one in
    the global sort order, so every matching is enumerated exactly once."""

    graph: CondensedBipartiteGraph
    matched: tuple[int, ...]
    compatible: np.ndarray
    cost: float
    lower_bound: float = 0.0


def naive_lb(state: SearchState, m: int) -> float:
    """cost(M) plus the (m - |M|) smallest compatible weights."""
    need = m - len(state.matched)
    if need <= 0:
        return state.cost
    z = state.compatible
    if len(z) < need:
        return math.inf
    return state.cost + float(state.graph.weights[z[:need]].sum())


def greedy_lb(state: SearchState, m: int) -> float:
    """cost(M) plus a greedy per-relation completion estimate.

    Scans the compatible edges in nondecreasing weight order keeping the
    first (cheapest) edge seen for each unmatched right node.  Every
    completion must spend at least that much per relation, so the bound is
    admissible; all vertex-side constraints are ignored, keeping it a
    single cheap pass.
    """
    need = m - len(state.matched)
    if need <= 0:
        return state.cost
    z = state.compatible
    if len(z) < need:
        return math.inf
    covered, first = np.unique(state.graph.rights[z], return_index=True)
    if len(covered) < need:
        return math.inf
    return state.cost + float(state.graph.weights[z[first]].sum())


def km_lb(state: SearchState, m: int) -> float:
    """cost(M) plus the exact min-weight assignment of unmatched right nodes
    to distinct left nodes, ignoring vertex-set exclusivity."""
    need = m - len(state.matched)
    if need <= 0:
        return state.cost
    z = state.compatible
    if len(z) < need:
        return math.inf
    graph = state.graph
    zr = graph.rights[z]
    zl = graph.lefts[z]
    zw = graph.weights[z]
    rows = np.unique(zr)
    if len(rows) < need:
        return math.inf
    cols = np.unique(zl)
    matrix = np.full((len(rows), len(cols)), math.inf)
    ri = np.searchsorted(rows, zr)
    ci = np.searchsorted(cols, zl)
    matrix[ri, ci] = zw
    _, total = hungarian_min_assignment(matrix)
    if total is None:
        return math.inf
    return state.cost + total


LOWER_BOUNDS = {"naive": naive_lb, "km": km_lb, "greedy": greedy_lb}


def hungarian_min_assignment(costs):
    """Exact minimum assignment of each row to a distinct column.

    Entries may be +inf (forbidden).  Returns (columns by row, total) or
    (None, None) when no feasible full-row assignment exists (including
    r > c matrices).
    """
    costs = np.asarray(costs, dtype=np.float64)
    if costs.ndim != 2:
        raise ValueError("cost matrix must be 2-dimensional")
    r, c = costs.shape
    if r == 0:
        return [], 0.0
    if r > c:
        return None, None
    try:
        rows, cols = linear_sum_assignment(costs)
    except ValueError:
        return None, None
    total = float(costs[rows, cols].sum())
    if not math.isfinite(total):
        return None, None
    order = np.argsort(rows)
    return [int(x) for x in cols[order]], total


# -- query graphs ------------------------------------------------------------


@dataclass
class AssembledEdge:
    set1: int
    vertex1: int
    set2: int
    vertex2: int
    predicate: int
    direction: int
    weight: float
    predicted: bool = False


@dataclass
class QueryGraph:
    """One chosen vertex per set plus the assembled (and later predicted)
    predicate edges."""

    vertices: list[int]
    edges: list[AssembledEdge]
    total_cost: float
    predicted_edges: list[AssembledEdge] = field(default_factory=list)
    sets: CandidateSets | None = None

    @property
    def all_edges(self) -> list[AssembledEdge]:
        return self.edges + self.predicted_edges

    @property
    def predicted_cost(self) -> float:
        return sum(e.weight for e in self.predicted_edges)


@dataclass
class SolveStats:
    """pushed = queue insertions (incl. the root); popped = expansions;
    pruned = dead children never pushed plus states left queued at cutoff."""

    states_pushed: int = 0
    states_popped: int = 0
    states_pruned: int = 0


def _graph_from_matched(graph: CondensedBipartiteGraph, matched: tuple[int, ...]) -> QueryGraph:
    sets = graph.sets
    chosen: list[int | None] = [None] * sets.n
    edges = []
    total = 0.0
    for idx in matched:
        e = graph.edges[idx]
        chosen[e.set1] = e.vertex1
        chosen[e.set2] = e.vertex2
        total = total + e.weight
        edges.append(
            AssembledEdge(
                set1=e.set1,
                vertex1=e.vertex1,
                set2=e.set2,
                vertex2=e.vertex2,
                predicate=e.best_p,
                direction=e.direction,
                weight=e.weight,
            )
        )
    for i in range(sets.n):
        if chosen[i] is None:
            chosen[i] = sets.vertex_sets[i][0]
    edges.sort(key=lambda e: (e.set1, e.set2, e.predicate))
    return QueryGraph(vertices=chosen, edges=edges, total_cost=total, sets=sets)


def solve_qga(
    graph: CondensedBipartiteGraph,
    bound: str = "greedy",
    state_hook=None,
):
    """Best-first branch and bound for the minimum-cost size-m matching.

    Returns ``(QueryGraph, stats)`` or ``(None, stats)`` when no size-m
    matching exists.  The priority queue orders states by lower bound
    (ties: cost, then more matched edges, then insertion order — deeper
    states first, so plateaus of equal bounds are explored depth-first);
    the search stops when the head's bound reaches the incumbent.
    ``state_hook`` is called with every popped state (used by the
    admissibility audit).
    """
    if bound not in LOWER_BOUNDS:
        raise ValueError(f"unknown bound {bound!r}, expected one of {BOUND_NAMES}")
    lb_fn = LOWER_BOUNDS[bound]
    m = graph.num_edge_sets
    stats = SolveStats()
    if m == 0:
        return _graph_from_matched(graph, ()), stats

    ne = len(graph.edges)
    weights = graph.weights
    conflict = graph.conflict
    root = SearchState(
        graph=graph,
        matched=(),
        compatible=np.arange(ne, dtype=np.int64),
        cost=0.0,
        lower_bound=0.0,
    )
    heap = [(0.0, 0.0, 0, 0, root)]
    seq = itertools.count(1)
    stats.states_pushed = 1
    theta = math.inf
    best: tuple[int, ...] | None = None

    while heap:
        lb, _, _, _, state = heapq.heappop(heap)
        stats.states_popped += 1
        if state_hook is not None:
            state_hook(state)
        if lb >= theta:
            break
        z = state.compatible
        depth = len(state.matched)
        for t in range(len(z)):
            e = int(z[t])
            new_cost = state.cost + float(weights[e])
            new_matched = state.matched + (e,)
            if depth + 1 == m:
                if new_cost < theta:
                    theta = new_cost
                    best = new_matched
                continue
            rest = z[t + 1 :]
            child_z = rest[~conflict[e, rest]]
            child = SearchState(
                graph=graph,
                matched=new_matched,
                compatible=child_z,
                cost=new_cost,
            )
            child.lower_bound = lb_fn(child, m)
            if math.isinf(child.lower_bound):
                stats.states_pruned += 1
                continue
            heapq.heappush(
                heap,
                (child.lower_bound, child.cost, -len(new_matched), next(seq), child),
            )
            stats.states_pushed += 1

    stats.states_pruned += len(heap)
    if best is None:
        return None, stats
    return _graph_from_matched(graph, best), stats


def optimal_completion_cost(graph: CondensedBipartiteGraph, state: SearchState, m: int) -> float:
    """Exact cheapest total cost reachable from ``state``; +inf when none.

    Brute force over the state's compatible edges, used to audit the lower
    bounds.
    """
    need = m - len(state.matched)
    if need <= 0:
        return state.cost
    weights = graph.weights
    conflict = graph.conflict
    best = math.inf

    def rec(z: np.ndarray, acc: float, left: int) -> None:
        nonlocal best
        if left == 0:
            if acc < best:
                best = acc
            return
        if len(z) < left:
            return
        for t in range(len(z) - left + 1):
            e = int(z[t])
            nxt = acc + float(weights[e])
            if nxt >= best:
                break  # weights ascending: later starts cost at least this
            rest = z[t + 1 :]
            rec(rest[~conflict[e, rest]], nxt, left - 1)

    rec(state.compatible, state.cost, need)
    return best


def brute_force_oracle(graph: CondensedBipartiteGraph, cap: int = 10_000_000):
    """Exhaustive optimum over vertex choices x injective pair assignments.

    Returns (cost, QueryGraph) or (math.inf, None) when infeasible.  Raises
    ResourceLimitError when the enumeration would exceed ``cap`` states.
    """
    sets = graph.sets
    n, m = sets.n, sets.m
    if m == 0:
        return 0.0, _graph_from_matched(graph, ())
    pair_sets = list(itertools.combinations(range(n), 2))
    space = 1
    for vs in sets.vertex_sets:
        space *= len(vs)
    perm_count = 1
    for i in range(m):
        perm_count *= max(len(pair_sets) - i, 0)
    space *= perm_count
    if space > cap:
        raise ResourceLimitError(f"oracle search space {space} exceeds cap {cap}")
    if m > len(pair_sets):
        return math.inf, None

    edge_by_pair: dict[tuple[int, int, int, int, int], CrossingEdge] = {}
    for e in graph.edges:
        edge_by_pair[(e.set1, e.vertex1, e.set2, e.vertex2, e.right)] = e

    best_cost = math.inf
    best_edges: tuple[CrossingEdge, ...] | None = None
    for combo in itertools.product(*sets.vertex_sets):
        for assignment in itertools.permutations(pair_sets, m):
            cost = 0.0
            edges = []
            for j, (i1, i2) in enumerate(assignment):
                e = edge_by_pair[(i1, combo[i1], i2, combo[i2], j)]
                cost += e.weight
                edges.append(e)
            if cost < best_cost:
                best_cost = cost
                best_edges = tuple(edges)

    if best_edges is None:
        return math.inf, None
    matched = tuple(sorted(e.index for e in best_edges))
    return best_cost, _graph_from_matched(graph, matched)


# -- 3-SAT reduction ---------------------------------------------------------


def reduce_3sat(num_vars: int, clauses) -> CondensedBipartiteGraph:
    """Encode a 3-CNF formula as an assembly instance.

    One vertex set {x, not-x} per variable, one singleton vertex set per
    clause, one singleton edge set per clause.  Wiring a clause's edge to
    (clause vertex, one of its literal vertices) costs 0; every other wiring
    costs 1.  The optimum is 0 iff the formula is satisfiable.
    """
    clauses = [tuple(c) for c in clauses]
    if num_vars < 1:
        raise ValueError("formula needs at least one variable")
    for c in clauses:
        if len(c) != 3:
            raise ValueError(f"clause {c!r} does not have exactly 3 literals")
        for lit in c:
            if lit == 0 or abs(lit) > num_vars:
                raise ValueError(f"literal {lit} out of range in clause {c!r}")

    q = len(clauses)

    def lit_vertex(lit: int) -> int:
        # variable i: positive literal 2(i-1), negative 2(i-1)+1
        return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)

    clause_vertex = [2 * num_vars + j for j in range(q)]
    predicate_id = [2 * num_vars + q + j for j in range(q)]

    vertex_sets = [(2 * i, 2 * i + 1) for i in range(num_vars)]
    vertex_sets += [(clause_vertex[j],) for j in range(q)]
    edge_sets = [(predicate_id[j],) for j in range(q)]
    sets = CandidateSets(
        vertex_sets,
        edge_sets,
        vertex_terms=[None] * (num_vars + q),
        edge_terms=[None] * q,
    )

    zero_pairs = {
        (min(lit_vertex(lit), clause_vertex[j]), max(lit_vertex(lit), clause_vertex[j]), j)
        for j, clause in enumerate(clauses)
        for lit in clause
    }

    def source(i1, v1, i2, v2, j, predicates):
        key = (min(v1, v2), max(v1, v2), j)
        w = 0.0 if key in zero_pairs else 1.0
        return w, predicates[0], DIR_FORWARD

    return build_condensed_graph(sets, source)
